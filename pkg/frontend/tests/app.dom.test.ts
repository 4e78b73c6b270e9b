import { beforeEach, describe, expect, it } from "vitest";

import { ApiError, type AnnotationApi } from "../src/api.js";
import { AnnotationApp } from "../src/app.js";
import type { AnnotationPayload, TaskPayload } from "../src/types.js";

function task(nComments: number, overrides: Partial<TaskPayload> = {}): TaskPayload {
  return {
    article: {
      article_id: "a1",
      outlet: "@diario",
      tweet_text: "titular de la nota",
      body: "cuerpo largo de la nota",
    },
    comments: Array.from({ length: nComments }, (_, i) => ({
      comment_id: `c${i}`,
      text: `comentario ${i}`,
    })),
    pass: "FIRST",
    progress: { done: 0, total: nComments },
    ...overrides,
  };
}

class FakeApi implements AnnotationApi {
  tasks: (TaskPayload | null)[] = [];
  submitted: AnnotationPayload[] = [];
  skips: Array<[string, string]> = [];
  nextError: Error | null = null;

  async nextTask() {
    return this.tasks.shift() ?? null;
  }

  async submitAnnotation(record: AnnotationPayload) {
    if (this.nextError) {
      const error = this.nextError;
      this.nextError = null;
      throw error;
    }
    this.submitted.push(record);
  }

  async skipArticle(annotatorId: string, articleId: string) {
    this.skips.push([annotatorId, articleId]);
  }
}

async function flush() {
  await new Promise((resolve) => setTimeout(resolve, 0));
}

let root: HTMLElement;
let api: FakeApi;

beforeEach(() => {
  document.body.innerHTML = "";
  root = document.createElement("main");
  document.body.appendChild(root);
  api = new FakeApi();
});

function q<T extends Element>(selector: string): T {
  const node = root.querySelector<T>(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node;
}

function row(commentId: string): HTMLElement {
  return q(`[data-comment-id="${commentId}"]`);
}

function click(selector: string, scope: Element = root) {
  const node = scope.querySelector<HTMLElement>(selector);
  if (!node) throw new Error(`missing clickable ${selector}`);
  node.click();
}

describe("task rendering", () => {
  it("renders the article context and every comment row", async () => {
    api.tasks = [task(3)];
    const app = new AnnotationApp(root, api, "ana");
    await app.start();
    expect(root.querySelectorAll(".comment-row")).toHaveLength(3);
    expect(q(".tweet").textContent).toContain("titular");
    expect(q(".progress").textContent).toContain("0 / 3");
  });

  it("renders twelve rows for a twelve-comment article", async () => {
    api.tasks = [task(12)];
    const app = new AnnotationApp(root, api, "ana");
    await app.start();
    expect(root.querySelectorAll(".comment-row")).toHaveLength(12);
  });

  it("keeps the tweet visible and the body collapsed by default", async () => {
    api.tasks = [task(1)];
    const app = new AnnotationApp(root, api, "ana");
    await app.start();
    const details = q<HTMLDetailsElement>("details.article-body");
    expect(details.hasAttribute("open")).toBe(false);
    expect(q(".tweet").textContent).toBe("titular de la nota");
  });

  it("shows the idle screen without a skip button when the queue is empty", async () => {
    const app = new AnnotationApp(root, api, "ana");
    await app.start();
    expect(app.currentView).toBe("idle");
    expect(root.textContent).toContain("No hay tareas pendientes");
    expect(root.querySelector(".skip")).toBeNull();
  });

  it("shows a retry screen when the backend is unreachable", async () => {
    const failing: AnnotationApi = {
      nextTask: async () => {
        throw new Error("network down");
      },
      submitAnnotation: async () => {},
      skipArticle: async () => {},
    };
    const app = new AnnotationApp(root, failing, "ana");
    await app.start();
    expect(app.currentView).toBe("connection_error");
    expect(root.querySelector(".retry")).not.toBeNull();
  });
});

describe("submitting judgments", () => {
  it("non-hateful is a one-click submit with no sub-questions", async () => {
    api.tasks = [task(2)];
    const app = new AnnotationApp(root, api, "ana");
    await app.start();
    expect(row("c0").querySelector(".sub-questions")).toBeNull();
    click('[data-action="not-hateful"]', row("c0"));
    await flush();
    expect(api.submitted).toEqual([
      {
        annotator_id: "ana",
        comment_id: "c0",
        hateful: false,
        calls_to_action: null,
        characteristics: [],
      },
    ]);
    expect(row("c0").classList.contains("status-done")).toBe(true);
    expect(q(".progress").textContent).toContain("1 / 2");
  });

  it("hateful opens sub-questions and disables save until a characteristic is picked", async () => {
    api.tasks = [task(1)];
    const app = new AnnotationApp(root, api, "ana");
    await app.start();
    click('[data-action="hateful"]', row("c0"));
    await flush();
    const save = row("c0").querySelector<HTMLButtonElement>('[data-action="save"]');
    expect(save).not.toBeNull();
    expect(save!.disabled).toBe(true);

    const checkbox = row("c0").querySelector<HTMLInputElement>(
      '[data-characteristic="RACISM"]',
    )!;
    checkbox.click();
    await flush();
    expect(
      row("c0").querySelector<HTMLButtonElement>('[data-action="save"]')!.disabled,
    ).toBe(false);

    click('[data-action="calls"]', row("c0"));
    await flush();
    click('[data-action="save"]', row("c0"));
    await flush();
    expect(api.submitted).toHaveLength(1);
    expect(api.submitted[0]).toMatchObject({
      hateful: true,
      calls_to_action: true,
      characteristics: ["RACISM"],
    });
  });

  it("a server rejection shows an inline banner and preserves the form", async () => {
    api.tasks = [task(1)];
    api.nextError = new ApiError(422, "registro inválido");
    const app = new AnnotationApp(root, api, "ana");
    await app.start();
    click('[data-action="hateful"]', row("c0"));
    await flush();
    row("c0").querySelector<HTMLInputElement>('[data-characteristic="CLASS"]')!.click();
    await flush();
    click('[data-action="save"]', row("c0"));
    await flush();

    expect(q(".error-banner").textContent).toBe("registro inválido");
    const checkbox = row("c0").querySelector<HTMLInputElement>(
      '[data-characteristic="CLASS"]',
    )!;
    expect(checkbox.checked).toBe(true); // form content retained
    expect(app.rowState("c0")!.status).toBe("error");
    expect(q(".progress").textContent).toContain("0 / 1");

    click('[data-action="save"]', row("c0")); // retry succeeds
    await flush();
    expect(api.submitted).toHaveLength(1);
    expect(app.rowState("c0")!.status).toBe("done");
  });

  it("resubmitting a row does not double-count progress", async () => {
    api.tasks = [task(1)];
    const app = new AnnotationApp(root, api, "ana");
    await app.start();
    click('[data-action="not-hateful"]', row("c0"));
    await flush();
    click('[data-action="not-hateful"]', row("c0"));
    await flush();
    expect(api.submitted).toHaveLength(2); // replacement semantics server-side
    expect(q(".progress").textContent).toContain("1 / 1");
  });
});

describe("keyboard shortcuts", () => {
  function press(target: HTMLElement, key: string) {
    target.dispatchEvent(new KeyboardEvent("keydown", { key, bubbles: true }));
  }

  it("h marks hateful, n submits non-hateful", async () => {
    api.tasks = [task(2)];
    const app = new AnnotationApp(root, api, "ana");
    await app.start();
    press(row("c0"), "h");
    await flush();
    expect(row("c0").querySelector(".sub-questions")).not.toBeNull();

    press(row("c1"), "n");
    await flush();
    expect(api.submitted).toHaveLength(1);
    expect(api.submitted[0]!.comment_id).toBe("c1");
  });
});

describe("skipping", () => {
  it("skips cleanly when nothing is unsaved", async () => {
    api.tasks = [task(2), null];
    let confirmCalls = 0;
    const app = new AnnotationApp(root, api, "ana", {
      confirmFn: () => {
        confirmCalls += 1;
        return true;
      },
    });
    await app.start();
    click(".skip");
    await flush();
    expect(confirmCalls).toBe(0);
    expect(api.skips).toEqual([["ana", "a1"]]);
    expect(app.currentView).toBe("idle");
  });

  it("asks for confirmation when rows are edited but unsaved", async () => {
    api.tasks = [task(2)];
    const app = new AnnotationApp(root, api, "ana", { confirmFn: () => false });
    await app.start();
    click('[data-action="hateful"]', row("c0"));
    await flush();
    click(".skip");
    await flush();
    expect(api.skips).toHaveLength(0); // declined; still on the task
    expect(app.currentView).toBe("task");
  });

  it("loads the next task after an accepted skip", async () => {
    const second = task(1, {
      article: {
        article_id: "a2",
        outlet: "@diario",
        tweet_text: "otro titular",
        body: "otro cuerpo",
      },
    });
    api.tasks = [task(2), second];
    const app = new AnnotationApp(root, api, "ana", { confirmFn: () => true });
    await app.start();
    click('[data-action="hateful"]', row("c0"));
    await flush();
    click(".skip");
    await flush();
    expect(api.skips).toEqual([["ana", "a1"]]);
    expect(q(".tweet").textContent).toBe("otro titular");
  });
});
