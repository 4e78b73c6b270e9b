/**
 * Single-page annotation flow: one article at a time, up to 50 comment rows,
 * each with the hierarchical form (hateful? then call-to-action + attacked
 * characteristics). The outlet tweet stays visible, the article body is
 * collapsed by default. Keyboard: focus a row and press "h" (hateful) or
 * "n" (not hateful, submits in one step).
 */

import { ApiClient, ApiError, type AnnotationApi } from "./api.js";
import {
  buildRecord,
  canSubmit,
  initialRow,
  reduceRow,
  type RowEvent,
  type RowState,
} from "./formState.js";
import {
  CHARACTERISTIC_LABELS,
  CHARACTERISTICS,
  type Characteristic,
  type TaskPayload,
} from "./types.js";

type View = "loading" | "task" | "idle" | "connection_error";

export interface AppOptions {
  /** injectable for tests; defaults to window.confirm */
  confirmFn?: (message: string) => boolean;
}

export class AnnotationApp {
  private view: View = "loading";
  private task: TaskPayload | null = null;
  private rows = new Map<string, RowState>();
  private submitted = 0;
  private lastError = "";
  private readonly confirmFn: (message: string) => boolean;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: AnnotationApi,
    private readonly annotatorId: string,
    options: AppOptions = {},
  ) {
    this.confirmFn =
      options.confirmFn ?? ((message) => globalThis.confirm?.(message) ?? true);
  }

  /** Test hook: current state of one row. */
  rowState(commentId: string): RowState | undefined {
    return this.rows.get(commentId);
  }

  get currentView(): View {
    return this.view;
  }

  async start(): Promise<void> {
    await this.loadNextTask();
  }

  async loadNextTask(): Promise<void> {
    this.view = "loading";
    this.render();
    try {
      const task = await this.api.nextTask(this.annotatorId);
      this.task = task;
      this.rows = new Map(
        (task?.comments ?? []).map((c) => [c.comment_id, initialRow(c.comment_id)]),
      );
      this.submitted = task?.progress.done ?? 0;
      this.view = task ? "task" : "idle";
    } catch (error) {
      this.lastError = error instanceof Error ? error.message : String(error);
      this.view = "connection_error";
    }
    this.render();
  }

  private dispatch(commentId: string, event: RowEvent): void {
    const row = this.rows.get(commentId);
    if (!row) return;
    this.rows.set(commentId, reduceRow(row, event));
  }

  private async submitRow(commentId: string): Promise<void> {
    const row = this.rows.get(commentId);
    if (!row || !canSubmit(row)) return;
    this.dispatch(commentId, { kind: "submit_started" });
    this.render();
    const submitting = this.rows.get(commentId)!;
    try {
      await this.api.submitAnnotation(buildRecord(submitting, this.annotatorId));
      const wasDone = row.status === "done";
      this.dispatch(commentId, { kind: "submit_succeeded" });
      if (!wasDone) this.submitted += 1;
    } catch (error) {
      const message =
        error instanceof ApiError ? error.detail : "sin conexión, reintentá";
      this.dispatch(commentId, { kind: "submit_failed", message });
    }
    this.render();
  }

  private async markNotHateful(commentId: string): Promise<void> {
    // "no odioso" needs no sub-answers: selecting it submits in one step
    this.dispatch(commentId, { kind: "select_hateful", value: false });
    await this.submitRow(commentId);
  }

  private async skipCurrentArticle(): Promise<void> {
    if (!this.task) return;
    const unsaved = [...this.rows.values()].some(
      (row) => row.dirty && row.status !== "done",
    );
    if (unsaved && !this.confirmFn("Hay filas sin guardar. ¿Saltear igual?")) {
      return;
    }
    try {
      await this.api.skipArticle(this.annotatorId, this.task.article.article_id);
    } catch (error) {
      this.lastError = error instanceof Error ? error.message : String(error);
      this.view = "connection_error";
      this.render();
      return;
    }
    await this.loadNextTask();
  }

  // -- rendering -----------------------------------------------------------

  private render(): void {
    const focused = document.activeElement as HTMLElement | null;
    const focusKey = focused?.closest?.("[data-comment-id]")?.getAttribute("data-comment-id");
    this.root.innerHTML = "";
    switch (this.view) {
      case "loading":
        this.root.appendChild(el("p", { class: "status" }, "Cargando…"));
        return;
      case "idle":
        this.root.appendChild(
          el("div", { class: "idle" }, el("h2", {}, "No hay tareas pendientes"),
             el("p", {}, "Volvé a intentar más tarde.")),
        );
        return;
      case "connection_error": {
        const retry = el("button", { class: "retry" }, "Reintentar");
        retry.addEventListener("click", () => void this.loadNextTask());
        this.root.appendChild(
          el("div", { class: "error-screen" },
             el("h2", {}, "Error de conexión"),
             el("p", {}, this.lastError), retry),
        );
        return;
      }
      case "task":
        this.renderTask();
        if (focusKey) {
          const again = this.root.querySelector<HTMLElement>(
            `[data-comment-id="${focusKey}"]`,
          );
          again?.focus();
        }
        return;
    }
  }

  private renderTask(): void {
    const task = this.task!;
    const header = el(
      "header",
      { class: "article" },
      el("p", { class: "outlet" }, task.article.outlet),
      el("h2", { class: "tweet" }, task.article.tweet_text),
    );
    if (task.article.body.trim()) {
      const details = el("details", { class: "article-body" });
      details.appendChild(el("summary", {}, "Ver nota completa"));
      details.appendChild(el("p", {}, task.article.body));
      header.appendChild(details); // collapsed by default
    }

    const total = this.rows.size;
    const progress = el(
      "p",
      { class: "progress" },
      `${Math.min(this.submitted, total)} / ${total} comentarios`,
    );
    if (task.pass === "THIRD") {
      progress.appendChild(el("span", { class: "pass-badge" }, " · tercera pasada"));
    }

    const skip = el("button", { class: "skip" }, "Saltear artículo");
    skip.addEventListener("click", () => void this.skipCurrentArticle());

    const list = el("ul", { class: "comments" });
    for (const comment of task.comments) {
      list.appendChild(this.renderRow(comment.comment_id, comment.text));
    }

    const toolbar = el("div", { class: "toolbar" }, progress, skip);
    if (this.submitted >= total && total > 0) {
      const next = el("button", { class: "next" }, "Siguiente artículo");
      next.addEventListener("click", () => void this.loadNextTask());
      toolbar.appendChild(next);
    }
    this.root.append(header, toolbar, list);
  }

  private renderRow(commentId: string, text: string): HTMLElement {
    const state = this.rows.get(commentId)!;
    const row = el("li", {
      class: `comment-row status-${state.status}`,
      "data-comment-id": commentId,
      tabindex: "0",
    });
    row.addEventListener("keydown", (event) => {
      const key = (event as KeyboardEvent).key?.toLowerCase();
      if (key === "h") void this.onHateful(commentId);
      if (key === "n") void this.markNotHateful(commentId);
    });

    row.appendChild(el("p", { class: "comment-text" }, text));

    const yes = el(
      "button",
      {
        class: `hateful-btn${state.hateful === true ? " selected" : ""}`,
        "data-action": "hateful",
      },
      "Odioso (h)",
    );
    yes.addEventListener("click", () => void this.onHateful(commentId));
    const no = el(
      "button",
      {
        class: `not-hateful-btn${state.hateful === false ? " selected" : ""}`,
        "data-action": "not-hateful",
      },
      "No odioso (n)",
    );
    no.addEventListener("click", () => void this.markNotHateful(commentId));
    row.appendChild(el("div", { class: "verdict" }, yes, no));

    if (state.hateful === true) {
      row.appendChild(this.renderSubQuestions(commentId, state));
    }

    if (state.status === "done") {
      row.appendChild(el("span", { class: "done-mark" }, "✓ guardado"));
    }
    if (state.status === "error" && state.error) {
      row.appendChild(el("p", { class: "error-banner", role: "alert" }, state.error));
    }
    return row;
  }

  private renderSubQuestions(commentId: string, state: RowState): HTMLElement {
    const box = el("div", { class: "sub-questions" });

    const characteristics = el("fieldset", { class: "characteristics" });
    characteristics.appendChild(
      el("legend", {}, "¿Contra qué característica ataca? (al menos una)"),
    );
    for (const characteristic of CHARACTERISTICS) {
      const checkbox = el("input", {
        type: "checkbox",
        "data-characteristic": characteristic,
      }) as HTMLInputElement;
      checkbox.checked = state.characteristics.includes(characteristic);
      checkbox.addEventListener("change", () => {
        this.dispatch(commentId, {
          kind: "toggle_characteristic",
          value: characteristic as Characteristic,
        });
        this.render();
      });
      characteristics.appendChild(
        el("label", { class: "char-option" }, checkbox,
           ` ${CHARACTERISTIC_LABELS[characteristic]}`),
      );
    }
    box.appendChild(characteristics);

    const calls = el("input", { type: "checkbox", "data-action": "calls" }) as HTMLInputElement;
    calls.checked = state.callsToAction;
    calls.addEventListener("change", () => {
      this.dispatch(commentId, { kind: "set_calls", value: calls.checked });
      this.render();
    });
    box.appendChild(
      el("label", { class: "calls-option" }, calls, " Llama a la acción violenta"),
    );

    const save = el(
      "button",
      { class: "save-btn", "data-action": "save" },
      state.status === "submitting" ? "Guardando…" : "Guardar",
    ) as HTMLButtonElement;
    save.disabled = !canSubmit(state);
    save.addEventListener("click", () => void this.submitRow(commentId));
    box.appendChild(save);
    return box;
  }

  private async onHateful(commentId: string): Promise<void> {
    this.dispatch(commentId, { kind: "select_hateful", value: true });
    this.render();
  }
}

function el(
  tag: string,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

/** Entry point for index.html. */
export function mount(root: HTMLElement, baseUrl: string, annotatorId: string): AnnotationApp {
  const app = new AnnotationApp(root, new ApiClient(baseUrl), annotatorId);
  void app.start();
  return app;
}
