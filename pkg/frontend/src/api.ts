/** Typed client for the annotation backend; the UI's only data source. */

import type { AnnotationPayload, GoldPayload, TaskPayload } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    return JSON.stringify(body.detail ?? body);
  } catch {
    return response.statusText;
  }
}

/** What the app needs from the backend; ApiClient is the HTTP implementation. */
export interface AnnotationApi {
  nextTask(annotatorId: string): Promise<TaskPayload | null>;
  submitAnnotation(record: AnnotationPayload): Promise<void>;
  skipArticle(annotatorId: string, articleId: string): Promise<void>;
}

export class ApiClient implements AnnotationApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return response;
  }

  async nextTask(annotatorId: string): Promise<TaskPayload | null> {
    const response = await this.request(
      `/tasks/next?annotator=${encodeURIComponent(annotatorId)}`,
    );
    const body = (await response.json()) as { task: TaskPayload | null };
    return body.task;
  }

  async submitAnnotation(record: AnnotationPayload): Promise<void> {
    await this.request("/annotations", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(record),
    });
  }

  async skipArticle(annotatorId: string, articleId: string): Promise<void> {
    await this.request("/skip", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ annotator_id: annotatorId, article_id: articleId }),
    });
  }

  async gold(): Promise<GoldPayload[]> {
    const response = await this.request("/gold");
    const body = (await response.json()) as { gold: GoldPayload[] };
    return body.gold;
  }

  async agreement(): Promise<Record<string, unknown>> {
    return (await this.request("/agreement")).json() as Promise<Record<string, unknown>>;
  }

  async stats(): Promise<Record<string, unknown>> {
    return (await this.request("/stats")).json() as Promise<Record<string, unknown>>;
  }
}
