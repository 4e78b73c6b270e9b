/**
 * Form state machine for one comment row.
 *
 * The hierarchy is enforced structurally: the call-to-action and
 * characteristic events are no-ops unless the row is marked hateful, marking
 * a row non-hateful wipes both sub-answers, and `buildRecord` refuses any
 * state that `canSubmit` rejects. Whatever sequence of events the UI (or a
 * property test) fires, no constructible record can violate the hierarchy.
 */

import type { AnnotationPayload, Characteristic } from "./types.js";

export type RowStatus = "editing" | "submitting" | "done" | "error";

export interface RowState {
  readonly commentId: string;
  /** null until the annotator answers the top question */
  readonly hateful: boolean | null;
  readonly callsToAction: boolean;
  readonly characteristics: readonly Characteristic[];
  readonly status: RowStatus;
  readonly error: string | null;
  /** edited since the last successful submission */
  readonly dirty: boolean;
}

export type RowEvent =
  | { kind: "select_hateful"; value: boolean }
  | { kind: "toggle_characteristic"; value: Characteristic }
  | { kind: "set_calls"; value: boolean }
  | { kind: "submit_started" }
  | { kind: "submit_succeeded" }
  | { kind: "submit_failed"; message: string };

export function initialRow(commentId: string): RowState {
  return {
    commentId,
    hateful: null,
    callsToAction: false,
    characteristics: [],
    status: "editing",
    error: null,
    dirty: false,
  };
}

export function canSubmit(state: RowState): boolean {
  if (state.status === "submitting") return false;
  if (state.hateful === null) return false;
  if (state.hateful) return state.characteristics.length >= 1;
  return true;
}

export function reduceRow(state: RowState, event: RowEvent): RowState {
  switch (event.kind) {
    case "select_hateful": {
      if (event.value) {
        return {
          ...state,
          hateful: true,
          status: "editing",
          error: null,
          dirty: true,
        };
      }
      // answering "not hateful" clears every sub-answer
      return {
        ...state,
        hateful: false,
        callsToAction: false,
        characteristics: [],
        status: "editing",
        error: null,
        dirty: true,
      };
    }
    case "toggle_characteristic": {
      if (state.hateful !== true || state.status === "submitting") return state;
      const present = state.characteristics.includes(event.value);
      const characteristics = present
        ? state.characteristics.filter((c) => c !== event.value)
        : [...state.characteristics, event.value];
      return { ...state, characteristics, status: "editing", error: null, dirty: true };
    }
    case "set_calls": {
      if (state.hateful !== true || state.status === "submitting") return state;
      return {
        ...state,
        callsToAction: event.value,
        status: "editing",
        error: null,
        dirty: true,
      };
    }
    case "submit_started": {
      if (!canSubmit(state)) return state;
      return { ...state, status: "submitting", error: null };
    }
    case "submit_succeeded": {
      if (state.status !== "submitting") return state;
      return { ...state, status: "done", error: null, dirty: false };
    }
    case "submit_failed": {
      if (state.status !== "submitting") return state;
      // the form content is preserved; only the status changes
      return { ...state, status: "error", error: event.message };
    }
  }
}

/** The only way a record leaves the form. Throws on invalid states. */
export function buildRecord(state: RowState, annotatorId: string): AnnotationPayload {
  if (!canSubmit(state) && state.status !== "submitting") {
    throw new Error(`row ${state.commentId} is not submittable`);
  }
  if (state.hateful === null) {
    throw new Error(`row ${state.commentId} has no judgment yet`);
  }
  if (state.hateful) {
    if (state.characteristics.length === 0) {
      throw new Error(`row ${state.commentId}: hateful needs a characteristic`);
    }
    return {
      annotator_id: annotatorId,
      comment_id: state.commentId,
      hateful: true,
      calls_to_action: state.callsToAction,
      characteristics: [...state.characteristics],
    };
  }
  return {
    annotator_id: annotatorId,
    comment_id: state.commentId,
    hateful: false,
    calls_to_action: null,
    characteristics: [],
  };
}
