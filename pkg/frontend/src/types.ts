/** Shared wire types for the annotation API. */

export const CHARACTERISTICS = [
  "WOMEN",
  "LGBTI",
  "RACISM",
  "CLASS",
  "POLITICS",
  "APPEARANCE",
  "CRIMINAL",
  "DISABLED",
] as const;

export type Characteristic = (typeof CHARACTERISTICS)[number];

/** Human-readable labels shown next to each characteristic checkbox. */
export const CHARACTERISTIC_LABELS: Record<Characteristic, string> = {
  WOMEN: "Mujeres",
  LGBTI: "LGBTI",
  RACISM: "Racismo / xenofobia",
  CLASS: "Clase social",
  POLITICS: "Política",
  APPEARANCE: "Aspecto físico",
  CRIMINAL: "Personas en conflicto con la ley",
  DISABLED: "Discapacidad / salud mental",
};

export interface ArticlePayload {
  article_id: string;
  outlet: string;
  tweet_text: string;
  body: string;
  url?: string;
  published_at?: string;
}

export interface CommentPayload {
  comment_id: string;
  text: string;
}

export interface TaskPayload {
  article: ArticlePayload;
  comments: CommentPayload[];
  pass: "FIRST" | "THIRD";
  progress: { done: number; total: number };
}

/** Body of POST /annotations; non-hateful records carry no sub-labels. */
export interface AnnotationPayload {
  annotator_id: string;
  comment_id: string;
  hateful: boolean;
  calls_to_action: boolean | null;
  characteristics: Characteristic[];
}

export interface GoldPayload {
  comment_id: string;
  hateful: boolean;
  calls_to_action: boolean;
  characteristics: string[];
  labels: number[];
}
