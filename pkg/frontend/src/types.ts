/** Shapes of the session API payloads, mirrored field for field. */

export interface SessionCreated {
  session_id: string;
  strategy: string;
  k: number;
}

export interface QuestionPayload {
  dimension: string;
  distribution_context: string;
  question_text: string;
}

export interface GridItem {
  id: string;
  score: number;
  rank: number;
  attributes: Record<string, string | number | null>;
}

export interface GridRow {
  label: string;
  items: GridItem[];
}

export interface GridPayload {
  dimension: string | null;
  rows: GridRow[];
}

export interface DimensionEntropy {
  dimension: string;
  raw_bits: number;
  normalized: number;
  distinct_values: number;
}

export interface EntropyDebug {
  dimensions: DimensionEntropy[];
  distributions: Record<string, { counts: Record<string, number>; total: number }>;
}

export interface ItemDetail {
  description: string;
  pros: string[];
  cons: string[];
  matched_likes: string[];
}

export interface MessageResponse {
  type: "question" | "recommendations";
  relaxed: string[];
  candidate_count: number;
  question?: QuestionPayload;
  grid?: GridPayload;
  items_detail?: Record<string, ItemDetail>;
  entropy_debug?: EntropyDebug;
}

export interface SessionSnapshot {
  session_id: string;
  strategy: string;
  max_questions: number;
  filters: Record<string, unknown>;
  liked: string[];
  disliked: string[];
  patience: string;
  asked_dimensions: string[];
  questions_asked: number;
  phase: string;
}

export interface SchemaDimension {
  name: string;
  kind: string;
  unit: string | null;
  relaxation_rank: number;
  question_label: string;
}

export interface SchemaResponse {
  dimensions: SchemaDimension[];
}
