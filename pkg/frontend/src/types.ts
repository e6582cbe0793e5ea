export const CRITERIA = [
  "inflection",
  "word_order",
  "lexical_choice",
  "semantic_coherence",
] as const;

export type Criterion = (typeof CRITERIA)[number];

export interface Candidate {
  record_id: string;
  en_text: string;
  ang_text: string;
  flags: string[];
  style_example_ids: string[];
  review_state: string;
  provenance: string;
}

export interface CandidatePage {
  total: number;
  page: number;
  page_size: number;
  candidates: Candidate[];
}

export interface ReviewSubmission {
  record_id: string;
  reviewer: string;
  inflection: number;
  word_order: number;
  lexical_choice: number;
  semantic_coherence: number;
  comment?: string;
}

export interface GateDecision {
  record_id: string;
  decision: "accepted" | "rejected";
  average: number;
  threshold: number;
}

export interface Stats {
  inflection: number;
  word_order: number;
  lexical_choice: number;
  semantic_coherence: number;
  overall: number;
  review_count: number;
}
