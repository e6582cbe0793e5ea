import { ReviewApi } from "./api.js";
import {
  draftComplete,
  emptyDraft,
  formatAverage,
  liveAverage,
  parseScoreInput,
  type ScoreDraft,
} from "./scoring.js";
import type { Candidate, Criterion, GateDecision, Stats } from "./types.js";

/**
 * View-model for the review queue: all state transitions live here so the
 * DOM layer stays a thin render function and the behavior is testable
 * without a browser.
 */
export class ReviewController {
  draft: ScoreDraft = emptyDraft();
  reviewer = "";
  comment = "";
  candidates: Candidate[] = [];
  index = 0;
  total = 0;
  lastDecision: GateDecision | null = null;
  error: string | null = null;

  constructor(private readonly api: ReviewApi) {}

  get current(): Candidate | null {
    return this.candidates[this.index] ?? null;
  }

  async load(page = 1): Promise<void> {
    const data = await this.api.candidates("unreviewed", page);
    this.candidates = data.candidates;
    this.total = data.total;
    this.index = 0;
    this.resetForm();
  }

  resetForm(): void {
    this.draft = emptyDraft();
    this.comment = "";
    this.lastDecision = null;
    this.error = null;
  }

  setScore(criterion: Criterion, raw: string): void {
    this.draft[criterion] = parseScoreInput(raw);
  }

  /** Submit stays disabled until every criterion holds a valid score. */
  get canSubmit(): boolean {
    return (
      draftComplete(this.draft) &&
      this.reviewer.trim() !== "" &&
      this.current !== null
    );
  }

  /** Client-side preview; replaced by the server figure after submit. */
  get averagePreview(): string {
    const avg = liveAverage(this.draft);
    return avg === null ? "—" : formatAverage(avg);
  }

  /** The decision line shows exactly what the server returned. */
  get decisionText(): string | null {
    if (this.lastDecision === null) return null;
    const d = this.lastDecision;
    return `${d.decision} (average ${d.average} vs threshold ${d.threshold})`;
  }

  async submit(): Promise<void> {
    const candidate = this.current;
    if (!this.canSubmit || candidate === null) {
      throw new Error("submit called while the form is incomplete");
    }
    this.error = null;
    try {
      this.lastDecision = await this.api.submitReview({
        record_id: candidate.record_id,
        reviewer: this.reviewer.trim(),
        inflection: this.draft.inflection as number,
        word_order: this.draft.word_order as number,
        lexical_choice: this.draft.lexical_choice as number,
        semantic_coherence: this.draft.semantic_coherence as number,
        comment: this.comment.trim() || undefined,
      });
    } catch (err) {
      this.error = err instanceof Error ? err.message : String(err);
      throw err;
    }
  }

  advance(): void {
    if (this.index < this.candidates.length - 1) {
      this.index += 1;
    } else {
      this.candidates = [];
      this.index = 0;
    }
    this.resetForm();
  }
}

export interface StatsRow {
  label: string;
  value: string;
}

export function statsRows(stats: Stats): StatsRow[] {
  return [
    { label: "Inflection", value: stats.inflection.toFixed(1) },
    { label: "Word order", value: stats.word_order.toFixed(1) },
    { label: "Lexical choice", value: stats.lexical_choice.toFixed(1) },
    { label: "Semantic coherence", value: stats.semantic_coherence.toFixed(1) },
    { label: "Overall", value: stats.overall.toFixed(3) },
    { label: "Reviews", value: String(stats.review_count) },
  ];
}
