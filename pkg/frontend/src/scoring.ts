import { CRITERIA, type Criterion } from "./types.js";

/** Scores live here as the reviewer types: null until a valid value is set. */
export type ScoreDraft = Record<Criterion, number | null>;

export function emptyDraft(): ScoreDraft {
  return {
    inflection: null,
    word_order: null,
    lexical_choice: null,
    semantic_coherence: null,
  };
}

/** A score is valid when it is a half-point step in [0, 10]. */
export function isValidScore(value: number): boolean {
  return (
    Number.isFinite(value) &&
    value >= 0 &&
    value <= 10 &&
    Number.isInteger(value * 2)
  );
}

/** Parse a raw input-field string; null means "not set / invalid". */
export function parseScoreInput(raw: string): number | null {
  const trimmed = raw.trim();
  if (trimmed === "") return null;
  const value = Number(trimmed);
  return isValidScore(value) ? value : null;
}

export function draftComplete(draft: ScoreDraft): boolean {
  return CRITERIA.every((c) => draft[c] !== null);
}

/**
 * Client-side preview of the average, for display only. The server
 * recomputes it and the server's figure is what gets shown verbatim
 * once the review is submitted.
 */
export function liveAverage(draft: ScoreDraft): number | null {
  if (!draftComplete(draft)) return null;
  const sum = CRITERIA.reduce((acc, c) => acc + (draft[c] as number), 0);
  return sum / CRITERIA.length;
}

export function formatAverage(value: number): string {
  // trim trailing zeros but keep at least one decimal: 8.5, 8.25, 7.0
  const fixed = value.toFixed(2);
  return fixed.endsWith("0") ? value.toFixed(1) : fixed;
}
