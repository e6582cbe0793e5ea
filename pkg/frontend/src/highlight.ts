/**
 * Evidence highlighting: wrap every occurrence of the evidence string in
 * <mark> while HTML-escaping everything, so candidate text can never
 * inject markup into the page.
 */

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function highlightEvidence(text: string, evidence: string): string {
  if (!evidence) return escapeHtml(text);
  const pieces: string[] = [];
  let cursor = 0;
  while (cursor <= text.length - evidence.length) {
    const hit = text.indexOf(evidence, cursor);
    if (hit === -1) break;
    pieces.push(escapeHtml(text.slice(cursor, hit)));
    pieces.push(`<mark>${escapeHtml(evidence)}</mark>`);
    cursor = hit + evidence.length;
  }
  pieces.push(escapeHtml(text.slice(cursor)));
  return pieces.join("");
}

/** Highlight each flagged token from a space-separated evidence list. */
export function highlightTokens(text: string, evidenceTokens: string[]): string {
  if (evidenceTokens.length === 0) return escapeHtml(text);
  const wanted = new Set(evidenceTokens);
  return text
    .split(/(\s+)/)
    .map((part) => {
      const bare = part.replace(/[.,;:!?]+$/, "");
      return wanted.has(bare)
        ? highlightEvidence(part, bare)
        : escapeHtml(part);
    })
    .join("");
}
