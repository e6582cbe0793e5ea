"""chrF: character n-gram F-score.

Precision and recall are averaged over n-gram orders 1..N (orders where
neither side has any n-grams are skipped, so short strings still score),
then combined as an F-beta with beta weighting recall.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..errors import ValidationError


@dataclass
class ChrfConfig:
    char_ngram_order: int = 6
    beta: float = 2.0
    remove_whitespace: bool = True

    def validate(self) -> None:
        if self.char_ngram_order < 1:
            raise ValidationError("char_ngram_order must be >= 1")
        if self.beta <= 0:
            raise ValidationError("beta must be positive")


def _char_ngrams(text: str, n: int) -> Counter:
    return Counter(text[i : i + n] for i in range(len(text) - n + 1))


def chrf_stats(hypothesis: str, reference: str, cfg: ChrfConfig):
    """Per-order (overlap, hyp_total, ref_total) triples for pooling."""
    if cfg.remove_whitespace:
        hypothesis = "".join(hypothesis.split())
        reference = "".join(reference.split())
    stats = []
    for n in range(1, cfg.char_ngram_order + 1):
        hyp_counts = _char_ngrams(hypothesis, n)
        ref_counts = _char_ngrams(reference, n)
        overlap = sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
        stats.append((overlap, sum(hyp_counts.values()), sum(ref_counts.values())))
    return stats


def score_from_stats(stats, beta: float) -> float:
    precisions = []
    recalls = []
    for overlap, hyp_total, ref_total in stats:
        if hyp_total == 0 and ref_total == 0:
            continue
        precisions.append(overlap / hyp_total if hyp_total else 0.0)
        recalls.append(overlap / ref_total if ref_total else 0.0)
    if not precisions:
        return 0.0
    p = sum(precisions) / len(precisions)
    r = sum(recalls) / len(recalls)
    if p == 0.0 and r == 0.0:
        return 0.0
    b2 = beta * beta
    return 100.0 * (1 + b2) * p * r / (b2 * p + r)


def chrf(hypothesis: str, reference: str, cfg: ChrfConfig = None) -> float:
    """Segment chrF on a 0-100 scale."""
    cfg = cfg or ChrfConfig()
    cfg.validate()
    if not reference.strip():
        raise ValidationError("empty reference")
    return score_from_stats(chrf_stats(hypothesis, reference, cfg), cfg.beta)


def corpus_chrf(pairs, cfg: ChrfConfig = None) -> float:
    """Corpus chrF from counts pooled across all segments (micro-average)."""
    cfg = cfg or ChrfConfig()
    cfg.validate()
    if not pairs:
        raise ValidationError("empty corpus")
    pooled = [(0, 0, 0)] * cfg.char_ngram_order
    for hyp, ref in pairs:
        seg = chrf_stats(hyp, ref, cfg)
        pooled = [tuple(a + b for a, b in zip(x, y)) for x, y in zip(pooled, seg)]
    return score_from_stats(pooled, cfg.beta)
