"""BLEU: geometric mean of modified n-gram precisions times a brevity penalty.

Corpus scores pool clipped counts across all segments before taking the
geometric mean; they are never an average of segment scores. Segment
scores optionally smooth zero numerators by adding a small epsilon, which
keeps per-segment distributions informative for short hypotheses.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from ..errors import ValidationError


@dataclass
class BleuConfig:
    max_ngram_order: int = 4
    smoothing: str = "none"  # "none" | "add_epsilon"
    epsilon: float = 0.1

    def validate(self) -> None:
        if self.max_ngram_order < 1:
            raise ValidationError("max_ngram_order must be >= 1")
        if self.smoothing not in ("none", "add_epsilon"):
            raise ValidationError(f"unknown smoothing mode: {self.smoothing!r}")
        if self.epsilon <= 0:
            raise ValidationError("epsilon must be positive")


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _pooled_stats(hypotheses, references, cfg: BleuConfig):
    """Clipped numerators and denominators per order, plus length totals."""
    orders = range(1, cfg.max_ngram_order + 1)
    num = {n: 0 for n in orders}
    den = {n: 0 for n in orders}
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in orders:
            hyp_counts = ngram_counts(hyp, n)
            ref_counts = ngram_counts(ref, n)
            num[n] += sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
            den[n] += sum(hyp_counts.values())
    return num, den, hyp_len, ref_len


def _score(num, den, hyp_len, ref_len, cfg: BleuConfig) -> float:
    if hyp_len == 0:
        return 0.0
    log_sum = 0.0
    effective_orders = 0
    for n in num:
        if den[n] == 0:
            # hypothesis shorter than n tokens: order degenerate, skipped
            continue
        numerator = num[n]
        if numerator == 0:
            if cfg.smoothing == "add_epsilon":
                numerator = cfg.epsilon
            else:
                return 0.0
        log_sum += math.log(numerator / den[n])
        effective_orders += 1
    if effective_orders == 0:
        return 0.0
    precision_mean = math.exp(log_sum / effective_orders)
    bp = 1.0 if hyp_len > ref_len else math.exp(1.0 - ref_len / hyp_len)
    return 100.0 * precision_mean * bp


def corpus_bleu(hypotheses, references, cfg: BleuConfig = None) -> float:
    """Pooled corpus BLEU on a 0-100 scale. Never smoothed."""
    cfg = cfg or BleuConfig()
    cfg.validate()
    if len(hypotheses) != len(references):
        raise ValidationError("hypothesis/reference length mismatch")
    if not references:
        raise ValidationError("empty corpus")
    pooled = BleuConfig(cfg.max_ngram_order, "none", cfg.epsilon)
    return _score(*_pooled_stats(hypotheses, references, pooled), pooled)


def sentence_bleu(hypothesis, reference, cfg: BleuConfig = None) -> float:
    """Segment-level BLEU; smoothing applies here if configured."""
    cfg = cfg or BleuConfig(smoothing="add_epsilon")
    cfg.validate()
    if not reference:
        raise ValidationError("empty reference")
    return _score(*_pooled_stats([hypothesis], [reference], cfg), cfg)
