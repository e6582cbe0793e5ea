"""Corpus evaluation: per-segment scores, pooled corpus scores, distributions.

Corpus-level values are pooled from counts (BLEU n-gram counts, chrF
character-n-gram counts, METEOR match/chunk/length totals), never averaged
segment scores; the per-segment mean is reported separately so both
conventions can be compared. Distribution statistics follow the box-plot
convention: quartiles, mean, and outliers beyond 1.5 x IQR.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..errors import ValidationError
from .bleu import BleuConfig, corpus_bleu, sentence_bleu
from .chrf import ChrfConfig, chrf, corpus_chrf
from .meteor import MeteorConfig, meteor_stats, score_from_stats
from .tokenizer import tokenize

METRIC_NAMES = ("bleu", "chrf", "meteor")


@dataclass
class Distribution:
    q1: float
    median: float
    q3: float
    mean: float
    outlier_ids: list = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "mean": self.mean,
            "outlier_ids": list(self.outlier_ids),
        }


@dataclass
class MetricReport:
    per_segment: list  # (id, bleu, chrf, meteor)
    corpus: dict  # pooled scores per metric
    segment_mean: dict  # averaged segment scores per metric
    distribution: dict  # metric -> Distribution

    def to_record(self) -> dict:
        return {
            "per_segment": [
                {"id": sid, "bleu": b, "chrf": c, "meteor": m}
                for sid, b, c, m in self.per_segment
            ],
            "corpus": dict(self.corpus),
            "segment_mean": dict(self.segment_mean),
            "distribution": {k: v.to_record() for k, v in self.distribution.items()},
        }


def _distribution(ids, scores) -> Distribution:
    if len(scores) == 1:
        v = scores[0]
        return Distribution(v, v, v, v, [])
    q1, median, q3 = statistics.quantiles(scores, n=4, method="inclusive")
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    outliers = [sid for sid, s in zip(ids, scores) if s < lo or s > hi]
    return Distribution(q1, median, q3, statistics.fmean(scores), outliers)


def evaluate_corpus(
    pairs: Sequence,
    bleu_cfg: Optional[BleuConfig] = None,
    chrf_cfg: Optional[ChrfConfig] = None,
    meteor_cfg: Optional[MeteorConfig] = None,
) -> MetricReport:
    """Score (hypothesis, reference) string pairs; returns the full report.

    ``pairs`` items are (hyp, ref) or (id, hyp, ref) tuples. Tokenization
    for BLEU/METEOR uses the shared word tokenizer; chrF works on raw
    strings.
    """
    if not pairs:
        raise ValidationError("empty evaluation input")
    bleu_cfg = bleu_cfg or BleuConfig()
    seg_bleu_cfg = BleuConfig(bleu_cfg.max_ngram_order, "add_epsilon", bleu_cfg.epsilon)
    chrf_cfg = chrf_cfg or ChrfConfig()
    meteor_cfg = meteor_cfg or MeteorConfig()

    norm = []
    for idx, item in enumerate(pairs):
        if len(item) == 3:
            norm.append((str(item[0]), item[1], item[2]))
        else:
            norm.append((str(idx), item[0], item[1]))

    per_segment = []
    hyp_tok, ref_tok = [], []
    meteor_totals = [0, 0, 0, 0]
    for sid, hyp, ref in norm:
        ht, rt = tokenize(hyp), tokenize(ref)
        hyp_tok.append(ht)
        ref_tok.append(rt)
        stats = meteor_stats(ht, rt, meteor_cfg)
        meteor_totals = [a + b for a, b in zip(meteor_totals, stats)]
        per_segment.append(
            (
                sid,
                sentence_bleu(ht, rt, seg_bleu_cfg),
                chrf(hyp, ref, chrf_cfg),
                score_from_stats(*stats, meteor_cfg),
            )
        )

    corpus = {
        "bleu": corpus_bleu(hyp_tok, ref_tok, bleu_cfg),
        "chrf": corpus_chrf([(h, r) for _, h, r in norm], chrf_cfg),
        "meteor": score_from_stats(*meteor_totals, meteor_cfg),
    }
    segment_mean = {
        name: statistics.fmean(seg[i + 1] for seg in per_segment)
        for i, name in enumerate(METRIC_NAMES)
    }
    ids = [seg[0] for seg in per_segment]
    distribution = {
        name: _distribution(ids, [seg[i + 1] for seg in per_segment])
        for i, name in enumerate(METRIC_NAMES)
    }
    return MetricReport(per_segment, corpus, segment_mean, distribution)
