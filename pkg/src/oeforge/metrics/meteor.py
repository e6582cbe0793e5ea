"""METEOR: staged unigram alignment with a fragmentation penalty.

Alignment runs in stages (exact surface match first, then stemmed match on
the leftovers). The number of matches per stage is fixed by per-token-type
counts; among all position assignments realizing those matches, the
aligner picks one with the minimum number of chunks, where a chunk is a
maximal run of matches contiguous in both hypothesis and reference.

Score: P = m/|hyp|, R = m/|ref|, Fmean = (w+1)PR / (R + wP) with recall
weight w, penalty = gamma * (chunks/m)^exponent, final = Fmean * (1 -
penalty), reported on a 0-100 scale. Zero matches score 0.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

from ..errors import ValidationError

_EN_SUFFIXES = ("ing", "edly", "ed", "es", "s", "ly")


def light_english_stemmer(token: str) -> str:
    """Crude suffix stripper; enough to align trivial EN inflection."""
    for suffix in _EN_SUFFIXES:
        if token.endswith(suffix) and len(token) - len(suffix) >= 3:
            return token[: -len(suffix)]
    return token


def identity_stemmer(token: str) -> str:
    return token


@dataclass
class MeteorConfig:
    stages: tuple = ("exact", "stem")
    fmean_recall_weight: float = 9.0
    penalty_gamma: float = 0.5
    penalty_exponent: float = 3.0
    # identity by default: no stemming data exists for Old English
    stemmer: Callable[[str], str] = identity_stemmer

    def validate(self) -> None:
        if not self.stages:
            raise ValidationError("at least one alignment stage required")
        if any(s not in ("exact", "stem") for s in self.stages):
            raise ValidationError(f"unknown stage in {self.stages!r}")
        if self.fmean_recall_weight <= 0 or self.penalty_gamma < 0:
            raise ValidationError("weights must be positive")

    def stage_key(self, stage: str) -> Callable[[str], str]:
        return identity_stemmer if stage == "exact" else self.stemmer


def _stage_match_counts(hyp, ref, cfg: MeteorConfig):
    """Fix how many tokens of each hyp/ref type match in each stage.

    Stages consume tokens sequentially: a token matched in an earlier stage
    is unavailable later. Counts are type-level, so they are independent of
    which positions end up paired.
    """
    hyp_left = Counter(hyp)
    ref_left = Counter(ref)
    plan = []  # (stage, key, count) with keys under that stage's mapping
    for stage in cfg.stages:
        key_fn = cfg.stage_key(stage)
        hyp_keys = Counter()
        for tok, c in hyp_left.items():
            hyp_keys[key_fn(tok)] += c
        ref_keys = Counter()
        for tok, c in ref_left.items():
            ref_keys[key_fn(tok)] += c
        for key in sorted(hyp_keys):
            matched = min(hyp_keys[key], ref_keys.get(key, 0))
            if matched:
                plan.append((stage, key, matched))
        # remove matched tokens type-proportionally: consume surface types in
        # sorted order until each stage-key quota is filled
        for stage_, key, matched in [p for p in plan if p[0] == stage]:
            need = matched
            for tok in sorted(hyp_left):
                if need == 0:
                    break
                if key_fn(tok) == key:
                    take = min(need, hyp_left[tok])
                    hyp_left[tok] -= take
                    need -= take
            need = matched
            for tok in sorted(ref_left):
                if need == 0:
                    break
                if key_fn(tok) == key:
                    take = min(need, ref_left[tok])
                    ref_left[tok] -= take
                    need -= take
        hyp_left = +hyp_left
        ref_left = +ref_left
    return plan


def _candidate_pairs(hyp, ref, plan, cfg: MeteorConfig):
    """Allowed (i, j, stage) pairs consistent with the stage plan."""
    allowed = []
    for stage, key, _count in plan:
        key_fn = cfg.stage_key(stage)
        his = [i for i, t in enumerate(hyp) if key_fn(t) == key]
        rjs = [j for j, t in enumerate(ref) if key_fn(t) == key]
        for i in his:
            for j in rjs:
                allowed.append((i, j, stage))
    return allowed


class _AlignmentSearch:
    """Branch-and-bound over position assignments, minimizing chunk count."""

    def __init__(self, hyp, ref, plan, cfg: MeteorConfig, node_budget: int = 200_000):
        self.hyp = hyp
        self.ref = ref
        self.cfg = cfg
        self.total = sum(c for _, _, c in plan)
        self.quota = {(stage, key): c for stage, key, c in plan}
        # per hyp position: candidate (j, stage) options, adjacency-first order
        by_pos: dict = {}
        for i, j, stage in _candidate_pairs(hyp, ref, plan, cfg):
            by_pos.setdefault(i, []).append((j, stage))
        self.by_pos = {i: sorted(opts) for i, opts in by_pos.items()}
        self.positions = sorted(self.by_pos)
        self.best_chunks = self.total + 1
        self.best_pairs: list = []
        self.nodes = 0
        self.node_budget = node_budget

    def run(self) -> Tuple[int, list]:
        if self.total == 0:
            return 0, []
        self._search(0, 0, [], set(), 0, -2, -2)
        return self.best_chunks, self.best_pairs

    def _search(self, idx, matched, pairs, used_refs, chunks, last_i, last_j):
        self.nodes += 1
        if self.nodes > self.node_budget:
            return
        remaining_positions = len(self.positions) - idx
        if matched + remaining_positions < self.total:
            return  # can't reach the required match count
        if chunks + (1 if matched < self.total else 0) > self.best_chunks:
            return
        if matched == self.total:
            if chunks < self.best_chunks:
                self.best_chunks = chunks
                self.best_pairs = list(pairs)
            return
        if idx >= len(self.positions):
            return
        i = self.positions[idx]
        options = self.by_pos[i]
        # prefer the ref position that extends the current chunk
        ordered = sorted(
            options, key=lambda opt: (opt[0] != last_j + 1 or i != last_i + 1, opt[0])
        )
        for j, stage in ordered:
            key = self.cfg.stage_key(stage)(self.hyp[i])
            q = self.quota.get((stage, key), 0)
            if q == 0 or j in used_refs:
                continue
            extends = i == last_i + 1 and j == last_j + 1
            self.quota[(stage, key)] = q - 1
            used_refs.add(j)
            pairs.append((i, j))
            self._search(
                idx + 1, matched + 1, pairs, used_refs, chunks + (0 if extends else 1), i, j
            )
            pairs.pop()
            used_refs.remove(j)
            self.quota[(stage, key)] = q
            if self.best_chunks == 1:
                return  # cannot do better
        # option: leave this hyp position unmatched
        self._search(idx + 1, matched, pairs, used_refs, chunks, last_i, last_j)


def align(hyp: Sequence[str], ref: Sequence[str], cfg: Optional[MeteorConfig] = None):
    """Return (match_count, chunk_count, pairs) for the staged alignment."""
    cfg = cfg or MeteorConfig()
    cfg.validate()
    plan = _stage_match_counts(list(hyp), list(ref), cfg)
    search = _AlignmentSearch(list(hyp), list(ref), plan, cfg)
    chunks, pairs = search.run()
    total = sum(c for _, _, c in plan)
    return total, chunks, sorted(pairs)


def meteor_stats(hyp, ref, cfg: Optional[MeteorConfig] = None):
    """(matches, chunks, hyp_len, ref_len) tuple for one segment."""
    cfg = cfg or MeteorConfig()
    m, chunks, _ = align(hyp, ref, cfg)
    return m, chunks, len(hyp), len(ref)


def score_from_stats(m, chunks, hyp_len, ref_len, cfg: Optional[MeteorConfig] = None) -> float:
    cfg = cfg or MeteorConfig()
    if m == 0 or hyp_len == 0 or ref_len == 0:
        return 0.0
    p = m / hyp_len
    r = m / ref_len
    w = cfg.fmean_recall_weight
    fmean = (w + 1) * p * r / (r + w * p)
    penalty = cfg.penalty_gamma * (chunks / m) ** cfg.penalty_exponent
    return 100.0 * fmean * (1.0 - penalty)


def meteor(hypothesis: Sequence[str], reference: Sequence[str], cfg: Optional[MeteorConfig] = None) -> float:
    """Segment METEOR on a 0-100 scale over pre-tokenized input."""
    cfg = cfg or MeteorConfig()
    cfg.validate()
    if not reference:
        raise ValidationError("empty reference")
    return score_from_stats(*meteor_stats(hypothesis, reference, cfg), cfg)
