"""Backtranslation augmentation: monolingual ANG fragments -> (EN, ANG) pairs.

Each source fragment is sent through the reverse-translation template with
greedy decoding; the Modern English completion is paired with the original
fragment (whose text is never mutated). Per-fragment failures are isolated:
a backend error skips that fragment and the job continues. Fatal-flagged
pairs are excluded from the output but counted in the job report.
"""

from __future__ import annotations

import json
import logging
import random
import re
from dataclasses import dataclass, field
from typing import Optional

from .corpus import ParallelPair, TextFragment
from .errors import InferenceError, ValidationError
from .filters import FilterConfig, apply_pair_filters
from .infer import CompletionClient, EndpointConfig
from .prompts import TaskKind, render_query

logger = logging.getLogger(__name__)

_EN_SPAN_RE = re.compile(r"\[EN\](.*?)\[/EN\]", re.DOTALL)


@dataclass
class BacktransJob:
    source_ids: list
    endpoint: EndpointConfig
    filters: FilterConfig = field(default_factory=FilterConfig)
    # ids listed in a split's train set are refused as sources (leakage guard)
    train_ids: Optional[set] = None

    def validate(self, store) -> None:
        if self.endpoint.decode.mode != "greedy":
            raise ValidationError("backtranslation requires greedy decoding")
        for sid in self.source_ids:
            frag = store.get_fragment(sid)
            if frag.lang != "ANG":
                raise ValidationError(f"source fragment {sid} is not ANG")
            if self.train_ids and sid in self.train_ids:
                raise ValidationError(f"source fragment {sid} appears in the train split")


@dataclass
class JobReport:
    attempted: int = 0
    emitted: int = 0
    excluded: int = 0
    skipped: int = 0
    flag_counts: dict = field(default_factory=dict)

    def count_flag(self, kind: str) -> None:
        self.flag_counts[kind] = self.flag_counts.get(kind, 0) + 1

    def check_accounting(self) -> None:
        if self.emitted + self.excluded + self.skipped != self.attempted:
            raise ValidationError("job accounting does not balance")

    def to_record(self) -> dict:
        return {
            "attempted": self.attempted,
            "emitted": self.emitted,
            "excluded": self.excluded,
            "skipped": self.skipped,
            "flag_counts": dict(sorted(self.flag_counts.items())),
        }


def extract_en_completion(raw: str) -> str:
    """Pull the [EN] span out of a completion; raw text if untagged."""
    m = _EN_SPAN_RE.search(raw)
    if m:
        return m.group(1).strip()
    return raw.strip()


def run_backtranslation(job: BacktransJob, store, client: Optional[CompletionClient] = None):
    """Translate each source fragment and pair it with the EN completion.

    Returns (pairs, report). Output order follows source order regardless of
    backend concurrency, so runs are deterministic given a deterministic
    backend.
    """
    job.validate(store)
    client = client or CompletionClient(job.endpoint)
    report = JobReport()
    pairs = []
    for sid in job.source_ids:
        frag = store.get_fragment(sid)
        report.attempted += 1
        try:
            completion = client.complete(render_query(TaskKind.back_translation, ang=frag.text))
        except InferenceError as exc:
            logger.warning("fragment %s skipped: %s", sid, exc)
            report.skipped += 1
            continue
        en_text = extract_en_completion(completion)
        if not en_text:
            logger.warning("fragment %s skipped: empty completion", sid)
            report.skipped += 1
            continue
        flags = apply_pair_filters(en_text, frag.text, job.filters, direction="backward")
        for flag in flags:
            report.count_flag(flag.kind)
        if any(f.fatal for f in flags):
            logger.info("fragment %s excluded by filters: %s", sid, [f.kind for f in flags])
            report.excluded += 1
            continue
        pair = ParallelPair(
            id="",
            en=TextFragment(id="", lang="EN", text=en_text, source="backtranslation"),
            ang=frag,
            provenance="backtranslation",
            flags={f.kind for f in flags},
        )
        pairs.append(pair)
        report.emitted += 1
    report.check_accounting()
    return pairs, report


def merge_training_sets(human, synthetic, seed: int = 0):
    """Union with exact-text dedup; human provenance wins collisions.

    Output order is a seeded shuffle, so merged dataset files are
    byte-identical across runs with the same seed.
    """
    merged = {}
    for pair in synthetic:
        merged[(pair.en.text, pair.ang.text)] = pair
    for pair in human:
        merged[(pair.en.text, pair.ang.text)] = pair
    out = sorted(merged.values(), key=lambda p: (p.en.text, p.ang.text))
    random.Random(seed).shuffle(out)
    return out


def write_pairs_jsonl(pairs, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            rec = {
                "en": pair.en.text,
                "ang": pair.ang.text,
                "provenance": pair.provenance,
                "flags": sorted(pair.flags),
            }
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
