"""Expert review gate: four-criteria scores, threshold rule, aggregation.

A review scores inflection, word order, lexical choice, and semantic
coherence on a 0-10 scale (half points allowed). The average is always
recomputed server-side. A record is accepted when the mean of its
reviewers' averages meets the threshold (default 7); accepted dual-agent
records become eligible for the extended-corpus export.
"""

from __future__ import annotations

import datetime as _dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import UnknownRecordError, ValidationError
from .normalize import NormalizationConfig, normalize_text

CRITERIA = ("inflection", "word_order", "lexical_choice", "semantic_coherence")
DEFAULT_THRESHOLD = 7.0


def _check_score(name: str, value) -> float:
    try:
        score = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} score is not a number") from None
    if not 0.0 <= score <= 10.0:
        raise ValidationError(f"{name} score {score} out of range [0, 10]")
    if (score * 2) != int(score * 2):
        raise ValidationError(f"{name} score {score} must be an integer or half point")
    return score


@dataclass
class ReviewRecord:
    record_id: str
    reviewer: str
    inflection: float
    word_order: float
    lexical_choice: float
    semantic_coherence: float
    comment: Optional[str] = None
    timestamp: str = ""
    average: float = field(init=False, default=0.0)

    def __post_init__(self):
        for name in CRITERIA:
            setattr(self, name, _check_score(name, getattr(self, name)))
        if not self.reviewer.strip():
            raise ValidationError("reviewer name required")
        self.average = sum(getattr(self, c) for c in CRITERIA) / len(CRITERIA)
        if not self.timestamp:
            self.timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat()

    def to_record(self) -> dict:
        rec = {c: getattr(self, c) for c in CRITERIA}
        rec.update(
            record_id=self.record_id,
            reviewer=self.reviewer,
            average=self.average,
            comment=self.comment,
            timestamp=self.timestamp,
        )
        return rec


@dataclass
class GateDecision:
    record_id: str
    decision: str  # "accepted" | "rejected"
    average: float
    threshold: float

    def to_record(self) -> dict:
        return {
            "record_id": self.record_id,
            "decision": self.decision,
            "average": self.average,
            "threshold": self.threshold,
        }


def _find_target(store, record_id: str):
    if record_id in store.generations:
        return "generation", store.get_generation(record_id)
    if record_id in store.pairs:
        return "pair", store.get_pair(record_id)
    raise UnknownRecordError(f"no reviewable record {record_id}")


def record_average(store, record_id: str) -> float:
    """Mean of reviewer averages for one record (multi-reviewer rule)."""
    averages = [r["average"] for r in store.reviews if r["record_id"] == record_id]
    if not averages:
        raise UnknownRecordError(f"no reviews for {record_id}")
    return sum(averages) / len(averages)


def submit_review(
    store,
    review: ReviewRecord,
    threshold: float = DEFAULT_THRESHOLD,
    allow_rereview: bool = False,
) -> GateDecision:
    """Persist a review, apply the gate, update the target's review state."""
    kind, _target = _find_target(store, review.record_id)
    already = any(
        r["record_id"] == review.record_id and r["reviewer"] == review.reviewer
        for r in store.reviews
    )
    if already and not allow_rereview:
        raise ValidationError(
            f"reviewer {review.reviewer} already reviewed {review.record_id}"
        )
    store.add_review(review.to_record())
    average = record_average(store, review.record_id)
    decision = "accepted" if average >= threshold else "rejected"
    if kind == "generation":
        store.set_generation_state(review.record_id, decision)
    else:
        store.set_pair_state(review.record_id, decision)
    return GateDecision(review.record_id, decision, average, threshold)


def aggregate_reviews(store) -> dict:
    """Per-criterion means across all reviews, plus the overall mean of the
    four criterion means."""
    if not store.reviews:
        raise ValidationError("no reviews to aggregate")
    means = {
        c: sum(r[c] for r in store.reviews) / len(store.reviews) for c in CRITERIA
    }
    means["overall"] = sum(means[c] for c in CRITERIA) / len(CRITERIA)
    means["review_count"] = len(store.reviews)
    return means


def export_extended_corpus(store, destination, norm_cfg: Optional[NormalizationConfig] = None) -> int:
    """Write the ANG texts of all accepted records as fragment JSON-lines.

    Rejected and unreviewed records are never exported. Returns the number
    of fragments written; an empty export is allowed but reported.
    """
    norm_cfg = norm_cfg or NormalizationConfig()
    accepted = sorted(store.iter_generations(state="accepted"), key=lambda g: g.id)
    dest = Path(destination)
    count = 0
    with dest.open("w", encoding="utf-8") as fh:
        for gen in accepted:
            rec = {
                "id": gen.id,
                "lang": "ANG",
                "text": normalize_text(gen.ang_text, norm_cfg),
                "source": "extended_corpus:dual_agent",
                "genre": None,
                "normalized": True,
            }
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
            count += 1
        for pair in sorted(store.iter_pairs(), key=lambda p: p.id):
            if pair.review_state == "accepted" and pair.provenance == "dual_agent":
                rec = {
                    "id": pair.ang.id,
                    "lang": "ANG",
                    "text": normalize_text(pair.ang.text, norm_cfg),
                    "source": "extended_corpus:dual_agent",
                    "genre": pair.ang.genre,
                    "normalized": True,
                }
                fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
                count += 1
    return count
