"""Canonical data model and JSON-lines store.

Storage layout (one directory per store)::

    fragments.jsonl     {"id","lang","text","source","genre","normalized"}
    pairs.jsonl         {"id","en_id","ang_id","provenance","flags","review_state"}
    dictionary.jsonl    {"headword","definition"}
    generations.jsonl   dual-agent generation records
    reviews.jsonl       expert review records
    index.json          store config + sequence counters
    .lock               advisory write lock

Writers serialize through the lock file; readers take in-memory snapshots.
"""

from __future__ import annotations

import json
import random
import shutil
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Iterable, Iterator, Optional

from filelock import FileLock

from .errors import DuplicateIdError, StoreError, UnknownRecordError, ValidationError

LANGS = ("ANG", "EN")
PROVENANCES = ("human", "backtranslation", "dual_agent")
REVIEW_STATES = ("unreviewed", "accepted", "rejected")

# Flags that disqualify a pair outright; others queue it for human review.
FATAL_FLAGS = frozenset({"looped_generation", "non_translated"})


@dataclass
class TextFragment:
    """One monolingual text unit."""

    id: str
    lang: str
    text: str
    source: str
    genre: Optional[str] = None
    normalized: bool = False

    def validate(self) -> None:
        if self.lang not in LANGS:
            raise ValidationError(f"invalid language code: {self.lang!r}")
        if not self.text.strip():
            raise ValidationError("fragment text is empty")

    def to_record(self) -> dict:
        return asdict(self)

    @classmethod
    def from_record(cls, rec: dict) -> "TextFragment":
        return cls(
            id=rec["id"],
            lang=rec["lang"],
            text=rec["text"],
            source=rec.get("source", ""),
            genre=rec.get("genre"),
            normalized=bool(rec.get("normalized", False)),
        )


@dataclass
class ParallelPair:
    """An aligned (EN, ANG) sentence pair with provenance and filter flags."""

    id: str
    en: TextFragment
    ang: TextFragment
    provenance: str
    flags: set = field(default_factory=set)
    review_state: str = "unreviewed"

    def validate(self) -> None:
        if self.en.lang != "EN" or self.ang.lang != "ANG":
            raise ValidationError("pair sides must be (EN, ANG)")
        if self.provenance not in PROVENANCES:
            raise ValidationError(f"invalid provenance: {self.provenance!r}")
        if self.review_state not in REVIEW_STATES:
            raise ValidationError(f"invalid review state: {self.review_state!r}")
        if self.review_state == "accepted" and self.flags & FATAL_FLAGS:
            raise ValidationError("accepted pair carries a fatal flag")

    def has_fatal_flag(self) -> bool:
        return bool(self.flags & FATAL_FLAGS)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "en_id": self.en.id,
            "ang_id": self.ang.id,
            "provenance": self.provenance,
            "flags": sorted(self.flags),
            "review_state": self.review_state,
        }


@dataclass
class DictEntry:
    """One dictionary headword with its Modern English definition."""

    headword: str
    definition: str


@dataclass
class DatasetSplit:
    train: list
    validation: list
    test: list
    seed: int
    ratios: tuple

    def to_record(self) -> dict:
        return {
            "train": list(self.train),
            "validation": list(self.validation),
            "test": list(self.test),
            "seed": self.seed,
            "ratios": list(self.ratios),
        }


def split_dataset(ids: Iterable[str], ratios=(0.8, 0.1, 0.1), seed: int = 0) -> DatasetSplit:
    """Deterministically shuffle ids by seed and partition them contiguously.

    Validation/test sizes are floor(n * ratio); all remainder rows stay in
    train, so scarce data always maximizes the training set.
    """
    ids = list(ids)
    if not ids:
        raise ValidationError("cannot split an empty id list")
    if len(ratios) != 3:
        raise ValidationError("ratios must have exactly three entries")
    if any(r < 0 or r > 1 for r in ratios):
        raise ValidationError("ratios out of range")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValidationError("ratios must sum to 1")
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate ids in split input")

    shuffled = sorted(ids)
    random.Random(seed).shuffle(shuffled)
    n = len(shuffled)
    n_val = int(n * ratios[1])
    n_test = int(n * ratios[2])
    n_train = n - n_val - n_test
    return DatasetSplit(
        train=shuffled[:n_train],
        validation=shuffled[n_train : n_train + n_val],
        test=shuffled[n_train + n_val :],
        seed=seed,
        ratios=tuple(ratios),
    )


@dataclass
class GenerationRecord:
    """Output of one dual-agent pipeline run: EN fragment plus its ANG rendering.

    `seq` orders the two-phase generation (en_seq < ang_seq always holds);
    records are append-only once written.
    """

    id: str
    style_example_ids: list
    en_text: str
    ang_text: str
    flags: set = field(default_factory=set)
    provenance: str = "dual_agent"
    review_state: str = "unreviewed"
    en_seq: int = 0
    ang_seq: int = 0

    def has_fatal_flag(self) -> bool:
        return bool(self.flags & FATAL_FLAGS)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "style_example_ids": list(self.style_example_ids),
            "en_text": self.en_text,
            "ang_text": self.ang_text,
            "flags": sorted(self.flags),
            "provenance": self.provenance,
            "review_state": self.review_state,
            "en_seq": self.en_seq,
            "ang_seq": self.ang_seq,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "GenerationRecord":
        return cls(
            id=rec["id"],
            style_example_ids=list(rec.get("style_example_ids", [])),
            en_text=rec["en_text"],
            ang_text=rec["ang_text"],
            flags=set(rec.get("flags", [])),
            provenance=rec.get("provenance", "dual_agent"),
            review_state=rec.get("review_state", "unreviewed"),
            en_seq=int(rec.get("en_seq", 0)),
            ang_seq=int(rec.get("ang_seq", 0)),
        )


FRAGMENTS_FILE = "fragments.jsonl"
PAIRS_FILE = "pairs.jsonl"
DICT_FILE = "dictionary.jsonl"
GENERATIONS_FILE = "generations.jsonl"
REVIEWS_FILE = "reviews.jsonl"
INDEX_FILE = "index.json"


class Store:
    """Single-writer, multi-reader store backed by a directory of JSON-lines files.

    With ``dedup=True`` (the default) inserting a fragment whose
    (text, lang, source) already exists returns the existing id instead of
    creating a duplicate row.
    """

    def __init__(self, path, dedup: bool = True):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self._lock = FileLock(str(self.path / ".lock"))
        self.fragments: dict = {}
        self.pairs: dict = {}
        self.dict_entries: list = []
        self.generations: dict = {}
        self.reviews: list = []
        self._frag_keys: dict = {}
        self._counters = {"fragment": 0, "pair": 0, "generation": 0}
        self.dedup = dedup
        self._load()
        if self.path.joinpath(INDEX_FILE).exists():
            # Persisted config wins over the constructor default.
            idx = json.loads(self.path.joinpath(INDEX_FILE).read_text(encoding="utf-8"))
            self.dedup = bool(idx.get("dedup", dedup))
            for k, v in idx.get("counters", {}).items():
                self._counters[k] = max(self._counters.get(k, 0), int(v))

    # -- loading / persistence -------------------------------------------------

    def _load(self) -> None:
        for rec in self._read_lines(FRAGMENTS_FILE):
            frag = TextFragment.from_record(rec)
            self.fragments[frag.id] = frag
            self._frag_keys[(frag.text, frag.lang, frag.source)] = frag.id
            self._bump("fragment", frag.id)
        for rec in self._read_lines(PAIRS_FILE):
            pair = ParallelPair(
                id=rec["id"],
                en=self.fragments[rec["en_id"]],
                ang=self.fragments[rec["ang_id"]],
                provenance=rec["provenance"],
                flags=set(rec.get("flags", [])),
                review_state=rec.get("review_state", "unreviewed"),
            )
            self.pairs[pair.id] = pair
            self._bump("pair", pair.id)
        for rec in self._read_lines(DICT_FILE):
            self.dict_entries.append(DictEntry(rec["headword"], rec["definition"]))
        for rec in self._read_lines(GENERATIONS_FILE):
            gen = GenerationRecord.from_record(rec)
            self.generations[gen.id] = gen
            self._bump("generation", gen.id)
        for rec in self._read_lines(REVIEWS_FILE):
            self.reviews.append(rec)

    def _read_lines(self, name: str) -> Iterator[dict]:
        fp = self.path / name
        if not fp.exists():
            return
        with fp.open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    yield json.loads(line)

    def _bump(self, kind: str, existing_id: str) -> None:
        # Keep counters ahead of any numeric suffix already on disk.
        tail = existing_id.rsplit("-", 1)[-1]
        if tail.isdigit():
            self._counters[kind] = max(self._counters[kind], int(tail))

    def _append(self, name: str, rec: dict) -> None:
        with self._lock:
            with (self.path / name).open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
            self._write_index()

    def _rewrite(self, name: str, records: Iterable[dict]) -> None:
        with self._lock:
            tmp = self.path / (name + ".tmp")
            with tmp.open("w", encoding="utf-8") as fh:
                for rec in records:
                    fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
            tmp.replace(self.path / name)
            self._write_index()

    def _write_index(self) -> None:
        idx = {"dedup": self.dedup, "counters": self._counters}
        (self.path / INDEX_FILE).write_text(
            json.dumps(idx, sort_keys=True) + "\n", encoding="utf-8"
        )

    def next_id(self, kind: str) -> str:
        self._counters[kind] += 1
        prefix = {"fragment": "f", "pair": "p", "generation": "g"}[kind]
        return f"{prefix}-{self._counters[kind]:06d}"

    # -- fragments ---------------------------------------------------------------

    def add_fragment(self, frag: TextFragment) -> str:
        frag.validate()
        key = (frag.text, frag.lang, frag.source)
        if self.dedup and key in self._frag_keys:
            return self._frag_keys[key]
        if not frag.id:
            frag.id = self.next_id("fragment")
        if frag.id in self.fragments:
            raise DuplicateIdError(f"fragment id exists: {frag.id}")
        if not self.dedup and key in self._frag_keys:
            raise DuplicateIdError(f"duplicate fragment text for {self._frag_keys[key]}")
        self.fragments[frag.id] = frag
        self._frag_keys[key] = frag.id
        self._append(FRAGMENTS_FILE, frag.to_record())
        return frag.id

    def get_fragment(self, frag_id: str) -> TextFragment:
        try:
            return self.fragments[frag_id]
        except KeyError:
            raise UnknownRecordError(f"no such fragment: {frag_id}") from None

    def iter_fragments(self, lang: Optional[str] = None) -> Iterator[TextFragment]:
        for frag in self.fragments.values():
            if lang is None or frag.lang == lang:
                yield frag

    # -- pairs --------------------------------------------------------------------

    def add_pair(self, pair: ParallelPair) -> str:
        pair.validate()
        if not pair.en.id:
            pair.en.id = self.add_fragment(pair.en)
        elif pair.en.id not in self.fragments:
            self.add_fragment(pair.en)
        if not pair.ang.id:
            pair.ang.id = self.add_fragment(pair.ang)
        elif pair.ang.id not in self.fragments:
            self.add_fragment(pair.ang)
        # dedup may have remapped the sides onto existing fragments
        pair.en = self.fragments[self._frag_keys[(pair.en.text, "EN", pair.en.source)]]
        pair.ang = self.fragments[self._frag_keys[(pair.ang.text, "ANG", pair.ang.source)]]
        if not pair.id:
            pair.id = self.next_id("pair")
        if pair.id in self.pairs:
            raise DuplicateIdError(f"pair id exists: {pair.id}")
        self.pairs[pair.id] = pair
        self._append(PAIRS_FILE, pair.to_record())
        return pair.id

    def get_pair(self, pair_id: str) -> ParallelPair:
        try:
            return self.pairs[pair_id]
        except KeyError:
            raise UnknownRecordError(f"no such pair: {pair_id}") from None

    def iter_pairs(self, provenance: Optional[str] = None) -> Iterator[ParallelPair]:
        for pair in self.pairs.values():
            if provenance is None or pair.provenance == provenance:
                yield pair

    def set_pair_state(self, pair_id: str, state: str) -> None:
        pair = self.get_pair(pair_id)
        if state not in REVIEW_STATES:
            raise ValidationError(f"invalid review state: {state!r}")
        pair.review_state = state
        self._rewrite(PAIRS_FILE, (p.to_record() for p in self.pairs.values()))

    # -- dictionary -----------------------------------------------------------------

    def add_dict_entry(self, entry: DictEntry) -> None:
        if not entry.headword.strip() or not entry.definition.strip():
            raise ValidationError("dictionary entry fields must be non-empty")
        self.dict_entries.append(entry)
        self._append(DICT_FILE, {"headword": entry.headword, "definition": entry.definition})

    # -- generation records -----------------------------------------------------------

    def add_generation(self, gen: GenerationRecord) -> str:
        if not gen.id:
            gen.id = self.next_id("generation")
        if gen.id in self.generations:
            raise DuplicateIdError(f"generation id exists: {gen.id}")
        self.generations[gen.id] = gen
        self._append(GENERATIONS_FILE, gen.to_record())
        return gen.id

    def get_generation(self, gen_id: str) -> GenerationRecord:
        try:
            return self.generations[gen_id]
        except KeyError:
            raise UnknownRecordError(f"no such generation record: {gen_id}") from None

    def iter_generations(self, state: Optional[str] = None) -> Iterator[GenerationRecord]:
        for gen in self.generations.values():
            if state is None or gen.review_state == state:
                yield gen

    def set_generation_state(self, gen_id: str, state: str) -> None:
        gen = self.get_generation(gen_id)
        if state not in REVIEW_STATES:
            raise ValidationError(f"invalid review state: {state!r}")
        gen.review_state = state
        self._rewrite(GENERATIONS_FILE, (g.to_record() for g in self.generations.values()))

    # -- reviews (raw records; semantics live in oeforge.review) ------------------------

    def add_review(self, rec: dict) -> None:
        self.reviews.append(rec)
        self._append(REVIEWS_FILE, rec)

    # -- import / export -------------------------------------------------------------

    def export_to(self, dest) -> None:
        """Copy the store's data files to another directory."""
        dest = Path(dest)
        dest.mkdir(parents=True, exist_ok=True)
        for name in (FRAGMENTS_FILE, PAIRS_FILE, DICT_FILE, GENERATIONS_FILE, REVIEWS_FILE, INDEX_FILE):
            src = self.path / name
            if src.exists():
                shutil.copy2(src, dest / name)

    def import_fragments(self, jsonl_path) -> int:
        """Insert fragment records from a JSON-lines file; returns count inserted."""
        count = 0
        with Path(jsonl_path).open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                frag = TextFragment.from_record({**rec, "id": rec.get("id", "")})
                before = len(self.fragments)
                self.add_fragment(frag)
                count += len(self.fragments) - before
        return count

    def equal_contents(self, other: "Store") -> bool:
        """Field-by-field equality of fragments, pairs, and dictionary entries."""
        if {k: v.to_record() for k, v in self.fragments.items()} != {
            k: v.to_record() for k, v in other.fragments.items()
        }:
            return False
        if {k: v.to_record() for k, v in self.pairs.items()} != {
            k: v.to_record() for k, v in other.pairs.items()
        }:
            return False
        mine = [(e.headword, e.definition) for e in self.dict_entries]
        theirs = [(e.headword, e.definition) for e in other.dict_entries]
        return mine == theirs
