"""The four adaptation-task templates: render, parse, and dataset building.

Tasks use a flat tagged markup with exactly six tags:
[INST]..[/INST], [EN]..[/EN], [ANG]..[/ANG]. Tags never nest. The text
completion task is the one deliberately unbalanced case: its input opens an
[ANG] span that is closed in the output.
"""

from __future__ import annotations

import enum
import random
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import InsufficientDataError, MalformedTagsError, MissingOperandError, ValidationError


class TaskKind(enum.Enum):
    text_completion = "text_completion"
    forward_translation = "forward_translation"
    back_translation = "back_translation"
    crossed_definition = "crossed_definition"


FORWARD_INSTRUCTION = "Translate the following English fragment to Anglo-Saxon"
BACK_INSTRUCTION = "Translate the following Anglo-Saxon fragment to English"
DEFINITION_INSTRUCTION = "What is the English definition of the following word in Anglo-Saxon?"


@dataclass
class PromptExample:
    task: TaskKind
    input: str
    output: str
    origin_ids: list = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "task": self.task.value,
            "input": self.input,
            "output": self.output,
            "origin_ids": list(self.origin_ids),
        }


@dataclass
class MixConfig:
    """Per-task mixture weights, in TaskKind declaration order."""

    weights: dict
    shuffle_seed: int = 0

    def validate(self) -> None:
        if set(self.weights) != set(TaskKind):
            raise ValidationError("mix must assign a weight to every task kind")
        if any(w < 0 for w in self.weights.values()):
            raise ValidationError("mix weights must be non-negative")
        if abs(sum(self.weights.values()) - 1.0) > 1e-9:
            raise ValidationError("mix weights must sum to 1")

    @classmethod
    def uniform(cls, shuffle_seed: int = 0) -> "MixConfig":
        return cls({k: 0.25 for k in TaskKind}, shuffle_seed)

    @classmethod
    def from_fractions(cls, fractions, shuffle_seed: int = 0) -> "MixConfig":
        kinds = list(TaskKind)
        if len(fractions) != len(kinds):
            raise ValidationError("expected exactly four mix fractions")
        cfg = cls(dict(zip(kinds, fractions)), shuffle_seed)
        cfg.validate()
        return cfg


def render_example(
    task: TaskKind,
    en: Optional[str] = None,
    ang: Optional[str] = None,
    definition: Optional[str] = None,
    split_index: Optional[int] = None,
    origin_ids: Optional[list] = None,
) -> PromptExample:
    """Render one training example; fixed template text is byte-exact.

    ``split_index`` (text completion only) is the token index at which the
    fragment is divided into prompt prefix and continuation.
    """
    origin_ids = origin_ids or []
    if task is TaskKind.forward_translation:
        _require(task, en=en, ang=ang)
        return PromptExample(
            task,
            f"[INST]{FORWARD_INSTRUCTION}[/INST][EN]{en}[/EN]",
            f"[ANG]{ang}[/ANG]",
            origin_ids,
        )
    if task is TaskKind.back_translation:
        _require(task, en=en, ang=ang)
        return PromptExample(
            task,
            f"[INST]{BACK_INSTRUCTION}[/INST][ANG]{ang}[/ANG]",
            f"[EN]{en}[/EN]",
            origin_ids,
        )
    if task is TaskKind.crossed_definition:
        _require(task, ang=ang, definition=definition)
        return PromptExample(
            task,
            f"[INST]{DEFINITION_INSTRUCTION}[/INST][ANG]{ang}[/ANG]",
            f"[EN]{definition}[/EN]",
            origin_ids,
        )
    if task is TaskKind.text_completion:
        _require(task, ang=ang)
        tokens = ang.split()
        if len(tokens) < 2:
            raise MissingOperandError("text completion needs at least two tokens")
        k = split_index if split_index is not None else len(tokens) // 2
        if not 1 <= k <= len(tokens) - 1:
            raise ValidationError(f"split index {k} out of range for {len(tokens)} tokens")
        prefix = " ".join(tokens[:k])
        suffix = " ".join(tokens[k:])
        return PromptExample(task, f"[ANG]{prefix}", f"{suffix}[/ANG]", origin_ids)
    raise ValidationError(f"unknown task kind: {task!r}")


def render_query(task: TaskKind, en: Optional[str] = None, ang: Optional[str] = None) -> str:
    """Render only the input side of a translation template, for inference."""
    if task is TaskKind.forward_translation:
        _require(task, en=en)
        return f"[INST]{FORWARD_INSTRUCTION}[/INST][EN]{en}[/EN]"
    if task is TaskKind.back_translation:
        _require(task, ang=ang)
        return f"[INST]{BACK_INSTRUCTION}[/INST][ANG]{ang}[/ANG]"
    raise ValidationError(f"no query form for task {task.value}")


def _require(task: TaskKind, **operands) -> None:
    missing = [name for name, value in operands.items() if value is None or value == ""]
    if missing:
        raise MissingOperandError(f"{task.value} requires {', '.join(missing)}")


_TAG_RE = re.compile(r"\[(/?)(INST|EN|ANG)\]")


def extract_spans(text: str, allow_open: str = "") -> dict:
    """Parse flat tagged markup into {tag: span text}.

    ``allow_open`` names a tag permitted to be unclosed at the end ("ANG"
    for completion inputs) or unopened at the start ("/ANG" for completion
    outputs). Any other imbalance or nesting raises MalformedTagsError.
    """
    spans: dict = {}
    pos = 0
    open_tag = None
    span_start = 0
    if allow_open.startswith("/"):
        m = _TAG_RE.search(text)
        if m is None or m.group(1) != "/" or m.group(2) != allow_open[1:] or m.end() != len(text):
            raise MalformedTagsError("expected text closed by a trailing end tag")
        spans[allow_open[1:]] = text[: m.start()]
        return spans
    for m in _TAG_RE.finditer(text):
        closing, tag = m.group(1) == "/", m.group(2)
        if not closing:
            if open_tag is not None:
                raise MalformedTagsError(f"nested tag [{tag}] inside [{open_tag}]")
            if text[pos : m.start()].strip():
                raise MalformedTagsError("stray text outside tags")
            open_tag, span_start = tag, m.end()
        else:
            if open_tag != tag:
                raise MalformedTagsError(f"unbalanced closing tag [/{tag}]")
            if tag in spans:
                raise MalformedTagsError(f"repeated tag [{tag}]")
            spans[tag] = text[span_start : m.end() - len(tag) - 3]
            open_tag = None
        pos = m.end()
    if open_tag is not None:
        if open_tag != allow_open:
            raise MalformedTagsError(f"unclosed tag [{open_tag}]")
        spans[open_tag] = text[span_start:]
        return spans
    if text[pos:].strip():
        raise MalformedTagsError("stray text after final tag")
    return spans


def parse_example(raw_input: str, raw_output: str):
    """Inverse of render_example: recover (TaskKind, field dict).

    Text completion spans are rejoined with a single space between prefix
    and suffix.
    """
    if raw_input.startswith("[ANG]") and "[/ANG]" not in raw_input:
        in_spans = extract_spans(raw_input, allow_open="ANG")
        out_spans = extract_spans(raw_output, allow_open="/ANG")
        return TaskKind.text_completion, {
            "ang": in_spans["ANG"] + " " + out_spans["ANG"],
            "prefix": in_spans["ANG"],
            "suffix": out_spans["ANG"],
        }
    in_spans = extract_spans(raw_input)
    out_spans = extract_spans(raw_output)
    instruction = in_spans.get("INST")
    if instruction == FORWARD_INSTRUCTION:
        if "EN" not in in_spans or "ANG" not in out_spans:
            raise MalformedTagsError("forward translation spans missing")
        return TaskKind.forward_translation, {"en": in_spans["EN"], "ang": out_spans["ANG"]}
    if instruction == BACK_INSTRUCTION:
        if "ANG" not in in_spans or "EN" not in out_spans:
            raise MalformedTagsError("back translation spans missing")
        return TaskKind.back_translation, {"ang": in_spans["ANG"], "en": out_spans["EN"]}
    if instruction == DEFINITION_INSTRUCTION:
        if "ANG" not in in_spans or "EN" not in out_spans:
            raise MalformedTagsError("crossed definition spans missing")
        return TaskKind.crossed_definition, {
            "ang": in_spans["ANG"],
            "definition": out_spans["EN"],
        }
    raise MalformedTagsError(f"unknown template instruction: {instruction!r}")


def allocate_counts(total: int, mix: MixConfig) -> dict:
    """Largest-remainder allocation of `total` examples across task weights."""
    kinds = list(TaskKind)
    raw = {k: total * mix.weights[k] for k in kinds}
    counts = {k: int(raw[k]) for k in kinds}
    shortfall = total - sum(counts.values())
    by_remainder = sorted(kinds, key=lambda k: (-(raw[k] - counts[k]), k.value))
    for k in by_remainder[:shortfall]:
        counts[k] += 1
    return counts


def build_adaptation_dataset(
    store,
    mix: Optional[MixConfig] = None,
    count: Optional[int] = None,
    completion_split_range=(0.3, 0.7),
) -> Iterator[PromptExample]:
    """Emit a seeded-shuffled stream of adaptation examples.

    Task proportions follow the mix weights within +/-1 example. Sources:
    parallel pairs for the two translation tasks, monolingual ANG fragments
    for completion, dictionary entries for crossed definitions. Each task's
    sources are cycled in seeded order, so the output is deterministic.
    """
    mix = mix or MixConfig.uniform()
    mix.validate()
    rng = random.Random(mix.shuffle_seed)

    pairs = sorted(store.iter_pairs(), key=lambda p: p.id)
    pairs = [p for p in pairs if not p.has_fatal_flag()]
    mono = sorted(store.iter_fragments(lang="ANG"), key=lambda f: f.id)
    mono = [f for f in mono if len(f.text.split()) >= 2]
    entries = sorted(store.dict_entries, key=lambda e: e.headword)

    sources = {
        TaskKind.forward_translation: pairs,
        TaskKind.back_translation: pairs,
        TaskKind.text_completion: mono,
        TaskKind.crossed_definition: entries,
    }
    if count is None:
        count = sum(len(v) for v in sources.values()) // 2 or len(pairs)
    counts = allocate_counts(count, mix)
    for kind, n in counts.items():
        if n > 0 and not sources[kind]:
            raise InsufficientDataError(f"no source data for task {kind.value}")

    examples = []
    for kind in TaskKind:
        pool = list(sources[kind])
        rng.shuffle(pool)
        for i in range(counts[kind]):
            item = pool[i % len(pool)] if pool else None
            if kind is TaskKind.forward_translation:
                examples.append(
                    render_example(kind, en=item.en.text, ang=item.ang.text, origin_ids=[item.id])
                )
            elif kind is TaskKind.back_translation:
                examples.append(
                    render_example(kind, en=item.en.text, ang=item.ang.text, origin_ids=[item.id])
                )
            elif kind is TaskKind.text_completion:
                tokens = item.text.split()
                lo = max(1, int(len(tokens) * completion_split_range[0]))
                hi = min(len(tokens) - 1, int(len(tokens) * completion_split_range[1]))
                k = rng.randint(lo, max(lo, hi))
                examples.append(
                    render_example(kind, ang=item.text, split_index=k, origin_ids=[item.id])
                )
            else:
                examples.append(
                    render_example(
                        kind,
                        ang=item.headword,
                        definition=item.definition,
                        origin_ids=[item.headword],
                    )
                )
    rng.shuffle(examples)
    yield from examples
