"""Dual-agent synthetic generation: write Modern English, then translate it.

Two coordinated steps per record, strictly ordered:

1. FragmentGen samples style examples from the reference corpus and asks a
   general-purpose backend to compose one new Modern English sentence.
2. The translator assembles a forward-translation few-shot prompt from
   human-provenance pairs (ranked by vocabulary overlap with the sampled
   style fragments) and renders the sentence into Old English with greedy
   decoding.

Every record passes the failure-mode filters; fatal flags mark it rejected,
everything else awaits human review. All sampling flows from the configured
seed, so mock-backed runs are byte-reproducible.
"""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .corpus import GenerationRecord
from .errors import InferenceError, InsufficientDataError, ValidationError
from .filters import FilterConfig, apply_pair_filters
from .infer import CompletionClient, EndpointConfig, FewShotPrompt, assemble_fewshot
from .metrics.tokenizer import word_tokens
from .prompts import TaskKind, render_example, render_query

logger = logging.getLogger(__name__)

_ANG_SPAN_RE = re.compile(r"\[ANG\](.*?)(?:\[/ANG\]|$)", re.DOTALL)
_MAX_FRAGMENT_CHARS = 2000

FRAGMENTGEN_TEMPLATE = (
    resources.files("oeforge.data").joinpath("fragmentgen_prompt.txt").read_text("utf-8")
)


@dataclass
class AgentPipelineConfig:
    fragmentgen_endpoint: EndpointConfig = field(default_factory=EndpointConfig)
    translator_endpoint: EndpointConfig = field(default_factory=EndpointConfig)
    style_sample_size: int = 5
    fewshot_pairs: int = 3
    sample_seed: int = 0
    batch_size: int = 8
    filters: FilterConfig = field(default_factory=FilterConfig)
    # experiment flag: seed FragmentGen with one sentence to mutate instead
    # of free composition; not part of the reproduced pipeline
    mutation_mode: bool = False

    def validate(self) -> None:
        if self.style_sample_size < 1:
            raise ValidationError("style_sample_size must be >= 1")
        if self.fewshot_pairs < 0:
            raise ValidationError("fewshot_pairs must be >= 0")
        if self.translator_endpoint.decode.mode != "greedy":
            raise ValidationError("translator must use greedy decoding")


def sample_style_fragments(cfg: AgentPipelineConfig, store, rng: random.Random):
    fragments = sorted(store.iter_fragments(lang="ANG"), key=lambda f: f.id)
    if len(fragments) < cfg.style_sample_size:
        raise InsufficientDataError(
            f"reference corpus has {len(fragments)} fragments, "
            f"need {cfg.style_sample_size} style examples"
        )
    return rng.sample(fragments, cfg.style_sample_size)


def fragmentgen_step(cfg: AgentPipelineConfig, store, client: CompletionClient, rng: random.Random):
    """Sample style examples and ask the backend for one new EN sentence.

    Degenerate completions (empty or overlong) are retried once, then fail.
    Returns (en_text, style_example_ids).
    """
    style = sample_style_fragments(cfg, store, rng)
    examples = "\n".join(f"- {frag.text}" for frag in style)
    prompt = FRAGMENTGEN_TEMPLATE.format(examples=examples)
    completion = ""
    for attempt in range(2):
        completion = client.complete(prompt).strip().strip('"“”').strip()
        if completion and len(completion) <= _MAX_FRAGMENT_CHARS:
            break
    else:
        raise InferenceError("FragmentGen returned a degenerate completion twice")
    return completion, [frag.id for frag in style]


def select_fewshot_pairs(cfg: AgentPipelineConfig, store, style_ids, rng: random.Random):
    """Human-provenance pairs ranked by ANG vocabulary overlap with the
    sampled style fragments; ties broken by seeded draw."""
    style_vocab = set()
    for sid in style_ids:
        style_vocab.update(word_tokens(store.get_fragment(sid).text.lower()))
    pairs = sorted(store.iter_pairs(provenance="human"), key=lambda p: p.id)
    pairs = [p for p in pairs if not p.has_fatal_flag()]
    tiebreak = {p.id: rng.random() for p in pairs}
    scored = sorted(
        pairs,
        key=lambda p: (
            -len(set(word_tokens(p.ang.text.lower())) & style_vocab),
            tiebreak[p.id],
        ),
    )
    return scored[: cfg.fewshot_pairs]


def extract_ang_completion(raw: str) -> str:
    """Inner text of the completion's [ANG] span; raw text if untagged."""
    m = _ANG_SPAN_RE.search(raw)
    if m:
        return m.group(1).strip()
    logger.warning("translator output carried no [ANG] tags; using raw text")
    return raw.strip()


def translate_step(
    cfg: AgentPipelineConfig,
    en_text: str,
    store,
    client: CompletionClient,
    style_ids=None,
    rng: Optional[random.Random] = None,
) -> str:
    """Few-shot forward translation of one EN sentence into ANG."""
    if not en_text.strip():
        raise ValidationError("empty English text")
    rng = rng or random.Random(cfg.sample_seed)
    shots = []
    if cfg.fewshot_pairs and style_ids:
        for pair in select_fewshot_pairs(cfg, store, style_ids, rng):
            example = render_example(
                TaskKind.forward_translation, en=pair.en.text, ang=pair.ang.text
            )
            shots.append((example.input, example.output))
    query = render_query(TaskKind.forward_translation, en=en_text)
    prompt = assemble_fewshot("", shots, query, cfg.translator_endpoint.context_budget)
    completion = client.complete(prompt)
    ang_text = extract_ang_completion(completion)
    if not ang_text:
        completion = client.complete(prompt)
        ang_text = extract_ang_completion(completion)
        if not ang_text:
            raise InferenceError("translator output unparseable after retry")
    return ang_text


@dataclass
class PipelineReport:
    attempted: int = 0
    emitted: int = 0
    rejected: int = 0
    failed: int = 0
    flag_counts: dict = field(default_factory=dict)
    seed: int = 0

    def check_accounting(self) -> None:
        if self.emitted + self.rejected + self.failed != self.attempted:
            raise ValidationError("pipeline accounting does not balance")

    def to_record(self) -> dict:
        return {
            "attempted": self.attempted,
            "emitted": self.emitted,
            "rejected": self.rejected,
            "failed": self.failed,
            "flag_counts": dict(sorted(self.flag_counts.items())),
            "seed": self.seed,
        }


def run_pipeline(
    cfg: AgentPipelineConfig,
    count: int,
    store,
    fragmentgen_client: CompletionClient,
    translator_client: CompletionClient,
):
    """Attempt `count` generation records; returns (records, report).

    Failures are isolated per record. Records with fatal flags are stored
    with review_state=rejected; the rest stay unreviewed for the gate.
    """
    cfg.validate()
    report = PipelineReport(seed=cfg.sample_seed)
    records = []
    seq = 0
    for index in range(count):
        report.attempted += 1
        # one independent, reproducible stream per record
        rng = random.Random(cfg.sample_seed * 1_000_003 + index)
        try:
            en_text, style_ids = fragmentgen_step(cfg, store, fragmentgen_client, rng)
            en_seq = seq = seq + 1
            ang_text = translate_step(cfg, en_text, store, translator_client, style_ids, rng)
            ang_seq = seq = seq + 1
        except (InferenceError, InsufficientDataError) as exc:
            logger.warning("record %d failed: %s", index, exc)
            report.failed += 1
            continue
        flags = apply_pair_filters(en_text, ang_text, cfg.filters, direction="forward")
        for flag in flags:
            report.flag_counts[flag.kind] = report.flag_counts.get(flag.kind, 0) + 1
        fatal = any(f.fatal for f in flags)
        record = GenerationRecord(
            id="",
            style_example_ids=style_ids,
            en_text=en_text,
            ang_text=ang_text,
            flags={f.kind for f in flags},
            review_state="rejected" if fatal else "unreviewed",
            en_seq=en_seq,
            ang_seq=ang_seq,
        )
        store.add_generation(record)
        records.append(record)
        if fatal:
            report.rejected += 1
        else:
            report.emitted += 1
    report.check_accounting()
    return records, report
