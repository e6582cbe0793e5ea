"""Detectors for the known failure modes of machine-generated Old English.

Three detectors, matching the observed error taxonomy:

* looped generation - a token or 3-gram repeating itself (fatal)
* non-translated output - Modern English passed through untouched (fatal)
* vocabulary hallucination - words unattested in the lexicon (non-fatal,
  queued for human review, since lexicon coverage is incomplete)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .corpus import FATAL_FLAGS
from .metrics.tokenizer import tokenize, word_tokens
from .normalize import NormalizationConfig, normalize_text

LOOPED_GENERATION = "looped_generation"
NON_TRANSLATED = "non_translated"
VOCABULARY_HALLUCINATION = "vocabulary_hallucination"

# Tokens carrying these letters are near-certain Old English; the
# non-translated detector refuses to flag text rich in them.
_OE_LETTERS = set("þðæÞÐÆ")
_OE_LETTER_GUARD_RATIO = 0.10


def default_stopwords() -> frozenset:
    text = resources.files("oeforge.data").joinpath("modern_stopwords.txt").read_text("utf-8")
    words = [ln.strip() for ln in text.splitlines()]
    return frozenset(w for w in words if w and not w.startswith("#"))


@dataclass
class FilterFlag:
    kind: str
    evidence: str = ""

    @property
    def fatal(self) -> bool:
        return self.kind in FATAL_FLAGS

    def to_record(self) -> dict:
        return {"kind": self.kind, "evidence": self.evidence, "fatal": self.fatal}


class NotRun:
    """Marker: a detector was skipped (e.g. no lexicon configured)."""

    def __repr__(self) -> str:
        return "NotRun"

    def __bool__(self) -> bool:
        return False


NOT_RUN = NotRun()


@dataclass
class FilterConfig:
    loop_token_run: int = 4
    loop_ngram_n: int = 3
    loop_ngram_min_repeats: int = 3
    nontranslated_stopword_ratio: float = 0.3
    modern_stopwords: frozenset = field(default_factory=default_stopwords)
    lexicon: Optional[frozenset] = None
    oov_ratio_threshold: float = 0.5

    @classmethod
    def with_lexicon_file(cls, path, **kwargs) -> "FilterConfig":
        with open(path, encoding="utf-8") as fh:
            lexicon = frozenset(ln.strip() for ln in fh if ln.strip())
        return cls(lexicon=lexicon, **kwargs)


def detect_loops(text: str, cfg: Optional[FilterConfig] = None) -> Optional[FilterFlag]:
    """Flag a token run of length >= loop_token_run, or a 3-gram repeated
    consecutively >= loop_ngram_min_repeats times."""
    cfg = cfg or FilterConfig()
    tokens = tokenize(text)
    run = 1
    for prev, cur in zip(tokens, tokens[1:]):
        run = run + 1 if cur == prev else 1
        if run >= cfg.loop_token_run:
            return FilterFlag(LOOPED_GENERATION, evidence=cur)
    n = cfg.loop_ngram_n
    for start in range(len(tokens) - n + 1):
        gram = tokens[start : start + n]
        repeats = 1
        while tokens[start + repeats * n : start + (repeats + 1) * n] == gram:
            repeats += 1
        if repeats >= cfg.loop_ngram_min_repeats:
            return FilterFlag(LOOPED_GENERATION, evidence=" ".join(gram))
    return None


def detect_non_translated(
    source: str, output: str, cfg: Optional[FilterConfig] = None
) -> Optional[FilterFlag]:
    """Flag output that is still Modern English: either identical to its
    source after normalization, or saturated with Modern English stopwords."""
    cfg = cfg or FilterConfig()
    tokens = word_tokens(output)
    if not tokens:
        return None
    oe_tokens = sum(1 for t in tokens if set(t) & _OE_LETTERS)
    if oe_tokens / len(tokens) > _OE_LETTER_GUARD_RATIO:
        return None
    norm = NormalizationConfig()
    if normalize_text(output, norm) == normalize_text(source, norm):
        return FilterFlag(NON_TRANSLATED, evidence=output[:80])
    stop_hits = [t for t in tokens if t.lower() in cfg.modern_stopwords]
    if len(stop_hits) / len(tokens) >= cfg.nontranslated_stopword_ratio:
        return FilterFlag(NON_TRANSLATED, evidence=" ".join(stop_hits[:10]))
    return None


def detect_hallucination(output: str, cfg: Optional[FilterConfig] = None):
    """Flag output whose out-of-lexicon token ratio exceeds the threshold.

    Returns NOT_RUN when no lexicon is configured. Tokens containing digits
    or non-Latin letters are excluded from the denominator. Evidence lists
    the OOV tokens.
    """
    cfg = cfg or FilterConfig()
    if not cfg.lexicon:
        return NOT_RUN
    candidates = []
    for tok in word_tokens(output):
        low = tok.lower()
        if any(ch.isdigit() for ch in low):
            continue
        if not all(_is_latin_letter(ch) for ch in low):
            continue
        candidates.append(low)
    if not candidates:
        return None
    oov = [t for t in candidates if t not in cfg.lexicon]
    if len(oov) / len(candidates) > cfg.oov_ratio_threshold:
        return FilterFlag(VOCABULARY_HALLUCINATION, evidence=" ".join(oov))
    return None


def _is_latin_letter(ch: str) -> bool:
    if not ch.isalpha():
        return False
    cp = ord(ch)
    # Basic Latin, Latin-1 supplement, Extended-A/B (covers þ, ð, æ, ƿ)
    return cp <= 0x024F or 0x1E00 <= cp <= 0x1EFF


def apply_pair_filters(
    en_text: str,
    ang_text: str,
    cfg: Optional[FilterConfig] = None,
    direction: str = "forward",
) -> list:
    """Run all applicable detectors on one (EN, ANG) pair.

    direction="forward": the ANG side is model output; all detectors run.
    direction="backward": the EN side is model output; the stopword-ratio
    and lexicon checks would misfire on legitimate English, so only loop
    detection and source-equality apply.
    """
    cfg = cfg or FilterConfig()
    flags = []
    if direction == "forward":
        for flag in (
            detect_loops(ang_text, cfg),
            detect_non_translated(en_text, ang_text, cfg),
            detect_hallucination(ang_text, cfg),
        ):
            if isinstance(flag, FilterFlag):
                flags.append(flag)
    else:
        flag = detect_loops(en_text, cfg)
        if flag:
            flags.append(flag)
        norm = NormalizationConfig()
        if normalize_text(en_text, norm) == normalize_text(ang_text, norm):
            flags.append(FilterFlag(NON_TRANSLATED, evidence=en_text[:80]))
    return flags
