"""Text standardization for Old English and Modern English sources.

The character repertoire of digitized Old English is messy: editions mark
vowel length with macrons or acutes, older transcriptions keep wynn and
yogh, and the Tironian note stands in for "and". Normalization maps all of
that onto a single orthographic convention while preserving thorn (þ),
eth (ð), and ash (æ) as distinct letters. The exact character table lives
in ``data/charmap.json``.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from .corpus import TextFragment
from .errors import ValidationError

_CHARMAP = json.loads(
    resources.files("oeforge.data").joinpath("charmap.json").read_text(encoding="utf-8")
)
_LETTER_MAP = {ord(k): v for k, v in _CHARMAP["letter_map"].items()}
_QUOTE_MAP = {ord(k): v for k, v in _CHARMAP["quote_map"].items()}
_STRIP_MARKS = set(_CHARMAP["strip_marks"])
_TIRONIAN = _CHARMAP["tironian_note"]
_TIRONIAN_EXPANSION = _CHARMAP["tironian_expansion"]

_WS_RE = re.compile(r"\s+")


@dataclass
class NormalizationConfig:
    strip_length_diacritics: bool = True
    map_wynn_to_w: bool = True
    map_yogh_to_g: bool = True
    expand_tironian_note: bool = True
    lowercase: bool = True
    min_tokens: int = 3
    max_nonletter_ratio: float = 0.5

    def validate(self) -> None:
        if self.min_tokens < 1:
            raise ValidationError("min_tokens must be >= 1")
        if not 0.0 <= self.max_nonletter_ratio <= 1.0:
            raise ValidationError("max_nonletter_ratio must be in [0, 1]")

    @classmethod
    def from_dict(cls, data: dict) -> "NormalizationConfig":
        cfg = cls(**{k: v for k, v in data.items() if k in cls.__dataclass_fields__})
        cfg.validate()
        return cfg


def normalize_text(raw: str, cfg: Optional[NormalizationConfig] = None) -> str:
    """Standardize characters, diacritics, quotes, and whitespace.

    Idempotent: applying it twice yields the same string as once. þ, ð, and
    æ always survive unchanged.
    """
    cfg = cfg or NormalizationConfig()
    text = unicodedata.normalize("NFD", raw)
    if cfg.strip_length_diacritics:
        text = "".join(ch for ch in text if ch not in _STRIP_MARKS)
    if cfg.map_wynn_to_w:
        text = text.translate({k: v for k, v in _LETTER_MAP.items() if v.lower() == "w"})
    if cfg.map_yogh_to_g:
        text = text.translate({k: v for k, v in _LETTER_MAP.items() if v.lower() == "g"})
    if cfg.expand_tironian_note:
        text = text.replace(_TIRONIAN, _TIRONIAN_EXPANSION)
    text = text.translate(_QUOTE_MAP)
    text = unicodedata.normalize("NFC", text)
    if cfg.lowercase:
        text = text.lower()
    text = _WS_RE.sub(" ", text).strip()
    return text


@dataclass
class QualityResult:
    passed: bool
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.passed


def quality_check(frag: TextFragment, cfg: Optional[NormalizationConfig] = None) -> QualityResult:
    """Reject fragments that are too short, mostly non-letters, or contain control chars.

    Expects normalized text; token counting matches the metrics tokenizer
    (word tokens only, punctuation excluded).
    """
    cfg = cfg or NormalizationConfig()
    text = frag.text
    if any(unicodedata.category(ch) in ("Cc", "Cf") for ch in text):
        return QualityResult(False, "control_chars")

    word_tokens = re.findall(r"\w+", text, re.UNICODE)
    if len(word_tokens) < cfg.min_tokens:
        return QualityResult(False, "too_short")

    visible = [ch for ch in text if not ch.isspace()]
    if visible:
        nonletter = sum(1 for ch in visible if not unicodedata.category(ch).startswith("L"))
        if nonletter / len(visible) > cfg.max_nonletter_ratio:
            return QualityResult(False, "nonletter_ratio")
    return QualityResult(True)
