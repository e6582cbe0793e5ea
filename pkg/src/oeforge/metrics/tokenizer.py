"""Shared word tokenizer for BLEU, METEOR, and the text filters.

Whitespace split with punctuation broken into separate single-character
tokens. þ, ð, and æ are Unicode letters, so Old English words stay whole.
"""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


def tokenize(text: str) -> list:
    return _TOKEN_RE.findall(text)


def word_tokens(text: str) -> list:
    """Word tokens only (punctuation dropped); used for ratio heuristics."""
    return re.findall(r"\w+", text, re.UNICODE)
