"""Native segment- and corpus-level BLEU, chrF, and METEOR."""

from .tokenizer import tokenize
from .bleu import BleuConfig, corpus_bleu, sentence_bleu
from .chrf import ChrfConfig, chrf
from .meteor import MeteorConfig, meteor, light_english_stemmer
from .report import MetricReport, evaluate_corpus

__all__ = [
    "tokenize",
    "BleuConfig",
    "corpus_bleu",
    "sentence_bleu",
    "ChrfConfig",
    "chrf",
    "MeteorConfig",
    "meteor",
    "light_english_stemmer",
    "MetricReport",
    "evaluate_corpus",
]
