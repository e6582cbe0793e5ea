"""oeforge: corpus-expansion toolkit for Old English (ANG) / Modern English (EN).

Submodules:
    corpus     - data model, JSON-lines store, deterministic splitting
    normalize  - character/whitespace standardization and quality checks
    prompts    - the four adaptation task templates (render/parse/build)
    metrics    - BLEU, chrF, METEOR and corpus reports
    infer      - pluggable completion-endpoint client + mock backend
    backtrans  - backtranslation augmentation jobs
    filters    - looped-generation / non-translated / hallucination detectors
    agents     - dual-agent synthetic generation pipeline
    review     - expert scoring gate, aggregation, extended-corpus export
    api        - HTTP surface for the review workflow
    cli        - the `forge` command
"""

__version__ = "0.1.0"
