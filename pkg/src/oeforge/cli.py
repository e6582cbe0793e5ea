"""The `forge` command: one entry point over all pipeline stages.

Exit codes: 0 success, 1 domain error, 2 usage error. Subcommands print
JSON summaries so runs are machine-readable; every seed used is recorded
in the emitted reports.
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

import click

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import agents, backtrans, review as review_mod
from .corpus import DictEntry, ParallelPair, Store, TextFragment, split_dataset
from .errors import ForgeError, ValidationError
from .filters import FilterConfig, apply_pair_filters
from .infer import CompletionClient, DecodeParams, EndpointConfig, MockBackend
from .metrics import BleuConfig, ChrfConfig, MeteorConfig, evaluate_corpus
from .normalize import NormalizationConfig, normalize_text, quality_check
from .prompts import MixConfig, build_adaptation_dataset


def _load_toml(path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _read_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def _write_jsonl(path, records) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
            count += 1
    return count


def _parse_fractions(text: str, expected: int):
    parts = [float(p) for p in text.split(",")]
    if len(parts) != expected:
        raise ValidationError(f"expected {expected} comma-separated fractions, got {len(parts)}")
    return tuple(parts)


def _endpoint_from_file(path) -> EndpointConfig:
    return EndpointConfig.from_dict(_load_toml(path))


def builtin_mock_rule(prompt: str) -> str:
    """Deterministic offline backend for smoke runs and tests.

    FragmentGen prompts get a canned Modern English sentence; translation
    prompts get tagged canned spans. Everything is a pure function of the
    prompt text.
    """
    digest = hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:6]
    if "New sentence:" in prompt:
        return f"the brothers of the minster answered and said that they would keep the old teaching ({digest})"
    if "Translate the following English fragment to Anglo-Saxon" in prompt:
        return f"[ANG]ða gebroðru ðæs mynstres andswaredon and cwædon ðæt hi woldon ða ealdan lare healdan ({digest})[/ANG]"
    if "Translate the following Anglo-Saxon fragment to English" in prompt:
        return f"[EN]the brothers answered and said ({digest})[/EN]"
    return f"mock completion {digest}"


def _mock_client(cfg: EndpointConfig, fixture=None) -> CompletionClient:
    backend = MockBackend(fixture=fixture, rule=builtin_mock_rule)
    return CompletionClient(cfg, transport=backend, sleep=lambda _t: None)


@click.group()
def cli():
    """Low-resource corpus expansion pipeline."""


# ---------------------------------------------------------------- corpus


@cli.group()
def corpus():
    """Import, export, and split the corpus store."""


@corpus.command("import")
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--fragments", type=click.Path(exists=True), help="fragment JSON-lines file")
@click.option("--pairs", "pairs_file", type=click.Path(exists=True), help="pair JSON-lines file with en/ang texts")
@click.option("--dictionary", type=click.Path(exists=True), help="headword/definition JSON-lines file")
@click.option("--no-dedup", is_flag=True, help="disable exact text+lang+source deduplication")
def corpus_import(store_path, fragments, pairs_file, dictionary, no_dedup):
    store = Store(store_path, dedup=not no_dedup)
    summary = {"fragments": 0, "pairs": 0, "dictionary": 0}
    if fragments:
        summary["fragments"] = store.import_fragments(fragments)
    if pairs_file:
        for rec in _read_jsonl(pairs_file):
            pair = ParallelPair(
                id=rec.get("id", ""),
                en=TextFragment("", "EN", rec["en"], rec.get("source", "import")),
                ang=TextFragment("", "ANG", rec["ang"], rec.get("source", "import")),
                provenance=rec.get("provenance", "human"),
                flags=set(rec.get("flags", [])),
            )
            store.add_pair(pair)
            summary["pairs"] += 1
    if dictionary:
        for rec in _read_jsonl(dictionary):
            store.add_dict_entry(DictEntry(rec["headword"], rec["definition"]))
            summary["dictionary"] += 1
    click.echo(json.dumps(summary))


@corpus.command("export")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--dest", required=True, type=click.Path())
def corpus_export(store_path, dest):
    Store(store_path).export_to(dest)
    click.echo(json.dumps({"exported_to": str(dest)}))


@corpus.command("split")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--ratios", default="0.8,0.1,0.1", show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--lang", default=None, help="restrict to one language")
@click.option("--out", type=click.Path(), help="write the split JSON here (default: store dir)")
def corpus_split(store_path, ratios, seed, lang, out):
    store = Store(store_path)
    ids = sorted(f.id for f in store.iter_fragments(lang=lang))
    split = split_dataset(ids, _parse_fractions(ratios, 3), seed)
    out = Path(out) if out else Path(store_path) / "split.json"
    out.write_text(json.dumps(split.to_record(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    click.echo(
        json.dumps(
            {
                "train": len(split.train),
                "validation": len(split.validation),
                "test": len(split.test),
                "seed": seed,
                "out": str(out),
            }
        )
    )


# ---------------------------------------------------------------- normalize


@cli.command("normalize")
@click.option("--in", "in_file", required=True, type=click.Path(exists=True))
@click.option("--out", "out_file", required=True, type=click.Path())
@click.option("--config", "config_file", type=click.Path(exists=True))
@click.option("--keep-failing", is_flag=True, help="keep records that fail the quality check")
def normalize_cmd(in_file, out_file, config_file, keep_failing):
    """Standardize fragment text and drop low-quality samples."""
    cfg = NormalizationConfig.from_dict(_load_toml(config_file)) if config_file else NormalizationConfig()
    kept, dropped = 0, {}
    records = []
    for rec in _read_jsonl(in_file):
        rec = dict(rec)
        rec["text"] = normalize_text(rec["text"], cfg)
        rec["normalized"] = True
        frag = TextFragment.from_record({**rec, "id": rec.get("id", "x"), "source": rec.get("source", "")})
        result = quality_check(frag, cfg)
        if result.passed or keep_failing:
            if not result.passed:
                rec["quality_fail"] = result.reason
            records.append(rec)
            kept += 1
        else:
            dropped[result.reason] = dropped.get(result.reason, 0) + 1
    _write_jsonl(out_file, records)
    click.echo(json.dumps({"kept": kept, "dropped": dropped, "out": str(out_file)}))


# ---------------------------------------------------------------- prompts


@cli.group()
def prompts():
    """Adaptation dataset construction."""


@prompts.command("build")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--mix", default="0.25,0.25,0.25,0.25", show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--count", type=int, default=None, help="total examples (default: derived from store size)")
@click.option("--out", required=True, type=click.Path())
def prompts_build(store_path, mix, seed, count, out):
    store = Store(store_path)
    mix_cfg = MixConfig.from_fractions(_parse_fractions(mix, 4), shuffle_seed=seed)
    examples = build_adaptation_dataset(store, mix_cfg, count=count)
    n = _write_jsonl(out, (ex.to_record() for ex in examples))
    click.echo(json.dumps({"examples": n, "seed": seed, "out": str(out)}))


# ---------------------------------------------------------------- eval


@cli.command("eval")
@click.option("--hyp", required=True, type=click.Path(exists=True))
@click.option("--ref", required=True, type=click.Path(exists=True))
@click.option("--report", "report_file", type=click.Path())
@click.option("--csv", "csv_file", type=click.Path(), help="per-segment rows for external plotting")
def eval_cmd(hyp, ref, report_file, csv_file):
    """Score hypothesis translations against references."""
    hyps = list(_read_jsonl(hyp))
    refs = list(_read_jsonl(ref))
    if len(hyps) != len(refs):
        raise ValidationError("hypothesis and reference files differ in length")
    pairs = [
        (h.get("id", str(i)), h["text"], r["text"])
        for i, (h, r) in enumerate(zip(hyps, refs))
    ]
    rep = evaluate_corpus(pairs, BleuConfig(), ChrfConfig(), MeteorConfig())
    record = rep.to_record()
    if report_file:
        Path(report_file).write_text(
            json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    if csv_file:
        with open(csv_file, "w", encoding="utf-8") as fh:
            fh.write("id,bleu,chrf,meteor\n")
            for sid, b, c, m in rep.per_segment:
                fh.write(f"{sid},{b:.4f},{c:.4f},{m:.4f}\n")
    click.echo(json.dumps({"corpus": record["corpus"], "segments": len(rep.per_segment)}))


# ---------------------------------------------------------------- filter


@cli.command("filter")
@click.option("--pairs", "pairs_file", required=True, type=click.Path(exists=True))
@click.option("--config", "config_file", type=click.Path(exists=True))
@click.option("--lexicon", type=click.Path(exists=True), help="one normalized word per line")
@click.option("--out", required=True, type=click.Path())
def filter_cmd(pairs_file, config_file, lexicon, out):
    """Attach failure-mode flags to (en, ang) pairs."""
    kwargs = {}
    if config_file:
        data = _load_toml(config_file)
        kwargs = {k: v for k, v in data.items() if k in FilterConfig.__dataclass_fields__}
    if lexicon:
        cfg = FilterConfig.with_lexicon_file(lexicon, **kwargs)
    else:
        cfg = FilterConfig(**kwargs)
    flag_counts: dict = {}
    records = []
    for rec in _read_jsonl(pairs_file):
        flags = apply_pair_filters(rec["en"], rec["ang"], cfg, direction="forward")
        rec = dict(rec)
        rec["flags"] = sorted(f.kind for f in flags)
        rec["flag_evidence"] = {f.kind: f.evidence for f in flags}
        for f in flags:
            flag_counts[f.kind] = flag_counts.get(f.kind, 0) + 1
        records.append(rec)
    n = _write_jsonl(out, records)
    click.echo(json.dumps({"pairs": n, "flag_counts": flag_counts, "out": str(out)}))


# ---------------------------------------------------------------- backtranslate


@cli.command("backtranslate")
@click.option("--source", required=True, type=click.Path(exists=True), help="monolingual ANG JSON-lines")
@click.option("--endpoint", "endpoint_file", type=click.Path(exists=True))
@click.option("--mock", is_flag=True, help="use the deterministic offline backend")
@click.option("--mock-fixture", type=click.Path(exists=True), help="prompt-hash -> completion JSON map")
@click.option("--store", "store_path", type=click.Path(), default=None)
@click.option("--out", required=True, type=click.Path())
@click.option("--report", "report_file", required=True, type=click.Path())
def backtranslate_cmd(source, endpoint_file, mock, mock_fixture, store_path, out, report_file):
    """Backtranslate ANG fragments into (EN, ANG) synthetic pairs."""
    import tempfile

    endpoint = _endpoint_from_file(endpoint_file) if endpoint_file else EndpointConfig(
        decode=DecodeParams(mode="greedy")
    )
    if not (mock or mock_fixture) and not endpoint.base_url:
        raise ValidationError("either --endpoint with a base_url or --mock is required")
    with tempfile.TemporaryDirectory() as tmp:
        store = Store(store_path or tmp)
        ids = []
        for rec in _read_jsonl(source):
            frag = TextFragment.from_record({**rec, "id": rec.get("id", ""), "lang": "ANG"})
            ids.append(store.add_fragment(frag))
        client = _mock_client(endpoint, mock_fixture) if (mock or mock_fixture) else None
        job = backtrans.BacktransJob(source_ids=ids, endpoint=endpoint)
        pairs, report = backtrans.run_backtranslation(job, store, client)
        backtrans.write_pairs_jsonl(pairs, out)
    Path(report_file).write_text(
        json.dumps(report.to_record(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    click.echo(json.dumps(report.to_record()))


# ---------------------------------------------------------------- generate


@cli.command("generate")
@click.option("--count", required=True, type=int)
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--config", "config_file", type=click.Path(exists=True), help="pipeline TOML")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--mock", is_flag=True, help="use the deterministic offline backend")
@click.option("--mock-fixture", type=click.Path(exists=True))
@click.option("--report", "report_file", type=click.Path())
def generate_cmd(count, store_path, config_file, seed, mock, mock_fixture, report_file):
    """Run the dual-agent pipeline for COUNT records."""
    store = Store(store_path)
    cfg = agents.AgentPipelineConfig(sample_seed=seed)
    if config_file:
        data = _load_toml(config_file)
        if "fragmentgen_endpoint" in data:
            cfg.fragmentgen_endpoint = EndpointConfig.from_dict(data.pop("fragmentgen_endpoint"))
        if "translator_endpoint" in data:
            cfg.translator_endpoint = EndpointConfig.from_dict(data.pop("translator_endpoint"))
        for key in ("style_sample_size", "fewshot_pairs", "batch_size", "mutation_mode"):
            if key in data:
                setattr(cfg, key, data[key])
        cfg.sample_seed = seed
    if mock or mock_fixture:
        fg_client = _mock_client(cfg.fragmentgen_endpoint, mock_fixture)
        tr_client = _mock_client(cfg.translator_endpoint, mock_fixture)
    else:
        if not cfg.fragmentgen_endpoint.base_url or not cfg.translator_endpoint.base_url:
            raise ValidationError("pipeline config must name both endpoints, or pass --mock")
        fg_client = CompletionClient(cfg.fragmentgen_endpoint)
        tr_client = CompletionClient(cfg.translator_endpoint)
    records, report = agents.run_pipeline(cfg, count, store, fg_client, tr_client)
    if report_file:
        Path(report_file).write_text(
            json.dumps(report.to_record(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    click.echo(json.dumps(report.to_record()))


# ---------------------------------------------------------------- review


@cli.group("review")
def review_group():
    """Expert review gate without the UI."""


@review_group.command("list")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--state", default="unreviewed", show_default=True)
def review_list(store_path, state):
    store = Store(store_path)
    items = [
        {"record_id": g.id, "en_text": g.en_text, "ang_text": g.ang_text, "flags": sorted(g.flags)}
        for g in sorted(store.iter_generations(state=state or None), key=lambda g: g.id)
    ]
    click.echo(json.dumps({"candidates": items, "total": len(items)}))


@review_group.command("submit")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--record", "record_id", required=True)
@click.option("--reviewer", required=True)
@click.option("--scores", required=True, help="inflection,word_order,lexical_choice,semantic_coherence")
@click.option("--comment", default=None)
@click.option("--threshold", default=review_mod.DEFAULT_THRESHOLD, show_default=True, type=float)
def review_submit(store_path, record_id, reviewer, scores, comment, threshold):
    store = Store(store_path)
    values = _parse_fractions(scores, 4)
    rec = review_mod.ReviewRecord(
        record_id=record_id,
        reviewer=reviewer,
        inflection=values[0],
        word_order=values[1],
        lexical_choice=values[2],
        semantic_coherence=values[3],
        comment=comment,
    )
    decision = review_mod.submit_review(store, rec, threshold)
    click.echo(json.dumps(decision.to_record()))


@review_group.command("stats")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
def review_stats(store_path):
    click.echo(json.dumps(review_mod.aggregate_reviews(Store(store_path)), sort_keys=True))


@review_group.command("export")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def review_export(store_path, out):
    count = review_mod.export_extended_corpus(Store(store_path), out)
    if count == 0:
        click.echo("warning: no accepted records; export is empty", err=True)
    click.echo(json.dumps({"exported": count, "out": str(out)}))


# ---------------------------------------------------------------- serve


@cli.command("serve")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8441, show_default=True, type=int)
@click.option("--ui-dir", type=click.Path(exists=True), default=None)
def serve_cmd(store_path, host, port, ui_dir):
    """Serve the review HTTP API (and optionally the built UI)."""
    from .api import serve

    serve(Store(store_path), host=host, port=port, ui_dir=ui_dir)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        return 1
    except ForgeError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
