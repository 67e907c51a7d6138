"""Command-line driver.

Commands:
    discparse build DOC [-o STORE]
    discparse disambiguate DOC --store STORE [-o OUT]
    discparse complete DOC --store STORE [--no-fallback] [--window N] [-o RESULTS]
    discparse report RESULTS [--json OUT]
    discparse analyze DOC --windows 10,20,50,100,300
    discparse convert COLUMN_FILE [-o DOC]
    discparse run DOC [-o DIR]

Output paths default to names derived from the input file.  Exit status is
0 on success, 1 on a data error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .analysis import completion_report, repetition_stats, window_rates
from .config import PipelineConfig
from .formats import (
    DataError,
    convert_columns,
    dump_line,
    dumps_document,
    dumps_results,
    load_document,
    load_results,
)
from .matcher import EMPTY_LEXICON, SynonymLexicon
from .pipeline import (
    PipelineError,
    apply_outputs,
    build_store,
    complete_document,
    disambiguate,
    run_pipeline,
    selection_audit,
)
from .store import DiscourseStore, StoreFrozenError, StoreNotFrozenError

logger = logging.getLogger("discparse")

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _derived(path: str | Path, suffix: str) -> Path:
    path = Path(path)
    stem = path.name
    for ext in (".jsonl", ".json", ".conllu", ".conll", ".txt"):
        if stem.endswith(ext):
            stem = stem[: -len(ext)]
            break
    return path.with_name(stem + suffix)


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")
    logger.info("wrote %s", path)


def _config(args: argparse.Namespace) -> PipelineConfig:
    try:
        config = PipelineConfig.load(args.config) if getattr(args, "config", None) else PipelineConfig()
        changes = {}
        if getattr(args, "window", None) is not None:
            changes["window"] = args.window
        if getattr(args, "no_fallback", False):
            changes["fallback"] = False
        if getattr(args, "samples", None) is not None:
            changes["samples_per_window"] = args.samples
        if getattr(args, "similar_discount", None) is not None:
            changes["similar_discount"] = args.similar_discount
        return config.override(**changes)
    except (OSError, ValueError) as exc:
        raise UsageError(f"bad configuration: {exc}") from None


def _lexicon(args: argparse.Namespace) -> SynonymLexicon:
    if not getattr(args, "synonyms", None):
        return EMPTY_LEXICON
    try:
        return SynonymLexicon.load(args.synonyms)
    except OSError as exc:
        raise DataError(f"cannot read synonym lexicon: {exc.strerror}", path=args.synonyms) from None


def _store(path: str, config: PipelineConfig) -> DiscourseStore:
    try:
        store = DiscourseStore.load(path)
    except OSError as exc:
        raise DataError(f"cannot read store: {exc.strerror}", path=path) from None
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed store snapshot: {exc}", path=path) from None
    if config.window is not None:
        store = store.with_window(config.window)
    return store


def cmd_build(args) -> int:
    config = _config(args)
    document = load_document(args.document)
    store = build_store(document, config.window).freeze()
    _write(Path(args.output) if args.output else _derived(args.document, ".store.json"), store.dumps())
    return EXIT_OK


def cmd_disambiguate(args) -> int:
    config = _config(args)
    document = load_document(args.document)
    store = _store(args.store, config)
    selections = disambiguate(document, store, _lexicon(args), config, enrich=False)
    out = Path(args.output) if args.output else _derived(args.document, ".disambiguated.jsonl")
    _write(out, dumps_document(apply_outputs(document, selections, [])))
    audit = "".join(selection_audit(sid, sel) + "\n" for sid, sel in selections.items())
    _write(Path(args.audit) if args.audit else _derived(out, ".audit.log"), audit)
    return EXIT_OK


def cmd_complete(args) -> int:
    config = _config(args)
    document = load_document(args.document)
    store = _store(args.store, config)
    results = complete_document(document, store, _lexicon(args), config)
    out = Path(args.output) if args.output else _derived(args.document, ".results.jsonl")
    _write(out, dumps_results(results, sentence_count=len(document)))
    audit = "".join(line + "\n" for r in results for line in r.audit_lines())
    _write(Path(args.audit) if args.audit else _derived(out, ".audit.log"), audit)
    sys.stdout.write(completion_report(results, len(document)).render())
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        results, sentence_count = load_results(args.results)
    except OSError as exc:
        raise DataError(f"cannot read results: {exc.strerror}", path=args.results) from None
    report = completion_report(results, sentence_count)
    sys.stdout.write(report.render())
    if args.json:
        _write(Path(args.json), dump_line(report.to_json()) + "\n")
    return EXIT_OK


def _parse_windows(text: str) -> list[int]:
    try:
        windows = [int(w) for w in text.split(",") if w.strip()]
    except ValueError:
        raise UsageError(f"bad window list {text!r}") from None
    if not windows or any(w < 1 for w in windows):
        raise UsageError(f"bad window list {text!r}")
    return windows


def cmd_analyze(args) -> int:
    config = _config(args)
    windows = _parse_windows(args.windows)
    document = load_document(args.document)
    if max(windows) > len(document):
        raise DataError(f"window {max(windows)} is larger than the document ({len(document)} sentences)",
                        path=args.document)
    repetition = repetition_stats(document)
    rates = window_rates(document, windows, config.samples_per_window, _lexicon(args))
    sys.stdout.write(repetition.render() + "\n" + rates.render())
    if args.json:
        _write(Path(args.json), dump_line(repetition.to_json()) + "\n" + dump_line(rates.to_json()) + "\n")
    return EXIT_OK


def cmd_convert(args) -> int:
    path = Path(args.column_file)
    try:
        with path.open(encoding="utf-8") as stream:
            document = convert_columns(stream, str(path))
    except OSError as exc:
        raise DataError(f"cannot read: {exc.strerror}", path=str(path)) from None
    out = Path(args.output) if args.output else _derived(path, ".jsonl")
    if out == path:
        out = _derived(path, ".converted.jsonl")
    _write(out, dumps_document(document))
    return EXIT_OK


def cmd_run(args) -> int:
    config = _config(args)
    document = load_document(args.document)
    result = run_pipeline(document, config, _lexicon(args))
    out = Path(args.output) if args.output else _derived(args.document, ".run")
    out.mkdir(parents=True, exist_ok=True)
    _write(out / "store.json", result.store.dumps())
    _write(out / "document.jsonl", dumps_document(result.document))
    _write(out / "results.jsonl", dumps_results(result.results, sentence_count=len(document)))
    _write(out / "audit.log", "".join(line + "\n" for line in result.audit))
    _write(out / "report.txt", result.report.render())
    _write(out / "report.json", dump_line(result.report.to_json()) + "\n")
    sys.stdout.write(result.report.render())
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, *, lexicon: bool = True) -> None:
    p.add_argument("--config", help="JSON configuration file; flags override it")
    if lexicon:
        p.add_argument("--synonyms", help="synonym lexicon: one ring of lemmas per line")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="discparse",
                                     description="Complete and disambiguate parses with discourse information")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a discourse store snapshot from complete parses")
    p.add_argument("document")
    p.add_argument("-o", "--output")
    p.add_argument("--window", type=int)
    _add_common(p, lexicon=False)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("disambiguate", help="select a parse for multi-parse sentences")
    p.add_argument("document")
    p.add_argument("--store", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--audit")
    p.add_argument("--window", type=int)
    p.add_argument("--similar-discount")
    _add_common(p)
    p.set_defaults(func=cmd_disambiguate)

    p = sub.add_parser("complete", help="complete partial parses")
    p.add_argument("document")
    p.add_argument("--store", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--audit")
    p.add_argument("--window", type=int)
    p.add_argument("--no-fallback", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("report", help="summarize a completion results file")
    p.add_argument("results")
    p.add_argument("--json")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("analyze", help="lemma repetition and collocation repetition by window")
    p.add_argument("document")
    p.add_argument("--windows", required=True, help="comma-separated window sizes")
    p.add_argument("--samples", type=int)
    p.add_argument("--json")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("convert", help="convert a column-per-token treebank into a document")
    p.add_argument("column_file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("run", help="build, disambiguate, complete and report in one pass")
    p.add_argument("document")
    p.add_argument("-o", "--output", help="output directory")
    p.add_argument("--window", type=int)
    p.add_argument("--no-fallback", action="store_true")
    p.add_argument("--similar-discount")
    _add_common(p)
    p.set_defaults(func=cmd_run)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"discparse: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, PipelineError, StoreFrozenError, StoreNotFrozenError) as exc:
        print(f"discparse: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
