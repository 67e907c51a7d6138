"""Build the discourse store, disambiguate, complete, report."""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import CompletionReport, completion_report
from .completer import CompletionResult, complete
from .config import DEFAULT_CONFIG, PipelineConfig
from .disambiguator import Selection, select_parse
from .matcher import EMPTY_LEXICON, SynonymLexicon
from .model import Document, ParseForest, PartialParse, SentenceRecord
from .store import DiscourseStore


class PipelineError(RuntimeError):
    def __init__(self, message: str, sentence_id: int | None = None):
        self.sentence_id = sentence_id
        super().__init__(f"sentence {sentence_id}: {message}" if sentence_id is not None else message)


@dataclass(frozen=True)
class PipelineResult:
    document: Document
    store: DiscourseStore
    selections: dict[int, Selection]
    results: tuple[CompletionResult, ...]
    report: CompletionReport
    audit: tuple[str, ...]


def selection_audit(sentence_id: int, selection: Selection) -> str:
    totals = ",".join(str(s.total) for s in selection.scores)
    return f"sentence={sentence_id}\tselect chosen={selection.chosen} decided={selection.decided} totals={totals}"


def build_store(document: Document, window: int | None = None) -> DiscourseStore:
    """An unfrozen store holding every complete parse of the document."""
    store = DiscourseStore(window=window)
    for record in document.complete_records():
        try:
            store.ingest_tree(record.sentence_id, record.parse)
        except (ValueError, RuntimeError) as exc:
            raise PipelineError(str(exc), record.sentence_id) from exc
    return store


def disambiguate(document: Document, store: DiscourseStore, lexicon: SynonymLexicon = EMPTY_LEXICON,
                 config: PipelineConfig = DEFAULT_CONFIG, *, enrich: bool = True) -> dict[int, Selection]:
    """Select a parse for every multi-parse record, in document order.

    With ``enrich`` the store must be unfrozen; each selected parse is added
    to it before the next selection is made.
    """
    selections: dict[int, Selection] = {}
    for record in document.records:
        if not isinstance(record.parse, ParseForest):
            continue
        sid = record.sentence_id
        try:
            view = store.copy().freeze() if enrich else store
            selection = select_parse(view, lexicon, record.parse, similar_discount=config.similar_discount,
                                     sentence_id=sid)
            if enrich:
                store.ingest_selected_parse(sid, record.parse, selection.chosen)
        except (ValueError, RuntimeError, IndexError) as exc:
            raise PipelineError(str(exc), sid) from exc
        selections[sid] = selection
    return selections


def complete_document(document: Document, store: DiscourseStore, lexicon: SynonymLexicon = EMPTY_LEXICON,
                      config: PipelineConfig = DEFAULT_CONFIG) -> list[CompletionResult]:
    results = []
    for record in document.records:
        if not isinstance(record.parse, PartialParse):
            continue
        try:
            results.append(complete(store, lexicon, record.parse, config, sentence_id=record.sentence_id))
        except (ValueError, RuntimeError) as exc:
            raise PipelineError(str(exc), record.sentence_id) from exc
    return results


def apply_outputs(document: Document, selections: dict[int, Selection],
                  results: list[CompletionResult]) -> Document:
    completed = {r.sentence_id: r.output for r in results}
    records = []
    for record in document.records:
        sid = record.sentence_id
        if isinstance(record.parse, ParseForest) and sid in selections:
            records.append(SentenceRecord(sid, record.parse.candidates[selections[sid].chosen]))
        elif isinstance(record.parse, PartialParse) and sid in completed:
            records.append(SentenceRecord(sid, completed[sid]))
        else:
            records.append(record)
    return document.with_records(records)


def run_pipeline(document: Document, config: PipelineConfig = DEFAULT_CONFIG,
                 lexicon: SynonymLexicon = EMPTY_LEXICON) -> PipelineResult:
    """Ingest complete parses, select multi-parse sentences, freeze, complete partial parses.

    Completion only reads the frozen store, so no sentence sees evidence
    that was not available to every other one.
    """
    store = build_store(document, config.window)
    selections = disambiguate(document, store, lexicon, config)
    store.freeze()
    results = complete_document(document, store, lexicon, config)

    audit: list[str] = []
    for sid, selection in selections.items():
        audit.append(selection_audit(sid, selection))
    for result in results:
        audit.extend(result.audit_lines())
    report = completion_report(results, sentence_count=len(document))
    return PipelineResult(apply_outputs(document, selections, results), store, selections,
                          tuple(results), report, tuple(audit))
