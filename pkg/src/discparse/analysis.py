"""Corpus statistics: lemma repetition, collocation repetition by window size,
and completion outcome counts."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .completer import CompletionResult, CompletionStatus
from .matcher import EMPTY_LEXICON, MatchLevel, SynonymLexicon, match_level_only
from .model import (
    NON_COLLOCATING,
    DependencyEdge,
    DependencyTree,
    Document,
    PosTag,
    _projective_unchecked,
)
from .store import CollocationKey, DiscourseStore

CONTENT_POS = (PosTag.N, PosTag.V, PosTag.AJ, PosTag.AV, PosTag.PN)
POS_NAMES = {PosTag.N: "Noun", PosTag.V: "Verb", PosTag.AJ: "Adjective",
             PosTag.AV: "Adverb", PosTag.PN: "Pronoun"}


def percent(part: int | Fraction, whole: int | Fraction) -> Fraction:
    if not whole:
        return Fraction(0)
    return Fraction(part) * 100 / Fraction(whole)


def render_percent(value: Fraction, digits: int = 1) -> str:
    """Round half up at ``digits`` decimals, exactly."""
    scale = 10 ** digits
    scaled = value * scale
    rounded = math.floor(scaled + Fraction(1, 2))
    sign = "-" if rounded < 0 else ""
    whole, frac = divmod(abs(rounded), scale)
    return f"{sign}{whole}.{frac:0{digits}d}" if digits else f"{sign}{whole}"


def _table(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    rows = [list(header)] + [list(r) for r in rows]
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = []
    for n, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# -- lemma repetition ---------------------------------------------------

@dataclass(frozen=True)
class RepetitionRow:
    label: str
    occurrences: int
    share: Fraction | None
    repeated2: Fraction
    repeated5: Fraction


@dataclass(frozen=True)
class RepetitionReport:
    rows: tuple[RepetitionRow, ...]
    total: RepetitionRow

    def render(self) -> str:
        header = ("POS", "2+ times (%)", "5+ times (%)", "occurrences", "share (%)")
        body = [(r.label, render_percent(r.repeated2), render_percent(r.repeated5), str(r.occurrences),
                 render_percent(r.share) if r.share is not None else "---")
                for r in (*self.rows, self.total)]
        return _table(header, body)

    def to_json(self) -> dict:
        def row(r: RepetitionRow) -> dict:
            return {"pos": r.label, "occurrences": r.occurrences,
                    "share_pct": None if r.share is None else render_percent(r.share),
                    "repeated2_pct": render_percent(r.repeated2),
                    "repeated5_pct": render_percent(r.repeated5)}
        return {"report": "repetition", "rows": [row(r) for r in self.rows], "total": row(self.total)}


def repetition_stats(document: Document) -> RepetitionReport:
    """Per-POS counts of content words in complete parses.

    The repetition columns give the share of a POS's occurrences whose
    lemma occurs at least 2 (resp. 5) times among the content words of the
    document's complete parses.
    """
    if not document.records:
        raise ValueError("empty document")
    content = [t for rec in document.complete_records() for t in rec.parse.tokens
               if t.pos in CONTENT_POS]
    lemma_counts = Counter(t.lemma for t in content)
    grand_total = len(content)
    rows = []
    for pos in CONTENT_POS:
        toks = [t for t in content if t.pos is pos]
        r2 = sum(1 for t in toks if lemma_counts[t.lemma] >= 2)
        r5 = sum(1 for t in toks if lemma_counts[t.lemma] >= 5)
        rows.append(RepetitionRow(POS_NAMES[pos], len(toks), percent(len(toks), grand_total),
                                  percent(r2, len(toks)), percent(r5, len(toks))))
    r2 = sum(1 for t in content if lemma_counts[t.lemma] >= 2)
    r5 = sum(1 for t in content if lemma_counts[t.lemma] >= 5)
    total = RepetitionRow("Total", grand_total, None, percent(r2, grand_total), percent(r5, grand_total))
    return RepetitionReport(tuple(rows), total)


# -- collocation repetition by window -------------------------------------

@dataclass(frozen=True)
class AmbiguousPhrase:
    sentence_id: int
    dependent: int
    candidates: tuple[CollocationKey, ...]


@dataclass(frozen=True)
class AreaRate:
    start: int
    phrases: int
    identical: int
    similar: int


@dataclass(frozen=True)
class WindowRate:
    window: int
    identical_rate: Fraction
    similar_rate: Fraction
    areas: tuple[AreaRate, ...]


@dataclass(frozen=True)
class WindowRateReport:
    rates: tuple[WindowRate, ...]

    def render(self) -> str:
        header = ("window", "areas", "identical", "identical or similar")
        body = [(str(r.window), str(len(r.areas)), render_percent(r.identical_rate * 100, 1),
                 render_percent(r.similar_rate * 100, 1)) for r in self.rates]
        return _table(header, body)

    def to_json(self) -> dict:
        return {"report": "window-rates", "rates": [
            {"window": r.window, "identical_rate": str(r.identical_rate),
             "similar_rate": str(r.similar_rate),
             "areas": [{"start": a.start, "phrases": a.phrases, "identical": a.identical,
                        "similar": a.similar} for a in r.areas]}
            for r in self.rates]}


def ambiguous_phrases(sentence_id: int, tree: DependencyTree) -> list[AmbiguousPhrase]:
    """Edges flagged ambiguous, each with every projective alternative head.

    Every candidate keeps the edge's relation, as when a prepositional
    phrase is tried against each of its possible attachment sites.
    """
    phrases = []
    for edge in tree.edges:
        if not edge.ambiguous or edge.head == 0:
            continue
        dep = tree.token(edge.dependent)
        if dep.pos in NON_COLLOCATING:
            continue
        below = tree.subtree(edge.dependent)
        heads = [edge.head]
        for tok in tree.tokens:
            if tok.index in below or tok.index == edge.head:
                continue
            moved = tree.with_edge(DependencyEdge(edge.dependent, tok.index, edge.relation))
            if _projective_unchecked(moved):
                heads.append(tok.index)
        triples = []
        for h in heads:
            head = tree.token(h)
            if head.pos in NON_COLLOCATING:
                continue
            triples.append(CollocationKey(dep.lemma, dep.pos, edge.relation, head.lemma, head.pos))
        if triples:
            phrases.append(AmbiguousPhrase(sentence_id, edge.dependent, tuple(triples)))
    return phrases


def sample_starts(n_sentences: int, window: int, samples: int) -> list[int]:
    """Offsets of evenly spaced areas, fixed stride from the first sentence.

    An area that would run past the end is pulled back to end at the last
    sentence; duplicate offsets collapse.
    """
    if window > n_sentences:
        raise ValueError(f"window {window} is larger than the document ({n_sentences} sentences)")
    if window == n_sentences or samples == 1:
        return [0]
    last = n_sentences - window
    stride = max(1, math.ceil(last / (samples - 1)))
    return sorted({min(k * stride, last) for k in range(samples)})


def area_rate(trees: Sequence[tuple[int, DependencyTree]], lexicon: SynonymLexicon) -> AreaRate:
    store = DiscourseStore()
    for sid, tree in trees:
        store.ingest_tree(sid, tree)
    store.freeze()
    phrases = identical = similar = 0
    for sid, tree in trees:
        for phrase in ambiguous_phrases(sid, tree):
            phrases += 1
            best = max((match_level_only(store, lexicon, t, exclude=sid) for t in phrase.candidates),
                       default=MatchLevel.NONE)
            identical += best is MatchLevel.IDENTICAL
            similar += best >= MatchLevel.SYNONYM
    return AreaRate(trees[0][0] if trees else 0, phrases, identical, similar)


def window_rates(document: Document, windows: Sequence[int], samples_per_window: int = 8,
                 lexicon: SynonymLexicon = EMPTY_LEXICON) -> WindowRateReport:
    """Share of ambiguous phrases with a repeated candidate collocation elsewhere in the area.

    A phrase counts as identical (resp. similar) when at least one of its
    candidate triples has an identical (resp. identical-or-synonym) match
    in another sentence of the same area.  Areas without ambiguous phrases
    do not enter the average.
    """
    records = document.records
    rates = []
    for window in windows:
        if window < 1:
            raise ValueError("window sizes must be positive")
        areas = []
        for start in sample_starts(len(records), window, samples_per_window):
            trees = [(r.sentence_id, r.parse) for r in records[start:start + window]
                     if isinstance(r.parse, DependencyTree)]
            area = area_rate(trees, lexicon)
            areas.append(AreaRate(records[start].sentence_id, area.phrases, area.identical, area.similar))
        counted = [a for a in areas if a.phrases]
        if counted:
            ident = sum((Fraction(a.identical, a.phrases) for a in counted), Fraction(0)) / len(counted)
            sim = sum((Fraction(a.similar, a.phrases) for a in counted), Fraction(0)) / len(counted)
        else:
            ident = sim = Fraction(0)
        rates.append(WindowRate(window, ident, sim, tuple(areas)))
    return WindowRateReport(tuple(rates))


# -- completion outcomes ------------------------------------------------

@dataclass(frozen=True)
class CompletionReport:
    sentence_count: int
    incomplete: int
    unified: int
    partially_joined: int
    unchanged: int

    def percentages(self) -> tuple[Fraction, Fraction, Fraction]:
        return (percent(self.unified, self.incomplete), percent(self.partially_joined, self.incomplete),
                percent(self.unchanged, self.incomplete))

    def rendered_percentages(self) -> tuple[str, str, str]:
        return tuple(render_percent(p) for p in self.percentages())

    def render(self) -> str:
        u, p, n = self.rendered_percentages()
        body = [
            ("Number of sentences in discourse", str(self.sentence_count)),
            ("Incomplete parses", str(self.incomplete)),
            ("Unified into a single parse", f"{self.unified} ({u}%)"),
            ("Partially joined or restructured", f"{self.partially_joined} ({p}%)"),
            ("Not changed", f"{self.unchanged} ({n}%)"),
        ]
        return _table(("", "count"), body)

    def to_json(self) -> dict:
        u, p, n = self.rendered_percentages()
        return {"report": "completion", "sentence_count": self.sentence_count,
                "incomplete": self.incomplete,
                "unified": {"count": self.unified, "pct": u},
                "partially_joined": {"count": self.partially_joined, "pct": p},
                "unchanged": {"count": self.unchanged, "pct": n}}


def classify(result: CompletionResult) -> CompletionStatus:
    """Outcome category; a unification reached only by fallback joins counts as partial."""
    if result.status is CompletionStatus.UNIFIED and result.discourse_joins == 0:
        return CompletionStatus.PARTIALLY_JOINED
    return result.status


def completion_report(results: Iterable[CompletionResult], sentence_count: int | None = None) -> CompletionReport:
    counts = Counter(classify(r) for r in results)
    incomplete = sum(counts.values())
    return CompletionReport(
        sentence_count if sentence_count is not None else incomplete,
        incomplete,
        counts[CompletionStatus.UNIFIED],
        counts[CompletionStatus.PARTIALLY_JOINED],
        counts[CompletionStatus.UNCHANGED],
    )


def report_from_counts(unified: int, partially_joined: int, unchanged: int,
                       sentence_count: int | None = None) -> CompletionReport:
    incomplete = unified + partially_joined + unchanged
    return CompletionReport(sentence_count if sentence_count is not None else incomplete,
                            incomplete, unified, partially_joined, unchanged)
