"""Choose among the candidate parses of a sentence by discourse support."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .matcher import MatchLevel, MatchResult, SynonymLexicon, match_collocation
from .model import NON_COLLOCATING, DependencyTree, ParseForest, require_valid
from .store import CollocationKey, DiscourseStore

DEFAULT_SIMILAR_DISCOUNT = Fraction(1, 2)


@dataclass(frozen=True)
class ScoredCollocation:
    triple: CollocationKey
    match: MatchResult
    contribution: Fraction


@dataclass(frozen=True)
class CandidateScore:
    candidate_index: int
    per_collocation: tuple[ScoredCollocation, ...]

    @property
    def total(self) -> Fraction:
        return sum((c.contribution for c in self.per_collocation), Fraction(0))


@dataclass(frozen=True)
class Selection:
    chosen: int
    scores: tuple[CandidateScore, ...]
    decided: bool


def extract_collocations(tree: DependencyTree) -> list[CollocationKey]:
    """One triple per edge between collocating tokens, ordered by dependent."""
    require_valid(tree)
    triples = []
    for edge in tree.edges:
        if edge.head == 0:
            continue
        dep, head = tree.token(edge.dependent), tree.token(edge.head)
        if dep.pos in NON_COLLOCATING or head.pos in NON_COLLOCATING:
            continue
        triples.append(CollocationKey(dep.lemma, dep.pos, edge.relation, head.lemma, head.pos))
    return triples


def score_candidate(store: DiscourseStore, lexicon: SynonymLexicon, tree: DependencyTree, *,
                    similar_discount: Fraction = DEFAULT_SIMILAR_DISCOUNT,
                    sentence_id: int | None = None, candidate_index: int = 0) -> CandidateScore:
    """Sum identical matches at full value and synonym matches at a discount.

    Instances from ``sentence_id`` itself never support it.
    """
    scored = []
    for triple in extract_collocations(tree):
        match = match_collocation(store, lexicon, triple, around=sentence_id, exclude=sentence_id)
        if match.level is MatchLevel.IDENTICAL:
            contribution = match.score
        elif match.level is MatchLevel.SYNONYM:
            contribution = match.score * similar_discount
        else:
            contribution = Fraction(0)
        scored.append(ScoredCollocation(triple, match, contribution))
    return CandidateScore(candidate_index, tuple(scored))


def select_parse(store: DiscourseStore, lexicon: SynonymLexicon, forest: ParseForest, *,
                 similar_discount: Fraction = DEFAULT_SIMILAR_DISCOUNT,
                 sentence_id: int | None = None) -> Selection:
    if len(forest.candidates) < 2:
        raise ValueError("a parse forest needs at least 2 candidates")
    scores = tuple(
        score_candidate(store, lexicon, cand, similar_discount=similar_discount,
                        sentence_id=sentence_id, candidate_index=i)
        for i, cand in enumerate(forest.candidates))
    totals = [s.total for s in scores]
    best = max(totals)
    winners = [i for i, t in enumerate(totals) if t == best]
    if len(winners) == 1:
        return Selection(winners[0], scores, True)
    return Selection(0, scores, False)
