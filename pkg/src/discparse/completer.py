"""Completion of partial parses from discourse evidence.

Each fragment is first made consistent with the discourse (POS retags and
reattachments inside the fragment), then adjacent units are joined through
the best-supported attachment on their facing spines.  Fragments that
remain apart can be glued together with the fallback heuristics.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Union

from .config import DEFAULT_CONFIG, PipelineConfig
from .matcher import (
    NO_MATCH,
    MatchLevel,
    MatchResult,
    SynonymLexicon,
    candidate_relations,
    match_collocation,
)
from .model import (
    DIRECT,
    NON_COLLOCATING,
    SUBJ,
    DependencyEdge,
    DependencyTree,
    InvalidTreeError,
    ParseFragment,
    PartialParse,
    PosTag,
    Relation,
    Token,
    _projective_unchecked,
    is_valid_tree,
    merge_trees,
    require_valid,
)
from .store import CollocationKey, DiscourseStore

logger = logging.getLogger(__name__)

NOUN_ROOTS = frozenset({PosTag.N, PosTag.PN})


@dataclass(frozen=True)
class RetagPos:
    token: int
    lemma: str
    old: PosTag
    new: PosTag
    evidence: str

    def describe(self) -> str:
        return (f"retag token={self.token} lemma={self.lemma} {self.old.value}->{self.new.value} "
                f"profile={self.evidence}")


@dataclass(frozen=True)
class Reattach:
    dependent: int
    old_head: int
    new_head: int
    old_relation: Relation
    new_relation: Relation
    evidence: MatchResult

    def describe(self) -> str:
        return (f"reattach dependent={self.dependent} head={self.old_head}->{self.new_head} "
                f"relation={self.old_relation}->{self.new_relation} evidence={self.evidence}")


RestructureAction = Union[RetagPos, Reattach]


class JoinDirection(str, Enum):
    RIGHT_UNDER_LEFT = "right-under-left"
    LEFT_UNDER_RIGHT = "left-under-right"


@dataclass(frozen=True)
class JoinDecision:
    direction: JoinDirection
    head: int
    dependent: int
    relation: Relation
    match: MatchResult
    heuristic: bool
    left_span: tuple[int, int]
    right_span: tuple[int, int]
    rule: str = "discourse"

    def __post_init__(self):
        if self.heuristic != (self.match.level is MatchLevel.NONE):
            raise ValueError("a join is heuristic exactly when it has no discourse match")

    def describe(self) -> str:
        return (f"join {self.direction.value} rule={self.rule} head={self.head} "
                f"dependent={self.dependent} relation={self.relation} "
                f"units={self.left_span[0]}-{self.left_span[1]}+{self.right_span[0]}-{self.right_span[1]} "
                f"evidence={self.match}")


class CompletionStatus(str, Enum):
    UNIFIED = "unified"
    PARTIALLY_JOINED = "partially-joined"
    UNCHANGED = "unchanged"


@dataclass(frozen=True)
class CompletionResult:
    status: CompletionStatus
    output: DependencyTree | PartialParse
    actions: tuple[RestructureAction, ...] = ()
    joins: tuple[JoinDecision, ...] = ()
    sentence_id: int | None = None

    @property
    def discourse_joins(self) -> int:
        return sum(1 for j in self.joins if not j.heuristic)

    @property
    def heuristic_joins(self) -> int:
        return sum(1 for j in self.joins if j.heuristic)

    def audit_lines(self) -> list[str]:
        prefix = f"sentence={self.sentence_id}\t" if self.sentence_id is not None else ""
        return [prefix + item.describe() for item in (*self.actions, *self.joins)]


def _key(modifier: Token, relation: Relation, modifiee: Token) -> CollocationKey | None:
    if modifier.pos in NON_COLLOCATING or modifiee.pos in NON_COLLOCATING:
        return None
    return CollocationKey(modifier.lemma, modifier.pos, relation, modifiee.lemma, modifiee.pos)


def best_attachment(store: DiscourseStore, lexicon: SynonymLexicon, modifier: Token,
                    modifiee: Token, *, sentence_id: int | None = None) -> tuple[MatchResult, Relation | None]:
    """Best-supported relation for ``modifier`` depending on ``modifiee``.

    Ties in (level, score) go to the smaller relation.
    """
    if modifier.pos in NON_COLLOCATING or modifiee.pos in NON_COLLOCATING:
        return NO_MATCH, None
    best, best_rel = NO_MATCH, None
    for rel in candidate_relations(store, modifier.lemma, modifiee.lemma, around=sentence_id):
        result = match_collocation(store, lexicon, _key(modifier, rel, modifiee), around=sentence_id)
        if result.level is not MatchLevel.NONE and result.rank() > best.rank():
            best, best_rel = result, rel
    return best, best_rel


def _retag_target(store: DiscourseStore, token: Token, config: PipelineConfig,
                  sentence_id: int | None) -> tuple[PosTag, str] | None:
    profile = store.pos_profile(token.lemma, around=sentence_id)
    if profile.total < config.retag_min_count:
        return None
    dominant = profile.dominant()
    if dominant is None:
        return None
    pos, share = dominant
    if pos is token.pos or share < config.retag_pos_ratio:
        return None
    return pos, profile.summary()


def restructure_fragment(store: DiscourseStore, lexicon: SynonymLexicon, fragment: ParseFragment,
                         config: PipelineConfig = DEFAULT_CONFIG, *,
                         sentence_id: int | None = None) -> tuple[ParseFragment, list[RestructureAction]]:
    """Retag and reattach words whose usage disagrees with the discourse.

    A token is retagged when its lemma has at least ``retag_min_count``
    instances and one POS holds at least ``retag_pos_ratio`` of them.  An
    edge without lexical support (neither identical nor synonym) is moved
    to the head inside the fragment with the best such support.  Only the
    best alternative is tried; if it would break the tree (or its
    projectivity) it is skipped, and passes repeat until nothing changes.
    """
    store._require_frozen()
    if fragment.violations():
        raise InvalidTreeError("invalid fragment: " + "; ".join(map(str, fragment.violations())))
    tree = fragment.tree
    projective = _projective_unchecked(tree)
    actions: list[RestructureAction] = []

    for tok in tree.tokens:
        target = _retag_target(store, tok, config, sentence_id)
        if target is not None:
            new_pos, evidence = target
            tree = tree.with_token(replace(tok, pos=new_pos, raw_pos=""))
            actions.append(RetagPos(tok.index, tok.lemma, tok.pos, new_pos, evidence))

    changed = True
    while changed:
        changed = False
        for index in [t.index for t in tree.tokens]:
            edge = tree.edge(index)
            if edge.head == 0:
                continue
            dep, head = tree.token(index), tree.token(edge.head)
            key = _key(dep, edge.relation, head)
            if key is None:
                continue
            current = match_collocation(store, lexicon, key, around=sentence_id)
            if current.level >= MatchLevel.SYNONYM:
                continue
            best = None
            for cand in tree.tokens:
                if cand.index in (index, edge.head):
                    continue
                result, rel = best_attachment(store, lexicon, dep, cand, sentence_id=sentence_id)
                if result.level < MatchLevel.SYNONYM:
                    continue
                order = (-result.level, -result.score, abs(cand.index - index), cand.index, rel)
                if best is None or order < best[0]:
                    best = (order, cand.index, rel, result)
            if best is None:
                continue
            _, new_head, rel, result = best
            candidate = tree.with_edge(DependencyEdge(index, new_head, rel, edge.ambiguous))
            if not is_valid_tree(candidate) or (projective and not _projective_unchecked(candidate)):
                logger.debug("skipped reattaching %d to %d: would break the tree", index, new_head)
                continue
            tree = candidate
            actions.append(Reattach(index, edge.head, new_head, edge.relation, rel, result))
            changed = True

    if not actions:
        return fragment, []
    return ParseFragment(fragment.span, tree), actions


def _join_candidates(store, lexicon, left: DependencyTree, right: DependencyTree, sentence_id):
    """All supported spine attachments with their sort keys (smaller is better)."""
    found = []
    plans = [
        (JoinDirection.RIGHT_UNDER_LEFT, 0, right.root, left.right_spine(), left, right),
        (JoinDirection.LEFT_UNDER_RIGHT, 1, left.root, right.left_spine(), right, left),
    ]
    for direction, rank, dependent, spine, head_tree, dep_tree in plans:
        modifier = dep_tree.token(dependent)
        for head in spine:
            result, rel = best_attachment(store, lexicon, modifier, head_tree.token(head),
                                          sentence_id=sentence_id)
            if result.level is MatchLevel.NONE:
                continue
            order = (-result.level, -result.score, abs(head - dependent), rank, rel)
            found.append((order, direction, head, dependent, rel, result))
    return found


def _check_join_inputs(left: DependencyTree, right: DependencyTree) -> None:
    for tree in (left, right):
        require_valid(tree)
        if not _projective_unchecked(tree):
            raise InvalidTreeError("join inputs must be projective")
    if left.last + 1 != right.first:
        raise ValueError(f"non-adjacent spans {left.span} and {right.span}")


def try_join(store: DiscourseStore, lexicon: SynonymLexicon, left: DependencyTree, right: DependencyTree,
             *, sentence_id: int | None = None) -> tuple[DependencyTree, JoinDecision] | None:
    """Join two adjacent units through their best-supported spine attachment.

    Either the right root goes under a node on the left unit's right spine,
    or the left root under a node on the right unit's left spine.  Candidates
    are ordered by level, score, distance and direction (right-under-left
    first).  Returns ``None`` when no candidate has any support.
    """
    store._require_frozen()
    _check_join_inputs(left, right)
    found = _join_candidates(store, lexicon, left, right, sentence_id)
    if not found:
        return None
    _, direction, head, dependent, rel, result = min(found, key=lambda c: c[0])
    joined = merge_trees(left, right, DependencyEdge(dependent, head, rel))
    decision = JoinDecision(direction, head, dependent, rel, result, False, left.span, right.span)
    return joined, decision


def _units(parse: PartialParse | DependencyTree) -> list[DependencyTree]:
    if isinstance(parse, DependencyTree):
        return [parse]
    return [f.tree for f in parse.fragments]


def _assemble(units: list[DependencyTree]) -> PartialParse | DependencyTree:
    if len(units) == 1:
        return units[0]
    return PartialParse(tuple(ParseFragment.of(u) for u in units))


def join_all(store: DiscourseStore, lexicon: SynonymLexicon, partial: PartialParse | DependencyTree, *,
             sentence_id: int | None = None) -> tuple[PartialParse | DependencyTree, list[JoinDecision]]:
    """Left-to-right sweeps of ``try_join`` over adjacent units until one sweep joins nothing."""
    store._require_frozen()
    units = _units(partial)
    joins: list[JoinDecision] = []
    while len(units) > 1:
        swept: list[DependencyTree] = []
        current = units[0]
        joined_any = False
        for nxt in units[1:]:
            outcome = try_join(store, lexicon, current, nxt, sentence_id=sentence_id)
            if outcome is None:
                swept.append(current)
                current = nxt
            else:
                current, decision = outcome
                joins.append(decision)
                joined_any = True
        swept.append(current)
        units = swept
        if not joined_any:
            break
    if not joins:
        return partial, []
    return _assemble(units), joins


def heuristic_join(partial: PartialParse | DependencyTree) -> tuple[DependencyTree, list[JoinDecision]]:
    """Join every unit without discourse evidence.

    A noun-rooted unit directly followed by a verb-rooted one goes under the
    verb root as SUBJ; everything else attaches its root to the last token
    of the unit before it.
    """
    units = _units(partial)
    joins: list[JoinDecision] = []
    paired: list[DependencyTree] = []
    i = 0
    while i < len(units):
        left = units[i]
        if i + 1 < len(units):
            right = units[i + 1]
            if left.token(left.root).pos in NOUN_ROOTS and right.token(right.root).pos is PosTag.V:
                edge = DependencyEdge(left.root, right.root, SUBJ)
                joins.append(JoinDecision(JoinDirection.LEFT_UNDER_RIGHT, right.root, left.root, SUBJ,
                                          NO_MATCH, True, left.span, right.span, rule="np-vp"))
                paired.append(merge_trees(left, right, edge))
                i += 2
                continue
        paired.append(left)
        i += 1

    current = paired[0]
    for nxt in paired[1:]:
        edge = DependencyEdge(nxt.root, current.last, DIRECT)
        joins.append(JoinDecision(JoinDirection.RIGHT_UNDER_LEFT, current.last, nxt.root, DIRECT,
                                  NO_MATCH, True, current.span, nxt.span, rule="default"))
        current = merge_trees(current, nxt, edge)
    return current, joins


def complete(store: DiscourseStore, lexicon: SynonymLexicon, partial: PartialParse,
             config: PipelineConfig = DEFAULT_CONFIG, *, sentence_id: int | None = None) -> CompletionResult:
    """Restructure each fragment, join by discourse evidence, then fall back.

    Units produced by discourse joins are restructured once more, which lets
    a word move to a head that sat in a different fragment before the join.
    """
    store._require_frozen()
    actions: list[RestructureAction] = []
    fragments = []
    for frag in partial.fragments:
        new_frag, acts = restructure_fragment(store, lexicon, frag, config, sentence_id=sentence_id)
        fragments.append(new_frag)
        actions.extend(acts)

    joined, joins = join_all(store, lexicon, PartialParse(tuple(fragments)), sentence_id=sentence_id)
    if joins:
        original_spans = {f.span for f in partial.fragments}
        units = []
        for unit in _units(joined):
            if unit.span not in original_spans:
                new_frag, acts = restructure_fragment(store, lexicon, ParseFragment.of(unit), config,
                                                      sentence_id=sentence_id)
                unit = new_frag.tree
                actions.extend(acts)
            units.append(unit)
        joined = _assemble(units)
    elif actions:
        joined = PartialParse(tuple(fragments))
    else:
        joined = partial

    if isinstance(joined, PartialParse) and config.fallback:
        joined, fallback_joins = heuristic_join(joined)
        joins.extend(fallback_joins)

    if isinstance(joined, DependencyTree):
        status = CompletionStatus.UNIFIED
    elif actions or joins:
        status = CompletionStatus.PARTIALLY_JOINED
    else:
        status = CompletionStatus.UNCHANGED
    return CompletionResult(status, joined, tuple(actions), tuple(joins), sentence_id)
