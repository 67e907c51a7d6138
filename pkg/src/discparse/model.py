"""Sentences, dependency trees, partial parses and documents.

Token indices are sentence-level everywhere: a fragment covering tokens
5..9 holds a tree whose tokens carry indices 5..9, so fragments can be
joined by taking the union of their tokens and edges.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Union

logger = logging.getLogger(__name__)


class InvalidTreeError(ValueError):
    pass


class PosTag(str, Enum):
    N = "N"
    PN = "PN"
    V = "V"
    AJ = "AJ"
    AV = "AV"
    CJ = "CJ"
    PP = "PP"
    DET = "DET"
    PUNC = "PUNC"
    OTHER = "OTHER"

    @classmethod
    def parse(cls, value: str) -> tuple[PosTag, str]:
        """Return ``(tag, raw)``; ``raw`` keeps unknown tags verbatim."""
        try:
            return cls(value), ""
        except ValueError:
            return cls.OTHER, value

    def __str__(self) -> str:
        return self.value


# Tokens with these tags never become collocation endpoints.
NON_COLLOCATING = frozenset({PosTag.PUNC, PosTag.OTHER})

GRAMMATICAL_RELATIONS = ("SUBJ", "OBJ", "RECIPIENT", "DIRECT")


@dataclass(frozen=True, order=True)
class Relation:
    """Either a grammatical role or a preposition (``kind == "PREP"``)."""

    kind: str
    lemma: str = ""

    def __post_init__(self):
        if self.kind == "PREP":
            if not self.lemma or self.lemma != self.lemma.lower():
                raise ValueError(f"preposition lemma must be non-empty lowercase: {self.lemma!r}")
        elif self.kind in GRAMMATICAL_RELATIONS:
            if self.lemma:
                raise ValueError(f"grammatical relation {self.kind} takes no lemma")
        else:
            raise ValueError(f"unknown relation kind {self.kind!r}")

    @classmethod
    def prep(cls, lemma: str) -> Relation:
        return cls("PREP", lemma.lower())

    @classmethod
    def parse(cls, text: str) -> Relation:
        """Parse ``SUBJ``/``OBJ``/``RECIPIENT``/``DIRECT`` or ``prep:<lemma>``.

        Anything else maps to DIRECT with a warning so ingestion stays total.
        """
        if text in GRAMMATICAL_RELATIONS:
            return cls(text)
        if text.startswith("prep:") and len(text) > 5 and " " not in text:
            return cls.prep(text[5:])
        logger.warning("unknown relation label %r mapped to DIRECT", text)
        return cls("DIRECT")

    @property
    def is_prep(self) -> bool:
        return self.kind == "PREP"

    def __str__(self) -> str:
        return f"prep:{self.lemma}" if self.is_prep else self.kind


SUBJ = Relation("SUBJ")
OBJ = Relation("OBJ")
RECIPIENT = Relation("RECIPIENT")
DIRECT = Relation("DIRECT")


@dataclass(frozen=True)
class Token:
    index: int
    surface: str
    lemma: str
    pos: PosTag
    raw_pos: str = ""

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"token index must be >= 1, got {self.index}")
        if not self.lemma:
            raise ValueError(f"token {self.index} has an empty lemma")
        if self.lemma != self.lemma.lower():
            object.__setattr__(self, "lemma", self.lemma.lower())
        if not isinstance(self.pos, PosTag):
            object.__setattr__(self, "pos", PosTag(self.pos))

    @property
    def collocating(self) -> bool:
        return self.pos not in NON_COLLOCATING

    @property
    def pos_label(self) -> str:
        return self.raw_pos if self.pos is PosTag.OTHER and self.raw_pos else self.pos.value


@dataclass(frozen=True)
class DependencyEdge:
    dependent: int
    head: int
    relation: Relation = DIRECT
    ambiguous: bool = False

    def __post_init__(self):
        if self.dependent < 1:
            raise ValueError(f"dependent must be >= 1, got {self.dependent}")
        if self.head < 0:
            raise ValueError(f"head must be >= 0, got {self.head}")
        if self.dependent == self.head:
            raise ValueError(f"token {self.dependent} cannot head itself")


@dataclass(frozen=True)
class Violation:
    rule: str
    indices: tuple[int, ...]
    message: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.message}"


@dataclass(frozen=True)
class DependencyTree:
    tokens: tuple[Token, ...]
    edges: tuple[DependencyEdge, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=_edge_sort_key)))

    def __len__(self) -> int:
        return len(self.tokens)

    @cached_property
    def _token_map(self) -> dict[int, Token]:
        return {t.index: t for t in self.tokens}

    @cached_property
    def _edge_map(self) -> dict[int, DependencyEdge]:
        return {e.dependent: e for e in self.edges}

    @cached_property
    def _children(self) -> dict[int, list[int]]:
        children: dict[int, list[int]] = {t.index: [] for t in self.tokens}
        children[0] = []
        for e in self.edges:
            children.setdefault(e.head, []).append(e.dependent)
        for kids in children.values():
            kids.sort()
        return children

    @property
    def first(self) -> int:
        return self.tokens[0].index

    @property
    def last(self) -> int:
        return self.tokens[-1].index

    @property
    def span(self) -> tuple[int, int]:
        return (self.first, self.last)

    @property
    def root(self) -> int:
        roots = self._children[0]
        if len(roots) != 1:
            raise InvalidTreeError("tree has no single root")
        return roots[0]

    def token(self, index: int) -> Token:
        return self._token_map[index]

    def edge(self, dependent: int) -> DependencyEdge:
        return self._edge_map[dependent]

    def head_of(self, dependent: int) -> int:
        return self._edge_map[dependent].head

    def children(self, index: int) -> list[int]:
        return list(self._children.get(index, ()))

    def subtree(self, index: int) -> set[int]:
        seen = {index}
        stack = [index]
        while stack:
            for child in self._children.get(stack.pop(), ()):
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        return seen

    def path_to_root(self, index: int) -> list[int]:
        """Indices from ``index`` up to the root, inclusive."""
        path = [index]
        while self._edge_map[path[-1]].head != 0:
            path.append(self._edge_map[path[-1]].head)
        return path

    def left_spine(self) -> list[int]:
        """Chain from the root down to the first token."""
        return list(reversed(self.path_to_root(self.first)))

    def right_spine(self) -> list[int]:
        """Chain from the root down to the last token."""
        return list(reversed(self.path_to_root(self.last)))

    def with_edge(self, edge: DependencyEdge) -> DependencyTree:
        """Replace the edge of ``edge.dependent``."""
        edges = [e for e in self.edges if e.dependent != edge.dependent]
        edges.append(edge)
        return DependencyTree(self.tokens, tuple(edges))

    def with_token(self, token: Token) -> DependencyTree:
        tokens = tuple(token if t.index == token.index else t for t in self.tokens)
        return DependencyTree(tokens, self.edges)


def _edge_sort_key(edge: DependencyEdge) -> tuple:
    return (edge.dependent, edge.head, edge.relation, edge.ambiguous)


def validate_tree(tree: DependencyTree) -> list[Violation]:
    """Check every tree invariant; violations are returned, never raised."""
    violations: list[Violation] = []
    indices = [t.index for t in tree.tokens]
    if not indices:
        return [Violation("empty", (), "tree has no tokens")]
    expected = list(range(indices[0], indices[0] + len(indices)))
    if indices != expected:
        violations.append(Violation("token order", tuple(indices),
                                    "token indices are not contiguous and increasing"))
    known = set(indices)

    roots = sorted(e.dependent for e in tree.edges if e.head == 0)
    if not roots:
        violations.append(Violation("no root", (), "no edge has head 0"))
    elif len(roots) > 1:
        violations.append(Violation("multiple roots", tuple(roots),
                                    f"{len(roots)} edges have head 0: {roots}"))

    heads: dict[int, list[int]] = {}
    for e in tree.edges:
        heads.setdefault(e.dependent, []).append(e.head)
        if e.dependent not in known:
            violations.append(Violation("unknown dependent", (e.dependent,),
                                        f"edge dependent {e.dependent} is not a token"))
        if e.head != 0 and e.head not in known:
            violations.append(Violation("unknown head", (e.dependent, e.head),
                                        f"head {e.head} of {e.dependent} is not a token"))
    for i in indices:
        n = len(heads.get(i, ()))
        if n == 0:
            violations.append(Violation("missing head", (i,), f"token {i} has no incoming edge"))
        elif n > 1:
            violations.append(Violation("multiple heads", (i,), f"token {i} has {n} incoming edges"))

    # Follow the (first) head of every token; a revisit on the current walk is a cycle.
    first_head = {d: hs[0] for d, hs in heads.items()}
    state: dict[int, int] = {}
    reported: set[frozenset[int]] = set()
    for start in sorted(first_head):
        walk: list[int] = []
        node = start
        while node in first_head and node not in state:
            state[node] = 1
            walk.append(node)
            node = first_head[node]
        if node in state and state[node] == 1:
            cycle = frozenset(walk[walk.index(node):])
            if cycle not in reported:
                reported.add(cycle)
                members = tuple(sorted(cycle))
                violations.append(Violation("cycle", members, f"tokens {list(members)} form a cycle"))
        for w in walk:
            state[w] = 2
    return violations


def is_valid_tree(tree: DependencyTree) -> bool:
    return not validate_tree(tree)


def require_valid(tree: DependencyTree) -> None:
    violations = validate_tree(tree)
    if violations:
        raise InvalidTreeError("invalid tree: " + "; ".join(map(str, violations)))


def is_projective(tree: DependencyTree) -> bool:
    """True iff every subtree yield is a contiguous interval."""
    require_valid(tree)
    return _projective_unchecked(tree)


def _projective_unchecked(tree: DependencyTree) -> bool:
    for t in tree.tokens:
        sub = tree.subtree(t.index)
        if max(sub) - min(sub) + 1 != len(sub):
            return False
    return True


@dataclass(frozen=True)
class ParseFragment:
    span: tuple[int, int]
    tree: DependencyTree

    def __post_init__(self):
        object.__setattr__(self, "span", tuple(self.span))

    @classmethod
    def of(cls, tree: DependencyTree) -> ParseFragment:
        return cls(tree.span, tree)

    def violations(self) -> list[Violation]:
        start, end = self.span
        found = validate_tree(self.tree)
        if start > end:
            found.append(Violation("span", self.span, f"span {start}-{end} is empty"))
        elif [t.index for t in self.tree.tokens] != list(range(start, end + 1)):
            found.append(Violation("span", self.span,
                                   f"fragment tree does not cover exactly tokens {start}-{end}"))
        return found


@dataclass(frozen=True)
class PartialParse:
    fragments: tuple[ParseFragment, ...]

    def __post_init__(self):
        object.__setattr__(self, "fragments", tuple(self.fragments))

    def __len__(self) -> int:
        return len(self.fragments)

    @property
    def tokens(self) -> tuple[Token, ...]:
        return tuple(t for f in self.fragments for t in f.tree.tokens)

    def violations(self) -> list[Violation]:
        found: list[Violation] = []
        if len(self.fragments) < 2:
            found.append(Violation("fragment count", (),
                                   "a partial parse needs at least 2 fragments"))
        expected = 1
        for frag in self.fragments:
            start, end = frag.span
            if start > expected:
                found.append(Violation("gap", (expected, start - 1),
                                       f"tokens {expected}-{start - 1} are not covered"))
            elif start < expected:
                found.append(Violation("overlap", (start, expected - 1),
                                       f"fragment starting at {start} overlaps or is out of order"))
            found.extend(frag.violations())
            expected = max(expected, end + 1)
        return found


@dataclass(frozen=True)
class ParseForest:
    candidates: tuple[DependencyTree, ...]

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))

    def __len__(self) -> int:
        return len(self.candidates)

    def violations(self) -> list[Violation]:
        found: list[Violation] = []
        if len(self.candidates) < 2:
            found.append(Violation("candidate count", (), "a parse forest needs at least 2 candidates"))
        if not self.candidates:
            return found
        words = [(t.index, t.surface, t.lemma) for t in self.candidates[0].tokens]
        for i, cand in enumerate(self.candidates):
            for v in validate_tree(cand):
                found.append(Violation(v.rule, v.indices, f"candidate {i}: {v.message}"))
            if [(t.index, t.surface, t.lemma) for t in cand.tokens] != words:
                found.append(Violation("token mismatch", (i,),
                                       f"candidate {i} has a different token sequence"))
        return found


Parse = Union[DependencyTree, ParseForest, PartialParse]


@dataclass(frozen=True)
class SentenceRecord:
    sentence_id: int
    parse: Parse

    @property
    def kind(self) -> str:
        if isinstance(self.parse, DependencyTree):
            return "complete"
        if isinstance(self.parse, ParseForest):
            return "multiple"
        return "incomplete"

    @property
    def tokens(self) -> tuple[Token, ...]:
        if isinstance(self.parse, DependencyTree):
            return self.parse.tokens
        if isinstance(self.parse, ParseForest):
            return self.parse.candidates[0].tokens
        return self.parse.tokens

    def violations(self) -> list[Violation]:
        if isinstance(self.parse, DependencyTree):
            found = validate_tree(self.parse)
            if self.parse.tokens and self.parse.first != 1:
                found.append(Violation("token order", (self.parse.first,),
                                       "sentence tokens must start at index 1"))
            return found
        if isinstance(self.parse, ParseForest):
            found = self.parse.violations()
            if self.parse.candidates and self.parse.candidates[0].tokens \
                    and self.parse.candidates[0].first != 1:
                found.append(Violation("token order", (), "sentence tokens must start at index 1"))
            return found
        return self.parse.violations()


@dataclass(frozen=True)
class Document:
    records: tuple[SentenceRecord, ...]
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        object.__setattr__(self, "metadata", dict(self.metadata))

    def __len__(self) -> int:
        return len(self.records)

    def violations(self) -> list[tuple[int | None, Violation]]:
        """``(sentence_id, violation)`` pairs; ``None`` for document-level problems."""
        found: list[tuple[int | None, Violation]] = []
        if not self.records:
            found.append((None, Violation("empty document", (), "document has no records")))
        previous = None
        for rec in self.records:
            if previous is not None and rec.sentence_id <= previous:
                found.append((rec.sentence_id, Violation(
                    "sentence order", (rec.sentence_id,),
                    f"sentence id {rec.sentence_id} does not follow {previous}")))
            previous = rec.sentence_id
            found.extend((rec.sentence_id, v) for v in rec.violations())
        return found

    def complete_records(self) -> Iterable[SentenceRecord]:
        return (r for r in self.records if isinstance(r.parse, DependencyTree))

    def with_records(self, records: Iterable[SentenceRecord]) -> Document:
        return replace(self, records=tuple(records))


def build_tree(tokens: Iterable[Token], edges: Iterable[DependencyEdge]) -> DependencyTree:
    return DependencyTree(tuple(tokens), tuple(edges))


def merge_trees(left: DependencyTree, right: DependencyTree, edge: DependencyEdge) -> DependencyTree:
    """Union of two adjacent trees; ``edge`` replaces the root edge of one of them."""
    edges = [e for e in left.edges + right.edges if e.dependent != edge.dependent]
    edges.append(edge)
    return DependencyTree(left.tokens + right.tokens, tuple(edges))
