"""Three-level lookup of a modifier/relation/modifiee triple in the discourse."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .store import CollocationEntry, CollocationKey, DiscourseStore, Side


class SynonymLexicon:
    """Synonym rings; a lemma may belong to several rings."""

    def __init__(self, rings: Iterable[Iterable[str]] = ()):
        self.rings: tuple[frozenset[str], ...] = tuple(
            frozenset(w.lower() for w in ring) for ring in rings if ring)
        index: dict[str, set[str]] = {}
        for ring in self.rings:
            for word in ring:
                index.setdefault(word, set()).update(ring)
        self._index = {w: frozenset(s - {w}) for w, s in index.items()}

    def synonyms(self, lemma: str) -> frozenset[str]:
        """Other members of every ring containing ``lemma``."""
        return self._index.get(lemma.lower(), frozenset())

    def are_synonyms(self, a: str, b: str) -> bool:
        return a == b or b in self.synonyms(a)

    def __len__(self) -> int:
        return len(self.rings)

    @classmethod
    def parse(cls, text: str) -> SynonymLexicon:
        rings = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rings.append(line.split())
        return cls(rings)

    @classmethod
    def load(cls, path: str | Path) -> SynonymLexicon:
        return cls.parse(Path(path).read_text(encoding="utf-8"))


EMPTY_LEXICON = SynonymLexicon()


class MatchLevel(IntEnum):
    NONE = 0
    POS_BACKOFF = 1
    SYNONYM = 2
    IDENTICAL = 3

    def __str__(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class MatchResult:
    level: MatchLevel
    entry: CollocationEntry | None = None

    def __post_init__(self):
        if (self.level is MatchLevel.NONE) != (self.entry is None):
            raise ValueError("an entry is present exactly when the level is not NONE")

    @property
    def score(self) -> Fraction:
        return self.entry.preference_value if self.entry is not None else Fraction(0)

    def rank(self) -> tuple:
        """Larger is better; ties resolve toward the lexicographically smaller key."""
        return (self.level, self.score)

    def __str__(self) -> str:
        if self.entry is None:
            return "none"
        return f"{self.level}({self.score}) {self.entry.key}"


NO_MATCH = MatchResult(MatchLevel.NONE)


def _best(entries: Iterable[CollocationEntry]) -> CollocationEntry | None:
    best = None
    for entry in entries:
        if best is None or (-entry.preference_value, entry.key) < (-best.preference_value, best.key):
            best = entry
    return best


def match_collocation(store: DiscourseStore, lexicon: SynonymLexicon, query: CollocationKey, *,
                      around: int | None = None, exclude: int | None = None) -> MatchResult:
    """Best supporting entry for ``query`` at the highest achievable level.

    Identical: the exact key is in the store.  Synonym: the key with one
    side's lemma replaced by a synonym is.  POS backoff: an entry agrees on
    the relation, on one side's lemma and POS, and on the other side's POS.
    """
    scope = {"around": around, "exclude": exclude}
    entry = store.lookup(query, **scope)
    if entry is not None:
        return MatchResult(MatchLevel.IDENTICAL, entry)

    similar = []
    for syn in sorted(lexicon.synonyms(query.modifier_lemma)):
        e = store.lookup(CollocationKey(syn, query.modifier_pos, query.relation,
                                        query.modifiee_lemma, query.modifiee_pos), **scope)
        if e is not None:
            similar.append(e)
    for syn in sorted(lexicon.synonyms(query.modifiee_lemma)):
        e = store.lookup(CollocationKey(query.modifier_lemma, query.modifier_pos, query.relation,
                                        syn, query.modifiee_pos), **scope)
        if e is not None:
            similar.append(e)
    best = _best(similar)
    if best is not None:
        return MatchResult(MatchLevel.SYNONYM, best)

    backoff = []
    for side in (Side.MODIFIER, Side.MODIFIEE):
        for e in store.collocations_for(query.lemma(side), side, **scope):
            k = e.key
            if (k.relation == query.relation and k.modifier_pos == query.modifier_pos
                    and k.modifiee_pos == query.modifiee_pos and k.pos(side) == query.pos(side)):
                backoff.append(e)
    best = _best(backoff)
    if best is not None:
        return MatchResult(MatchLevel.POS_BACKOFF, best)
    return NO_MATCH


def match_level_only(store: DiscourseStore, lexicon: SynonymLexicon, query: CollocationKey, *,
                     around: int | None = None, exclude: int | None = None) -> MatchLevel:
    scope = {"around": around, "exclude": exclude}
    if store.lookup(query, **scope) is not None:
        return MatchLevel.IDENTICAL
    return match_collocation(store, lexicon, query, **scope).level


def candidate_relations(store: DiscourseStore, modifier_lemma: str, modifiee_lemma: str, *,
                        around: int | None = None, exclude: int | None = None) -> list:
    """Every relation that could match some triple between the two lemmas.

    Any matching entry keeps at least one side's lemma, so it is reachable
    from one of the two lemma indexes.
    """
    scope = {"around": around, "exclude": exclude}
    found = {e.key.relation for e in store.collocations_for(modifier_lemma, Side.MODIFIER, **scope)}
    found.update(e.key.relation for e in store.collocations_for(modifiee_lemma, Side.MODIFIEE, **scope))
    return sorted(found)
