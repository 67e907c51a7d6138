"""Discourse information: POS profiles and scored collocations per lemma.

Scores are kept as exact fractions: 1 per definite instance of a
modifier/modifiee relationship and 1/10 per ambiguous one.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .model import (
    NON_COLLOCATING,
    DependencyTree,
    ParseForest,
    PosTag,
    Relation,
    require_valid,
)

DEFINITE_SCORE = Fraction(1)
AMBIGUOUS_SCORE = Fraction(1, 10)

SNAPSHOT_FORMAT = "discparse-store"
SNAPSHOT_VERSION = 1


class StoreFrozenError(RuntimeError):
    pass


class StoreNotFrozenError(RuntimeError):
    pass


class Side(str, Enum):
    MODIFIER = "modifier"
    MODIFIEE = "modifiee"


@dataclass(frozen=True, order=True)
class InstanceRef:
    sentence_id: int
    token_index: int

    def __str__(self) -> str:
        return f"{self.sentence_id}:{self.token_index}"


@dataclass(frozen=True, order=True)
class CollocationKey:
    modifier_lemma: str
    modifier_pos: PosTag
    relation: Relation
    modifiee_lemma: str
    modifiee_pos: PosTag

    def __post_init__(self):
        if not self.modifier_lemma or not self.modifiee_lemma:
            raise ValueError("collocation lemmas must be non-empty")
        if self.modifier_pos is PosTag.PUNC or self.modifiee_pos is PosTag.PUNC:
            raise ValueError("punctuation cannot be a collocation endpoint")

    def lemma(self, side: Side) -> str:
        return self.modifier_lemma if side is Side.MODIFIER else self.modifiee_lemma

    def pos(self, side: Side) -> PosTag:
        return self.modifier_pos if side is Side.MODIFIER else self.modifiee_pos

    def __str__(self) -> str:
        return (f"{self.modifier_lemma}/{self.modifier_pos.value} -{self.relation}-> "
                f"{self.modifiee_lemma}/{self.modifiee_pos.value}")


@dataclass(frozen=True)
class CollocationEntry:
    key: CollocationKey
    definite_instances: tuple[InstanceRef, ...]
    ambiguous_instances: tuple[InstanceRef, ...]

    @property
    def preference_value(self) -> Fraction:
        return (DEFINITE_SCORE * len(self.definite_instances)
                + AMBIGUOUS_SCORE * len(self.ambiguous_instances))

    @property
    def instances(self) -> tuple[InstanceRef, ...]:
        return tuple(sorted(self.definite_instances + self.ambiguous_instances))

    def scaled(self, factor: Fraction) -> Fraction:
        return self.preference_value * factor


def entry_order(entry: CollocationEntry) -> tuple:
    """Sort key: higher preference value first, then key order."""
    return (-entry.preference_value, entry.key)


@dataclass(frozen=True)
class PosProfile:
    instances: Mapping[PosTag, tuple[InstanceRef, ...]]

    @property
    def counts(self) -> dict[PosTag, int]:
        return {pos: len(refs) for pos, refs in self.instances.items()}

    @property
    def total(self) -> int:
        return sum(len(refs) for refs in self.instances.values())

    def __bool__(self) -> bool:
        return self.total > 0

    def dominant(self) -> tuple[PosTag, Fraction] | None:
        """The most frequent POS and its share; ``None`` on an empty profile or a tie."""
        if not self:
            return None
        ranked = sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0].value))
        if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
            return None
        pos, count = ranked[0]
        return pos, Fraction(count, self.total)

    def summary(self) -> str:
        return ",".join(f"{pos.value}:{n}" for pos, n in sorted(self.counts.items(), key=lambda kv: kv[0].value))


EMPTY_PROFILE = PosProfile({})


class DiscourseStore:
    """Accumulates discourse information, then answers queries once frozen.

    Queries accept ``around`` (the sentence on whose behalf the query is
    made; with a window only sentences within ``window`` ids of it count)
    and ``exclude`` (a sentence whose instances are ignored).
    """

    def __init__(self, window: int | None = None):
        if window is not None and window < 0:
            raise ValueError("window must be non-negative")
        self.window = window
        self.frozen = False
        self._sentences: dict[int, dict[int, tuple[str, PosTag]]] = {}
        self._pos: dict[str, dict[PosTag, list[InstanceRef]]] = {}
        # key -> (definite, ambiguous); the two lemma indexes share these lists
        self._entries: dict[CollocationKey, tuple[list[InstanceRef], list[InstanceRef]]] = {}
        self._modifiers_of: dict[str, set[CollocationKey]] = {}
        self._modifiees_of: dict[str, set[CollocationKey]] = {}

    # -- building -------------------------------------------------------

    def _check_writable(self, sentence_id: int) -> None:
        if self.frozen:
            raise StoreFrozenError("store frozen")
        if sentence_id in self._sentences:
            raise ValueError(f"sentence {sentence_id} already ingested")

    def ingest_tree(self, sentence_id: int, tree: DependencyTree,
                    force_ambiguous: Iterable[int] = ()) -> DiscourseStore:
        """Add one complete parse.

        ``force_ambiguous`` lists dependents whose edges are scored as
        ambiguous regardless of their flag.
        """
        self._check_writable(sentence_id)
        require_valid(tree)
        forced = set(force_ambiguous)
        self._sentences[sentence_id] = {t.index: (t.lemma, t.pos) for t in tree.tokens}
        for tok in tree.tokens:
            ref = InstanceRef(sentence_id, tok.index)
            self._pos.setdefault(tok.lemma, {}).setdefault(tok.pos, []).append(ref)
        for edge in tree.edges:
            if edge.head == 0:
                continue
            dep = tree.token(edge.dependent)
            head = tree.token(edge.head)
            if dep.pos in NON_COLLOCATING or head.pos in NON_COLLOCATING:
                continue
            key = CollocationKey(dep.lemma, dep.pos, edge.relation, head.lemma, head.pos)
            lists = self._entries.get(key)
            if lists is None:
                lists = self._entries[key] = ([], [])
                self._modifiers_of.setdefault(key.modifiee_lemma, set()).add(key)
                self._modifiees_of.setdefault(key.modifier_lemma, set()).add(key)
            ambiguous = edge.ambiguous or edge.dependent in forced
            lists[1 if ambiguous else 0].append(InstanceRef(sentence_id, edge.dependent))
        return self

    def ingest_selected_parse(self, sentence_id: int, forest: ParseForest, chosen: int) -> DiscourseStore:
        """Add the chosen candidate; edges not shared by every candidate count as ambiguous."""
        if self.frozen:
            raise StoreFrozenError("store frozen")
        if not 0 <= chosen < len(forest.candidates):
            raise IndexError(f"candidate index {chosen} out of range")
        return self.ingest_tree(sentence_id, forest.candidates[chosen],
                                force_ambiguous=contested_dependents(forest, chosen))

    def freeze(self) -> DiscourseStore:
        if not self.frozen:
            for profile in self._pos.values():
                for refs in profile.values():
                    refs.sort()
            for definite, ambiguous in self._entries.values():
                definite.sort()
                ambiguous.sort()
            self.frozen = True
        return self

    def copy(self) -> DiscourseStore:
        """An unfrozen deep copy."""
        other = copy.deepcopy(self)
        other.frozen = False
        return other

    def with_window(self, window: int | None) -> DiscourseStore:
        """A frozen view over the same data with a different window."""
        self._require_frozen()
        view = copy.copy(self)
        view.window = window
        return view

    # -- querying -------------------------------------------------------

    def _require_frozen(self) -> None:
        if not self.frozen:
            raise StoreNotFrozenError("store is not frozen")

    def _keep(self, around: int | None, exclude: int | None):
        window = self.window
        if (window is None or around is None) and exclude is None:
            return None

        def keep(ref: InstanceRef) -> bool:
            if ref.sentence_id == exclude:
                return False
            if window is not None and around is not None:
                return abs(ref.sentence_id - around) <= window
            return True
        return keep

    def _entry(self, key: CollocationKey, keep) -> CollocationEntry | None:
        definite, ambiguous = self._entries[key]
        if keep is not None:
            definite = [r for r in definite if keep(r)]
            ambiguous = [r for r in ambiguous if keep(r)]
        if not definite and not ambiguous:
            return None
        return CollocationEntry(key, tuple(definite), tuple(ambiguous))

    def sentence_ids(self) -> list[int]:
        return sorted(self._sentences)

    def pos_profile(self, lemma: str, *, around: int | None = None,
                    exclude: int | None = None) -> PosProfile:
        self._require_frozen()
        profile = self._pos.get(lemma.lower())
        if not profile:
            return EMPTY_PROFILE
        keep = self._keep(around, exclude)
        instances = {}
        for pos in sorted(profile, key=lambda p: p.value):
            refs = profile[pos] if keep is None else [r for r in profile[pos] if keep(r)]
            if refs:
                instances[pos] = tuple(refs)
        return PosProfile(instances)

    def lookup(self, key: CollocationKey, *, around: int | None = None,
               exclude: int | None = None) -> CollocationEntry | None:
        self._require_frozen()
        if key not in self._entries:
            return None
        return self._entry(key, self._keep(around, exclude))

    def collocations_for(self, lemma: str, side: Side, *, around: int | None = None,
                         exclude: int | None = None) -> list[CollocationEntry]:
        """Entries with ``lemma`` on ``side``, best preference value first."""
        self._require_frozen()
        index = self._modifiees_of if Side(side) is Side.MODIFIER else self._modifiers_of
        keep = self._keep(around, exclude)
        found = []
        for key in index.get(lemma.lower(), ()):
            entry = self._entry(key, keep)
            if entry is not None:
                found.append(entry)
        found.sort(key=entry_order)
        return found

    def entries(self, *, around: int | None = None, exclude: int | None = None) -> list[CollocationEntry]:
        self._require_frozen()
        keep = self._keep(around, exclude)
        found = [e for e in (self._entry(k, keep) for k in self._entries) if e is not None]
        found.sort(key=entry_order)
        return found

    def relations(self) -> list[Relation]:
        return sorted({k.relation for k in self._entries})

    def resolve(self, ref: InstanceRef) -> tuple[str, PosTag]:
        """Lemma and POS of the token an instance points at."""
        return self._sentences[ref.sentence_id][ref.token_index]

    def index_views(self, lemma: str) -> tuple[set[CollocationKey], set[CollocationKey]]:
        """Keys of ``lemma`` as modifiee and as modifier (for consistency checks)."""
        return (set(self._modifiers_of.get(lemma, ())), set(self._modifiees_of.get(lemma, ())))

    # -- snapshots ------------------------------------------------------

    def to_json(self) -> dict:
        self._require_frozen()

        def refs(items: Iterable[InstanceRef]) -> list[list[int]]:
            return [[r.sentence_id, r.token_index] for r in items]

        return {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "window": self.window,
            "sentences": {
                str(sid): [[i, lemma, pos.value] for i, (lemma, pos) in sorted(toks.items())]
                for sid, toks in sorted(self._sentences.items())
            },
            "pos_index": {
                lemma: {pos.value: refs(r) for pos, r in sorted(prof.items(), key=lambda kv: kv[0].value)}
                for lemma, prof in sorted(self._pos.items())
            },
            "collocations": [
                {
                    "modifier": [k.modifier_lemma, k.modifier_pos.value],
                    "relation": str(k.relation),
                    "modifiee": [k.modifiee_lemma, k.modifiee_pos.value],
                    "definite": refs(d),
                    "ambiguous": refs(a),
                    "preference_value": str(DEFINITE_SCORE * len(d) + AMBIGUOUS_SCORE * len(a)),
                }
                for k, (d, a) in sorted(self._entries.items())
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, ensure_ascii=False, indent=1) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def from_json(cls, data: Mapping) -> DiscourseStore:
        if data.get("format") != SNAPSHOT_FORMAT:
            raise ValueError("not a discourse store snapshot")
        if data.get("version") != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {data.get('version')!r}")
        store = cls(window=data.get("window"))
        for sid, toks in data["sentences"].items():
            store._sentences[int(sid)] = {i: (lemma, PosTag(pos)) for i, lemma, pos in toks}
        for lemma, prof in data["pos_index"].items():
            store._pos[lemma] = {PosTag(pos): [InstanceRef(s, i) for s, i in refs]
                                 for pos, refs in prof.items()}
        for item in data["collocations"]:
            key = CollocationKey(item["modifier"][0], PosTag(item["modifier"][1]),
                                 Relation.parse(item["relation"]),
                                 item["modifiee"][0], PosTag(item["modifiee"][1]))
            store._entries[key] = ([InstanceRef(s, i) for s, i in item["definite"]],
                                   [InstanceRef(s, i) for s, i in item["ambiguous"]])
            store._modifiers_of.setdefault(key.modifiee_lemma, set()).add(key)
            store._modifiees_of.setdefault(key.modifier_lemma, set()).add(key)
        return store.freeze()

    @classmethod
    def load(cls, path: str | Path) -> DiscourseStore:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    def __iter__(self) -> Iterator[CollocationKey]:
        return iter(sorted(self._entries))


def contested_dependents(forest: ParseForest, chosen: int) -> set[int]:
    """Dependents of the chosen tree whose edge is missing from some other candidate.

    Edges are compared by position, relation and the POS of both endpoints.
    """
    def signature(tree: DependencyTree) -> set[tuple]:
        sig = set()
        for e in tree.edges:
            head_pos = tree.token(e.head).pos if e.head else None
            sig.add((e.dependent, e.head, e.relation, tree.token(e.dependent).pos, head_pos))
        return sig

    tree = forest.candidates[chosen]
    others = [signature(c) for i, c in enumerate(forest.candidates) if i != chosen]
    contested = set()
    for item in signature(tree):
        if any(item not in other for other in others):
            contested.add(item[0])
    return contested


def build_store(trees: Iterable[tuple[int, DependencyTree]], window: int | None = None) -> DiscourseStore:
    store = DiscourseStore(window=window)
    for sid, tree in trees:
        store.ingest_tree(sid, tree)
    return store.freeze()
