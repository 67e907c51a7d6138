"""Generated corpora with planted collocations and known gold parses.

Every frame owns its own lemmas, so a collocation seen in a frame's
complete sentences can only support that frame's gold attachments.  Each
fragmented sentence is a gold tree cut into contiguous, connected spans
whose roots are content words.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations

from discparse.model import (
    DependencyEdge,
    DependencyTree,
    Document,
    ParseFragment,
    PartialParse,
    PosTag,
    Relation,
    SentenceRecord,
    Token,
)

# (stem, POS, head position, relation); positions are 1-based, 0 is the root
TEMPLATES = [
    [("tall", "AJ", 2, "DIRECT"), ("clerk", "N", 3, "SUBJ"), ("stamp", "V", 0, "DIRECT"),
     ("red", "AJ", 5, "DIRECT"), ("form", "N", 3, "OBJ"), ("with", "PP", 7, "DIRECT"),
     ("pen", "N", 3, "prep:with"), ("slowly", "AV", 3, "DIRECT")],
    [("pilot", "N", 2, "SUBJ"), ("check", "V", 0, "DIRECT"), ("gauge", "N", 2, "OBJ"),
     ("in", "PP", 6, "DIRECT"), ("front", "AJ", 6, "DIRECT"), ("panel", "N", 3, "prep:in"),
     ("wire", "V", 6, "DIRECT"), ("to", "PP", 9, "DIRECT"), ("relay", "N", 7, "prep:to")],
    [("quickly", "AV", 3, "DIRECT"), ("operator", "N", 3, "SUBJ"), ("load", "V", 0, "DIRECT"),
     ("tape", "N", 3, "OBJ"), ("into", "PP", 7, "DIRECT"), ("spare", "AJ", 7, "DIRECT"),
     ("drive", "N", 3, "prep:into")],
]
SHARED = {"with", "in", "to", "into"}
CONTENT = {PosTag.N, PosTag.V, PosTag.AJ, PosTag.AV, PosTag.PN}


def frame_tree(frame: int, keep: set[int] | None = None) -> DependencyTree:
    """The frame's template, optionally restricted to a head-closed subset of positions."""
    template = TEMPLATES[frame % len(TEMPLATES)]
    positions = sorted(keep) if keep is not None else list(range(1, len(template) + 1))
    renumber = {old: new for new, old in enumerate(positions, 1)}
    tokens, edges = [], []
    for old in positions:
        stem, pos, head, rel = template[old - 1]
        lemma = stem if stem in SHARED else f"{stem}{frame}"
        tokens.append(Token(renumber[old], lemma, lemma, PosTag(pos)))
        edges.append(DependencyEdge(renumber[old], renumber.get(head, 0), Relation.parse(rel)))
    return DependencyTree(tuple(tokens), tuple(edges))


def _head_closed_subset(rng: random.Random, frame: int) -> set[int]:
    template = TEMPLATES[frame % len(TEMPLATES)]
    keep = {i for i in range(1, len(template) + 1) if rng.random() < 0.7}
    changed = True
    while changed:
        changed = False
        for i in list(keep):
            head = template[i - 1][2]
            if head and head not in keep:
                keep.add(head)
                changed = True
    root = next(i for i, t in enumerate(template, 1) if t[2] == 0)
    keep.add(root)
    return keep


def connected_cuts(tree: DependencyTree, max_fragments: int) -> list[list[tuple[int, int]]]:
    """Every way to split the tree into 2..max_fragments connected spans with content roots."""
    first, last = tree.span
    out = []
    for k in range(1, max_fragments):
        for cuts in combinations(range(first + 1, last + 1), k):
            bounds = [first, *cuts, last + 1]
            spans = [(bounds[i], bounds[i + 1] - 1) for i in range(len(bounds) - 1)]
            if all(_connected(tree, a, b) for a, b in spans):
                out.append(spans)
    return out


def _connected(tree: DependencyTree, a: int, b: int) -> bool:
    roots = [i for i in range(a, b + 1) if not a <= tree.head_of(i) <= b]
    return len(roots) == 1 and tree.token(roots[0]).pos in CONTENT


def cut(tree: DependencyTree, spans: list[tuple[int, int]]) -> PartialParse:
    fragments = []
    for a, b in spans:
        toks = tuple(t for t in tree.tokens if a <= t.index <= b)
        edges = tuple(DependencyEdge(e.dependent, e.head if a <= e.head <= b else 0, e.relation)
                      for e in tree.edges if a <= e.dependent <= b)
        fragments.append(ParseFragment((a, b), DependencyTree(toks, edges)))
    return PartialParse(tuple(fragments))


@dataclass(frozen=True)
class SyntheticCorpus:
    document: Document
    gold: dict[int, DependencyTree]


def synthetic_corpus(seed: int = 7, sentences: int = 300, fragmented: int = 30,
                     max_fragments: int = 4) -> SyntheticCorpus:
    rng = random.Random(seed)
    frames = fragmented + 15
    per_frame, extra = divmod(sentences - fragmented, frames)
    bodies: list[tuple[str, int]] = []
    for frame in range(frames):
        count = per_frame + (1 if frame < extra else 0)
        bodies.append(("full", frame))
        bodies.extend(("subset", frame) for _ in range(count - 1))
    bodies.extend(("fragmented", frame) for frame in range(fragmented))
    rng.shuffle(bodies)

    records, gold = [], {}
    for sid, (kind, frame) in enumerate(bodies, 1):
        if kind == "full":
            parse = frame_tree(frame)
        elif kind == "subset":
            parse = frame_tree(frame, _head_closed_subset(rng, frame))
        else:
            tree = frame_tree(frame)
            parse = cut(tree, rng.choice(connected_cuts(tree, max_fragments)))
            gold[sid] = tree
        records.append(SentenceRecord(sid, parse))
    return SyntheticCorpus(Document(tuple(records)), gold)
