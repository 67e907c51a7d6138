"""Slow, obviously-correct reference implementations used to check the package."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from discparse.model import NON_COLLOCATING, DependencyEdge, DependencyTree, Relation, merge_trees
from discparse.store import CollocationKey


def has_cycle(heads: dict[int, int]) -> bool:
    """Iterative DFS with three colours over the head map (head 0 is the root)."""
    colour = {n: 0 for n in heads}
    for start in heads:
        stack = []
        node = start
        while node in heads and colour[node] == 0:
            colour[node] = 1
            stack.append(node)
            node = heads[node]
        if node in heads and colour[node] == 1:
            return True
        for n in stack:
            colour[n] = 2
    return False


def single_rooted_tree(heads: dict[int, int]) -> bool:
    roots = [n for n, h in heads.items() if h == 0]
    return len(roots) == 1 and all(h == 0 or h in heads for h in heads.values()) and not has_cycle(heads)


def projective_by_crossings(tree: DependencyTree) -> bool:
    """No two arcs cross, counting an arc from a virtual root just left of the first token."""
    origin = tree.tokens[0].index - 1
    arcs = []
    for e in tree.edges:
        head = origin if e.head == 0 else e.head
        arcs.append((min(head, e.dependent), max(head, e.dependent)))
    for (a, b), (c, d) in combinations(arcs, 2):
        if a < c < b < d or c < a < d < b:
            return False
    return True


def raw_counts(trees) -> dict[CollocationKey, tuple[int, int]]:
    """Definite and ambiguous instance counts, straight from the edges."""
    counts: dict[CollocationKey, list[int]] = {}
    for _, tree in trees:
        for e in tree.edges:
            if e.head == 0:
                continue
            d, h = tree.token(e.dependent), tree.token(e.head)
            if d.pos in NON_COLLOCATING or h.pos in NON_COLLOCATING:
                continue
            c = counts.setdefault(CollocationKey(d.lemma, d.pos, e.relation, h.lemma, h.pos), [0, 0])
            c[1 if e.ambiguous else 0] += 1
    return {k: (v[0], v[1]) for k, v in counts.items()}


def value(counts: tuple[int, int]) -> Fraction:
    return counts[0] + Fraction(counts[1], 10)


def brute_match(counts: dict[CollocationKey, tuple[int, int]], synonyms: dict[str, set[str]],
                q: CollocationKey) -> tuple[int, Fraction, CollocationKey | None]:
    """(level, score, key) by scanning every entry; level 3/2/1/0 as in the matcher."""
    def syn(a: str, b: str) -> bool:
        return a != b and b in synonyms.get(a, set())

    levels: list[tuple[int, Fraction, CollocationKey]] = []
    for k, c in counts.items():
        if k.relation != q.relation or k.modifier_pos != q.modifier_pos or k.modifiee_pos != q.modifiee_pos:
            continue
        same_mod = k.modifier_lemma == q.modifier_lemma
        same_head = k.modifiee_lemma == q.modifiee_lemma
        if same_mod and same_head:
            level = 3
        elif (same_mod and syn(q.modifiee_lemma, k.modifiee_lemma)) or \
                (same_head and syn(q.modifier_lemma, k.modifier_lemma)):
            level = 2
        elif same_mod or same_head:
            level = 1
        else:
            continue
        levels.append((level, value(c), k))
    if not levels:
        return 0, Fraction(0), None
    top = max(lv for lv, _, _ in levels)
    best = min((x for x in levels if x[0] == top), key=lambda x: (-x[1], x[2]))
    return best


def brute_join(counts, synonyms, left: DependencyTree, right: DependencyTree):
    """Argmax over every projective root attachment and every known relation.

    Returns (direction rank, head, dependent, relation, level, score) or None.
    """
    relations = sorted({k.relation for k in counts})
    best = None
    for rank, dep_tree, head_tree in ((0, right, left), (1, left, right)):
        dep = dep_tree.root
        d = dep_tree.token(dep)
        for h_tok in head_tree.tokens:
            merged = merge_trees(left, right, DependencyEdge(dep, h_tok.index, Relation("DIRECT")))
            if not projective_by_crossings(merged):
                continue
            if d.pos in NON_COLLOCATING or h_tok.pos in NON_COLLOCATING:
                continue
            for rel in relations:
                level, score, _ = brute_match(counts, synonyms,
                                              CollocationKey(d.lemma, d.pos, rel, h_tok.lemma, h_tok.pos))
                if level == 0:
                    continue
                order = (-level, -score, abs(h_tok.index - dep), rank, rel)
                if best is None or order < best[0]:
                    best = (order, (rank, h_tok.index, dep, rel, level, score))
    return None if best is None else best[1]


def oracle_sweeps(counts, synonyms, units: list[DependencyTree]):
    """Left-to-right sweeps joining adjacent units with ``brute_join`` until nothing joins."""
    joins = []
    while len(units) > 1:
        swept, current, joined = [], units[0], False
        for nxt in units[1:]:
            found = brute_join(counts, synonyms, current, nxt)
            if found is None:
                swept.append(current)
                current = nxt
            else:
                _, head, dep, rel, _, _ = found
                current = merge_trees(current, nxt, DependencyEdge(dep, head, rel))
                joins.append(found)
                joined = True
        swept.append(current)
        units = swept
        if not joined:
            break
    return units, joins
