"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line."""

from __future__ import annotations

import os
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from builders import (
    cursor_document,
    random_partial,
    random_tree,
    walkthrough_document,
    walkthrough_gold,
    walkthrough_partial,
)
from discparse.analysis import report_from_counts
from discparse.completer import CompletionStatus, JoinDirection, RetagPos, complete, join_all, try_join
from discparse.config import PipelineConfig
from discparse.formats import save_document
from discparse.matcher import EMPTY_LEXICON, MatchLevel, SynonymLexicon, match_collocation
from discparse.model import DependencyTree, PosTag, Relation, is_valid_tree
from discparse.pipeline import build_store as build_document_store
from discparse.pipeline import complete_document
from discparse.store import CollocationKey, DiscourseStore, Side, build_store
from oracles import brute_join, oracle_sweeps, projective_by_crossings, raw_counts, value
from synthetic import synthetic_corpus

ACCEPTANCE_SEED = 20240917


@pytest.mark.criterion("store arithmetic")
def test_store_arithmetic(criterion):
    rng = random.Random(ACCEPTANCE_SEED)
    started = time.perf_counter()
    sequences = permutations = mismatches = 0
    for _ in range(1000):
        trees = [(sid, random_tree(rng, max_tokens=7)) for sid in range(1, rng.randint(1, 10) + 1)]
        store = build_store(trees)
        sequences += 1
        expected = raw_counts(trees)
        got = {e.key: e for e in store.entries()}
        if set(got) != set(expected):
            mismatches += 1
        for key, entry in got.items():
            formula = len(entry.definite_instances) + Fraction(1, 10) * len(entry.ambiguous_instances)
            if entry.preference_value != formula or entry.preference_value != value(expected.get(key, (0, 0))):
                mismatches += 1
        shuffled = trees[:]
        rng.shuffle(shuffled)
        permutations += 1
        if build_store(shuffled).dumps() != store.dumps():
            mismatches += 1
    elapsed = time.perf_counter() - started
    criterion.check(mismatches == 0 and permutations >= 50 and elapsed < 10,
                    f"{sequences} sequences, {permutations} permutations, {mismatches} mismatches, {elapsed:.2f}s")


MODIFIERS_OF_CURSOR = {
    ("display", "N", "prep:of"): (Fraction(1, 10), [106873]),
    ("protected area", "N", "prep:in"): (Fraction(1), [106872]),
    ("left", "N", "prep:to"): (Fraction(1, 10), [106407]),
    ("right", "N", "prep:to"): (Fraction(1, 10), [106338]),
    ("position", "N", "DIRECT"): (Fraction(1), [106405]),
    ("line", "AJ", "prep:up"): (Fraction(1, 10), [106295]),
    ("your", "AJ", "DIRECT"): (Fraction(2), [106550, 106690]),
}
MODIFIEES_OF_CURSOR = {
    ("play", "V", "prep:with"): (Fraction(1, 10), [106928]),
    ("be", "V", "prep:with"): (Fraction(1, 10), [106927]),
    ("move", "V", "prep:up"): (Fraction(1), [106688]),
    ("stop", "V", "SUBJ"): (Fraction(1), [106572]),
    ("reach", "V", "SUBJ"): (Fraction(1), [106346]),
    ("move", "V", "SUBJ"): (Fraction(1), [106248]),
    ("move", "V", "OBJ"): (Fraction(3), [106292, 106335, 106402]),
    ("confuse", "V", "OBJ"): (Fraction(1), [106548]),
    ("move", "V", "RECIPIENT"): (Fraction(1), [106304]),
}


@pytest.mark.criterion("cursor table")
def test_cursor_table(criterion):
    store = build_store((r.sentence_id, r.parse) for r in cursor_document().records)
    modifiers = {(e.key.modifier_lemma, e.key.modifier_pos.value, str(e.key.relation)):
                 (e.preference_value, sorted(106000 + i.sentence_id for i in e.instances))
                 for e in store.collocations_for("cursor", Side.MODIFIEE)}
    modifiees = {(e.key.modifiee_lemma, e.key.modifiee_pos.value, str(e.key.relation)):
                 (e.preference_value, sorted(106000 + i.sentence_id for i in e.instances))
                 for e in store.collocations_for("cursor", Side.MODIFIER)}
    move_obj = store.lookup(CollocationKey("cursor", PosTag.N, Relation("OBJ"), "move", PosTag.V))
    display_of = store.lookup(CollocationKey("display", PosTag.N, Relation.prep("of"), "cursor", PosTag.N))
    ok = (modifiers == MODIFIERS_OF_CURSOR and modifiees == MODIFIEES_OF_CURSOR
          and move_obj.preference_value == 3 and display_of.preference_value == Fraction(1, 10))
    criterion.check(ok, f"{len(modifiers)} modifier and {len(modifiees)} modifiee entries; "
                        f"move-OBJ={move_obj.preference_value}, display-of={display_of.preference_value}")


def _random_query(rng: random.Random, store: DiscourseStore, lemmas: list[str]) -> CollocationKey:
    entries = store.entries()
    if entries and rng.random() < 0.6:
        k = rng.choice(entries).key
        mod = rng.choice([k.modifier_lemma, rng.choice(lemmas)])
        head = rng.choice([k.modifiee_lemma, rng.choice(lemmas)])
        return CollocationKey(mod, k.modifier_pos, k.relation, head, k.modifiee_pos)
    pos = [PosTag.N, PosTag.V, PosTag.AJ]
    return CollocationKey(rng.choice(lemmas), rng.choice(pos), Relation.parse(rng.choice(["SUBJ", "OBJ", "DIRECT"])),
                          rng.choice(lemmas), rng.choice(pos))


@pytest.mark.criterion("match dominance and monotonicity")
def test_match_dominance_and_monotonicity(criterion):
    rng = random.Random(ACCEPTANCE_SEED + 1)
    lemmas = ["cursor", "pointer", "move", "shift", "side", "take", "view"]
    lexicon = SynonymLexicon([["cursor", "pointer"], ["move", "shift"]])
    pairs = downgrades = decreases = lexical_score_drops = 0
    while pairs < 10_000:
        base = DiscourseStore()
        for sid in range(1, rng.randint(1, 6) + 1):
            base.ingest_tree(sid, random_tree(rng, lemmas=lemmas))
        extended = base.copy()
        for sid in range(100, 100 + rng.randint(1, 4)):
            extended.ingest_tree(sid, random_tree(rng, lemmas=lemmas))
        base.freeze()
        extended.freeze()
        for _ in range(25):
            q = _random_query(rng, base, lemmas)
            before = match_collocation(base, lexicon, q)
            after = match_collocation(extended, lexicon, q)
            pairs += 1
            if before.level is MatchLevel.IDENTICAL and after.level is not MatchLevel.IDENTICAL:
                downgrades += 1
            if after.rank() < before.rank():
                decreases += 1
            if after.score < before.score:
                lexical_score_drops += 1
    criterion.check(downgrades == 0 and decreases == 0,
                    f"{pairs} pairs, {downgrades} identical downgrades, {decreases} (level, score) decreases "
                    f"({lexical_score_drops} raw score drops, all from a level upgrade)")


@pytest.mark.criterion("join oracle equivalence")
def test_join_oracle_equivalence(criterion):
    rng = random.Random(ACCEPTANCE_SEED + 2)
    lexicon = SynonymLexicon([["cursor", "operator"], ["move", "take"]])
    synonyms = {w: set(lexicon.synonyms(w)) for ring in lexicon.rings for w in ring}
    cases = disagreements = invalid = joined_cases = 0
    while cases < 5000:
        trees = [(sid, random_tree(rng, projective=True)) for sid in range(1, rng.randint(2, 10))]
        store = build_store(trees)
        counts = raw_counts(trees)
        p = random_partial(rng, max_tokens=12, max_fragments=4)
        cases += 1
        left, right = p.fragments[0].tree, p.fragments[1].tree
        single = try_join(store, lexicon, left, right)
        expected_single = brute_join(counts, synonyms, left, right)
        if single is None or expected_single is None:
            disagreements += (single is None) != (expected_single is None)
        else:
            joined, d = single
            rank = 0 if d.direction is JoinDirection.RIGHT_UNDER_LEFT else 1
            if (rank, d.head, d.dependent, d.relation, int(d.match.level), d.match.score) != expected_single:
                disagreements += 1
            if not (is_valid_tree(joined) and projective_by_crossings(joined)):
                invalid += 1
        out, joins = join_all(store, lexicon, p)
        units, expected = oracle_sweeps(counts, synonyms, [f.tree for f in p.fragments])
        got = [(0 if j.direction is JoinDirection.RIGHT_UNDER_LEFT else 1, j.head, j.dependent, j.relation,
                int(j.match.level), j.match.score) for j in joins]
        outs = [out] if isinstance(out, DependencyTree) else [f.tree for f in out.fragments]
        if got != expected or outs != units:
            disagreements += 1
        joined_cases += bool(joins)
        invalid += sum(not (is_valid_tree(u) and projective_by_crossings(u)) for u in outs)
    criterion.check(disagreements == 0 and invalid == 0,
                    f"{cases} cases ({joined_cases} with joins), {disagreements} disagreements, {invalid} invalid outputs")


@pytest.mark.criterion("walkthrough fixture")
def test_walkthrough(criterion):
    started = time.perf_counter()
    store = build_store((r.sentence_id, r.parse) for r in walkthrough_document().complete_records())
    result = complete(store, EMPTY_LEXICON, walkthrough_partial(), sentence_id=43)
    elapsed = time.perf_counter() - started
    retagged = RetagPos(14, "side", PosTag.V, PosTag.N, "N:15") in result.actions
    joins = [(result.output.token(j.head).lemma if isinstance(result.output, DependencyTree) else j.head,
              str(j.relation)) for j in result.joins]
    ok = (result.status is CompletionStatus.UNIFIED and retagged and joins == [("take", "prep:from")]
          and result.output == walkthrough_gold() and elapsed < 1)
    criterion.check(ok, f"status={result.status.value}, retag side V->N={retagged}, joins={joins}, {elapsed * 1000:.1f}ms")


@pytest.mark.criterion("report arithmetic")
def test_report_arithmetic(criterion):
    first = report_from_counts(18, 12, 2).rendered_percentages()
    second = report_from_counts(17, 8, 6).rendered_percentages()
    ok = first == ("56.3", "37.5", "6.3") and second == ("54.8", "25.8", "19.4")
    criterion.check(ok, f"{'/'.join(first)} and {'/'.join(second)}")


@pytest.mark.criterion("synthetic recovery")
def test_synthetic_recovery(criterion):
    started = time.perf_counter()
    corpus = synthetic_corpus(seed=ACCEPTANCE_SEED)
    config = PipelineConfig(fallback=False)
    store = build_document_store(corpus.document).freeze()
    results = complete_document(corpus.document, store, EMPTY_LEXICON, config)
    unified = [r for r in results if r.status is CompletionStatus.UNIFIED and r.heuristic_joins == 0]
    wrong_edges = 0
    for r in results:
        gold = corpus.gold[r.sentence_id]
        outs = [r.output] if isinstance(r.output, DependencyTree) else [f.tree for f in r.output.fragments]
        for unit in outs:
            for e in unit.edges:
                if e.head != 0 and gold.edge(e.dependent) != e:
                    wrong_edges += 1
        for j in r.joins:
            if gold.edge(j.dependent).head != j.head or gold.edge(j.dependent).relation != j.relation:
                wrong_edges += 1
    empty = complete_document(corpus.document, DiscourseStore().freeze(), EMPTY_LEXICON, config)
    empty_unified = sum(r.status is CompletionStatus.UNIFIED for r in empty)
    elapsed = time.perf_counter() - started
    ok = len(results) == 30 and len(unified) >= 29 and wrong_edges == 0 and empty_unified == 0 and elapsed < 30
    criterion.check(ok, f"{len(unified)}/{len(results)} unified from discourse, {wrong_edges} edges off gold, "
                        f"{empty_unified} unified with an empty store, {elapsed:.2f}s")


def _run(doc: Path, out: Path, seed: str) -> subprocess.CompletedProcess:
    env = dict(os.environ, PYTHONHASHSEED=seed)
    return subprocess.run([sys.executable, "-m", "discparse", "run", str(doc), "-o", str(out)],
                          capture_output=True, env=env)


@pytest.mark.criterion("determinism")
def test_determinism(criterion, tmp_path):
    corpus = synthetic_corpus(seed=ACCEPTANCE_SEED)
    walk = walkthrough_document()
    offset = max(r.sentence_id for r in corpus.document.records)
    records = corpus.document.records + tuple(
        type(r)(r.sentence_id + offset, r.parse) for r in walk.records)
    doc = tmp_path / "corpus.jsonl"
    save_document(corpus.document.with_records(records), doc)
    first, second = _run(doc, tmp_path / "a", "1"), _run(doc, tmp_path / "b", "2")
    names = sorted(p.name for p in (tmp_path / "a").iterdir()) if first.returncode == 0 else []
    same = [((tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()) for n in names]
    ok = (first.returncode == second.returncode == 0 and first.stdout == second.stdout
          and len(names) == 6 and all(same))
    criterion.check(ok, f"{len(names)} output files compared across two runs with different hash seeds, "
                        f"{same.count(True)} identical")
