"""Line-delimited JSON documents, completion results, and a column-format converter.

A document file holds an optional metadata line ``{"metadata": {...}}``
followed by one sentence record per line::

    {"sentence_id": 1, "kind": "complete", "tree": TREE}
    {"sentence_id": 2, "kind": "multiple", "candidates": [TREE, ...]}
    {"sentence_id": 3, "kind": "incomplete", "fragments": [{"span": [1, 4], "tree": TREE}, ...]}

where ``TREE`` is ``{"tokens": [{"index", "surface", "lemma", "pos"}, ...],
"edges": [{"dependent", "head", "relation", "ambiguous"}, ...]}``.
Relations are ``SUBJ``, ``OBJ``, ``RECIPIENT``, ``DIRECT`` or ``prep:<lemma>``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, TextIO

from .completer import (
    CompletionResult,
    CompletionStatus,
    JoinDecision,
    JoinDirection,
    Reattach,
    RetagPos,
)
from .matcher import NO_MATCH, MatchLevel, MatchResult
from .model import (
    DependencyEdge,
    DependencyTree,
    Document,
    ParseFragment,
    ParseForest,
    PartialParse,
    PosTag,
    Relation,
    SentenceRecord,
    Token,
)
from .store import CollocationEntry, CollocationKey, InstanceRef


class DataError(ValueError):
    """Malformed or invalid input, with its location."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None,
                 sentence_id: int | None = None):
        self.path, self.line, self.sentence_id = path, line, sentence_id
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if sentence_id is not None:
            where.append(f"sentence {sentence_id}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


def dump_line(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


# -- trees --------------------------------------------------------------

def tree_to_json(tree: DependencyTree) -> dict:
    return {
        "tokens": [{"index": t.index, "surface": t.surface, "lemma": t.lemma, "pos": t.pos_label}
                   for t in tree.tokens],
        "edges": [{"dependent": e.dependent, "head": e.head, "relation": str(e.relation),
                   "ambiguous": e.ambiguous} for e in tree.edges],
    }


def tree_from_json(data: Mapping) -> DependencyTree:
    tokens = []
    for t in data["tokens"]:
        pos, raw = PosTag.parse(str(t["pos"]))
        tokens.append(Token(int(t["index"]), str(t["surface"]), str(t["lemma"]), pos, raw))
    edges = [DependencyEdge(int(e["dependent"]), int(e["head"]), Relation.parse(str(e["relation"])),
                            bool(e.get("ambiguous", False)))
             for e in data["edges"]]
    return DependencyTree(tuple(tokens), tuple(edges))


def partial_to_json(partial: PartialParse) -> list:
    return [{"span": list(f.span), "tree": tree_to_json(f.tree)} for f in partial.fragments]


def partial_from_json(data: list) -> PartialParse:
    return PartialParse(tuple(ParseFragment(tuple(f["span"]), tree_from_json(f["tree"])) for f in data))


def record_to_json(record: SentenceRecord) -> dict:
    out: dict[str, Any] = {"sentence_id": record.sentence_id, "kind": record.kind}
    parse = record.parse
    if isinstance(parse, DependencyTree):
        out["tree"] = tree_to_json(parse)
    elif isinstance(parse, ParseForest):
        out["candidates"] = [tree_to_json(c) for c in parse.candidates]
    else:
        out["fragments"] = partial_to_json(parse)
    return out


def record_from_json(data: Mapping) -> SentenceRecord:
    sid = data["sentence_id"]
    if not isinstance(sid, int) or isinstance(sid, bool):
        raise ValueError(f"sentence_id must be an integer, got {sid!r}")
    kind = data["kind"]
    if kind == "complete":
        parse = tree_from_json(data["tree"])
    elif kind == "multiple":
        parse = ParseForest(tuple(tree_from_json(c) for c in data["candidates"]))
    elif kind == "incomplete":
        parse = partial_from_json(data["fragments"])
    else:
        raise ValueError(f"unknown record kind {kind!r}")
    return SentenceRecord(sid, parse)


# -- documents ----------------------------------------------------------

def read_document(stream: TextIO, path: str | None = None) -> Document:
    """Parse and validate a document; the first problem found is raised as ``DataError``."""
    records: list[SentenceRecord] = []
    metadata: dict[str, str] = {}
    previous = None
    for lineno, line in enumerate(stream, 1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"malformed JSON: {exc.msg}", path=path, line=lineno) from None
        if not isinstance(data, dict):
            raise DataError("record must be a JSON object", path=path, line=lineno)
        if "metadata" in data and "sentence_id" not in data:
            if records:
                raise DataError("metadata must precede the sentence records", path=path, line=lineno)
            metadata = {str(k): str(v) for k, v in data["metadata"].items()}
            continue
        sid = data.get("sentence_id")
        try:
            record = record_from_json(data)
        except (KeyError, TypeError, ValueError) as exc:
            detail = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
            raise DataError(f"malformed record: {detail}", path=path, line=lineno,
                            sentence_id=sid if isinstance(sid, int) else None) from None
        if previous is not None and record.sentence_id <= previous:
            raise DataError(f"sentence id {record.sentence_id} does not follow {previous}",
                            path=path, line=lineno, sentence_id=record.sentence_id)
        violations = record.violations()
        if violations:
            raise DataError("; ".join(map(str, violations)), path=path, line=lineno,
                            sentence_id=record.sentence_id)
        previous = record.sentence_id
        records.append(record)
    if not records:
        raise DataError("document has no sentence records", path=path)
    return Document(tuple(records), metadata)


def load_document(path: str | Path) -> Document:
    path = Path(path)
    if not path.exists():
        raise DataError("no such file", path=str(path))
    with path.open(encoding="utf-8") as stream:
        return read_document(stream, str(path))


def document_lines(document: Document) -> Iterator[str]:
    if document.metadata:
        yield dump_line({"metadata": dict(sorted(document.metadata.items()))})
    for record in document.records:
        yield dump_line(record_to_json(record))


def dumps_document(document: Document) -> str:
    return "".join(line + "\n" for line in document_lines(document))


def save_document(document: Document, path: str | Path) -> None:
    Path(path).write_text(dumps_document(document), encoding="utf-8")


# -- completion results --------------------------------------------------

def _match_to_json(match: MatchResult) -> dict | None:
    if match.entry is None:
        return None
    key = match.entry.key
    return {
        "level": match.level.name,
        "key": {"modifier": [key.modifier_lemma, key.modifier_pos.value], "relation": str(key.relation),
                "modifiee": [key.modifiee_lemma, key.modifiee_pos.value]},
        "definite": [[r.sentence_id, r.token_index] for r in match.entry.definite_instances],
        "ambiguous": [[r.sentence_id, r.token_index] for r in match.entry.ambiguous_instances],
        "score": str(match.score),
    }


def _match_from_json(data: Mapping | None) -> MatchResult:
    if data is None:
        return NO_MATCH
    k = data["key"]
    key = CollocationKey(k["modifier"][0], PosTag(k["modifier"][1]), Relation.parse(k["relation"]),
                         k["modifiee"][0], PosTag(k["modifiee"][1]))
    entry = CollocationEntry(key, tuple(InstanceRef(*r) for r in data["definite"]),
                             tuple(InstanceRef(*r) for r in data["ambiguous"]))
    return MatchResult(MatchLevel[data["level"]], entry)


def result_to_json(result: CompletionResult) -> dict:
    actions = []
    for a in result.actions:
        if isinstance(a, RetagPos):
            actions.append({"action": "retag", "token": a.token, "lemma": a.lemma, "old": a.old.value,
                            "new": a.new.value, "evidence": a.evidence})
        else:
            actions.append({"action": "reattach", "dependent": a.dependent, "old_head": a.old_head,
                            "new_head": a.new_head, "old_relation": str(a.old_relation),
                            "new_relation": str(a.new_relation), "evidence": _match_to_json(a.evidence)})
    joins = [{"direction": j.direction.value, "head": j.head, "dependent": j.dependent,
              "relation": str(j.relation), "heuristic": j.heuristic, "rule": j.rule,
              "left_span": list(j.left_span), "right_span": list(j.right_span),
              "match": _match_to_json(j.match)} for j in result.joins]
    out: dict[str, Any] = {"sentence_id": result.sentence_id, "status": result.status.value,
                           "actions": actions, "joins": joins}
    if isinstance(result.output, DependencyTree):
        out["tree"] = tree_to_json(result.output)
    else:
        out["fragments"] = partial_to_json(result.output)
    return out


def result_from_json(data: Mapping) -> CompletionResult:
    actions = []
    for a in data["actions"]:
        if a["action"] == "retag":
            actions.append(RetagPos(a["token"], a["lemma"], PosTag(a["old"]), PosTag(a["new"]), a["evidence"]))
        else:
            actions.append(Reattach(a["dependent"], a["old_head"], a["new_head"],
                                    Relation.parse(a["old_relation"]), Relation.parse(a["new_relation"]),
                                    _match_from_json(a["evidence"])))
    joins = [JoinDecision(JoinDirection(j["direction"]), j["head"], j["dependent"],
                          Relation.parse(j["relation"]), _match_from_json(j["match"]), j["heuristic"],
                          tuple(j["left_span"]), tuple(j["right_span"]), j["rule"])
             for j in data["joins"]]
    output = tree_from_json(data["tree"]) if "tree" in data else partial_from_json(data["fragments"])
    return CompletionResult(CompletionStatus(data["status"]), output, tuple(actions), tuple(joins),
                            data.get("sentence_id"))


def dumps_results(results: Iterable[CompletionResult], sentence_count: int | None = None) -> str:
    lines = []
    if sentence_count is not None:
        lines.append(dump_line({"sentence_count": sentence_count}))
    lines.extend(dump_line(result_to_json(r)) for r in results)
    return "".join(line + "\n" for line in lines)


def load_results(path: str | Path) -> tuple[list[CompletionResult], int | None]:
    results, sentence_count = [], None
    with Path(path).open(encoding="utf-8") as stream:
        for lineno, line in enumerate(stream, 1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                if "sentence_count" in data and "status" not in data:
                    sentence_count = int(data["sentence_count"])
                    continue
                results.append(result_from_json(data))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DataError(f"malformed result: {exc}", path=str(path), line=lineno) from None
    return results, sentence_count


# -- column format ------------------------------------------------------

UPOS_MAP = {
    "NOUN": PosTag.N, "PROPN": PosTag.N, "PRON": PosTag.PN, "VERB": PosTag.V, "AUX": PosTag.V,
    "ADJ": PosTag.AJ, "ADV": PosTag.AV, "CCONJ": PosTag.CJ, "SCONJ": PosTag.CJ, "ADP": PosTag.PP,
    "DET": PosTag.DET, "PUNCT": PosTag.PUNC,
}
DEPREL_MAP = {"nsubj": "SUBJ", "nsubj:pass": "SUBJ", "csubj": "SUBJ", "obj": "OBJ", "dobj": "OBJ",
              "iobj": "RECIPIENT"}


def _column_pos(upos: str) -> tuple[PosTag, str]:
    pos, raw = PosTag.parse(upos)
    if pos is PosTag.OTHER and upos in UPOS_MAP:
        return UPOS_MAP[upos], ""
    return pos, raw


def _sentence_from_columns(rows: list[list[str]]) -> DependencyTree:
    tokens, heads = [], []
    for cols in rows:
        if len(cols) < 8:
            raise ValueError(f"expected at least 8 columns, got {len(cols)}")
        pos, raw = _column_pos(cols[3])
        lemma = cols[2] if cols[2] not in ("", "_") else cols[1]
        tokens.append(Token(int(cols[0]), cols[1], lemma, pos, raw))
        misc = cols[9] if len(cols) > 9 else "_"
        heads.append((int(cols[0]), int(cols[6]), cols[7], "Ambiguous=Yes" in misc.split("|")))
    by_index = {t.index: t for t in tokens}
    case_of: dict[int, str] = {}
    for dep, head, label, _ in heads:
        if label == "case" and by_index[dep].pos is PosTag.PP:
            case_of.setdefault(head, by_index[dep].lemma)
    edges = []
    for dep, head, label, ambiguous in heads:
        if label in ("SUBJ", "OBJ", "RECIPIENT", "DIRECT") or label.startswith("prep:"):
            relation = Relation.parse(label)
        elif label in DEPREL_MAP:
            relation = Relation(DEPREL_MAP[label])
        elif label.split(":")[0] in ("obl", "nmod") and dep in case_of:
            relation = Relation.prep(case_of[dep])
        else:
            relation = Relation("DIRECT")
        edges.append(DependencyEdge(dep, head, relation, ambiguous))
    return DependencyTree(tuple(tokens), tuple(edges))


def convert_columns(stream: TextIO, path: str | None = None, first_id: int = 1) -> Document:
    """Read a column-per-token treebank (CoNLL-U layout) into complete records.

    Universal tags and relations are mapped onto the native sets; ``obl``
    and ``nmod`` dependents with a ``case`` preposition become prepositional
    relations.  Comment lines, multiword ranges and empty nodes are skipped.
    """
    records: list[SentenceRecord] = []
    rows: list[list[str]] = []
    start_line = None

    def flush() -> None:
        nonlocal rows, start_line
        if not rows:
            return
        sid = first_id + len(records)
        try:
            tree = _sentence_from_columns(rows)
        except ValueError as exc:
            raise DataError(str(exc), path=path, line=start_line, sentence_id=sid) from None
        record = SentenceRecord(sid, tree)
        violations = record.violations()
        if violations:
            raise DataError("; ".join(map(str, violations)), path=path, line=start_line, sentence_id=sid)
        records.append(record)
        rows, start_line = [], None

    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\n")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if "-" in cols[0] or "." in cols[0]:
            continue
        if start_line is None:
            start_line = lineno
        rows.append(cols)
    flush()
    if not records:
        raise DataError("no sentences found", path=path)
    return Document(tuple(records), {})
