"""Completion and disambiguation of dependency parses using discourse information.

Complete parses elsewhere in the same document record how each lemma is
used (its parts of speech and its modifier/modifiee collocations).  That
record is used to pick among multiple parses of a sentence and to repair
and join the fragments of sentences the parser could not analyze.
"""

from .analysis import completion_report, repetition_stats, window_rates
from .completer import (
    CompletionResult,
    CompletionStatus,
    complete,
    heuristic_join,
    join_all,
    restructure_fragment,
    try_join,
)
from .config import PipelineConfig
from .disambiguator import extract_collocations, score_candidate, select_parse
from .formats import load_document, save_document
from .matcher import MatchLevel, MatchResult, SynonymLexicon, match_collocation, match_level_only
from .model import (
    DependencyEdge,
    DependencyTree,
    Document,
    ParseForest,
    ParseFragment,
    PartialParse,
    PosTag,
    Relation,
    SentenceRecord,
    Token,
    is_projective,
    validate_tree,
)
from .pipeline import run_pipeline
from .store import CollocationKey, DiscourseStore, InstanceRef, Side

__version__ = "0.1.0"
