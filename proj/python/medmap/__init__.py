"""Concept annotation of clinical notes against a terminology subset."""

from ._core import (
    ContractError,
    IoError,
    KnowledgeSource,
    annotate,
    build_knowledge_source,
    classify,
    f_measure,
    load_knowledge_source,
    map_phrase,
    normalize_term,
    run_cli,
    translate,
)

__all__ = [
    "ContractError",
    "IoError",
    "KnowledgeSource",
    "annotate",
    "build_knowledge_source",
    "classify",
    "f_measure",
    "load_knowledge_source",
    "map_phrase",
    "normalize_term",
    "run_cli",
    "translate",
]
