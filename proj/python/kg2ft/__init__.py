"""Knowledge graph to fine-tuning dataset compiler."""

from kg2ft._core import (
    KgError,
    __version__,
    build,
    dataset_stats,
    ingest_triples,
    normalize_answer,
    score,
    set_log_level,
    token_f1,
)

__all__ = [
    "KgError",
    "__version__",
    "build",
    "dataset_stats",
    "ingest_triples",
    "normalize_answer",
    "score",
    "set_log_level",
    "token_f1",
]
