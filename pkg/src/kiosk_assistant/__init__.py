"""Offline kiosk assistant engine.

Text in, answer plus kiosk events out: intent classification with a
Multinomial Naive Bayes model, FAQ retrieval by lemma overlap, corpus
augmentation, short-answer extraction, event broadcast, and usage
analytics, served over HTTP or driven from the command line.
"""

from importlib import resources
from pathlib import Path

from .analytics import RequestLog, RequestRecord, UsageStats, compute_stats
from .augment import CategoryLexicon, NgramTable, augment_corpus, expand_sentence, mine_frequent_ngrams
from .classify import LabeledCorpus, MnbModel, evaluate, load_model, predict, save_model, train_mnb
from .events import CommandRule, EventBroadcaster, GapMarker, KioskEvent, route
from .qa import AnswerResult, FaqEntry, ShortAnswer, answer, extract_short_answer, overlap_score
from .server import KioskEngine, create_app

__version__ = "0.1.0"


def bundled_data_path(name: str) -> Path:
    """Path of a bundled data file, e.g. ``faq.json`` or ``model.json``."""
    return Path(str(resources.files(__package__).joinpath("data", name)))

__all__ = [
    "AnswerResult",
    "CategoryLexicon",
    "CommandRule",
    "EventBroadcaster",
    "FaqEntry",
    "GapMarker",
    "KioskEngine",
    "KioskEvent",
    "LabeledCorpus",
    "MnbModel",
    "NgramTable",
    "RequestLog",
    "RequestRecord",
    "ShortAnswer",
    "UsageStats",
    "answer",
    "augment_corpus",
    "bundled_data_path",
    "compute_stats",
    "create_app",
    "evaluate",
    "expand_sentence",
    "extract_short_answer",
    "load_model",
    "mine_frequent_ngrams",
    "overlap_score",
    "predict",
    "route",
    "save_model",
    "train_mnb",
    "__version__",
]
