"""Multinomial Naive Bayes over bag-of-words features.

Training, prediction, evaluation, and a versioned JSON model format.  The
classifier is written directly against the counting formulas (Laplace
smoothing, log-space accumulation) so its behavior is fully determined by
this module and checkable against a brute-force Bayes evaluation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .textproc import Vocabulary, build_vocabulary, tokenize

MODEL_FORMAT_VERSION = 1

# Tolerance for "these log-probabilities normalize to 1" checks.
_NORMALIZATION_TOL = 1e-9


class ModelParseError(ValueError):
    """Raised when a serialized model cannot be decoded at all."""


class ModelValidationError(ValueError):
    """Raised when a decoded model violates a structural invariant."""


@dataclass(frozen=True)
class DocumentRecord:
    """One labeled training sentence."""

    id: str
    text: str
    label: str


@dataclass(frozen=True)
class LabeledCorpus:
    records: tuple[DocumentRecord, ...]

    def __post_init__(self) -> None:
        if not self.records:
            raise ValueError("corpus must contain at least one record")
        seen: set[str] = set()
        for rec in self.records:
            if not rec.label:
                raise ValueError(f"record {rec.id!r} has an empty label")
            if rec.id in seen:
                raise ValueError(f"duplicate record id {rec.id!r}")
            seen.add(rec.id)

    @property
    def categories(self) -> set[str]:
        return {rec.label for rec in self.records}

    def __len__(self) -> int:
        return len(self.records)


def load_corpus(path: str | Path) -> LabeledCorpus:
    """Load a JSON array of ``{id, text, label}`` objects."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise ValueError(f"{path}: expected a JSON array of records")
    records = []
    for i, item in enumerate(raw):
        try:
            records.append(
                DocumentRecord(id=str(item["id"]), text=str(item["text"]), label=str(item["label"]))
            )
        except (TypeError, KeyError) as exc:
            raise ValueError(f"{path}: record {i} is missing a field: {exc}") from exc
    return LabeledCorpus(records=tuple(records))


def save_corpus(corpus: LabeledCorpus, path: str | Path) -> None:
    payload = [{"id": r.id, "text": r.text, "label": r.label} for r in corpus.records]
    Path(path).write_text(
        json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )


@dataclass(frozen=True)
class ClassParams:
    """Per-class parameters; log_likelihoods is parallel to the vocabulary."""

    label: str
    log_prior: float
    log_likelihoods: tuple[float, ...]


@dataclass(frozen=True)
class MnbModel:
    vocabulary: Vocabulary
    alpha: float
    classes: tuple[ClassParams, ...]  # sorted by label

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.classes)

    def validate(self) -> None:
        """Check structural invariants; raises ModelValidationError."""
        if self.alpha <= 0:
            raise ModelValidationError(f"alpha must be > 0, got {self.alpha}")
        if not self.classes:
            raise ModelValidationError("model has no classes")
        labels = [c.label for c in self.classes]
        if labels != sorted(labels) or len(set(labels)) != len(labels):
            raise ModelValidationError("classes must be unique and sorted by label")
        prior_sum = sum(math.exp(c.log_prior) for c in self.classes)
        if abs(prior_sum - 1.0) > _NORMALIZATION_TOL:
            raise ModelValidationError(f"class priors sum to {prior_sum}, expected 1")
        for params in self.classes:
            if len(params.log_likelihoods) != len(self.vocabulary):
                raise ModelValidationError(
                    f"class {params.label!r} has {len(params.log_likelihoods)} likelihoods "
                    f"for a {len(self.vocabulary)}-term vocabulary"
                )
            lik_sum = sum(math.exp(v) for v in params.log_likelihoods)
            if abs(lik_sum - 1.0) > _NORMALIZATION_TOL:
                raise ModelValidationError(
                    f"class {params.label!r} likelihoods sum to {lik_sum}, expected 1"
                )


def train_mnb(
    corpus: LabeledCorpus,
    alpha: float = 1.0,
    min_count: int = 1,
    stop_words: frozenset[str] = frozenset(),
) -> MnbModel:
    """Train a Multinomial Naive Bayes model with Laplace smoothing.

    likelihood(t|c) = (count(t, c) + alpha) / (tokens in c + alpha * |V|),
    prior(c) = docs in c / total docs.  The vocabulary keeps terms seen at
    least ``min_count`` times, ordered by first occurrence.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")

    docs = [[t for t in tokenize(rec.text) if t not in stop_words] for rec in corpus.records]
    vocab = build_vocabulary(docs, min_count=min_count)
    if len(vocab) == 0:
        raise ValueError("corpus yields an empty vocabulary; nothing to train on")

    doc_counts: dict[str, int] = {}
    term_counts: dict[str, dict[int, int]] = {}
    token_totals: dict[str, int] = {}
    for rec, tokens in zip(corpus.records, docs):
        doc_counts[rec.label] = doc_counts.get(rec.label, 0) + 1
        counts = term_counts.setdefault(rec.label, {})
        for token in tokens:
            idx = vocab.index.get(token)
            if idx is None:
                continue
            counts[idx] = counts.get(idx, 0) + 1
            token_totals[rec.label] = token_totals.get(rec.label, 0) + 1

    total_docs = len(corpus.records)
    classes = []
    for label in sorted(doc_counts):
        counts = term_counts.get(label, {})
        denom = token_totals.get(label, 0) + alpha * len(vocab)
        log_likelihoods = tuple(
            math.log((counts.get(i, 0) + alpha) / denom) for i in range(len(vocab))
        )
        classes.append(
            ClassParams(
                label=label,
                log_prior=math.log(doc_counts[label] / total_docs),
                log_likelihoods=log_likelihoods,
            )
        )
    return MnbModel(vocabulary=vocab, alpha=alpha, classes=tuple(classes))


def predict(
    model: MnbModel, text: str, stop_words: frozenset[str] = frozenset()
) -> tuple[str, dict[str, float]]:
    """Return ``(label, posteriors)`` for a raw text.

    Scores accumulate in log space; posteriors are normalized in linear
    space.  Out-of-vocabulary tokens are ignored, so a fully-OOV text falls
    back to the class priors.  Ties go to the lexicographically smallest
    label (classes are stored sorted).
    """
    tokens = [t for t in tokenize(text) if t not in stop_words]
    counts: dict[int, int] = {}
    for token in tokens:
        idx = model.vocabulary.index.get(token)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1

    scores = []
    for params in model.classes:
        score = params.log_prior
        for idx, count in counts.items():
            score += count * params.log_likelihoods[idx]
        scores.append(score)

    peak = max(scores)
    linear = [math.exp(s - peak) for s in scores]
    norm = sum(linear)
    posteriors = {params.label: v / norm for params, v in zip(model.classes, linear)}

    # Classes are sorted by label and max() keeps the first maximum, so
    # exact ties resolve to the lexicographically smallest label.
    best = max(range(len(linear)), key=linear.__getitem__)
    return model.classes[best].label, posteriors


@dataclass(frozen=True)
class ClassMetrics:
    label: str
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    macro_f1: float
    per_class: tuple[ClassMetrics, ...]
    confusion: tuple[tuple[int, ...], ...]  # rows: true label, cols: predicted
    labels: tuple[str, ...] = field(default=())


def evaluate(
    model: MnbModel,
    held_out: LabeledCorpus,
    stop_words: frozenset[str] = frozenset(),
) -> EvalReport:
    """Accuracy, macro-F1, per-class metrics, and the confusion matrix."""
    labels = model.labels
    label_index = {label: i for i, label in enumerate(labels)}
    unknown = held_out.categories - set(labels)
    if unknown:
        raise ValueError(f"held-out labels not in model: {sorted(unknown)}")

    n = len(labels)
    confusion = [[0] * n for _ in range(n)]
    for rec in held_out.records:
        predicted, _ = predict(model, rec.text, stop_words=stop_words)
        confusion[label_index[rec.label]][label_index[predicted]] += 1

    total = len(held_out.records)
    correct = sum(confusion[i][i] for i in range(n))
    per_class = []
    for i, label in enumerate(labels):
        tp = confusion[i][i]
        predicted_i = sum(confusion[r][i] for r in range(n))
        actual_i = sum(confusion[i])
        precision = tp / predicted_i if predicted_i else 0.0
        recall = tp / actual_i if actual_i else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class.append(ClassMetrics(label=label, precision=precision, recall=recall, f1=f1))

    return EvalReport(
        accuracy=correct / total,
        macro_f1=sum(m.f1 for m in per_class) / n,
        per_class=tuple(per_class),
        confusion=tuple(tuple(row) for row in confusion),
        labels=labels,
    )


def save_model(model: MnbModel) -> bytes:
    """Serialize to versioned UTF-8 JSON; floats round-trip bit-exactly."""
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "alpha": model.alpha,
        "vocabulary": list(model.vocabulary.terms),
        "classes": [
            {
                "label": c.label,
                "log_prior": c.log_prior,
                "log_likelihoods": list(c.log_likelihoods),
            }
            for c in model.classes
        ],
    }
    return (json.dumps(payload, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def load_model(data: bytes) -> MnbModel:
    """Parse and validate a serialized model.

    Raises ModelParseError for malformed input (with position), and
    ModelValidationError when the decoded model breaks an invariant.
    """
    try:
        payload = json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ModelParseError(f"model file is not UTF-8: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelParseError(
            f"malformed model JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc

    if not isinstance(payload, dict):
        raise ModelValidationError("model file must contain a JSON object")
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelValidationError(f"unsupported format_version: {version!r}")
    try:
        terms = tuple(str(t) for t in payload["vocabulary"])
        vocab = Vocabulary(terms=terms, index={t: i for i, t in enumerate(terms)})
        classes = tuple(
            sorted(
                (
                    ClassParams(
                        label=str(c["label"]),
                        log_prior=float(c["log_prior"]),
                        log_likelihoods=tuple(float(v) for v in c["log_likelihoods"]),
                    )
                    for c in payload["classes"]
                ),
                key=lambda c: c.label,
            )
        )
        model = MnbModel(vocabulary=vocab, alpha=float(payload["alpha"]), classes=classes)
    except (TypeError, KeyError, ValueError) as exc:
        raise ModelValidationError(f"model file structure is invalid: {exc}") from exc
    if len(set(vocab.terms)) != len(vocab.terms):
        raise ModelValidationError("vocabulary contains duplicate terms")
    model.validate()
    return model
