"""FAQ ranking and short-answer extraction.

An answer candidate is scored as the sum of two terms: how much of the
query's keyword set the candidate covers (recall over the query), plus the
share of matched terms in the candidate weighted by its full token length
(a repetition-penalized precision).  The score lives in [0, 2]; 2.0 means
the candidate's distinct tokens are exactly the query keywords with no
repeats.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .classify import predict
from .textproc import tokenize

DEFAULT_FALLBACK_TEXT = (
    "Sorry, I do not have an answer for that yet. Please ask the front desk."
)

# Phrases that mark a question as asking for a quantity; "skolko" covers the
# transliterated Russian form.
DEFAULT_QUANT_MARKERS = ("how many", "how much", "skolko")


class NoSentencesError(ValueError):
    """Raised when a document yields no sentences to extract from."""


@dataclass(frozen=True)
class Query:
    """A user question reduced to its deduplicated keyword set."""

    raw: str
    lemmas: frozenset[str]


def make_query(raw: str, stop_words: frozenset[str] = frozenset()) -> Query:
    return Query(raw=raw, lemmas=frozenset(tokenize(raw)) - stop_words)


@dataclass(frozen=True)
class FaqEntry:
    id: str
    question: str
    answer: str
    category: str
    answer_tokens: tuple[str, ...]


def make_faq_entry(id: str, question: str, answer: str, category: str = "") -> FaqEntry:
    if not question or not answer:
        raise ValueError(f"FAQ entry {id!r} needs a non-empty question and answer")
    return FaqEntry(
        id=id,
        question=question,
        answer=answer,
        category=category,
        answer_tokens=tuple(tokenize(question + " " + answer)),
    )


def load_kb(path: str | Path) -> list[FaqEntry]:
    """Load a JSON array of ``{id, question, answer, category}`` entries."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise ValueError(f"{path}: expected a JSON array of FAQ entries")
    entries = []
    seen: set[str] = set()
    for i, item in enumerate(raw):
        try:
            entry = make_faq_entry(
                id=str(item["id"]),
                question=str(item["question"]),
                answer=str(item["answer"]),
                category=str(item.get("category", "")),
            )
        except (TypeError, KeyError) as exc:
            raise ValueError(f"{path}: entry {i} is missing a field: {exc}") from exc
        if entry.id in seen:
            raise ValueError(f"{path}: duplicate entry id {entry.id!r}")
        seen.add(entry.id)
        entries.append(entry)
    return entries


def overlap_score(
    lemmas: frozenset[str] | set[str], answer_tokens: Sequence[str]
) -> tuple[float, float, float]:
    """Return ``(score, recall_term, precision_term)``.

    recall_term   = |L ∩ set(a)| / |L|        (0 when the query is empty)
    precision_term = |set(a) ∩ L| / |a|       (|a| counts repeated tokens;
                                               0 when the candidate is empty)
    """
    distinct = set(answer_tokens)
    matched = len(distinct & set(lemmas))
    recall = matched / len(lemmas) if lemmas else 0.0
    precision = matched / len(answer_tokens) if answer_tokens else 0.0
    return recall + precision, recall, precision


def rank_faq(query: Query, entries: Sequence[FaqEntry]) -> list[tuple[FaqEntry, float]]:
    """All entries scored against the query, best first; ties by entry id."""
    scored = [(entry, overlap_score(query.lemmas, entry.answer_tokens)[0]) for entry in entries]
    scored.sort(key=lambda pair: (-pair[1], pair[0].id))
    return scored


@dataclass(frozen=True)
class AnswerResult:
    entry_id: Optional[str]
    answer_text: str
    score: float
    recall_term: float
    precision_term: float
    fallback: bool


def answer(
    query_text: str,
    kb: Sequence[FaqEntry],
    model=None,
    threshold: float = 0.5,
    category_filter: bool = True,
    stop_words: frozenset[str] = frozenset(),
    fallback_text: str = DEFAULT_FALLBACK_TEXT,
) -> AnswerResult:
    """Best FAQ answer for a question, or a fallback below ``threshold``.

    With a classifier model and ``category_filter`` enabled, candidates are
    restricted to the predicted category first; if that category has no
    entries the whole knowledge base is searched.
    """
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    query = make_query(query_text, stop_words)

    candidates: Sequence[FaqEntry] = kb
    if category_filter and model is not None and kb:
        label, _ = predict(model, query_text, stop_words=stop_words)
        filtered = [entry for entry in kb if entry.category == label]
        if filtered:
            candidates = filtered

    if not candidates:
        return AnswerResult(
            entry_id=None,
            answer_text=fallback_text,
            score=0.0,
            recall_term=0.0,
            precision_term=0.0,
            fallback=True,
        )

    best: Optional[FaqEntry] = None
    best_parts = (0.0, 0.0, 0.0)
    for entry in candidates:
        parts = overlap_score(query.lemmas, entry.answer_tokens)
        if best is None or parts[0] > best_parts[0] or (
            parts[0] == best_parts[0] and entry.id < best.id
        ):
            best, best_parts = entry, parts

    score, recall, precision = best_parts
    if score >= threshold:
        return AnswerResult(
            entry_id=best.id,
            answer_text=best.answer,
            score=score,
            recall_term=recall,
            precision_term=precision,
            fallback=False,
        )
    return AnswerResult(
        entry_id=None,
        answer_text=fallback_text,
        score=score,
        recall_term=recall,
        precision_term=precision,
        fallback=True,
    )


# Sentence terminators: ., !, ? (possibly repeated) followed by whitespace
# or end of text.
_SENTENCE_SPLIT_RE = re.compile(r"[.!?]+(?:\s+|$)")

_SCRIPT_STYLE_RE = re.compile(
    r"<(script|style)\b[^>]*>.*?</\1\s*>", re.IGNORECASE | re.DOTALL
)
_TAG_RE = re.compile(r"<[^>]*>")
_WS_RE = re.compile(r"\s+")

_ENTITIES = (("&lt;", "<"), ("&gt;", ">"), ("&quot;", '"'), ("&apos;", "'"), ("&amp;", "&"))


def split_sentences(text: str) -> list[str]:
    """Split on sentence terminators, trim pieces, drop empties."""
    pieces = _SENTENCE_SPLIT_RE.split(text)
    return [p.strip() for p in pieces if p.strip()]


def strip_markup(page: str) -> str:
    """Reduce an HTML-ish page to plain text.

    Drops script/style elements with their contents, replaces remaining
    tags with spaces, decodes the five standard character entities, and
    collapses whitespace.  Not a conforming HTML parser; fixture pages are
    controlled inputs.
    """
    text = _SCRIPT_STYLE_RE.sub(" ", page)
    text = _TAG_RE.sub(" ", text)
    for entity, char in _ENTITIES:
        text = text.replace(entity, char)
    return _WS_RE.sub(" ", text).strip()


def _contains_phrase(tokens: Sequence[str], phrase: Sequence[str]) -> bool:
    if not phrase or len(phrase) > len(tokens):
        return False
    for i in range(len(tokens) - len(phrase) + 1):
        if list(tokens[i : i + len(phrase)]) == list(phrase):
            return True
    return False


def is_quantitative(question: str, markers: Iterable[str] = DEFAULT_QUANT_MARKERS) -> bool:
    tokens = tokenize(question)
    return any(_contains_phrase(tokens, tokenize(marker)) for marker in markers)


@dataclass(frozen=True)
class ShortAnswer:
    sentence: str
    extracted: Optional[str]
    score: float


def extract_short_answer(
    question: str,
    document: str,
    stop_words: frozenset[str] = frozenset(),
    markers: Iterable[str] = DEFAULT_QUANT_MARKERS,
) -> ShortAnswer:
    """Pick the best-matching sentence of a document; pull a number if asked.

    Sentences are ranked by overlap with the question's keywords (earlier
    sentence wins ties).  For quantitative questions the first numeric token
    of the winning sentence is extracted.
    """
    sentences = split_sentences(strip_markup(document))
    if not sentences:
        raise NoSentencesError("document contains no sentences")

    lemmas = make_query(question, stop_words).lemmas
    best_idx = 0
    best_score = -1.0
    for i, sentence in enumerate(sentences):
        score, _, _ = overlap_score(lemmas, tokenize(sentence))
        if score > best_score:
            best_idx, best_score = i, score

    best_sentence = sentences[best_idx]
    extracted = None
    if is_quantitative(question, markers):
        extracted = next((t for t in tokenize(best_sentence) if t.isdigit()), None)
    return ShortAnswer(sentence=best_sentence, extracted=extracted, score=best_score)
