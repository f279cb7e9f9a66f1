"""Text normalization, tokenization, n-grams, and bag-of-words features.

Every other part of the engine funnels text through these helpers, so they
are deliberately small, pure, and dependency-free.  A token is a maximal run
of Unicode letters and/or digits (Cyrillic included); everything else is a
separator.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

# Runs of anything that is not a letter or digit (underscore included) act
# as separators.  \W is "not [a-zA-Z0-9_]" under re.UNICODE, so [\W_] is
# exactly "not a Unicode letter or digit".
_SEPARATOR_RE = re.compile(r"[\W_]+", re.UNICODE)


def normalize(text: str) -> str:
    """Lowercase, replace punctuation with spaces, collapse whitespace."""
    return _SEPARATOR_RE.sub(" ", text.lower()).strip()


def tokenize(text: str) -> list[str]:
    """Split normalized text into tokens, preserving order."""
    return normalize(text).split()


def ngrams(tokens: Sequence[str], n: int) -> list[tuple[str, ...]]:
    """All contiguous n-token windows, in order.

    Returns an empty list when the input is shorter than ``n``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


@dataclass(frozen=True)
class Vocabulary:
    """Ordered set of terms with a term -> column index mapping."""

    terms: tuple[str, ...]
    index: dict[str, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.index


def build_vocabulary(docs: Iterable[Sequence[str]], min_count: int = 1) -> Vocabulary:
    """Build a vocabulary from tokenized documents.

    Terms are ordered by first occurrence; terms with a total corpus count
    below ``max(min_count, 1)`` are dropped.
    """
    threshold = max(min_count, 1)
    counts: Counter[str] = Counter()
    order: list[str] = []
    for doc in docs:
        for token in doc:
            if token not in counts:
                order.append(token)
            counts[token] += 1
    terms = tuple(t for t in order if counts[t] >= threshold)
    return Vocabulary(terms=terms, index={t: i for i, t in enumerate(terms)})


@dataclass(frozen=True)
class BowVector:
    """Sparse bag-of-words counts keyed by vocabulary index."""

    counts: dict[int, int]

    def total(self) -> int:
        return sum(self.counts.values())


def vectorize(tokens: Sequence[str], vocab: Vocabulary) -> BowVector:
    """Count in-vocabulary tokens; out-of-vocabulary tokens are ignored."""
    counts: dict[int, int] = {}
    for token in tokens:
        idx = vocab.index.get(token)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    return BowVector(counts=counts)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a stop-word file: one token per line, ``#`` lines are comments."""
    words: set[str] = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        word = normalize(line)
        if word:
            words.add(word)
    return frozenset(words)
