"""Corpus growth by category-lexicon substitution, plus n-gram mining.

A small labeled corpus is expanded by swapping single tokens for
interchangeable terms from the category's lexicon.  Variants inherit the
parent label and derive their ids from the parent id, so provenance stays
visible in the grown corpus.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .classify import DocumentRecord, LabeledCorpus
from .textproc import ngrams, normalize, tokenize


@dataclass(frozen=True)
class CategoryLexicon:
    """Per-category groups of interchangeable tokens."""

    groups: dict[str, tuple[tuple[str, ...], ...]]

    def __post_init__(self) -> None:
        for category, groups in self.groups.items():
            for group in groups:
                if len(group) < 2:
                    raise ValueError(
                        f"lexicon group {group!r} in {category!r} needs at least 2 terms"
                    )
                for term in group:
                    if not term or normalize(term) != term or " " in term:
                        raise ValueError(
                            f"lexicon term {term!r} in {category!r} is not a normalized token"
                        )

    @classmethod
    def from_dict(cls, raw: dict) -> "CategoryLexicon":
        groups = {}
        for category, group_list in raw.items():
            cleaned = []
            for group in group_list:
                # preserve order, drop duplicates within a group
                unique = tuple(dict.fromkeys(str(t) for t in group))
                cleaned.append(unique)
            groups[str(category)] = tuple(cleaned)
        return cls(groups=groups)


def load_lexicon(path: str | Path) -> CategoryLexicon:
    """Load a ``{category: [[term, term, ...], ...]}`` JSON file."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: expected a JSON object mapping category to term groups")
    return CategoryLexicon.from_dict(raw)


def expand_sentence(
    record: DocumentRecord, lexicon: CategoryLexicon, cap: int
) -> list[DocumentRecord]:
    """Single-substitution variants of one record, deduplicated, capped.

    Walks tokens left to right; wherever a token belongs to one of its
    category's term groups, emits one variant per alternative group member.
    The original record is never included.  Returns [] when the record's
    label has no lexicon entry.
    """
    groups = lexicon.groups.get(record.label)
    if not groups:
        return []
    tokens = tokenize(record.text)
    variants: list[DocumentRecord] = []
    seen: set[str] = set()
    for i, token in enumerate(tokens):
        for group in groups:
            if token not in group:
                continue
            for member in group:
                if member == token:
                    continue
                text = " ".join(tokens[:i] + [member] + tokens[i + 1 :])
                if text in seen:
                    continue
                seen.add(text)
                variants.append(
                    DocumentRecord(
                        id=f"{record.id}-v{len(variants) + 1}",
                        text=text,
                        label=record.label,
                    )
                )
                if len(variants) >= cap:
                    return variants
    return variants


def augment_corpus(
    corpus: LabeledCorpus,
    lexicon: CategoryLexicon,
    target_size: int,
    cap_per_sentence: int = 20,
) -> LabeledCorpus:
    """Grow a corpus to ``target_size`` records via round-robin substitution.

    All originals are kept; variants are drawn one per original per round
    until the target is reached or every sentence's variants are exhausted.
    """
    if target_size < len(corpus.records):
        raise ValueError(
            f"target_size {target_size} is smaller than the corpus ({len(corpus.records)} records)"
        )
    pools = [expand_sentence(rec, lexicon, cap_per_sentence) for rec in corpus.records]
    cursors = [0] * len(pools)
    generated: list[DocumentRecord] = []
    need = target_size - len(corpus.records)
    while len(generated) < need:
        progressed = False
        for i, pool in enumerate(pools):
            if len(generated) >= need:
                break
            if cursors[i] < len(pool):
                generated.append(pool[cursors[i]])
                cursors[i] += 1
                progressed = True
        if not progressed:
            break
    return LabeledCorpus(records=corpus.records + tuple(generated))


@dataclass(frozen=True)
class NgramTable:
    """N-gram counts sorted by count descending, then lexicographically."""

    entries: tuple[tuple[tuple[str, ...], int], ...]

    def __len__(self) -> int:
        return len(self.entries)


def mine_frequent_ngrams(
    docs: Iterable[Sequence[str]], n: int, top_k: int
) -> NgramTable:
    """Top ``top_k`` n-grams over tokenized docs; windows never cross docs."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if top_k < 1:
        raise ValueError(f"top_k must be >= 1, got {top_k}")
    counts: Counter[tuple[str, ...]] = Counter()
    for doc in docs:
        counts.update(ngrams(doc, n))
    ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return NgramTable(entries=tuple(ordered[:top_k]))


def write_ngram_csv(table: NgramTable, out: TextIO) -> None:
    """Write ``ngram,count`` rows with space-joined tokens."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["ngram", "count"])
    for gram, count in table.entries:
        writer.writerow([" ".join(gram), count])
