import io
import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kiosk_assistant.augment import (
    CategoryLexicon,
    augment_corpus,
    expand_sentence,
    load_lexicon,
    mine_frequent_ngrams,
    write_ngram_csv,
)
from kiosk_assistant.classify import DocumentRecord, LabeledCorpus
from kiosk_assistant.textproc import ngrams


@pytest.fixture
def greet_lexicon() -> CategoryLexicon:
    return CategoryLexicon.from_dict({"greet": [["hi", "hello"]]})


class TestExpandSentence:
    def test_single_substitution(self, greet_lexicon):
        record = DocumentRecord("1", "hi there", "greet")
        variants = expand_sentence(record, greet_lexicon, cap=10)
        assert [v.text for v in variants] == ["hello there"]

    def test_no_lexicon_terms(self, greet_lexicon):
        record = DocumentRecord("1", "good morning", "greet")
        assert expand_sentence(record, greet_lexicon, cap=10) == []

    def test_every_position_substituted(self, greet_lexicon):
        record = DocumentRecord("1", "hi hi", "greet")
        variants = expand_sentence(record, greet_lexicon, cap=10)
        assert [v.text for v in variants] == ["hello hi", "hi hello"]

    def test_cap_truncates(self, greet_lexicon):
        record = DocumentRecord("1", "hi hi hi hi", "greet")
        variants = expand_sentence(record, greet_lexicon, cap=2)
        assert len(variants) == 2

    def test_unknown_label_yields_nothing(self, greet_lexicon):
        record = DocumentRecord("1", "hi there", "smalltalk")
        assert expand_sentence(record, greet_lexicon, cap=10) == []

    def test_variant_ids_derive_from_parent(self, greet_lexicon):
        record = DocumentRecord("r9", "hi hi", "greet")
        variants = expand_sentence(record, greet_lexicon, cap=10)
        assert [v.id for v in variants] == ["r9-v1", "r9-v2"]

    def test_labels_inherited(self, greet_lexicon):
        record = DocumentRecord("1", "hi there", "greet")
        assert all(v.label == "greet" for v in expand_sentence(record, greet_lexicon, cap=10))

    def test_duplicate_variants_collapsed(self):
        lexicon = CategoryLexicon.from_dict({"greet": [["hi", "hello"], ["hi", "hello"]]})
        record = DocumentRecord("1", "hi", "greet")
        variants = expand_sentence(record, lexicon, cap=10)
        assert [v.text for v in variants] == ["hello"]


class TestLexicon:
    def test_group_needs_two_members(self):
        with pytest.raises(ValueError):
            CategoryLexicon.from_dict({"greet": [["hi"]]})

    def test_terms_must_be_normalized_tokens(self):
        with pytest.raises(ValueError):
            CategoryLexicon.from_dict({"greet": [["Hi", "hello"]]})
        with pytest.raises(ValueError):
            CategoryLexicon.from_dict({"greet": [["hi there", "hello"]]})

    def test_load_file(self, tmp_path):
        path = tmp_path / "lexicon.json"
        path.write_text('{"greet": [["hi", "hello"]]}', encoding="utf-8")
        assert load_lexicon(path).groups == {"greet": (("hi", "hello"),)}

    def test_load_rejects_non_object(self, tmp_path):
        path = tmp_path / "lexicon.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ValueError):
            load_lexicon(path)


class TestAugmentCorpus:
    def corpus(self, *texts) -> LabeledCorpus:
        return LabeledCorpus(
            records=tuple(
                DocumentRecord(f"s{i}", text, "greet") for i, text in enumerate(texts)
            )
        )

    def test_target_below_size_rejected(self, greet_lexicon):
        with pytest.raises(ValueError):
            augment_corpus(self.corpus("hi", "hello"), greet_lexicon, target_size=1)

    def test_target_equals_size_is_identity(self, greet_lexicon):
        corpus = self.corpus("hi", "hello")
        grown = augment_corpus(corpus, greet_lexicon, target_size=2)
        assert grown.records == corpus.records

    def test_empty_lexicon_returns_originals(self):
        corpus = self.corpus("hi", "hello")
        lexicon = CategoryLexicon.from_dict({})
        grown = augment_corpus(corpus, lexicon, target_size=10)
        assert grown.records == corpus.records

    def test_round_robin_order(self, greet_lexicon):
        corpus = self.corpus("hi a hi", "hi b")
        grown = augment_corpus(corpus, greet_lexicon, target_size=5)
        # one variant from each original first, then the remaining one
        assert [r.id for r in grown.records] == ["s0", "s1", "s0-v1", "s1-v1", "s0-v2"]

    def test_originals_preserved_and_labels_inherited(self, greet_lexicon):
        corpus = self.corpus("hi a", "hi b", "hi c")
        grown = augment_corpus(corpus, greet_lexicon, target_size=6)
        assert grown.records[: len(corpus.records)] == corpus.records
        by_id = {r.id: r for r in grown.records}
        for record in grown.records[len(corpus.records) :]:
            parent_id = record.id.rsplit("-v", 1)[0]
            assert by_id[parent_id].label == record.label

    def test_deterministic(self, greet_lexicon):
        corpus = self.corpus("hi a hi", "hi b")
        first = augment_corpus(corpus, greet_lexicon, target_size=5)
        second = augment_corpus(corpus, greet_lexicon, target_size=5)
        assert first.records == second.records

    def test_exhaustion_stops_short(self, greet_lexicon):
        corpus = self.corpus("hi", "xyz")
        grown = augment_corpus(corpus, greet_lexicon, target_size=50)
        assert len(grown) == 3  # one variant is all the lexicon offers

    @given(st.integers(2, 12))
    def test_size_bound(self, target):
        lexicon = CategoryLexicon.from_dict({"greet": [["hi", "hello", "salam"]]})
        corpus = self.corpus("hi hi", "hi there")
        grown = augment_corpus(corpus, lexicon, target_size=target)
        assert len(corpus) <= len(grown) <= target


class TestMineNgrams:
    def test_worked_trigram(self):
        table = mine_frequent_ngrams([["a", "b", "c", "a", "b", "c"], ["a", "b", "d"]], n=3, top_k=1)
        assert table.entries == ((("a", "b", "c"), 2),)

    def test_unigram_table(self):
        table = mine_frequent_ngrams([["b", "a", "b"]], n=1, top_k=10)
        assert table.entries == ((("b",), 2), (("a",), 1))

    def test_short_doc_yields_nothing(self):
        assert mine_frequent_ngrams([["a", "b"]], n=3, top_k=5).entries == ()

    def test_windows_do_not_cross_documents(self):
        table = mine_frequent_ngrams([["a", "b"], ["b", "a"]], n=2, top_k=10)
        grams = dict(table.entries)
        assert grams == {("a", "b"): 1, ("b", "a"): 1}

    def test_count_then_lexicographic_order(self):
        table = mine_frequent_ngrams([["b", "x", "a", "x", "b", "x"]], n=1, top_k=10)
        assert table.entries == ((("x",), 3), (("b",), 2), (("a",), 1))

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            mine_frequent_ngrams([["a"]], n=0, top_k=1)
        with pytest.raises(ValueError):
            mine_frequent_ngrams([["a"]], n=1, top_k=0)

    @given(
        st.lists(
            st.lists(st.sampled_from("abc"), max_size=12),
            max_size=6,
        ),
        st.integers(1, 4),
        st.integers(1, 30),
    )
    def test_matches_brute_force(self, docs, n, top_k):
        counts = Counter()
        for doc in docs:
            counts.update(ngrams(doc, n))
        expected = tuple(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k])
        assert mine_frequent_ngrams(docs, n=n, top_k=top_k).entries == expected


class TestCsvExport:
    def test_golden_output(self):
        table = mine_frequent_ngrams([["a", "b", "c", "a", "b", "c"], ["a", "b", "d"]], n=3, top_k=2)
        out = io.StringIO()
        write_ngram_csv(table, out)
        assert out.getvalue() == "ngram,count\na b c,2\na b d,1\n"
