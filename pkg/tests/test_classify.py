import json
import math
import random
from collections import Counter, defaultdict
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kiosk_assistant.classify import (
    DocumentRecord,
    LabeledCorpus,
    ModelParseError,
    ModelValidationError,
    evaluate,
    load_corpus,
    load_model,
    predict,
    save_corpus,
    save_model,
    train_mnb,
)


def bayes_oracle(docs, alpha, query_tokens):
    """Direct Laplace-smoothed Bayes evaluation with exact rationals.

    ``docs`` is a list of (token list, label).  Returns posteriors as
    Fractions, computed with none of the library's code paths.
    """
    doc_counts = Counter(label for _, label in docs)
    tokens_by_class = defaultdict(list)
    vocab = []
    seen = set()
    for tokens, label in docs:
        tokens_by_class[label].extend(tokens)
        for token in tokens:
            if token not in seen:
                seen.add(token)
                vocab.append(token)
    a = Fraction(alpha)
    total_docs = sum(doc_counts.values())
    known = [t for t in query_tokens if t in seen]
    weights = {}
    for label, doc_count in doc_counts.items():
        term_counts = Counter(tokens_by_class[label])
        class_total = sum(term_counts.values())
        weight = Fraction(doc_count, total_docs)
        for token in known:
            weight *= (term_counts[token] + a) / (class_total + a * len(vocab))
        weights[label] = weight
    z = sum(weights.values())
    return {label: weight / z for label, weight in weights.items()}


class TestTrain:
    def test_worked_likelihoods_and_priors(self, toy_model):
        by_label = {c.label: c for c in toy_model.classes}
        index = toy_model.vocabulary.index
        expected = {
            "X": {"a": 0.5, "b": 1 / 3, "c": 1 / 6},
            "Y": {"a": 1 / 6, "b": 1 / 3, "c": 0.5},
        }
        for label, likelihoods in expected.items():
            params = by_label[label]
            assert math.exp(params.log_prior) == pytest.approx(0.5, abs=1e-12)
            for term, value in likelihoods.items():
                got = math.exp(params.log_likelihoods[index[term]])
                assert got == pytest.approx(value, abs=1e-12)

    def test_single_class_prior_is_zero_log(self):
        corpus = LabeledCorpus(records=(DocumentRecord("1", "a b", "only"),))
        model = train_mnb(corpus, alpha=1.0)
        assert model.classes[0].log_prior == 0.0

    def test_likelihoods_normalize(self, toy_model):
        for params in toy_model.classes:
            total = sum(math.exp(v) for v in params.log_likelihoods)
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_classes_sorted_by_label(self):
        corpus = LabeledCorpus(
            records=(
                DocumentRecord("1", "a", "zebra"),
                DocumentRecord("2", "b", "apple"),
            )
        )
        model = train_mnb(corpus, alpha=1.0)
        assert [c.label for c in model.classes] == ["apple", "zebra"]

    def test_alpha_must_be_positive(self, toy_corpus):
        with pytest.raises(ValueError):
            train_mnb(toy_corpus, alpha=0.0)
        with pytest.raises(ValueError):
            train_mnb(toy_corpus, alpha=-1.0)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            LabeledCorpus(records=())

    def test_empty_vocabulary_rejected(self):
        corpus = LabeledCorpus(records=(DocumentRecord("1", "!!!", "X"),))
        with pytest.raises(ValueError):
            train_mnb(corpus, alpha=1.0)

    def test_document_order_does_not_change_parameters(self):
        records = [
            DocumentRecord("1", "a a b", "X"),
            DocumentRecord("2", "b c c", "Y"),
            DocumentRecord("3", "a c", "X"),
            DocumentRecord("4", "b b", "Y"),
        ]
        shuffled = records[::-1]
        first = train_mnb(LabeledCorpus(records=tuple(records)), alpha=1.0)
        second = train_mnb(LabeledCorpus(records=tuple(shuffled)), alpha=1.0)
        for a, b in zip(first.classes, second.classes):
            assert a.label == b.label
            assert a.log_prior == b.log_prior
            values_a = {t: a.log_likelihoods[first.vocabulary.index[t]] for t in first.vocabulary.terms}
            values_b = {t: b.log_likelihoods[second.vocabulary.index[t]] for t in second.vocabulary.terms}
            assert values_a == values_b


class TestPredict:
    def test_worked_posterior(self, toy_model):
        label, posteriors = predict(toy_model, "a b")
        assert label == "X"
        assert posteriors["X"] == pytest.approx(0.75, abs=1e-12)
        assert posteriors["Y"] == pytest.approx(0.25, abs=1e-12)

    def test_single_class_certainty(self):
        corpus = LabeledCorpus(records=(DocumentRecord("1", "a b", "only"),))
        model = train_mnb(corpus, alpha=1.0)
        label, posteriors = predict(model, "anything at all")
        assert label == "only"
        assert posteriors == {"only": 1.0}

    def test_fully_oov_falls_back_to_priors(self, toy_model):
        label, posteriors = predict(toy_model, "zzz")
        assert posteriors["X"] == pytest.approx(0.5, abs=1e-12)
        assert posteriors["Y"] == pytest.approx(0.5, abs=1e-12)
        assert label == "X"  # lexicographic tie-break

    def test_word_order_invariance(self, toy_model):
        _, forward = predict(toy_model, "a b c b")
        _, backward = predict(toy_model, "b c b a")
        assert forward == backward

    def test_repeated_calls_deterministic(self, toy_model):
        results = {predict(toy_model, "a c b")[0] for _ in range(10)}
        assert len(results) == 1

    @given(st.text(alphabet="abcz ", max_size=40))
    def test_posteriors_normalize_and_stay_finite(self, toy_model, text):
        _, posteriors = predict(toy_model, text)
        assert sum(posteriors.values()) == pytest.approx(1.0, abs=1e-9)
        assert all(p > 0 for p in posteriors.values())

    def test_matches_bayes_oracle_on_random_corpora(self):
        rng = random.Random(1905)
        alphabet = ["a", "b", "c", "d"]
        for _ in range(200):
            n_classes = rng.randint(1, 3)
            labels = [f"c{i}" for i in range(n_classes)]
            n_docs = rng.randint(n_classes, 6)
            docs = []
            for i in range(n_docs):
                label = labels[i] if i < n_classes else rng.choice(labels)
                tokens = [rng.choice(alphabet) for _ in range(rng.randint(1, 5))]
                docs.append((tokens, label))
            alpha = rng.choice([0.5, 1.0, 2.0])
            corpus = LabeledCorpus(
                records=tuple(
                    DocumentRecord(str(i), " ".join(tokens), label)
                    for i, (tokens, label) in enumerate(docs)
                )
            )
            model = train_mnb(corpus, alpha=alpha)
            query = [rng.choice(alphabet + ["zzz"]) for _ in range(rng.randint(0, 6))]
            expected = bayes_oracle(docs, alpha, query)
            _, posteriors = predict(model, " ".join(query))
            assert posteriors.keys() == expected.keys()
            for label, value in expected.items():
                assert posteriors[label] == pytest.approx(float(value), abs=1e-9)


class TestEvaluate:
    def test_perfectly_separable(self):
        corpus = LabeledCorpus(
            records=(
                DocumentRecord("1", "cat feline purr", "cats"),
                DocumentRecord("2", "dog canine bark", "dogs"),
            )
        )
        model = train_mnb(corpus, alpha=1.0)
        report = evaluate(model, corpus)
        assert report.accuracy == 1.0
        assert report.macro_f1 == 1.0

    def test_three_of_four_correct(self, toy_model):
        held_out = LabeledCorpus(
            records=(
                DocumentRecord("h1", "a", "X"),
                DocumentRecord("h2", "a b", "X"),
                DocumentRecord("h3", "c", "Y"),
                DocumentRecord("h4", "a", "Y"),
            )
        )
        report = evaluate(toy_model, held_out)
        assert report.accuracy == 0.75
        assert report.labels == ("X", "Y")
        assert report.confusion == ((2, 0), (1, 1))

    def test_confusion_sums_to_total(self, toy_model):
        held_out = LabeledCorpus(
            records=tuple(
                DocumentRecord(f"h{i}", text, label)
                for i, (text, label) in enumerate(
                    [("a", "X"), ("b", "Y"), ("c c", "Y"), ("a a", "X"), ("b c", "Y")]
                )
            )
        )
        report = evaluate(toy_model, held_out)
        assert sum(sum(row) for row in report.confusion) == len(held_out)

    def test_unknown_label_rejected(self, toy_model):
        held_out = LabeledCorpus(records=(DocumentRecord("h1", "a", "Z"),))
        with pytest.raises(ValueError):
            evaluate(toy_model, held_out)


class TestSerialization:
    def test_round_trip_is_exact(self, toy_model):
        restored = load_model(save_model(toy_model))
        assert restored.alpha == toy_model.alpha
        assert restored.vocabulary.terms == toy_model.vocabulary.terms
        for a, b in zip(restored.classes, toy_model.classes):
            assert a.label == b.label
            assert a.log_prior == b.log_prior
            assert a.log_likelihoods == b.log_likelihoods

    def test_round_trip_predictions_identical(self, toy_model):
        restored = load_model(save_model(toy_model))
        rng = random.Random(7)
        for _ in range(100):
            text = " ".join(rng.choice("abcdz") for _ in range(rng.randint(0, 8)))
            assert predict(restored, text) == predict(toy_model, text)

    def test_file_shape(self, toy_model):
        doc = json.loads(save_model(toy_model))
        assert doc["format_version"] == 1
        assert doc["alpha"] == 1.0
        assert doc["vocabulary"] == ["a", "b", "c"]
        labels = [c["label"] for c in doc["classes"]]
        assert labels == sorted(labels)
        for params in doc["classes"]:
            assert len(params["log_likelihoods"]) == len(doc["vocabulary"])

    def test_truncated_input_is_parse_error(self, toy_model):
        with pytest.raises(ModelParseError):
            load_model(save_model(toy_model)[:40])

    def test_non_json_is_parse_error(self):
        with pytest.raises(ModelParseError):
            load_model(b"\xff\xfe broken")

    def test_zero_alpha_is_validation_error(self, toy_model):
        doc = json.loads(save_model(toy_model))
        doc["alpha"] = 0.0
        with pytest.raises(ModelValidationError):
            load_model(json.dumps(doc).encode("utf-8"))

    def test_duplicate_vocabulary_rejected(self, toy_model):
        doc = json.loads(save_model(toy_model))
        doc["vocabulary"][1] = doc["vocabulary"][0]
        with pytest.raises(ModelValidationError):
            load_model(json.dumps(doc).encode("utf-8"))

    def test_ragged_likelihoods_rejected(self, toy_model):
        doc = json.loads(save_model(toy_model))
        doc["classes"][0]["log_likelihoods"].append(-1.0)
        with pytest.raises(ModelValidationError):
            load_model(json.dumps(doc).encode("utf-8"))

    def test_unknown_format_version_rejected(self, toy_model):
        doc = json.loads(save_model(toy_model))
        doc["format_version"] = 99
        with pytest.raises(ModelValidationError):
            load_model(json.dumps(doc).encode("utf-8"))


class TestCorpusIo:
    def test_round_trip(self, tmp_path, toy_corpus):
        path = tmp_path / "corpus.json"
        save_corpus(toy_corpus, path)
        assert load_corpus(path).records == toy_corpus.records

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ValueError):
            LabeledCorpus(
                records=(
                    DocumentRecord("1", "a", "X"),
                    DocumentRecord("1", "b", "Y"),
                )
            )

    def test_empty_label_rejected(self):
        with pytest.raises(ValueError):
            DocumentRecord("1", "a", "")
