import math

import numpy as np
import pytest

from divan.errors import DataError
from divan.features import Vocabulary, build_vocabulary
from divan.topics import (
    LdaConfig,
    TopicModel,
    doc_topic_vector,
    export_theta_csv,
    fit_lda,
    load_topic_model,
    log_likelihood,
    save_topic_model,
    topic_top_words,
)

from conftest import best_permutation_accuracy, make_poem, make_topic_corpus


def _toy_model(phi_row):
    phi = np.asarray([phi_row], dtype=float)
    return TopicModel(
        k=1,
        theta=np.array([[1.0]]),
        phi=phi,
        assignments=None,
        alpha_dirichlet=1.0,
        beta_dirichlet=0.01,
        seed=0,
        iterations_run=0,
        doc_ids=(0,),
    )


class TestFitLda:
    def test_single_topic_collapse(self):
        poems = [make_poem(0, ["a", "b", "a"]), make_poem(1, ["b", "c"])]
        vocab = build_vocabulary(poems)
        model = fit_lda(poems, vocab, LdaConfig(k=1, seed=1, max_sweeps=5))
        assert np.array_equal(model.theta, np.ones((2, 1)))
        beta = model.beta_dirichlet
        counts = {"a": 2, "b": 2, "c": 1}
        expected = np.array([(counts[t] + beta) / (5 + 3 * beta) for t in vocab.terms])
        assert np.allclose(model.phi[0], expected, atol=1e-12)

    def test_synthetic_recovery(self):
        poems, vocab, truth = make_topic_corpus(n_docs=120, doc_len=40, seed=3)
        model = fit_lda(poems, vocab, LdaConfig(k=4, seed=11, max_sweeps=150))
        predicted = model.theta.argmax(axis=1)
        assert best_permutation_accuracy(predicted, truth, 4) >= 0.95

    def test_determinism(self):
        poems, vocab, _ = make_topic_corpus(n_docs=30, doc_len=20, seed=5)
        config = LdaConfig(k=3, seed=21, max_sweeps=40)
        m1 = fit_lda(poems, vocab, config)
        m2 = fit_lda(poems, vocab, LdaConfig(k=3, seed=21, max_sweeps=40))
        assert np.array_equal(m1.theta, m2.theta)
        assert np.array_equal(m1.phi, m2.phi)
        assert m1.assignments == m2.assignments

    def test_row_sums_and_positivity(self, all_tokenized):
        vocab = build_vocabulary(all_tokenized)
        poems = [make_poem(i, p.flat_tokens) for i, p in enumerate(all_tokenized)]
        model = fit_lda(poems, vocab, LdaConfig(k=4, seed=2, max_sweeps=60))
        assert np.abs(model.theta.sum(axis=1) - 1.0).max() < 1e-9
        assert np.abs(model.phi.sum(axis=1) - 1.0).max() < 1e-9
        assert model.theta.min() > 0.0
        assert model.phi.min() > 0.0

    def test_count_conservation(self):
        poems, vocab, _ = make_topic_corpus(n_docs=20, doc_len=15, seed=9)
        model = fit_lda(poems, vocab, LdaConfig(k=3, seed=4, max_sweeps=30))
        total = 0
        for poem, topics in zip(poems, model.assignments):
            assert len(topics) == len(poem.flat_tokens)
            assert all(0 <= t < 3 for t in topics)
            total += len(topics)
        assert total == sum(len(p.flat_tokens) for p in poems)
        # theta rows must match the final assignment counts
        alpha = model.alpha_dirichlet
        for row, topics in zip(model.theta, model.assignments):
            n_d = len(topics)
            for t in range(3):
                expected = (topics.count(t) + alpha) / (n_d + 3 * alpha)
                assert abs(row[t] - expected) < 1e-12

    def test_input_order_invariance(self):
        poems, vocab, _ = make_topic_corpus(n_docs=16, doc_len=12, seed=13)
        config = LdaConfig(k=3, seed=8, max_sweeps=25)
        forward = fit_lda(poems, vocab, config)
        reversed_fit = fit_lda(list(reversed(poems)), vocab, config)
        assert np.array_equal(forward.theta, reversed_fit.theta[::-1])
        assert forward.assignments == tuple(reversed(reversed_fit.assignments))

    def test_empty_corpus(self):
        with pytest.raises(DataError, match="empty corpus"):
            fit_lda([], Vocabulary(terms=("a",)), LdaConfig(k=2))

    def test_out_of_vocabulary(self):
        with pytest.raises(DataError, match="not in vocabulary"):
            fit_lda([make_poem(0, ["zzz"])], Vocabulary(terms=("a",)), LdaConfig(k=2))

    def test_duplicate_poem_indices(self):
        poems = [make_poem(0, ["a"]), make_poem(0, ["a"])]
        with pytest.raises(DataError, match="unique"):
            fit_lda(poems, Vocabulary(terms=("a",)), LdaConfig(k=2))

    def test_empty_document_gets_uniform_theta(self):
        poems = [make_poem(0, ["a", "b", "a"]), make_poem(1, [])]
        vocab = build_vocabulary(poems)
        model = fit_lda(poems, vocab, LdaConfig(k=4, seed=3, max_sweeps=10))
        assert np.allclose(model.theta[1], 0.25, atol=1e-12)


class TestConfigValidation:
    def test_alpha_defaults_to_50_over_k(self):
        assert LdaConfig(k=4).alpha_dirichlet == 12.5
        assert LdaConfig(k=10).alpha_dirichlet == 5.0

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            LdaConfig(k=0)
        with pytest.raises(ValueError):
            LdaConfig(k=2, beta_dirichlet=0.0)
        with pytest.raises(ValueError):
            LdaConfig(k=2, max_sweeps=0)


class TestDocTopicVector:
    def test_rows_sum_to_one(self):
        poems, vocab, _ = make_topic_corpus(n_docs=10, doc_len=10, seed=2)
        model = fit_lda(poems, vocab, LdaConfig(k=4, seed=5, max_sweeps=15))
        for d in range(10):
            row = doc_topic_vector(model, d)
            assert len(row) == 4
            assert abs(row.sum() - 1.0) < 1e-9

    def test_k1_is_exact(self):
        poems = [make_poem(0, ["a", "a"])]
        model = fit_lda(poems, build_vocabulary(poems), LdaConfig(k=1, max_sweeps=3))
        assert doc_topic_vector(model, 0).tolist() == [1.0]

    def test_out_of_range(self):
        model = _toy_model([1.0])
        with pytest.raises(IndexError):
            doc_topic_vector(model, 1)


class TestTopicTopWords:
    def test_orders_by_probability(self):
        model = _toy_model([0.5, 0.3, 0.2])
        vocab = Vocabulary(terms=("x", "y", "z"))
        assert topic_top_words(model, 0, 2, vocab) == ["x", "y"]

    def test_clamps_to_vocabulary(self):
        model = _toy_model([0.2, 0.5, 0.3])
        vocab = Vocabulary(terms=("x", "y", "z"))
        assert topic_top_words(model, 0, 10, vocab) == ["y", "z", "x"]

    def test_ties_keep_vocabulary_order(self):
        model = _toy_model([0.25, 0.25, 0.5])
        vocab = Vocabulary(terms=("x", "y", "z"))
        assert topic_top_words(model, 0, 3, vocab) == ["z", "x", "y"]

    def test_synthetic_topics_use_generating_words(self):
        poems, vocab, _ = make_topic_corpus(n_docs=200, doc_len=50, seed=7)
        # sharp doc-topic prior: the oracle checks topic purity, not smoothing
        model = fit_lda(poems, vocab, LdaConfig(k=4, alpha_dirichlet=1.0, seed=11, max_sweeps=300))
        groups = [set(vocab.terms[i * 25 : (i + 1) * 25]) for i in range(4)]
        for t in range(4):
            top = set(topic_top_words(model, t, 10, vocab))
            assert any(top <= g for g in groups)

    def test_bounds(self):
        model = _toy_model([1.0])
        vocab = Vocabulary(terms=("x",))
        with pytest.raises(IndexError):
            topic_top_words(model, 1, 1, vocab)
        with pytest.raises(ValueError):
            topic_top_words(model, 0, 0, vocab)


class TestLogLikelihood:
    def test_single_token_closed_form(self):
        poems = [make_poem(0, ["a"])]
        vocab = build_vocabulary(poems)
        model = fit_lda(poems, vocab, LdaConfig(k=1, max_sweeps=2))
        assert abs(log_likelihood(model, poems, vocab) - math.log(model.phi[0, 0])) < 1e-12

    def test_finite_and_nonpositive_for_one_token_docs(self):
        poems = [make_poem(i, ["a" if i % 2 else "b"]) for i in range(6)]
        vocab = build_vocabulary(poems)
        model = fit_lda(poems, vocab, LdaConfig(k=2, seed=3, max_sweeps=10))
        value = log_likelihood(model, poems, vocab)
        assert math.isfinite(value)
        assert value <= 0.0

    def test_trace_moving_average_non_decreasing(self):
        poems, vocab, _ = make_topic_corpus(n_docs=80, doc_len=30, seed=23)
        model = fit_lda(poems, vocab, LdaConfig(k=4, seed=6, max_sweeps=120, ll_tolerance=0.0))
        trace = np.array(model.log_likelihood_trace)
        assert len(trace) == 120
        window = 50
        averages = np.convolve(trace, np.ones(window) / window, mode="valid")
        slack = 1e-6 * np.abs(averages[:-1])
        assert np.all(np.diff(averages) >= -slack)


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        poems, vocab, _ = make_topic_corpus(n_docs=12, doc_len=10, seed=4)
        model = fit_lda(poems, vocab, LdaConfig(k=3, seed=7, max_sweeps=10))
        path = save_topic_model(model, tmp_path / "model.txt")
        loaded = load_topic_model(path)
        assert loaded.k == model.k
        assert loaded.seed == model.seed
        assert loaded.doc_ids == model.doc_ids
        assert np.array_equal(loaded.theta, model.theta)
        assert np.array_equal(loaded.phi, model.phi)

    def test_rejects_other_files(self, tmp_path):
        path = tmp_path / "bogus.txt"
        path.write_text("not a model\n", encoding="utf-8")
        with pytest.raises(DataError, match="divan-topic-model"):
            load_topic_model(path)

    def test_theta_csv(self, tmp_path):
        model = _toy_model([1.0])
        path = export_theta_csv(model, tmp_path / "theta.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "poem_index,topic_0"
        assert lines[1] == "0,1"
