import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snipscan import classifier as clf


def doc(tokens, sid="d"):
    return clf.TokenDocument(snippet_id=sid, tokens=tuple(tokens))


def dense(fv, dim):
    out = np.zeros(dim)
    if len(fv.indices):
        out[fv.indices] = fv.weights
    return out


class TestTokenize:
    def test_statement(self):
        assert clf.tokenize("return true;").tokens == ("return", "true", ";")

    def test_comment_removed(self):
        assert clf.tokenize("/* x */ a=b").tokens == ("a", "=", "b")

    def test_string_contents_tokenized(self):
        assert clf.tokenize('Cipher.getInstance("AES")').tokens == (
            "Cipher", ".", "getInstance", "(", '"', "AES", '"', ")",
        )

    def test_deterministic(self):
        code = 'if (x) { md.update("pw".getBytes()); } // note'
        assert clf.tokenize(code).tokens == clf.tokenize(code).tokens


class TestVocabularyAndTfIdf:
    def test_idf_token_in_every_doc(self):
        docs = [doc(["common", f"unique{i}"], str(i)) for i in range(100)]
        vocab = clf.fit_vocabulary(docs)
        assert vocab.idf[vocab.index["common"]] == pytest.approx(1.0)

    def test_idf_token_in_one_of_hundred(self):
        docs = [doc(["common"] + (["rare"] if i == 0 else []), str(i)) for i in range(100)]
        vocab = clf.fit_vocabulary(docs)
        expected = math.log(101 / 2) + 1.0  # 4.9220...
        assert vocab.idf[vocab.index["rare"]] == pytest.approx(expected, abs=1e-12)
        assert round(expected, 2) == 4.92

    def test_two_docs_disjoint_tokens_symmetric_idf(self):
        vocab = clf.fit_vocabulary([doc(["a"], "1"), doc(["b"], "2")])
        expected = math.log(3 / 2) + 1.0
        assert vocab.idf == pytest.approx([expected, expected])

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            clf.fit_vocabulary([])

    def test_unknown_tokens_give_zero_vector(self):
        vocab = clf.fit_vocabulary([doc(["a", "b"])])
        fv = clf.vectorize(doc(["zzz"]), vocab)
        assert len(fv.indices) == 0

    def test_single_known_token_is_unit_vector(self):
        vocab = clf.fit_vocabulary([doc(["a", "b"]), doc(["a"])])
        fv = clf.vectorize(doc(["b", "zzz"]), vocab)
        assert fv.weights == pytest.approx([1.0])

    def test_worked_example_a_a_b(self):
        # idf_a = 1, idf_b = 2 by construction of the vocabulary object
        vocab = clf.Vocabulary(index={"a": 0, "b": 1}, idf=np.array([1.0, 2.0]), n_documents=2)
        fv = clf.vectorize(doc(["a", "a", "b"]), vocab)
        assert fv.weights == pytest.approx([2 / math.sqrt(8), 2 / math.sqrt(8)])
        assert fv.weights == pytest.approx([1 / math.sqrt(2), 1 / math.sqrt(2)])

    def test_brute_force_equivalence_small_corpora(self):
        # oracle: recompute tf-idf straight from the definitions
        corpora = [
            [["a", "b", "a"], ["b", "c"], ["c", "c", "d"]],
            [["x"]],
            [["t1", "t2"], ["t2", "t3"], ["t3", "t4"], ["t4", "t5"], ["t5", "t1"]],
        ]
        for token_lists in corpora:
            docs = [doc(toks, str(i)) for i, toks in enumerate(token_lists)]
            vocab = clf.fit_vocabulary(docs)
            n = len(docs)
            for d in docs:
                fv = clf.vectorize(d, vocab)
                got = dense(fv, len(vocab))
                raw = np.zeros(len(vocab))
                for tok in set(d.tokens):
                    tf = d.tokens.count(tok)
                    df = sum(1 for other in docs if tok in other.tokens)
                    idf = math.log((1 + n) / (1 + df)) + 1.0
                    raw[vocab.index[tok]] = tf * idf
                raw = raw / np.linalg.norm(raw)
                assert got == pytest.approx(raw, abs=1e-15)


def separable_toy(n_per_class=20):
    docs = [doc(["encrypt"], f"s{i}") for i in range(n_per_class)]
    docs += [doc(["trustall"], f"i{i}") for i in range(n_per_class)]
    labels = [-1] * n_per_class + [1] * n_per_class
    vocab = clf.fit_vocabulary(docs)
    samples = [clf.vectorize(d, vocab) for d in docs]
    return clf.TrainingSet(samples=samples, labels=labels), vocab


class TestTrain:
    def test_separable_toy_reaches_perfect_accuracy(self):
        ts, vocab = separable_toy()
        model = clf.train(ts, C=1.0, epochs=50, seed=0, vocabulary=vocab)
        correct = sum(
            1 for fv, y in zip(ts.samples, ts.labels)
            if clf.predict(model, fv).label == y
        )
        assert correct == ts.n

    def test_default_penalty_recorded(self):
        ts, vocab = separable_toy(5)
        model = clf.train(ts, seed=1, vocabulary=vocab)
        assert model.C == 0.644

    def test_single_class_rejected(self):
        ts, vocab = separable_toy(5)
        with pytest.raises(ValueError):
            clf.train(clf.TrainingSet(samples=ts.samples[:5], labels=[-1] * 5))

    def test_nonfinite_feature_rejected(self):
        bad = clf.FeatureVector(
            indices=np.array([0], dtype=np.int64), weights=np.array([float("nan")])
        )
        ok = clf.FeatureVector(
            indices=np.array([0], dtype=np.int64), weights=np.array([1.0])
        )
        with pytest.raises(ValueError):
            clf.train(clf.TrainingSet(samples=[bad, ok], labels=[1, -1]))

    def test_bitwise_determinism(self):
        ts, vocab = separable_toy(8)
        m1 = clf.train(ts, C=0.644, epochs=20, seed=42, vocabulary=vocab)
        m2 = clf.train(ts, C=0.644, epochs=20, seed=42, vocabulary=vocab)
        assert np.array_equal(m1.w, m2.w)
        assert m1.b == m2.b

    def test_final_objective_not_worse_than_best_seen(self):
        ts, vocab = separable_toy(10)
        model = clf.train(ts, C=0.5, epochs=25, seed=3, vocabulary=vocab)
        # retrace training to collect all epoch-end averaged objectives
        objs = []
        rng = np.random.default_rng(3)
        n = ts.n
        lam = 1.0 / (n * 0.5)
        w = np.zeros(len(vocab))
        b = 0.0
        w_sum = np.zeros(len(vocab))
        b_sum = 0.0
        t = 0
        for _ in range(25):
            for i in rng.permutation(n):
                t += 1
                fv = ts.samples[i]
                y = ts.labels[i]
                violated = y * (fv.dot(w) + b) < 1.0
                w *= 1.0 - 1.0 / t
                if violated:
                    if len(fv.indices):
                        w[fv.indices] += (1.0 / (lam * t)) * y * fv.weights
                    b += y / t
                w_sum += w
                b_sum += b
            objs.append(clf.objective(ts, w_sum / t, b_sum / t, 0.5))
        best = min(objs)
        final = clf.objective(ts, model.w, model.b, 0.5)
        assert final <= best * 1.01 + 1e-12

    def test_duplicated_dataset_objective_identity_and_boundary(self):
        ts, vocab = separable_toy(10)
        dup = clf.TrainingSet(
            samples=list(ts.samples) + list(ts.samples),
            labels=np.concatenate([ts.labels, ts.labels]),
        )
        rng = np.random.default_rng(0)
        for _ in range(20):
            w = rng.normal(size=len(vocab))
            b = float(rng.normal())
            assert clf.objective(dup, w, b, 0.322) == pytest.approx(
                clf.objective(ts, w, b, 0.644), rel=1e-12
            )
        m1 = clf.train(ts, C=0.644, epochs=50, seed=5, vocabulary=vocab)
        m2 = clf.train(dup, C=0.322, epochs=50, seed=5, vocabulary=vocab)
        for fv in ts.samples:
            assert clf.predict(m1, fv).label == clf.predict(m2, fv).label


class TestPredict:
    def test_zero_vector_gets_bias_sign(self):
        ts, vocab = separable_toy(5)
        model = clf.train(ts, C=1.0, epochs=10, seed=0, vocabulary=vocab)
        empty = clf.FeatureVector(
            indices=np.empty(0, dtype=np.int64), weights=np.empty(0)
        )
        pred = clf.predict(model, empty)
        assert pred.margin == pytest.approx(model.b)
        assert pred.label == (1 if model.b >= 0 else -1)

    def test_scaling_preserves_label(self):
        ts, vocab = separable_toy(5)
        model = clf.train(ts, C=1.0, epochs=20, seed=0, vocabulary=vocab)
        fv = ts.samples[0]
        scaled = clf.FeatureVector(indices=fv.indices, weights=fv.weights * 3.5)
        p1, p2 = clf.predict(model, fv), clf.predict(model, scaled)
        # margins scale (up to the bias term), labels agree on clear points
        assert p1.label == p2.label
        assert (p2.margin - model.b) == pytest.approx(3.5 * (p1.margin - model.b))

    def test_vocabulary_mismatch_rejected(self):
        ts, vocab = separable_toy(5)
        model = clf.train(ts, C=1.0, epochs=5, seed=0, vocabulary=vocab)
        oversized = clf.FeatureVector(
            indices=np.array([len(vocab) + 7], dtype=np.int64), weights=np.array([1.0])
        )
        with pytest.raises(ValueError):
            clf.predict(model, oversized)

    def test_tie_goes_to_insecure(self):
        model = clf.SvmModel(
            w=np.zeros(2), b=0.0, C=1.0,
            vocabulary=clf.Vocabulary(index={}, idf=np.empty(0), n_documents=0),
        )
        empty = clf.FeatureVector(indices=np.empty(0, dtype=np.int64), weights=np.empty(0))
        assert clf.predict(model, empty).label == 1


class TestMetrics:
    def test_reference_confusion_matrix(self):
        m = clf.confusion_metrics(tn=181, fp=7, fn=19, tp=65)
        assert m["accuracy"] == pytest.approx(0.904, abs=0.0005)
        assert m["precision"] == pytest.approx(0.903, abs=0.0005)

    def test_all_positive_predictor(self):
        m = clf.confusion_metrics(tn=0, fp=25, fn=0, tp=25)
        assert m["precision"] == 0.5
        assert m["recall"] == 1.0

    def test_perfect_classifier_cv(self):
        ts, _ = separable_toy(10)
        result = clf.cross_validate(ts, k=5, C=1.0, seed=0, epochs=30)
        assert result["mean_accuracy"] == 1.0
        assert all(f.accuracy == 1.0 for f in result["folds"])

    def test_k_exceeding_class_count_rejected(self):
        ts, _ = separable_toy(3)
        with pytest.raises(ValueError):
            clf.cross_validate(ts, k=4)


class TestGridSearch:
    def test_singleton_grid(self):
        ts, _ = separable_toy(5)
        assert clf.grid_search_c(ts, [0.644], k=2, seed=0, epochs=10) == 0.644

    def test_tie_breaks_toward_smaller_c(self):
        ts, _ = separable_toy(10)
        assert clf.grid_search_c(ts, [100.0, 1.0, 0.01], k=5, seed=0, epochs=30) == 0.01

    def test_duplicates_equal_deduplicated(self):
        ts, _ = separable_toy(5)
        a = clf.grid_search_c(ts, [1.0, 0.1, 1.0, 0.1], k=2, seed=0, epochs=10)
        b = clf.grid_search_c(ts, [1.0, 0.1], k=2, seed=0, epochs=10)
        assert a == b

    def test_empty_grid_rejected(self):
        ts, _ = separable_toy(5)
        with pytest.raises(ValueError):
            clf.grid_search_c(ts, [])


def test_hinge_subgradient_matches_finite_differences():
    rng = np.random.default_rng(11)
    dim = 6
    docs = [doc([f"t{j}" for j in rng.integers(0, dim, size=3)], str(i)) for i in range(8)]
    vocab = clf.fit_vocabulary(docs)
    samples = [clf.vectorize(d, vocab) for d in docs]
    labels = [1 if i % 2 == 0 else -1 for i in range(8)]
    ts = clf.TrainingSet(samples=samples, labels=labels)
    C = 0.644
    eps = 1e-6
    checked = 0
    for trial in range(50):
        w = rng.normal(size=len(vocab))
        b = float(rng.normal())
        margins = [1.0 - y * (fv.dot(w) + b) for fv, y in zip(ts.samples, ts.labels)]
        if any(abs(m) < 1e-3 for m in margins):
            continue  # too close to the hinge kink for finite differences
        gw, gb = clf.hinge_subgradient(ts, w, b, C)
        for k in range(len(w)):
            wp, wm = w.copy(), w.copy()
            wp[k] += eps
            wm[k] -= eps
            fd = (clf.objective(ts, wp, b, C) - clf.objective(ts, wm, b, C)) / (2 * eps)
            assert abs(fd - gw[k]) < 1e-4
        fd_b = (clf.objective(ts, w, b + eps, C) - clf.objective(ts, w, b - eps, C)) / (2 * eps)
        assert abs(fd_b - gb) < 1e-4
        checked += 1
    assert checked >= 10


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_idf_rescaling_never_changes_labels(seed):
    rng = np.random.default_rng(seed)
    ts, vocab = separable_toy(6)
    model = clf.train(ts, C=1.0, epochs=15, seed=0, vocabulary=vocab)
    alpha = float(rng.uniform(0.1, 10.0))
    for fv in ts.samples:
        # rescaling every idf by alpha rescales the unnormalized vector
        # uniformly, and L2 normalization cancels it exactly
        scaled = clf.vectorize(
            doc(("encrypt",) if fv is ts.samples[0] else ("trustall",)),
            clf.Vocabulary(index=vocab.index, idf=vocab.idf * alpha, n_documents=vocab.n_documents),
        )
        base = clf.vectorize(
            doc(("encrypt",) if fv is ts.samples[0] else ("trustall",)), vocab
        )
        assert clf.predict(model, scaled).label == clf.predict(model, base).label


def test_model_save_load_roundtrip(tmp_path):
    ts, vocab = separable_toy(6)
    model = clf.train(ts, C=0.644, epochs=10, seed=2, vocabulary=vocab)
    path = tmp_path / "model.json"
    model.save(path)
    loaded = clf.SvmModel.load(path)
    assert loaded.C == model.C
    assert loaded.b == model.b
    assert np.array_equal(loaded.w, model.w)
    assert loaded.vocabulary.index == vocab.index
    for fv in ts.samples:
        assert clf.predict(loaded, fv).label == clf.predict(model, fv).label
