"""Token features and a binary linear SVM for snippet security scoring.

Snippets are treated as documents of code tokens; the only preprocessing
is comment removal. Features are L2-normalized tf-idf vectors; the
model is a soft-margin linear SVM, objective

    0.5 * ||w||^2 + C * sum_i max(0, 1 - y_i * (w.x_i + b))

minimized by Pegasos-style stochastic subgradient descent: step
1/(lambda*t) with lambda = 1/(n*C) for the weights, 1/t for the
unregularized bias, fixed shuffled epochs, averaged iterate. Insecure
is the positive class (+1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import log
from pathlib import Path
from typing import Sequence

import numpy as np

from .lexing import simple_tokens, strip_comments

__all__ = [
    "FeatureVector",
    "FoldMetrics",
    "Prediction",
    "SvmModel",
    "TokenDocument",
    "TrainingSet",
    "Vocabulary",
    "confusion_metrics",
    "cross_validate",
    "fit_vocabulary",
    "grid_search_c",
    "hinge_subgradient",
    "objective",
    "predict",
    "tokenize",
    "train",
    "vectorize",
]

DEFAULT_PENALTY_C = 0.644  # grid-searched optimum carried in model metadata


@dataclass(frozen=True)
class TokenDocument:
    snippet_id: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class Vocabulary:
    index: dict[str, int]
    idf: np.ndarray
    n_documents: int

    def __len__(self) -> int:
        return len(self.index)


@dataclass(frozen=True)
class FeatureVector:
    indices: np.ndarray  # strictly increasing
    weights: np.ndarray  # finite, unit L2 norm unless empty

    def dot(self, w: np.ndarray) -> float:
        if len(self.indices) == 0:
            return 0.0
        return float(w[self.indices] @ self.weights)


@dataclass
class TrainingSet:
    samples: list[FeatureVector]
    labels: np.ndarray  # +1 insecure, -1 secure

    def __post_init__(self) -> None:
        self.labels = np.asarray(self.labels, dtype=np.float64)
        if len(self.samples) != len(self.labels):
            raise ValueError("sample/label count mismatch")
        if len(self.samples) < 2:
            raise ValueError("need at least two samples")
        if set(np.unique(self.labels)) != {-1.0, 1.0}:
            raise ValueError("labels must include both +1 and -1")

    @property
    def n(self) -> int:
        return len(self.samples)


@dataclass
class SvmModel:
    w: np.ndarray
    b: float
    C: float
    vocabulary: Vocabulary
    seed: int = 0
    trained_on: dict | None = None

    def save(self, path: str | Path) -> None:
        tokens = sorted(self.vocabulary.index, key=self.vocabulary.index.get)
        payload = {
            "format": "snipscan-svm/1",
            "C": self.C,
            "b": self.b,
            "seed": self.seed,
            "trained_on": self.trained_on or {},
            "vocab": [
                {"token": t, "idf": float(self.vocabulary.idf[i]), "weight": float(self.w[i])}
                for i, t in enumerate(tokens)
            ],
        }
        Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SvmModel":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if payload.get("format") != "snipscan-svm/1":
            raise ValueError("unrecognized model file format")
        vocab_rows = payload["vocab"]
        index = {row["token"]: i for i, row in enumerate(vocab_rows)}
        idf = np.array([row["idf"] for row in vocab_rows], dtype=np.float64)
        w = np.array([row["weight"] for row in vocab_rows], dtype=np.float64)
        counts = payload.get("trained_on") or {}
        vocab = Vocabulary(index=index, idf=idf, n_documents=int(counts.get("n", 0)))
        return cls(w=w, b=float(payload["b"]), C=float(payload["C"]),
                   vocabulary=vocab, seed=int(payload.get("seed", 0)),
                   trained_on=counts)


@dataclass(frozen=True)
class Prediction:
    label: int  # +1 insecure, -1 secure
    margin: float


@dataclass(frozen=True)
class FoldMetrics:
    tn: int
    fp: int
    fn: int
    tp: int
    accuracy: float
    precision: float
    recall: float


def tokenize(code_text: str, snippet_id: str = "") -> TokenDocument:
    """Comment removal, then maximal identifier runs plus one token per
    remaining punctuation character. String contents are not special."""
    return TokenDocument(
        snippet_id=snippet_id,
        tokens=tuple(simple_tokens(strip_comments(code_text))),
    )


def fit_vocabulary(docs: Sequence[TokenDocument]) -> Vocabulary:
    """Smoothed inverse document frequencies over the corpus:
    idf_t = ln((1+N)/(1+df_t)) + 1."""
    if not docs:
        raise ValueError("cannot fit a vocabulary on an empty corpus")
    df: dict[str, int] = {}
    for doc in docs:
        for tok in set(doc.tokens):
            df[tok] = df.get(tok, 0) + 1
    tokens = sorted(df)
    index = {t: i for i, t in enumerate(tokens)}
    n = len(docs)
    idf = np.array([log((1 + n) / (1 + df[t])) + 1.0 for t in tokens], dtype=np.float64)
    return Vocabulary(index=index, idf=idf, n_documents=n)


def vectorize(doc: TokenDocument, vocab: Vocabulary) -> FeatureVector:
    """tf * idf per token, L2-normalized; out-of-vocabulary tokens are
    ignored; an all-unknown document becomes the zero vector."""
    counts: dict[int, int] = {}
    for tok in doc.tokens:
        i = vocab.index.get(tok)
        if i is not None:
            counts[i] = counts.get(i, 0) + 1
    if not counts:
        return FeatureVector(
            indices=np.empty(0, dtype=np.int64), weights=np.empty(0, dtype=np.float64)
        )
    indices = np.array(sorted(counts), dtype=np.int64)
    weights = np.array([counts[i] for i in indices], dtype=np.float64) * vocab.idf[indices]
    norm = float(np.linalg.norm(weights))
    if norm > 0:
        weights = weights / norm
    return FeatureVector(indices=indices, weights=weights)


def objective(ts: TrainingSet, w: np.ndarray, b: float, C: float) -> float:
    """Primal soft-margin objective; slack is the hinge loss."""
    total = 0.5 * float(w @ w)
    for fv, y in zip(ts.samples, ts.labels):
        total += C * max(0.0, 1.0 - y * (fv.dot(w) + b))
    return total


def hinge_subgradient(
    ts: TrainingSet, w: np.ndarray, b: float, C: float
) -> tuple[np.ndarray, float]:
    """Analytic subgradient of the full objective at (w, b)."""
    gw = w.copy()
    gb = 0.0
    for fv, y in zip(ts.samples, ts.labels):
        if 1.0 - y * (fv.dot(w) + b) > 0.0:
            gw[fv.indices] -= C * y * fv.weights
            gb -= C * y
    return gw, gb


def _refit_bias(ts: TrainingSet, w: np.ndarray, C: float) -> float:
    """Exact minimizer of the objective over the unregularized bias.

    The objective is convex piecewise-linear in b with slope increments
    of +C at each hinge breakpoint; on a flat minimizing interval the
    midpoint is returned, which keeps symmetric data symmetric.
    """
    slope_units = 0  # slope is C * units; integer counting keeps it exact
    events: list[float] = []
    for fv, y in zip(ts.samples, ts.labels):
        u = fv.dot(w)
        if y > 0:
            slope_units -= 1  # active as b -> -inf, releases at 1-u
            events.append(1.0 - u)
        else:
            events.append(-1.0 - u)  # activates at -1-u
    events.sort()
    prev = events[0]
    for bp in events:
        if slope_units > 0:
            return prev
        if slope_units == 0:
            return (prev + bp) / 2.0
        slope_units += 1
        prev = bp
    return prev


def train(ts: TrainingSet, C: float = DEFAULT_PENALTY_C, epochs: int = 30,
          seed: int = 0, vocabulary: Vocabulary | None = None) -> SvmModel:
    """Stochastic subgradient descent over shuffled epochs.

    Deterministic for a fixed seed. The averaged iterate is scored on
    the full objective after every epoch, the best-scoring snapshot
    wins, and the bias is then refit exactly, so the returned model
    never does worse than the best objective seen.
    """
    if C <= 0:
        raise ValueError("penalty C must be positive")
    present = set(np.unique(ts.labels))
    if present != {-1.0, 1.0}:
        raise ValueError("training labels must include both +1 and -1")
    dim = len(vocabulary) if vocabulary is not None else 0
    for fv in ts.samples:
        if len(fv.weights) and not np.all(np.isfinite(fv.weights)):
            raise ValueError("non-finite feature weight")
        if len(fv.indices):
            dim = max(dim, int(fv.indices[-1]) + 1)

    rng = np.random.default_rng(seed)
    n = ts.n
    lam = 1.0 / (n * C)
    w = np.zeros(dim, dtype=np.float64)
    b = 0.0
    w_sum = np.zeros(dim, dtype=np.float64)
    b_sum = 0.0
    t = 0
    best_obj = float("inf")
    best_w = w.copy()
    best_b = 0.0

    for _ in range(max(1, epochs)):
        for i in rng.permutation(n):
            t += 1
            fv = ts.samples[i]
            y = ts.labels[i]
            violated = y * (fv.dot(w) + b) < 1.0
            w *= 1.0 - 1.0 / t  # (1 - eta*lam) with eta = 1/(lam*t)
            if violated:
                if len(fv.indices):
                    w[fv.indices] += (1.0 / (lam * t)) * y * fv.weights
                b += y / t
            w_sum += w
            b_sum += b
        w_avg = w_sum / t
        b_avg = b_sum / t
        obj = objective(ts, w_avg, b_avg, C)
        if obj < best_obj:
            best_obj = obj
            best_w = w_avg.copy()
            best_b = b_avg
    refit = _refit_bias(ts, best_w, C)
    # exact minimization over b can only tie or improve; the tolerance
    # just absorbs float rounding inside a flat hinge region
    if objective(ts, best_w, refit, C) <= best_obj * (1 + 1e-9) + 1e-12:
        best_b = refit
    vocab = vocabulary if vocabulary is not None else Vocabulary(
        index={}, idf=np.empty(0), n_documents=0
    )
    pos = int(np.sum(ts.labels > 0))
    return SvmModel(
        w=best_w, b=best_b, C=C, vocabulary=vocab, seed=seed,
        trained_on={"n": n, "insecure": pos, "secure": n - pos},
    )


def predict(model: SvmModel, fv: FeatureVector) -> Prediction:
    """Signed-margin decision; a zero margin is flagged insecure."""
    if len(fv.indices) and int(fv.indices[-1]) >= len(model.w):
        raise ValueError("feature vector does not match the model vocabulary")
    margin = fv.dot(model.w) + model.b
    return Prediction(label=1 if margin >= 0.0 else -1, margin=margin)


def confusion_metrics(tn: int, fp: int, fn: int, tp: int) -> dict[str, float]:
    """Accuracy/precision/recall with insecure (+1) as the positive class."""
    total = tn + fp + fn + tp
    accuracy = (tp + tn) / total if total else 0.0
    precision = tp / (tp + fp) if (tp + fp) else 0.0
    recall = tp / (tp + fn) if (tp + fn) else 0.0
    return {"accuracy": accuracy, "precision": precision, "recall": recall}


def _stratified_folds(labels: np.ndarray, k: int) -> list[np.ndarray]:
    pos = [i for i, y in enumerate(labels) if y > 0]
    neg = [i for i, y in enumerate(labels) if y <= 0]
    if k > len(pos) or k > len(neg):
        raise ValueError(f"k={k} exceeds a class count ({len(pos)} pos, {len(neg)} neg)")
    folds: list[list[int]] = [[] for _ in range(k)]
    for j, i in enumerate(pos):
        folds[j % k].append(i)
    for j, i in enumerate(neg):
        folds[j % k].append(i)
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


def cross_validate(
    ts: TrainingSet, k: int = 5, C: float = DEFAULT_PENALTY_C,
    seed: int = 0, epochs: int = 30,
) -> dict:
    """Stratified k-fold evaluation; returns per-fold metrics and means."""
    folds = _stratified_folds(ts.labels, k)
    per_fold: list[FoldMetrics] = []
    for f, held in enumerate(folds):
        held_set = set(held.tolist())
        train_idx = [i for i in range(ts.n) if i not in held_set]
        sub = TrainingSet(
            samples=[ts.samples[i] for i in train_idx],
            labels=ts.labels[train_idx],
        )
        model = train(sub, C=C, epochs=epochs, seed=seed + f)
        tn = fp = fn = tp = 0
        for i in held:
            fv = ts.samples[i]
            # Guard against fold-local dimensionality: weights cover only
            # indices seen in training; unseen ones contribute nothing.
            w = model.w
            if len(fv.indices) and int(fv.indices[-1]) >= len(w):
                w = np.concatenate([w, np.zeros(int(fv.indices[-1]) + 1 - len(w))])
            label = 1 if fv.dot(w) + model.b >= 0.0 else -1
            actual = 1 if ts.labels[i] > 0 else -1
            if actual == 1 and label == 1:
                tp += 1
            elif actual == 1:
                fn += 1
            elif label == 1:
                fp += 1
            else:
                tn += 1
        m = confusion_metrics(tn, fp, fn, tp)
        per_fold.append(FoldMetrics(tn=tn, fp=fp, fn=fn, tp=tp, **m))
    return {
        "folds": per_fold,
        "mean_accuracy": sum(f.accuracy for f in per_fold) / k,
        "mean_precision": sum(f.precision for f in per_fold) / k,
        "mean_recall": sum(f.recall for f in per_fold) / k,
    }


def grid_search_c(
    ts: TrainingSet, grid: Sequence[float], k: int = 5,
    seed: int = 0, epochs: int = 30,
) -> float:
    """Best penalty by mean CV accuracy; ties break toward smaller C."""
    values = sorted(set(grid))
    if not values:
        raise ValueError("empty penalty grid")
    best_c = values[0]
    best_acc = -1.0
    for c in values:
        acc = cross_validate(ts, k=k, C=c, seed=seed, epochs=epochs)["mean_accuracy"]
        if acc > best_acc:
            best_acc = acc
            best_c = c
    return best_c
