"""Hierarchical segment/attribute classifiers.

Every classifier is a bank of one-vs-rest logistic regressions over mean
word embeddings, trained by full-batch gradient descent from zero weights.
The segment classifier predicts high-level practices; attribute classifiers
run only when a triggering practice is predicted.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from privlabel import vocab
from privlabel.embed import EmbeddingModel, embed_many, embed_tokens
from privlabel.errors import DegenerateLabel, DimensionMismatch, InsufficientData, MissingClassifier
from privlabel.ingest.records import AnnotatedCorpus
from privlabel.ingest.segment import Segment, tokenize

# logit used for labels that never (or always) occur in training
CONSTANT_LOGIT = 20.0


@dataclass(frozen=True)
class LabeledSegment:
    text: str
    labels: frozenset
    tokens: tuple = ()

    def __post_init__(self):
        if not self.tokens:
            object.__setattr__(self, "tokens", tuple(tokenize(self.text)))


@dataclass(frozen=True)
class Hyper:
    learning_rate: float = 5.0
    epochs: int = 1000
    l2: float = 1e-5
    seed: int = 0


@dataclass
class ClassifierModel:
    attribute: str
    labels: tuple
    weights: np.ndarray  # (n_labels, dimension)
    bias: np.ndarray  # (n_labels,)
    threshold: float = 0.5
    degenerate: tuple = ()
    loss_history: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.weights.ndim != 2 or self.weights.shape[0] != len(self.labels):
            raise ValueError("one weight vector per label required")
        if self.bias.shape != (len(self.labels),):
            raise ValueError("one bias per label required")

    @property
    def dimension(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class LabelScores:
    scores: dict
    predicted: frozenset


@dataclass(frozen=True)
class SegmentAnnotation:
    policy_id: str
    index: int
    practices: frozenset
    attributes: dict = field(default_factory=dict)

    def values(self, attribute) -> frozenset:
        return self.attributes.get(attribute, frozenset())

    def to_dict(self) -> dict:
        return {
            "policy_id": self.policy_id,
            "index": self.index,
            "practices": sorted(self.practices),
            "attributes": {k: sorted(v) for k, v in sorted(self.attributes.items())},
        }

    @classmethod
    def from_dict(cls, d) -> "SegmentAnnotation":
        return cls(
            d["policy_id"],
            int(d["index"]),
            frozenset(d.get("practices", ())),
            {k: frozenset(v) for k, v in d.get("attributes", {}).items()},
        )


# -- data preparation -------------------------------------------------------

def relevant_segments(corpus: AnnotatedCorpus, attribute: str) -> list[LabeledSegment]:
    """Segments carrying at least one annotation for ``attribute``."""
    out = []
    for seg in corpus.segments:
        labels = seg.labels_for(attribute)
        if labels:
            out.append(LabeledSegment(seg.text, frozenset(labels)))
    return out


def split_train_test(corpus, attribute, ratio: float = 0.8, seed: int = 0):
    """Shuffle the relevant segments and cut at ``ceil(ratio * n)``.

    The test side always keeps at least one segment.
    """
    segments = relevant_segments(corpus, attribute) if isinstance(corpus, AnnotatedCorpus) else list(corpus)
    n = len(segments)
    if n < 2:
        raise InsufficientData(f"{attribute}: {n} annotated segment(s), need at least 2")
    n_train = min(math.ceil(round(ratio * n, 9)), n - 1)
    order = np.random.default_rng(seed).permutation(n)
    train = [segments[i] for i in order[:n_train]]
    test = [segments[i] for i in order[n_train:]]
    return train, test


def label_matrix(examples, labels) -> np.ndarray:
    index = {lab: j for j, lab in enumerate(labels)}
    Y = np.zeros((len(examples), len(labels)))
    for i, ex in enumerate(examples):
        for lab in ex.labels:
            if lab in index:
                Y[i, index[lab]] = 1.0
    return Y


def featurize(examples, embeddings: EmbeddingModel) -> np.ndarray:
    return embed_many(embeddings, (ex.tokens for ex in examples))


# -- objective --------------------------------------------------------------

def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss_and_grad(W, b, X, Y, l2):
    """Mean (over samples) summed (over labels) log-loss plus ``l2/2 * |W|^2``.

    Returns ``(loss, dW, db)``.
    """
    n = X.shape[0]
    Z = X @ W.T + b
    # log(1 + exp(z)) - y z, computed stably
    loss = np.sum(np.logaddexp(0.0, Z) - Y * Z) / n + 0.5 * l2 * np.sum(W * W)
    R = (sigmoid(Z) - Y) / n
    dW = R.T @ X + l2 * W
    db = R.sum(axis=0)
    return float(loss), dW, db


# -- training / inference ---------------------------------------------------

def train(attribute, train_set, embeddings: EmbeddingModel, hyper: Hyper = Hyper(), labels=None) -> ClassifierModel:
    if not train_set:
        raise InsufficientData(f"{attribute}: empty training set")
    if labels is None:
        labels = sorted({lab for ex in train_set for lab in ex.labels})
    labels = tuple(labels)
    X = featurize(train_set, embeddings)
    Y = label_matrix(train_set, labels)

    pos = Y.sum(axis=0)
    n = len(train_set)
    degenerate = tuple(lab for j, lab in enumerate(labels) if pos[j] == 0 or pos[j] == n)
    if degenerate:
        warnings.warn(f"{attribute}: constant predictor for {degenerate}", DegenerateLabel, stacklevel=2)
    active = np.array([lab not in degenerate for lab in labels])

    W = np.zeros((len(labels), embeddings.dimension))
    b = np.zeros(len(labels))
    history = []
    if active.any():
        Xa, Ya = X, Y[:, active]
        Wa, ba = W[active], b[active]
        for _ in range(hyper.epochs):
            loss, dW, db = logistic_loss_and_grad(Wa, ba, Xa, Ya, hyper.l2)
            history.append(loss)
            Wa = Wa - hyper.learning_rate * dW
            ba = ba - hyper.learning_rate * db
        history.append(logistic_loss_and_grad(Wa, ba, Xa, Ya, hyper.l2)[0])
        W[active], b[active] = Wa, ba
    for j, lab in enumerate(labels):
        if not active[j]:
            b[j] = CONSTANT_LOGIT if pos[j] == n else -CONSTANT_LOGIT
    return ClassifierModel(attribute, labels, W, b, degenerate=degenerate, loss_history=tuple(history))


def predict_proba(model: ClassifierModel, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.dimension:
        raise DimensionMismatch(f"vector of length {X.shape[1]} for a {model.dimension}-d model")
    return sigmoid(X @ model.weights.T + model.bias)


def predict(model: ClassifierModel, vector) -> LabelScores:
    probs = predict_proba(model, vector)[0]
    scores = {lab: float(p) for lab, p in zip(model.labels, probs)}
    return LabelScores(scores, frozenset(lab for lab, p in scores.items() if p >= model.threshold))


def predict_sets(model: ClassifierModel, X) -> list[frozenset]:
    P = predict_proba(model, X) >= model.threshold
    return [frozenset(lab for lab, hit in zip(model.labels, row) if hit) for row in P]


# -- evaluation -------------------------------------------------------------

@dataclass(frozen=True)
class LabelMetrics:
    label: str
    polarity: str  # "presence" | "absence"
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    attribute: str
    rows: tuple

    @property
    def macro_precision(self) -> float:
        return float(np.mean([r.precision for r in self.rows])) if self.rows else 0.0

    @property
    def macro_recall(self) -> float:
        return float(np.mean([r.recall for r in self.rows])) if self.rows else 0.0

    @property
    def macro_f1(self) -> float:
        return float(np.mean([r.f1 for r in self.rows])) if self.rows else 0.0

    def row(self, label, polarity="presence") -> LabelMetrics:
        for r in self.rows:
            if r.label == label and r.polarity == polarity:
                return r
        raise KeyError((label, polarity))

    def label_f1(self, label) -> float:
        """Mean of the presence and absence F1 for one label."""
        return (self.row(label, "presence").f1 + self.row(label, "absence").f1) / 2

    def to_dict(self) -> dict:
        return {
            "attribute": self.attribute,
            "macro": {"precision": self.macro_precision, "recall": self.macro_recall, "f1": self.macro_f1},
            "labels": [
                {"label": r.label, "polarity": r.polarity, "precision": r.precision,
                 "recall": r.recall, "f1": r.f1, "support": r.support}
                for r in self.rows
            ],
        }


def _prf(tp, fp, fn):
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def metrics_from_predictions(attribute, labels, truth, predicted) -> MetricsReport:
    rows = []
    for lab in labels:
        t = np.array([lab in s for s in truth])
        p = np.array([lab in s for s in predicted])
        for polarity, tt, pp in (("presence", t, p), ("absence", ~t, ~p)):
            tp = int(np.sum(tt & pp))
            fp = int(np.sum(~tt & pp))
            fn = int(np.sum(tt & ~pp))
            prec, rec, f1 = _prf(tp, fp, fn)
            rows.append(LabelMetrics(lab, polarity, prec, rec, f1, int(tt.sum())))
    return MetricsReport(attribute, tuple(rows))


def evaluate(model: ClassifierModel, test_set, embeddings: EmbeddingModel) -> MetricsReport:
    if not test_set:
        raise InsufficientData("empty test set")
    predicted = predict_sets(model, featurize(test_set, embeddings))
    truth = [ex.labels for ex in test_set]
    return metrics_from_predictions(model.attribute, model.labels, truth, predicted)


@dataclass(frozen=True)
class ConfidenceInterval:
    point: float
    lower: float
    upper: float
    resamples: int

    def to_dict(self) -> dict:
        return {"accuracy": self.point, "lower": self.lower, "upper": self.upper, "resamples": self.resamples}


def bootstrap_ci(correct, resamples: int = 200, seed: int = 0, level: float = 0.95) -> ConfidenceInterval:
    """Percentile interval of the mean of ``correct`` under resampling."""
    correct = np.asarray(correct, dtype=np.float64)
    n = len(correct)
    if n == 0:
        raise InsufficientData("nothing to resample")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, n, size=(resamples, n))
    stats = correct[idx].mean(axis=1)
    tail = (1 - level) / 2 * 100
    lo, hi = np.percentile(stats, [tail, 100 - tail])
    return ConfidenceInterval(float(correct.mean()), float(lo), float(hi), resamples)


def bootstrap_accuracy(model, test_set, embeddings, resamples: int = 200, seed: int = 0) -> ConfidenceInterval:
    """Exact-match (subset) accuracy with a percentile bootstrap interval."""
    if not test_set:
        raise InsufficientData("empty test set")
    labels = set(model.labels)
    predicted = predict_sets(model, featurize(test_set, embeddings))
    correct = [p == (ex.labels & labels) for p, ex in zip(predicted, test_set)]
    return bootstrap_ci(correct, resamples, seed)


# -- hierarchical annotation ------------------------------------------------

def triggered_attributes(practices) -> list[str]:
    attrs = []
    if vocab.FP in practices or vocab.TP in practices:
        attrs.extend(vocab.COLLECTION_ATTRIBUTES)
        if vocab.FP in practices:
            attrs.append(vocab.ACTION_FIRST_PARTY)
        if vocab.TP in practices:
            attrs.append(vocab.ACTION_THIRD_PARTY)
    if vocab.ISA in practices:
        attrs.append(vocab.AUDIENCE_TYPE)
    return attrs


def annotate(stack: dict, segment: Segment, embeddings: EmbeddingModel, vector=None) -> SegmentAnnotation:
    if vocab.SEGMENT_PRACTICES not in stack:
        raise MissingClassifier(vocab.SEGMENT_PRACTICES)
    x = embed_tokens(embeddings, segment.tokens) if vector is None else vector
    practices = predict(stack[vocab.SEGMENT_PRACTICES], x).predicted
    attributes = {}
    for attr in triggered_attributes(practices):
        if attr not in stack:
            raise MissingClassifier(f"{attr} is triggered but not in the classifier stack")
        attributes[attr] = predict(stack[attr], x).predicted
    return SegmentAnnotation(segment.policy_id, segment.index, practices, attributes)


# -- persistence ------------------------------------------------------------

def model_to_dict(model: ClassifierModel) -> dict:
    return {
        "attribute": model.attribute,
        "labels": list(model.labels),
        "threshold": model.threshold,
        "dimension": model.dimension,
        "weights": [[float(v) for v in row] for row in model.weights],
        "bias": [float(v) for v in model.bias],
        "degenerate": list(model.degenerate),
    }


def model_from_dict(d) -> ClassifierModel:
    labels = tuple(d["labels"])
    W = np.array(d["weights"], dtype=np.float64).reshape(len(labels), int(d["dimension"]))
    return ClassifierModel(
        d["attribute"], labels, W, np.array(d["bias"], dtype=np.float64),
        float(d.get("threshold", 0.5)), tuple(d.get("degenerate", ())),
    )


def save_model(model: ClassifierModel, path) -> None:
    # json writes floats with repr, which round-trips exactly
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1) + "\n", encoding="utf-8")


def load_model(path) -> ClassifierModel:
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def load_stack(models_dir) -> dict:
    stack = {}
    for attr in vocab.CLASSIFIER_ATTRIBUTES:
        path = Path(models_dir) / f"{attr}.json"
        if path.exists():
            stack[attr] = load_model(path)
    return stack
