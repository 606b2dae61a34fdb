"""Soft-margin SVM trained from scratch with SMO, plus one-against-one multiclass.

The binary trainer solves the usual dual

    min_a  1/2 a'Qa - sum(a)   s.t.  0 <= a_i <= C,  sum(a_i y_i) = 0,

with Q_ij = y_i y_j K(x_i, x_j), by repeatedly optimizing the maximal
violating pair analytically (working-set selection a la LIBSVM). The bias
is the midpoint of the KKT interval at the stopping point.

Multiclass training standardizes features per dimension, then fits one
binary machine per unordered class pair (n*(n-1)/2 machines); prediction
is majority voting with |margin|-sum tie breaking.

Model files are versioned JSON documents written with full float
precision; loading rejects unknown versions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

MODEL_FORMAT = "oao-svm"
MODEL_VERSION = 1


@dataclass(frozen=True)
class Kernel:
    """Kernel configuration; gamma must be set iff kind == 'rbf'.

    In a TrainConfig an rbf kernel may carry gamma=None, meaning "scale
    from the data" (1 / (n_features * variance)); trained models always
    store the resolved value.
    """

    kind: str = "rbf"
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "rbf"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "linear" and self.gamma is not None:
            raise ValueError("linear kernel takes no gamma")
        if self.gamma is not None and self.gamma <= 0:
            raise ValueError("gamma must be > 0")

    def matrix(self, X: np.ndarray, Z: np.ndarray) -> np.ndarray:
        """Gram matrix K[i, j] = k(X[i], Z[j])."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
        if self.kind == "linear":
            return X @ Z.T
        sq = (X * X).sum(axis=1)[:, None] + (Z * Z).sum(axis=1)[None, :] - 2.0 * (X @ Z.T)
        return np.exp(-self.gamma * np.maximum(sq, 0.0))


@dataclass(frozen=True)
class TrainConfig:
    C: float = 10.0
    kernel: Kernel = field(default_factory=Kernel)
    tolerance: float = 1e-4
    max_passes: int = 20000

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be > 0")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be > 0")
        if self.max_passes < 1:
            raise ValueError("max_passes must be positive")


@dataclass(frozen=True)
class BinaryModel:
    support_vectors: np.ndarray  # (n_sv, d)
    dual_coefs: np.ndarray  # (n_sv,) alpha_i * y_i
    bias: float
    kernel: Kernel
    label_pos: int
    label_neg: int
    converged: bool = True


@dataclass(frozen=True)
class MulticlassModel:
    classes: tuple[int, ...]
    machines: tuple[BinaryModel, ...]  # one per pair in combinations(classes, 2) order
    mean: np.ndarray  # per-dimension standardization offsets
    scale: np.ndarray


def _resolve_kernel(kernel: Kernel, X: np.ndarray) -> Kernel:
    if kernel.kind == "rbf" and kernel.gamma is None:
        var = float(X.var())
        gamma = 1.0 / (X.shape[1] * var) if var > 0 else 1.0 / X.shape[1]
        return Kernel("rbf", gamma)
    return kernel


def _smo(K: np.ndarray, y: np.ndarray, C: float, tol: float, max_passes: int):
    """Maximal-violating-pair SMO on a precomputed kernel matrix.

    Returns (alpha, bias, converged).
    """
    n = len(y)
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of the dual objective at alpha = 0
    yg = np.empty(n)
    converged = False
    for _ in range(max_passes):
        np.multiply(y, grad, out=yg)
        neg_yg = -yg
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        m_candidates = np.where(up, neg_yg, -np.inf)
        M_candidates = np.where(low, neg_yg, np.inf)
        i = int(np.argmax(m_candidates))
        j = int(np.argmin(M_candidates))
        m_val, M_val = m_candidates[i], M_candidates[j]
        if m_val - M_val <= tol:
            converged = True
            break

        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta <= 0:
            eta = 1e-12
        lam = (m_val - M_val) / eta
        cap_i = C - alpha[i] if y[i] > 0 else alpha[i]
        cap_j = alpha[j] if y[j] > 0 else C - alpha[j]
        lam = min(lam, cap_i, cap_j)
        alpha[i] += y[i] * lam
        alpha[j] -= y[j] * lam
        np.clip(alpha, 0.0, C, out=alpha)
        grad += lam * y * (K[:, i] - K[:, j])

    np.multiply(y, grad, out=yg)
    neg_yg = -yg
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
    m_val = np.max(np.where(up, neg_yg, -np.inf))
    M_val = np.min(np.where(low, neg_yg, np.inf))
    bias = float((m_val + M_val) / 2.0)
    return alpha, bias, converged


def train_binary(X: np.ndarray, y: np.ndarray, cfg: TrainConfig = TrainConfig(),
                 label_pos: int = 1, label_neg: int = -1) -> BinaryModel:
    """Train one soft-margin machine on labels in {-1, +1}."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X must be (n, d) with one label per row")
    if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
        raise ValueError("features and labels must be finite")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if len(np.unique(y)) < 2:
        raise ValueError("training data contains a single class")

    kernel = _resolve_kernel(cfg.kernel, X)
    K = kernel.matrix(X, X)
    alpha, bias, converged = _smo(K, y, cfg.C, cfg.tolerance, cfg.max_passes)

    sv = alpha > 1e-12 * cfg.C
    if not np.any(sv):  # degenerate, keep the largest multiplier
        sv = alpha == alpha.max()
    return BinaryModel(
        support_vectors=X[sv].copy(),
        dual_coefs=(alpha * y)[sv].copy(),
        bias=bias,
        kernel=kernel,
        label_pos=label_pos,
        label_neg=label_neg,
        converged=converged,
    )


def decide(model: BinaryModel, x: np.ndarray):
    """Raw decision value(s) f(x) = sum_i a_i y_i K(s_i, x) + b.

    Accepts a single vector or an (n, d) batch; the classified label is
    ``label_pos`` when f(x) >= 0 (ties go positive), else ``label_neg``.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    K = model.kernel.matrix(np.atleast_2d(x), model.support_vectors)
    f = K @ model.dual_coefs + model.bias
    return float(f[0]) if single else f


def classify(model: BinaryModel, x: np.ndarray) -> int:
    return model.label_pos if decide(model, x) >= 0 else model.label_neg


def train_multiclass(X: np.ndarray, labels, cfg: TrainConfig = TrainConfig()) -> MulticlassModel:
    """One-against-one training over all class pairs.

    Classes are ordered ascending; machine k handles the k-th pair of
    ``itertools.combinations(classes, 2)``, with the pair's first class as
    the positive label.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels)
    if len(X) != len(labels):
        raise ValueError("one label per sample required")
    classes = tuple(int(c) for c in np.unique(labels))
    if len(classes) < 2:
        raise ValueError("multiclass training needs at least 2 classes")

    mean = X.mean(axis=0)
    std = X.std(axis=0)
    scale = np.where(std > 0, std, 1.0)
    Xs = (X - mean) / scale

    base_kernel = _resolve_kernel(cfg.kernel, Xs)
    machines = []
    for a, b in combinations(classes, 2):
        mask = (labels == a) | (labels == b)
        ya = np.where(labels[mask] == a, 1.0, -1.0)
        sub_cfg = TrainConfig(cfg.C, base_kernel, cfg.tolerance, cfg.max_passes)
        machines.append(train_binary(Xs[mask], ya, sub_cfg, label_pos=a, label_neg=b))
    return MulticlassModel(classes, tuple(machines), mean, scale)


def predict(model: MulticlassModel, x: np.ndarray) -> tuple[int, dict[int, int]]:
    """Majority vote over all pairwise machines.

    Returns (class, votes per class). Vote ties are broken by the larger
    sum of |margin| over the machines that voted for the class, then by
    class order.
    """
    xs = (np.asarray(x, dtype=np.float64) - model.mean) / model.scale
    votes = {c: 0 for c in model.classes}
    strength = {c: 0.0 for c in model.classes}
    for machine in model.machines:
        f = decide(machine, xs)
        winner = machine.label_pos if f >= 0 else machine.label_neg
        votes[winner] += 1
        strength[winner] += abs(f)
    best = max(model.classes, key=lambda c: (votes[c], strength[c], -model.classes.index(c)))
    return best, votes


def predict_label(model: MulticlassModel, x: np.ndarray) -> int:
    return predict(model, x)[0]


# ---------------------------------------------------------------------------
# model file I/O


def _machine_to_dict(m: BinaryModel) -> dict:
    return {
        "label_pos": m.label_pos,
        "label_neg": m.label_neg,
        "bias": m.bias,
        "kernel": {"kind": m.kernel.kind, "gamma": m.kernel.gamma},
        "converged": m.converged,
        "dual_coefs": [float(v) for v in m.dual_coefs],
        "support_vectors": [[float(v) for v in row] for row in m.support_vectors],
    }


def _machine_from_dict(d: dict) -> BinaryModel:
    kernel = Kernel(d["kernel"]["kind"], d["kernel"]["gamma"])
    return BinaryModel(
        support_vectors=np.asarray(d["support_vectors"], dtype=np.float64),
        dual_coefs=np.asarray(d["dual_coefs"], dtype=np.float64),
        bias=float(d["bias"]),
        kernel=kernel,
        label_pos=int(d["label_pos"]),
        label_neg=int(d["label_neg"]),
        converged=bool(d["converged"]),
    )


def save_model(path, model: MulticlassModel) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "classes": list(model.classes),
        "mean": [float(v) for v in model.mean],
        "scale": [float(v) for v in model.scale],
        "machines": [_machine_to_dict(m) for m in model.machines],
    }
    with open(path, "w", encoding="ascii") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


def load_model(path) -> MulticlassModel:
    with open(path, "r", encoding="ascii") as f:
        doc = json.load(f)
    if doc.get("format") != MODEL_FORMAT or doc.get("version") != MODEL_VERSION:
        raise ValueError(
            f"{path}: unsupported model file "
            f"(format={doc.get('format')!r}, version={doc.get('version')!r})"
        )
    return MulticlassModel(
        classes=tuple(int(c) for c in doc["classes"]),
        machines=tuple(_machine_from_dict(d) for d in doc["machines"]),
        mean=np.asarray(doc["mean"], dtype=np.float64),
        scale=np.asarray(doc["scale"], dtype=np.float64),
    )
