"""Soft-margin kernel SVM trained by sequential minimal optimization.

The solver works on the dual

    max  sum(a) - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
    s.t. 0 <= a_i <= C,  sum_i a_i y_i = 0

two multipliers at a time. The working pair is the maximal violating pair
with second-order choice of the partner (Fan, Chen & Lin, JMLR 2005), and
training stops once the largest KKT violation is below ``tol``, so every
training point satisfies its KKT condition to within ``tol``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit

from .dataset import DataError

log = logging.getLogger(__name__)

KERNELS = ("linear", "polynomial", "rbf", "sigmoid")
_TAU = 1e-12


@dataclass(frozen=True)
class SvmConfig:
    """Kernel and solver settings.

    ``gamma=None`` means 1 / n_features at training time. The polynomial
    kernel is ``(x.z + coef0) ** degree``; sigmoid is ``tanh(gamma x.z + coef0)``.
    ``seed`` fixes the order in which tied working-set candidates are visited.
    """

    kernel: str = "rbf"
    C: float = 1.0
    tol: float = 1e-3
    gamma: float | None = None
    degree: int = 3
    coef0: float = 0.0
    max_iter: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}; expected one of {KERNELS}")
        if not self.C > 0:
            raise ValueError("C must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")

    def resolved(self, n_features: int) -> "SvmConfig":
        if self.gamma is None and self.kernel in ("rbf", "sigmoid"):
            return replace(self, gamma=1.0 / max(n_features, 1))
        return self


def _is_small_int(M: np.ndarray) -> bool:
    return bool(np.all(np.abs(M) < 2**20) and np.array_equal(M, np.round(M)))


def _squared_distances(A: np.ndarray, B: np.ndarray, dot: np.ndarray) -> np.ndarray:
    # the |a|^2 + |b|^2 - 2ab expansion is exact for small integers (binary rows);
    # for real-valued rows it cancels badly, so sum differences directly
    if _is_small_int(A) and _is_small_int(B):
        return np.maximum((A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * dot, 0.0)
    out = np.empty((A.shape[0], B.shape[0]))
    step = max(1, 2**22 // max(1, B.size))
    for s in range(0, A.shape[0], step):
        diff = A[s : s + step, None, :] - B[None, :, :]
        out[s : s + step] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def kernel_matrix(A: np.ndarray, B: np.ndarray, config: SvmConfig) -> np.ndarray:
    """Gram matrix ``K[i, j] = K(A[i], B[j])``; ``config`` must be resolved."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    # overflow surfaces as the non-finite check below
    with np.errstate(over="ignore", invalid="ignore"):
        dot = A @ B.T
        if config.kernel == "linear":
            K = dot
        elif config.kernel == "polynomial":
            K = (dot + config.coef0) ** config.degree
        elif config.kernel == "rbf":
            K = np.exp(-config.gamma * _squared_distances(A, B, dot))
        else:
            K = np.tanh(config.gamma * dot + config.coef0)
    if not np.all(np.isfinite(K)):
        raise FloatingPointError("non-finite kernel value")
    return K


def kernel(a, b, config: SvmConfig) -> float:
    return float(kernel_matrix(np.atleast_2d(a), np.atleast_2d(b), config)[0, 0])


@njit(cache=True)
def _smo_loop(K, y, C, tol, max_iter, alpha, G):
    n = y.shape[0]
    it = 0
    while it < max_iter:
        # i: maximal -y*G over the "can move up" set
        i = -1
        m = -np.inf
        for t in range(n):
            if (y[t] > 0 and alpha[t] < C) or (y[t] < 0 and alpha[t] > 0):
                v = -y[t] * G[t]
                if v > m:
                    m = v
                    i = t
        # j: second-order choice over the "can move down" set
        j = -1
        low_min = np.inf
        best = np.inf
        for t in range(n):
            if (y[t] > 0 and alpha[t] > 0) or (y[t] < 0 and alpha[t] < C):
                v = -y[t] * G[t]
                if v < low_min:
                    low_min = v
                b = m - v
                if b > 0:
                    quad = K[i, i] + K[t, t] - 2.0 * K[i, t]
                    if quad <= 0:
                        quad = _TAU
                    score = -(b * b) / quad
                    if score < best:
                        best = score
                        j = t
        if i == -1 or j == -1 or m - low_min < tol:
            return it, True

        old_i = alpha[i]
        old_j = alpha[j]
        qij = y[i] * y[j] * K[i, j]
        if y[i] != y[j]:
            q = K[i, i] + K[j, j] + 2.0 * qij
            if q <= 0:
                q = _TAU
            delta = (-G[i] - G[j]) / q
            diff = old_i - old_j
            ai = old_i + delta
            aj = old_j + delta
            if diff > 0:
                if aj < 0:
                    aj = 0.0
                    ai = diff
            elif ai < 0:
                ai = 0.0
                aj = -diff
            if diff > 0:
                if ai > C:
                    ai = C
                    aj = C - diff
            elif aj > C:
                aj = C
                ai = C + diff
        else:
            q = K[i, i] + K[j, j] - 2.0 * qij
            if q <= 0:
                q = _TAU
            delta = (G[i] - G[j]) / q
            total = old_i + old_j
            ai = old_i - delta
            aj = old_j + delta
            if total > C:
                if ai > C:
                    ai = C
                    aj = total - C
            elif aj < 0:
                aj = 0.0
                ai = total
            if total > C:
                if aj > C:
                    aj = C
                    ai = total - C
            elif ai < 0:
                ai = 0.0
                aj = total
        alpha[i] = ai
        alpha[j] = aj
        dai = ai - old_i
        daj = aj - old_j
        for t in range(n):
            G[t] += y[t] * (y[i] * K[i, t] * dai + y[j] * K[j, t] * daj)
        it += 1
    return it, False


@dataclass
class SmoResult:
    alpha: np.ndarray
    bias: float
    objective: float
    iterations: int
    converged: bool


def solve_dual(K: np.ndarray, y: np.ndarray, C: float, tol: float = 1e-3,
               max_iter: int = 100_000, seed: int = 0) -> SmoResult:
    """Run SMO on a precomputed Gram matrix ``K`` with labels ``y`` in {-1, +1}."""
    n = len(y)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    K = K[np.ix_(perm, perm)]
    y = np.asarray(y, dtype=float)[perm]

    alpha = np.zeros(n)
    G = -np.ones(n)
    it, converged = _smo_loop(np.ascontiguousarray(K), y, float(C), float(tol), int(max_iter), alpha, G)
    pos = y > 0
    if not converged:
        log.warning("SMO stopped after %d iterations without reaching tol=%g", it, tol)

    v = -y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        bias = float(v[free].mean())
    else:
        up = np.where(pos, alpha < C, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < C)
        hi = v[up].max() if up.any() else v[low].min()
        lo = v[low].min() if low.any() else hi
        bias = float((hi + lo) / 2.0)
    objective = float(alpha.sum() - 0.5 * alpha @ (G + 1.0))

    out = np.empty(n)
    out[perm] = alpha
    return SmoResult(out, bias, objective, it, converged)


def dual_objective(alpha: np.ndarray, K: np.ndarray, y: np.ndarray) -> float:
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


@dataclass
class SvmModel:
    support_vectors: np.ndarray
    alphas: np.ndarray
    labels: np.ndarray
    bias: float
    config: SvmConfig
    feature_names: list[str] = field(default_factory=list)
    objective: float = float("nan")

    @property
    def n_features(self) -> int:
        return self.support_vectors.shape[1]

    def dual_coef(self) -> np.ndarray:
        return self.alphas * self.labels


def _as_labels(y) -> np.ndarray:
    y = np.asarray(y)
    if y.dtype == bool:
        return np.where(y, 1.0, -1.0)
    y = y.astype(float)
    if not np.isin(y, (-1.0, 1.0)).all():
        raise DataError("labels must be +1/-1 or boolean")
    return y


def train(X, y, config: SvmConfig = SvmConfig(), feature_names: Sequence[str] = ()) -> SvmModel:
    """Fit a model; ``y`` is boolean (True = positive) or +1/-1."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError("training matrix is empty")
    y = _as_labels(y)
    if len(y) != X.shape[0]:
        raise DataError("label count does not match row count")
    if (y > 0).all() or (y < 0).all():
        raise DataError("training data contains a single class")
    config = config.resolved(X.shape[1])
    K = kernel_matrix(X, X, config)
    return train_gram(K, X, y, config, feature_names)


def train_gram(K: np.ndarray, X: np.ndarray, y: np.ndarray, config: SvmConfig,
               feature_names: Sequence[str] = ()) -> SvmModel:
    """Fit from a Gram matrix already computed on ``X`` with ``config``."""
    y = _as_labels(y)
    res = solve_dual(K, y, config.C, config.tol, config.max_iter, config.seed)
    sv = res.alpha > 0
    return SvmModel(
        support_vectors=np.asarray(X, dtype=float)[sv],
        alphas=res.alpha[sv],
        labels=y[sv],
        bias=res.bias,
        config=config,
        feature_names=list(feature_names),
        objective=res.objective,
    )


def decision_function(model: SvmModel, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.n_features:
        raise DataError(f"expected {model.n_features} features, got {X.shape[1]}")
    if len(model.alphas) == 0:
        return np.full(X.shape[0], model.bias)
    K = kernel_matrix(model.support_vectors, X, model.config)
    return model.dual_coef() @ K + model.bias


def decision_value(model: SvmModel, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DataError("decision_value takes a single row")
    return float(decision_function(model, x[None, :])[0])


def predict(model: SvmModel, X) -> np.ndarray:
    """Boolean predictions; a decision value of exactly 0 counts as positive."""
    return decision_function(model, X) >= 0.0


def save_model(model: SvmModel, path: str | Path) -> None:
    """Write a self-describing text model (``key value`` lines, then SV rows)."""
    c = model.config
    lines = [
        "# cadpipe svm model v1",
        f"kernel {c.kernel}",
        f"C {c.C!r}",
        f"tol {c.tol!r}",
        f"gamma {c.gamma!r}",
        f"degree {c.degree}",
        f"coef0 {c.coef0!r}",
        f"max_iter {c.max_iter}",
        f"seed {c.seed}",
        f"bias {model.bias!r}",
        f"n_features {model.n_features}",
        f"n_sv {len(model.alphas)}",
    ]
    lines += [f"feature {name}" for name in model.feature_names]
    lines.append("# alpha label x...")
    for a, lab, row in zip(model.alphas, model.labels, model.support_vectors):
        lines.append(" ".join([repr(float(a)), str(int(lab)), *(repr(float(v)) for v in row)]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> SvmModel:
    meta: dict[str, str] = {}
    names: list[str] = []
    rows: list[list[float]] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        if key == "feature":
            names.append(rest)
        elif key in ("kernel", "C", "tol", "gamma", "degree", "coef0", "max_iter",
                     "seed", "bias", "n_features", "n_sv"):
            meta[key] = rest
        else:
            rows.append([float(t) for t in line.split()])
    try:
        config = SvmConfig(
            kernel=meta["kernel"],
            C=float(meta["C"]),
            tol=float(meta["tol"]),
            gamma=None if meta["gamma"] == "None" else float(meta["gamma"]),
            degree=int(meta["degree"]),
            coef0=float(meta["coef0"]),
            max_iter=int(meta["max_iter"]),
            seed=int(meta["seed"]),
        )
        n_features = int(meta["n_features"])
        n_sv = int(meta["n_sv"])
        bias = float(meta["bias"])
    except KeyError as exc:
        raise DataError(f"{path}: model file lacks {exc}") from None
    if len(rows) != n_sv or any(len(r) != n_features + 2 for r in rows):
        raise DataError(f"{path}: malformed support vector rows")
    data = np.array(rows, dtype=float).reshape(n_sv, n_features + 2)
    return SvmModel(data[:, 2:], data[:, 0], data[:, 1], bias, config, names)
