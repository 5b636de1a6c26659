"""Convex objectives used by the benchmark: per-example losses, analytic
gradients, full-batch oracles, and a finite-difference gradient checker.

Three problem kinds are supported:

* ``centroid`` -- squared-distance learning of a center point,
  f_i(theta) = 0.5 * ||theta - x_i||^2.
* ``binary-logistic`` -- regularized logistic regression with labels {0, 1}
  mapped internally to {-1, +1}.
* ``multiclass-logistic`` -- softmax cross-entropy over K classes; the
  parameter is the (K, d) weight matrix flattened row-major (row k holds the
  weights of class k).

L2 regularization at strength ``l2_lambda`` is applied to every parameter
coordinate. There is no separate bias term; append a constant feature column
if an intercept is wanted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.special import expit

CENTROID = "centroid"
BINARY_LOGISTIC = "binary-logistic"
MULTICLASS_LOGISTIC = "multiclass-logistic"
KINDS = (CENTROID, BINARY_LOGISTIC, MULTICLASS_LOGISTIC)


@dataclass(frozen=True)
class SparseVector:
    """Sparse feature vector: strictly increasing 0-based indices and the
    matching nonzero values. The dimension lives with the owning dataset."""

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.ndim != 1 or val.ndim != 1 or idx.shape != val.shape:
            raise ValueError("indices and values must be 1-d and equal length")
        if idx.size and np.any(np.diff(idx) <= 0):
            raise ValueError("indices must be strictly increasing")
        if idx.size and idx[0] < 0:
            raise ValueError("indices must be nonnegative")
        if not np.all(np.isfinite(val)):
            raise ValueError("values must be finite")
        if np.any(val == 0.0):
            raise ValueError("zero values must not be stored")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def densify(self, d: int) -> np.ndarray:
        if self.indices.size and self.indices[-1] >= d:
            raise ValueError("index %d out of range for dimension %d"
                             % (self.indices[-1], d))
        out = np.zeros(d)
        out[self.indices] = self.values
        return out


@dataclass(frozen=True)
class Example:
    """One training point: features (dense array or SparseVector) and an
    integer class label in [0, K)."""

    features: np.ndarray | SparseVector
    label: int = 0

    def dimension(self) -> int | None:
        """Feature dimension, or None when sparse (dimension is extrinsic)."""
        if isinstance(self.features, SparseVector):
            return None
        return int(np.asarray(self.features).shape[0])


class Problem:
    """Immutable objective over a fixed set of examples.

    The examples are packed into a feature matrix at construction (dense
    ndarray, or CSR when any example is sparse) so full-dataset passes are
    vectorized. All operations below are pure reads and safe to call
    concurrently.
    """

    def __init__(self, examples, kind, l2_lambda=0.0, num_classes=None, d=None):
        if kind not in KINDS:
            raise ValueError("unknown problem kind: %r" % (kind,))
        examples = list(examples)
        if not examples:
            raise ValueError("a problem needs at least one example")
        if l2_lambda < 0:
            raise ValueError("l2_lambda must be nonnegative")

        self.kind = kind
        self.examples = examples
        self.l2_lambda = float(l2_lambda)
        self.n = len(examples)

        dims = {ex.dimension() for ex in examples} - {None}
        if len(dims) > 1:
            raise ValueError("examples disagree on feature dimension: %s" % dims)
        if d is None:
            if not dims:
                raise ValueError("all-sparse examples need an explicit d")
            d = dims.pop()
        elif dims and dims != {d}:
            raise ValueError("explicit d=%d contradicts example dimension" % d)
        self.d = int(d)

        self.y = np.array([ex.label for ex in examples], dtype=np.int64)
        if kind == CENTROID:
            self.num_classes = 1
        elif kind == BINARY_LOGISTIC:
            self.num_classes = 2
        else:
            inferred = int(self.y.max()) + 1 if self.n else 0
            self.num_classes = int(num_classes) if num_classes else max(inferred, 2)
        if np.any(self.y < 0) or np.any(self.y >= max(self.num_classes, 1)):
            raise ValueError("labels must lie in [0, num_classes)")
        self.class_counts = np.bincount(self.y, minlength=self.num_classes)

        self.X = _pack_features(examples, self.d)
        self.is_sparse = sparse.issparse(self.X)
        # ||x_i||^2 per row, reused by the closed-form score computations.
        if self.is_sparse:
            self.X_sq = self.X.multiply(self.X).tocsr()
            self.row_norm_sq = np.asarray(self.X_sq.sum(axis=1)).ravel()
        else:
            self.X_sq = self.X**2
            self.row_norm_sq = self.X_sq.sum(axis=1)
        self._x_mean = None

    @property
    def param_dim(self) -> int:
        if self.kind == MULTICLASS_LOGISTIC:
            return self.num_classes * self.d
        return self.d

    def feature_mean(self) -> np.ndarray:
        if self._x_mean is None:
            if self.is_sparse:
                self._x_mean = np.asarray(self.X.mean(axis=0)).ravel()
            else:
                self._x_mean = self.X.mean(axis=0)
        return self._x_mean

    def feature_row(self, i: int) -> np.ndarray:
        """Dense copy of example i's feature vector."""
        if self.is_sparse:
            return np.asarray(self.X[i].todense()).ravel()
        return np.array(self.X[i])

    def weights_view(self, theta: np.ndarray) -> np.ndarray:
        """Multiclass parameter reshaped to (K, d); identity otherwise."""
        if self.kind == MULTICLASS_LOGISTIC:
            return theta.reshape(self.num_classes, self.d)
        return theta

    def __repr__(self):
        return "Problem(kind=%s, n=%d, d=%d, K=%d, l2=%.3g)" % (
            self.kind, self.n, self.d, self.num_classes, self.l2_lambda)


def _pack_features(examples, d):
    if any(isinstance(ex.features, SparseVector) for ex in examples):
        indptr = [0]
        indices = []
        data = []
        for ex in examples:
            f = ex.features
            if isinstance(f, SparseVector):
                if f.nnz and f.indices[-1] >= d:
                    raise ValueError("sparse index out of range")
                indices.append(f.indices)
                data.append(f.values)
            else:
                f = np.asarray(f, dtype=np.float64)
                nz = np.flatnonzero(f)
                indices.append(nz)
                data.append(f[nz])
            indptr.append(indptr[-1] + len(indices[-1]))
        mat = sparse.csr_matrix(
            (np.concatenate(data) if data else np.zeros(0),
             np.concatenate(indices) if indices else np.zeros(0, dtype=np.int64),
             np.array(indptr)),
            shape=(len(examples), d))
        return mat
    X = np.array([np.asarray(ex.features, dtype=np.float64) for ex in examples])
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    return X


def _check_index(problem, i):
    if not 0 <= i < problem.n:
        raise IndexError("example index %d out of range [0, %d)" % (i, problem.n))


def _check_theta(problem, theta):
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (problem.param_dim,):
        raise ValueError("theta has shape %s, expected (%d,)"
                         % (theta.shape, problem.param_dim))
    return theta


def _signed_labels(problem):
    # {0, 1} -> {-1, +1}
    return 2.0 * problem.y - 1.0


def margins(problem, theta):
    """Linear scores: <theta, x_i> for binary, rows of X W^T for multiclass."""
    theta = _check_theta(problem, theta)
    if problem.kind == MULTICLASS_LOGISTIC:
        W = problem.weights_view(theta)
        Z = problem.X @ W.T
        return np.asarray(Z)
    return np.asarray(problem.X @ theta).ravel()


def _log_softmax_rows(Z):
    # max-shift keeps exp() in range for any magnitude of scores
    m = Z.max(axis=1, keepdims=True)
    shifted = Z - m
    lse = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return shifted - lse


def example_loss(problem, i, theta):
    """Per-example loss f_i(theta)."""
    _check_index(problem, i)
    theta = _check_theta(problem, theta)
    lam = problem.l2_lambda
    if problem.kind == CENTROID:
        x = problem.feature_row(i)
        diff = theta - x
        return 0.5 * float(diff @ diff)
    if problem.kind == BINARY_LOGISTIC:
        x = problem.feature_row(i)
        s = 2.0 * problem.y[i] - 1.0
        z = float(theta @ x)
        return float(np.logaddexp(0.0, -s * z)) + 0.5 * lam * float(theta @ theta)
    W = problem.weights_view(theta)
    x = problem.feature_row(i)
    z = W @ x
    z = z - z.max()
    lse = np.log(np.exp(z).sum())
    return float(lse - z[problem.y[i]]) + 0.5 * lam * float(theta @ theta)


def example_gradient(problem, i, theta):
    """Analytic gradient of f_i at theta, always returned dense."""
    _check_index(problem, i)
    theta = _check_theta(problem, theta)
    lam = problem.l2_lambda
    if problem.kind == CENTROID:
        return theta - problem.feature_row(i)
    if problem.kind == BINARY_LOGISTIC:
        x = problem.feature_row(i)
        s = 2.0 * problem.y[i] - 1.0
        z = float(theta @ x)
        c = -s * float(expit(-s * z))
        return c * x + lam * theta
    W = problem.weights_view(theta)
    x = problem.feature_row(i)
    z = W @ x
    z = z - z.max()
    p = np.exp(z)
    p /= p.sum()
    q = p.copy()
    q[problem.y[i]] -= 1.0
    return (np.outer(q, x) + lam * W).ravel()


def softmax_residual(problem, theta):
    """(softmax(Z) - onehot(y)) rows for every example; multiclass only."""
    Z = margins(problem, theta)
    m = Z.max(axis=1, keepdims=True)
    P = np.exp(Z - m)
    P /= P.sum(axis=1, keepdims=True)
    Q = P.copy()
    Q[np.arange(problem.n), problem.y] -= 1.0
    return Q


def logistic_residual(problem, theta):
    """Per-example scalar c_i with grad f_i = c_i x_i + lambda theta."""
    s = _signed_labels(problem)
    z = margins(problem, theta)
    return -s * expit(-s * z)


def full_objective(problem, theta):
    """Mean loss (1/n) sum_i f_i(theta), regularizer included."""
    theta = _check_theta(problem, theta)
    lam = problem.l2_lambda
    if problem.kind == CENTROID:
        if problem.is_sparse:
            diff = theta[None, :] - np.asarray(problem.X.todense())
        else:
            diff = theta[None, :] - problem.X
        return 0.5 * float((diff * diff).sum()) / problem.n
    if problem.kind == BINARY_LOGISTIC:
        s = _signed_labels(problem)
        z = margins(problem, theta)
        data = np.logaddexp(0.0, -s * z).mean()
        return float(data) + 0.5 * lam * float(theta @ theta)
    Z = margins(problem, theta)
    logp = _log_softmax_rows(Z)
    data = -logp[np.arange(problem.n), problem.y].mean()
    return float(data) + 0.5 * lam * float(theta @ theta)


def full_gradient(problem, theta):
    """Gradient of the mean loss, (1/n) sum_i grad f_i(theta)."""
    theta = _check_theta(problem, theta)
    lam = problem.l2_lambda
    if problem.kind == CENTROID:
        return theta - problem.feature_mean()
    if problem.kind == BINARY_LOGISTIC:
        c = logistic_residual(problem, theta)
        g = np.asarray(problem.X.T @ c).ravel() / problem.n
        return g + lam * theta
    Q = softmax_residual(problem, theta)
    W = problem.weights_view(theta)
    G = np.asarray(Q.T @ problem.X) / problem.n + lam * W
    return np.asarray(G).ravel()


def finite_difference_check(problem, theta, h=1e-6):
    """Max relative error between the analytic full gradient and central
    differences of the full objective, with relative error
    |a - b| / max(1, |a|, |b|)."""
    if h <= 0:
        raise ValueError("h must be positive")
    theta = _check_theta(problem, theta)
    g = full_gradient(problem, theta)
    worst = 0.0
    for j in range(theta.size):
        step = np.zeros_like(theta)
        step[j] = h
        num = (full_objective(problem, theta + step)
               - full_objective(problem, theta - step)) / (2.0 * h)
        denom = max(1.0, abs(num), abs(g[j]))
        worst = max(worst, abs(num - g[j]) / denom)
    return worst
