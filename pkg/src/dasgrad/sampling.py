"""Adaptive categorical sampling over training indices.

A flat-array sum tree gives O(log n) draws and O(log n) weight updates, so
the sampling distribution can be reshaped cheaply between full refreshes.
Score functions turn the current model state into per-example sampling
scores; normalization smooths them with a small epsilon so every example
keeps strictly positive probability.
"""

from __future__ import annotations

import numpy as np

from . import problems as _problems


class SamplingTree:
    """Sum tree over n nonnegative leaf weights.

    Layout: ``nodes`` has 2 * capacity entries, capacity a power of two.
    nodes[1] is the root, leaf i lives at nodes[capacity + i], and every
    internal node holds the exact float sum of its two children (parents are
    recomputed from children on update, never adjusted incrementally, so the
    sum invariant holds to the last bit).
    """

    def __init__(self, weights):
        weights = np.asarray(weights, dtype=np.float64)
        if weights.ndim != 1 or weights.size == 0:
            raise ValueError("weights must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        if not np.any(weights > 0):
            raise ValueError("at least one weight must be positive")
        self.n = int(weights.size)
        self.capacity = 1
        while self.capacity < self.n:
            self.capacity *= 2
        self.nodes = np.zeros(2 * self.capacity)
        self.nodes[self.capacity:self.capacity + self.n] = weights
        # level-by-level O(n) build
        lo = self.capacity
        while lo > 1:
            half = lo // 2
            level = self.nodes[lo:2 * lo]
            self.nodes[half:lo] = level[0::2] + level[1::2]
            lo = half

    @property
    def total(self) -> float:
        return float(self.nodes[1])

    def leaf(self, i: int) -> float:
        if not 0 <= i < self.n:
            raise IndexError("leaf index out of range")
        return float(self.nodes[self.capacity + i])

    def leaves(self) -> np.ndarray:
        return np.array(self.nodes[self.capacity:self.capacity + self.n])

    def update(self, i: int, w: float) -> None:
        """Set leaf i to w and refresh its ancestors."""
        if not 0 <= i < self.n:
            raise IndexError("leaf index out of range")
        if not np.isfinite(w) or w < 0:
            raise ValueError("weight must be finite and nonnegative")
        idx = self.capacity + i
        self.nodes[idx] = w
        idx >>= 1
        while idx >= 1:
            self.nodes[idx] = self.nodes[2 * idx] + self.nodes[2 * idx + 1]
            idx >>= 1

    def index_of_prefix(self, u: float) -> int:
        """Leaf whose cumulative-weight interval contains u in [0, total).

        Descends left on u < left-child sum, otherwise subtracts the left
        sum and descends right, so boundary ties go right.
        """
        idx = 1
        nodes = self.nodes
        while idx < self.capacity:
            left = 2 * idx
            if u < nodes[left]:
                idx = left
            else:
                u -= nodes[left]
                idx = left + 1
        i = idx - self.capacity
        # float slack in the child sums can spill past the last live leaf
        return min(i, self.n - 1)

    def sample(self, rng) -> int:
        """Draw one index with probability leaf_i / total."""
        root = self.total
        if root <= 0:
            raise ValueError("cannot sample from an all-zero tree")
        return self.index_of_prefix(rng.random() * root)

    def sample_many(self, rng, size: int) -> np.ndarray:
        """Draw ``size`` i.i.d. indices; one vectorized descent per level."""
        root = self.total
        if root <= 0:
            raise ValueError("cannot sample from an all-zero tree")
        u = rng.random(size) * root
        idx = np.ones(size, dtype=np.int64)
        nodes = self.nodes
        while idx[0] < self.capacity:
            left = 2 * idx
            left_sum = nodes[left]
            go_left = u < left_sum
            u = np.where(go_left, u, u - left_sum)
            idx = np.where(go_left, left, left + 1)
        return np.minimum(idx - self.capacity, self.n - 1)


def normalize_scores(scores, epsilon):
    """Turn nonnegative scores into strictly positive probabilities:
    p_i = (s_i + eps) / sum_j (s_j + eps)."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1 or scores.size == 0:
        raise ValueError("scores must be a nonempty 1-d sequence")
    if np.any(scores < 0) or not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite and nonnegative")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    shifted = scores + epsilon
    return shifted / shifted.sum()


def importance_weight(p_i, n):
    """Weight (1/n)/p_i that unbiases a p-sampled gradient toward the
    uniform training mean. Works elementwise on arrays."""
    p_i = np.asarray(p_i, dtype=np.float64)
    if np.any(p_i <= 0):
        raise ValueError("probabilities must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    out = (1.0 / n) / p_i
    return float(out) if out.ndim == 0 else out


def target_weight(p_i, label_count, m):
    """Weight (label_count/m)/p_i that retargets the estimator at a test
    label distribution: label_count is how often the sampled example's label
    occurs among the m test points."""
    p_i = np.asarray(p_i, dtype=np.float64)
    if np.any(p_i <= 0):
        raise ValueError("probabilities must be positive")
    if m < 1:
        raise ValueError("m must be at least 1")
    label_count = np.asarray(label_count, dtype=np.float64)
    if np.any(label_count < 0) or np.any(label_count > m):
        raise ValueError("label_count must lie in [0, m]")
    out = (label_count / m) / p_i
    return float(out) if out.ndim == 0 else out


def _guarded_fourth_root(v_hat, eps_div):
    """Fourth root of v_hat with zero coordinates replaced by sqrt(eps_div),
    matching the update rule's sqrt(v_hat) + eps_div guard at zero."""
    v_hat = np.asarray(v_hat, dtype=np.float64)
    return np.where(v_hat > 0, np.sqrt(np.sqrt(v_hat)), np.sqrt(eps_div))


def _direction_norms(problem, shared, fourth_root):
    """Norms ||(shared + coef_i (x) x_i) / fourth_root||_2 for all i.

    ``shared`` is the part of the candidate direction common to every
    example (momentum carry-over plus the regularizer term); the per-example
    part is rank one in the features, which lets the norms be assembled from
    three matrix products without materializing n x param_dim gradients.
    Centroid problems take the direct dense route instead (exact at zero).
    """
    X = problem.X
    inv_sq = 1.0 / (fourth_root * fourth_root)

    if problem.kind == _problems.CENTROID:
        if problem.is_sparse:
            X = np.asarray(X.todense())
        diff = shared["const"][None, :] + shared["coef"] * X
        return np.linalg.norm(diff / fourth_root[None, :], axis=1)

    if problem.kind == _problems.BINARY_LOGISTIC:
        a = shared["const"]
        c = shared["per_example"]
        base = float((a * a * inv_sq).sum())
        cross = np.asarray(X @ (a * inv_sq)).ravel()
        quad = np.asarray(problem.X_sq @ inv_sq).ravel()
        sq = base + 2.0 * c * cross + (c * c) * quad
        return np.sqrt(np.maximum(sq, 0.0))

    A = shared["const"]          # (K, d)
    C = shared["per_example"]    # (n, K) coefficient rows
    inv_sq = inv_sq.reshape(A.shape)
    base = float((A * A * inv_sq).sum())
    cross = np.asarray(X @ (A * inv_sq).T)        # (n, K)
    quad = np.asarray(problem.X_sq @ inv_sq.T)    # (n, K)
    sq = base + 2.0 * (C * cross).sum(axis=1) + (C * C * quad).sum(axis=1)
    return np.sqrt(np.maximum(sq, 0.0))


def scores_apsgd(problem, theta):
    """Per-example gradient norms ||grad f_i(theta)||_2, one dataset pass."""
    theta = np.asarray(theta, dtype=np.float64)
    ones = np.ones(problem.param_dim)
    return scores_dasgrad(problem, theta, np.zeros(problem.param_dim),
                          ones, beta1_t=0.0)


def scores_dasgrad(problem, theta, m_prev, v_hat, beta1_t, eps_div=1e-8):
    """Preconditioned candidate-direction norms for every example:
    || (b m_prev + (1 - b) grad f_i(theta)) / v_hat^{1/4} ||_2 with b the
    momentum blend at the current step. Coordinates where v_hat is zero use
    the sqrt(eps_div) guard so the norm matches the guarded update rule.
    """
    theta = np.asarray(theta, dtype=np.float64)
    m_prev = np.asarray(m_prev, dtype=np.float64)
    if not 0.0 <= beta1_t < 1.0:
        raise ValueError("beta1_t must lie in [0, 1)")
    root = _guarded_fourth_root(v_hat, eps_div)
    lam = problem.l2_lambda
    keep = 1.0 - beta1_t

    if problem.kind == _problems.CENTROID:
        shared = {"const": beta1_t * m_prev + keep * theta, "coef": -keep}
        return _direction_norms(problem, shared, root)
    if problem.kind == _problems.BINARY_LOGISTIC:
        c = keep * _problems.logistic_residual(problem, theta)
        shared = {"const": beta1_t * m_prev + keep * (lam * theta),
                  "per_example": c}
        return _direction_norms(problem, shared, root)
    W = problem.weights_view(theta)
    M = problem.weights_view(m_prev)
    Q = keep * _problems.softmax_residual(problem, theta)
    shared = {"const": beta1_t * M + keep * (lam * W), "per_example": Q}
    return _direction_norms(problem, shared, root)


def expected_weighted_second_moment(probs, norms):
    """Error term E_p[w^2 ||g||^2] = sum_i norms_i^2 / (n^2 p_i).

    Over the positive simplex its minimum is ((1/n) sum_i norms_i)^2,
    reached at p proportional to the norms.
    """
    probs = np.asarray(probs, dtype=np.float64)
    norms = np.asarray(norms, dtype=np.float64)
    if probs.shape != norms.shape or probs.ndim != 1:
        raise ValueError("probs and norms must be 1-d and the same length")
    if np.any(probs <= 0):
        raise ValueError("probabilities must be positive")
    n = probs.size
    return float((norms * norms / probs).sum() / (n * n))
