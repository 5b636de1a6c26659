"""Stepping engine for the stochastic gradient family.

One engine drives all seven methods; they differ only in the momentum blend,
the diagonal preconditioner, and whether the sampling distribution adapts:

* ``sgd``       -- uniform sampling, identity preconditioner.
* ``ap_sgd``    -- adaptive sampling by gradient norms, identity preconditioner.
* ``adagrad``   -- uniform sampling, (1/t) sum g^2 preconditioner.
* ``rmsprop``   -- uniform sampling, EMA of g^2, no momentum.
* ``adam``      -- uniform sampling, momentum + EMA of g^2 (no bias
  correction: the raw recursion is used, unlike most deep-learning Adams).
* ``amsgrad``   -- adam plus the running coordinatewise max of v.
* ``dasgrad``   -- amsgrad plus adaptive sampling by preconditioned
  candidate-direction norms, refreshed every ``refresh_period`` steps.

Every step samples ``batch_size`` indices i.i.d. with replacement from the
current distribution and averages the importance-weighted per-index
directions. In training mode the moment recursion absorbs the raw batch
mean of the sampled gradients; in target mode it absorbs the weighted mean,
which is the estimate of the target-distribution risk gradient that the
momentum must track. Uniform sampling with unit weights reproduces the
unweighted methods bit for bit either way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import metrics as _metrics
from . import problems as _problems
from . import sampling as _sampling

METHODS = ("sgd", "ap_sgd", "adagrad", "rmsprop", "adam", "amsgrad", "dasgrad")
_ADAPTIVE_PROBS = ("ap_sgd", "dasgrad")

# effectively unconstrained unless the caller configures a real box
DEFAULT_BOX = (-1e6, 1e6)


class DivergenceError(RuntimeError):
    """Raised when an update produces a nonfinite parameter vector."""

    def __init__(self, step, message="nonfinite update"):
        super().__init__("%s at step %d" % (message, step))
        self.step = step


@dataclass
class MomentState:
    """Running moment vectors of one optimization run."""

    m: np.ndarray
    v: np.ndarray
    v_hat: np.ndarray
    adagrad_sum: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, dim):
        return cls(m=np.zeros(dim), v=np.zeros(dim), v_hat=np.zeros(dim),
                   adagrad_sum=np.zeros(dim))


@dataclass(frozen=True)
class OptimizerConfig:
    method: str
    alpha: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.99
    epsilon_div: float = 1e-8
    epsilon_prob: float = 1e-8
    refresh_period: int = 10
    batch_size: int = 32
    projection: tuple = DEFAULT_BOX
    weight_mode: str = "training"
    # per-class counts of the target (test) label distribution + its size;
    # required when weight_mode == "target"
    target_label_counts: np.ndarray | None = None
    target_m: int = 0
    score_mode: str = "momentum"        # "momentum" | "gradient"
    beta1_decay: float = 1.0            # beta1_t = beta1 * decay**(t-1)
    freeze_probabilities: bool = False  # keep the distribution uniform

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError("unknown method %r" % (self.method,))
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError("beta1 and beta2 must lie in [0, 1)")
        if self.method in ("adam", "amsgrad", "dasgrad"):
            if self.beta2 == 0.0 or self.beta1 / np.sqrt(self.beta2) >= 1.0:
                raise ValueError("need beta1 / sqrt(beta2) < 1 for %s"
                                 % self.method)
        if self.epsilon_div <= 0 or self.epsilon_prob <= 0:
            raise ValueError("epsilons must be positive")
        if self.refresh_period < 1 or self.batch_size < 1:
            raise ValueError("refresh_period and batch_size must be >= 1")
        if self.weight_mode not in ("training", "target"):
            raise ValueError("weight_mode must be 'training' or 'target'")
        if self.weight_mode == "target":
            if self.target_label_counts is None or self.target_m < 1:
                raise ValueError("target weighting needs label counts and m")
        if self.score_mode not in ("momentum", "gradient"):
            raise ValueError("score_mode must be 'momentum' or 'gradient'")
        lo, hi = self.projection
        if np.any(np.asarray(lo) > np.asarray(hi)):
            raise ValueError("projection box must satisfy lo <= hi")

    def beta1_at(self, t):
        if self.method in ("sgd", "ap_sgd", "adagrad", "rmsprop"):
            return 0.0
        if self.beta1_decay == 1.0:
            return self.beta1
        return self.beta1 * self.beta1_decay ** (t - 1)

    def uses_max(self):
        return self.method in ("amsgrad", "dasgrad")


@dataclass(frozen=True)
class StepRecord:
    """What happened at one step: which indices were drawn and, on metric
    ticks, the full objective there."""

    t: int
    sampled_indices: np.ndarray
    loss_full: float | None = None


def step_size(alpha, t):
    """Decaying schedule alpha / sqrt(t)."""
    if t < 1:
        raise ValueError("t must be at least 1")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return alpha / np.sqrt(t)


def moment_update(state, g, beta1_t, beta2, use_max):
    """One moment recursion step:
    m <- b1 m + (1 - b1) g, v <- b2 v + (1 - b2) g^2, and v_hat keeps the
    coordinatewise max of v when use_max is set (otherwise it tracks v)."""
    g = np.asarray(g, dtype=np.float64)
    if g.shape != state.m.shape:
        raise ValueError("gradient shape %s does not match state %s"
                         % (g.shape, state.m.shape))
    if not (0.0 <= beta1_t < 1.0 and 0.0 <= beta2 < 1.0):
        raise ValueError("beta parameters must lie in [0, 1)")
    state.m = beta1_t * state.m + (1.0 - beta1_t) * g
    state.v = beta2 * state.v + (1.0 - beta2) * (g * g)
    if use_max:
        state.v_hat = np.maximum(state.v_hat, state.v)
    else:
        state.v_hat = state.v.copy()
    state.t += 1


def project_box(theta, lo, hi):
    """Coordinatewise clamp into [lo, hi]. For an axis-aligned box the
    metric-weighted projection separates per coordinate, so one clamp serves
    every positive diagonal metric."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    if np.any(lo > hi):
        raise ValueError("projection box must satisfy lo <= hi")
    return np.clip(theta, lo, hi)


def _batch_gradients(problem, indices, theta):
    """Per-example gradients for the sampled indices, stacked (B, param_dim)."""
    lam = problem.l2_lambda
    if problem.kind == _problems.CENTROID:
        if problem.is_sparse:
            rows = np.asarray(problem.X[indices].todense())
        else:
            rows = problem.X[indices]
        return theta[None, :] - rows

    if problem.is_sparse:
        rows = np.asarray(problem.X[indices].todense())
    else:
        rows = problem.X[indices]

    if problem.kind == _problems.BINARY_LOGISTIC:
        s = 2.0 * problem.y[indices] - 1.0
        z = rows @ theta
        c = -s * expit(-s * z)
        return c[:, None] * rows + lam * theta[None, :]

    W = problem.weights_view(theta)
    Z = rows @ W.T
    Z = Z - Z.max(axis=1, keepdims=True)
    P = np.exp(Z)
    P /= P.sum(axis=1, keepdims=True)
    Q = P
    Q[np.arange(len(indices)), problem.y[indices]] -= 1.0
    G = Q[:, :, None] * rows[:, None, :] + lam * W[None, :, :]
    return G.reshape(len(indices), -1)


def _weights_for(problem, indices, probs, config):
    """Importance weights for the sampled indices.

    Training mode unbiases toward the uniform training mean. Target mode is
    the Radon-Nikodym derivative of the class-matched target distribution:
    (test count of the class / m) is split evenly over the class's training
    examples, so the weighted estimator is unbiased for the target-label
    risk under any sampling distribution.
    """
    if config.method not in _ADAPTIVE_PROBS and config.weight_mode == "training":
        return np.ones(len(indices))
    p = probs[indices]
    if config.weight_mode == "training":
        return _sampling.importance_weight(p, problem.n)
    counts = np.asarray(config.target_label_counts, dtype=np.float64)
    labels = problem.y[indices]
    w = _sampling.target_weight(p, counts[labels], config.target_m)
    return w / problem.class_counts[labels]


def step_general(problem, theta, state, probs, tree, rng, config, t):
    """One step of the general method: sample a batch, advance the moment
    state, average the importance-weighted per-index directions, and
    project. Returns (new_theta, sampled_indices)."""
    indices = tree.sample_many(rng, config.batch_size)
    G = _batch_gradients(problem, indices, theta)
    w = _weights_for(problem, indices, probs, config)

    g_weighted = (w[:, None] * G).mean(axis=0)
    w_mean = w.mean()
    # Training mode feeds the recursion the raw batch mean of the sampled
    # gradients. Target mode feeds the corrected estimate instead: its
    # weights recenter the stream on the target-distribution risk, which is
    # the objective the momentum must track, and the coupling of numerator
    # and denominator keeps early steps bounded when weights differ from
    # one at t = 1. The two coincide bitwise whenever all weights are one.
    if config.weight_mode == "target":
        g_state = g_weighted
    else:
        g_state = G.mean(axis=0)

    method = config.method
    if method in ("sgd", "ap_sgd"):
        direction = g_weighted
        state.t += 1
    elif method == "adagrad":
        state.adagrad_sum = state.adagrad_sum + g_state * g_state
        state.t += 1
        denom = np.sqrt(state.adagrad_sum / t) + config.epsilon_div
        direction = g_weighted / denom
    else:
        beta1_t = config.beta1_at(t)
        m_prev = state.m
        moment_update(state, g_state, beta1_t, config.beta2,
                      config.uses_max())
        denom = np.sqrt(state.v_hat) + config.epsilon_div
        # mean_b w_b (b1 m_prev + (1 - b1) g_b) / denom, without the stack
        direction = (beta1_t * w_mean * m_prev
                     + (1.0 - beta1_t) * g_weighted) / denom

    lo, hi = config.projection
    with np.errstate(over="ignore", invalid="ignore"):
        new_theta = project_box(
            theta - step_size(config.alpha, t) * direction, lo, hi)
    if not np.all(np.isfinite(new_theta)):
        raise DivergenceError(t)
    return new_theta, indices


def refresh_probabilities(problem, theta, state, config, tree):
    """Recompute the sampling distribution from the current scores and push
    it into every tree leaf. Returns the new distribution."""
    if config.method == "ap_sgd":
        scores = _sampling.scores_apsgd(problem, theta)
    elif config.method == "dasgrad":
        blend = config.beta1_at(max(state.t, 1))
        if config.score_mode == "gradient":
            blend = 0.0
        scores = _sampling.scores_dasgrad(problem, theta, state.m,
                                          state.v_hat, blend,
                                          eps_div=config.epsilon_div)
    else:
        raise ValueError("method %r does not adapt probabilities"
                         % (config.method,))
    probs = _sampling.normalize_scores(scores, config.epsilon_prob)
    for i, p in enumerate(probs):
        tree.update(i, p)
    return probs


def _wants_refresh(config, t):
    if config.freeze_probabilities:
        return False
    if config.method == "dasgrad":
        return t % config.refresh_period == 0
    if config.method == "ap_sgd":
        return t == 1 or t % config.refresh_period == 0
    return False


@dataclass
class RunResult:
    """Trace of one run: sampled indices per step and metrics on the tick
    grid. ``accuracy`` is None for centroid problems."""

    records: list
    indices: np.ndarray
    ticks: np.ndarray
    loss: np.ndarray
    accuracy: np.ndarray | None
    grad_norm_var: np.ndarray
    theta: np.ndarray
    seed: int
    vhat_final: np.ndarray | None = None


def run(problem, config, T, seed, metric_tick=10, theta0=None,
        eval_examples=None):
    """Run T steps from theta0 (zeros by default). Deterministic given
    (config, seed). Metrics are recorded whenever t % metric_tick == 0;
    accuracy is computed on eval_examples when given, else on the training
    examples."""
    if T < 1:
        raise ValueError("T must be at least 1")
    rng = np.random.default_rng(seed)
    dim = problem.param_dim
    theta = np.zeros(dim) if theta0 is None else np.array(theta0, dtype=np.float64)
    if theta.shape != (dim,):
        raise ValueError("theta0 has the wrong dimension")
    state = MomentState.zeros(dim)
    probs = np.full(problem.n, 1.0 / problem.n)
    tree = _sampling.SamplingTree(probs)

    classification = problem.kind != _problems.CENTROID
    records = []
    all_indices = np.empty((T, config.batch_size), dtype=np.int64)
    ticks, losses, accs, gvars = [], [], [], []

    for t in range(1, T + 1):
        if _wants_refresh(config, t):
            probs = refresh_probabilities(problem, theta, state, config, tree)
        theta, indices = step_general(problem, theta, state, probs, tree,
                                      rng, config, t)
        all_indices[t - 1] = indices
        loss_here = None
        if t % metric_tick == 0:
            loss_here = _problems.full_objective(problem, theta)
            ticks.append(t)
            losses.append(loss_here)
            gvars.append(_metrics.gradient_norm_variance(problem, theta))
            if classification:
                where = eval_examples if eval_examples is not None \
                    else problem.examples
                accs.append(_metrics.accuracy(problem, theta, where))
        records.append(StepRecord(t, indices, loss_here))

    return RunResult(records=records, indices=all_indices,
                     ticks=np.array(ticks, dtype=np.int64),
                     loss=np.array(losses),
                     accuracy=np.array(accs) if classification else None,
                     grad_norm_var=np.array(gvars), theta=theta, seed=seed,
                     vhat_final=state.v_hat.copy())
