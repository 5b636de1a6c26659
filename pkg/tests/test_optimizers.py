import numpy as np
import pytest

from dasgrad import metrics as M
from dasgrad import optimizers as O
from dasgrad import problems as P
from dasgrad import sampling as S


def centroid_problem(points):
    return P.Problem([P.Example(np.asarray(x, dtype=float), 0)
                      for x in points], P.CENTROID)


def multiclass_problem(rng, n=30, d=4, k=3, lam=0.01):
    ex = [P.Example(rng.standard_normal(d), int(rng.integers(0, k)))
          for _ in range(n)]
    return P.Problem(ex, P.MULTICLASS_LOGISTIC, l2_lambda=lam, num_classes=k)


class TestStepSize:
    @pytest.mark.parametrize("alpha,t,expected",
                             [(0.5, 1, 0.5), (0.5, 4, 0.25), (0.01, 100, 0.001)])
    def test_schedule(self, alpha, t, expected):
        assert O.step_size(alpha, t) == pytest.approx(expected, rel=1e-15)

    def test_alpha_sqrt_t_constant(self):
        for t in range(1, 2000, 37):
            assert abs(O.step_size(0.3, t) * np.sqrt(t) - 0.3) < 1e-15

    def test_rejects_t_zero(self):
        with pytest.raises(ValueError):
            O.step_size(0.1, 0)


class TestMomentUpdate:
    def test_hand_recursion(self):
        state = O.MomentState.zeros(1)
        O.moment_update(state, np.array([1.0]), 0.0, 0.9, use_max=True)
        np.testing.assert_allclose(state.m, [1.0])
        np.testing.assert_allclose(state.v, [0.1])
        np.testing.assert_allclose(state.v_hat, [0.1])
        # zero gradient: v decays but v_hat keeps the max
        O.moment_update(state, np.array([0.0]), 0.0, 0.9, use_max=True)
        np.testing.assert_allclose(state.v, [0.09])
        np.testing.assert_allclose(state.v_hat, [0.1])
        assert state.t == 2

    def test_memoryless_case(self):
        state = O.MomentState.zeros(2)
        g = np.array([2.0, -3.0])
        O.moment_update(state, g, 0.0, 0.0, use_max=False)
        np.testing.assert_allclose(state.m, g)
        np.testing.assert_allclose(state.v, g * g)

    def test_dimension_mismatch(self):
        state = O.MomentState.zeros(2)
        with pytest.raises(ValueError):
            O.moment_update(state, np.zeros(3), 0.9, 0.99, True)


class TestProjection:
    def test_identity_inside(self):
        theta = np.array([0.2, -0.7])
        out = O.project_box(theta, -1.0, 1.0)
        np.testing.assert_array_equal(out, theta)

    def test_clamp(self):
        out = O.project_box(np.array([5.0, -5.0]), -1.0, 1.0)
        np.testing.assert_array_equal(out, [1.0, -1.0])

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        theta = rng.standard_normal(10) * 3
        once = O.project_box(theta, -1.0, 1.0)
        twice = O.project_box(once, -1.0, 1.0)
        assert np.array_equal(once, twice)

    def test_weighted_nonexpansive(self):
        # ||M^(1/2)(Pi(a) - Pi(b))|| <= ||M^(1/2)(a - b)|| for diagonal M > 0
        rng = np.random.default_rng(1)
        for _ in range(500):
            d = 6
            lo, hi = -1.0, 1.0
            a = rng.standard_normal(d) * 2
            b = rng.standard_normal(d) * 2
            m_diag = rng.random(d) + 1e-3
            pa, pb = O.project_box(a, lo, hi), O.project_box(b, lo, hi)
            lhs = np.linalg.norm(np.sqrt(m_diag) * (pa - pb))
            rhs = np.linalg.norm(np.sqrt(m_diag) * (a - b))
            assert lhs <= rhs + 1e-12

    def test_rejects_inverted_box(self):
        with pytest.raises(ValueError):
            O.project_box(np.zeros(2), np.array([1.0, 0.0]),
                          np.array([0.0, 1.0]))


class TestStepGeneral:
    def test_one_step_hand_computation(self):
        # sgd, alpha=1, t=1, forced draw of example 1: theta' = 0 - (0 - 4) = 4
        prob = centroid_problem([[0.0], [4.0]])
        cfg = O.OptimizerConfig(method="sgd", alpha=1.0, batch_size=1)
        tree = S.SamplingTree([0.0, 1.0])  # all mass on index 1
        probs = np.array([0.5, 0.5])
        state = O.MomentState.zeros(1)
        theta, idx = O.step_general(prob, np.zeros(1), state, probs, tree,
                                    np.random.default_rng(0), cfg, t=1)
        assert idx.tolist() == [1]
        np.testing.assert_allclose(theta, [4.0])

    def test_unbiased_direction_training_weights(self):
        rng = np.random.default_rng(2)
        prob = multiclass_problem(rng)
        theta = rng.standard_normal(prob.param_dim)
        probs = S.normalize_scores(rng.random(prob.n), 1e-3)
        w = S.importance_weight(probs, prob.n)
        est = np.zeros(prob.param_dim)
        for i in range(prob.n):
            est += probs[i] * w[i] * P.example_gradient(prob, i, theta)
        np.testing.assert_allclose(est, P.full_gradient(prob, theta),
                                   atol=1e-12)

    def test_unbiased_direction_target_weights(self):
        # engine target weights: ((c_k / m) / n_k) / p -> expectation is the
        # class-share weighted mean of class-mean gradients
        rng = np.random.default_rng(3)
        prob = multiclass_problem(rng, n=24, k=3)
        counts = np.array([10, 30, 20])
        m = counts.sum()
        cfg = O.OptimizerConfig(method="dasgrad", weight_mode="target",
                                target_label_counts=counts, target_m=int(m))
        theta = rng.standard_normal(prob.param_dim)
        probs = S.normalize_scores(rng.random(prob.n), 1e-3)
        est = np.zeros(prob.param_dim)
        for i in range(prob.n):
            w = O._weights_for(prob, np.array([i]), probs, cfg)[0]
            est += probs[i] * w * P.example_gradient(prob, i, theta)
        target = np.zeros(prob.param_dim)
        for k in range(3):
            members = np.flatnonzero(prob.y == k)
            class_mean = np.mean([P.example_gradient(prob, i, theta)
                                  for i in members], axis=0)
            target += (counts[k] / m) * class_mean
        np.testing.assert_allclose(est, target, atol=1e-12)

    def test_divergence_detected(self):
        prob = centroid_problem([[1.0], [3.0]])
        cfg = O.OptimizerConfig(method="sgd", alpha=1e200, batch_size=1,
                                projection=(-np.inf, np.inf))
        with pytest.raises(O.DivergenceError) as err:
            O.run(prob, cfg, T=10, seed=0, metric_tick=100)
        assert err.value.step >= 1


class TestConfigValidation:
    def test_gamma_guard(self):
        with pytest.raises(ValueError):
            O.OptimizerConfig(method="amsgrad", beta1=0.99, beta2=0.5)
        # fine for sgd, which has no moment recursion
        O.OptimizerConfig(method="sgd", beta1=0.99, beta2=0.5)

    def test_target_mode_needs_counts(self):
        with pytest.raises(ValueError):
            O.OptimizerConfig(method="dasgrad", weight_mode="target")

    def test_bad_method(self):
        with pytest.raises(ValueError):
            O.OptimizerConfig(method="adamw")


class TestCollapseEquivalences:
    def test_dasgrad_frozen_uniform_equals_amsgrad(self):
        rng = np.random.default_rng(4)
        prob = multiclass_problem(rng, n=20)
        kw = dict(alpha=0.05, beta1=0.9, beta2=0.99, batch_size=4)
        das = O.OptimizerConfig(method="dasgrad", freeze_probabilities=True,
                                **kw)
        ams = O.OptimizerConfig(method="amsgrad", **kw)
        r1 = O.run(prob, das, T=100, seed=7, metric_tick=1)
        r2 = O.run(prob, ams, T=100, seed=7, metric_tick=1)
        assert np.array_equal(r1.indices, r2.indices)
        assert np.array_equal(r1.theta, r2.theta)
        assert np.array_equal(r1.loss, r2.loss)

    def test_apsgd_frozen_uniform_equals_sgd(self):
        rng = np.random.default_rng(5)
        prob = multiclass_problem(rng, n=20)
        kw = dict(alpha=0.05, batch_size=4)
        ap = O.OptimizerConfig(method="ap_sgd", freeze_probabilities=True, **kw)
        sgd = O.OptimizerConfig(method="sgd", **kw)
        r1 = O.run(prob, ap, T=100, seed=3, metric_tick=1)
        r2 = O.run(prob, sgd, T=100, seed=3, metric_tick=1)
        assert np.array_equal(r1.theta, r2.theta)
        assert np.array_equal(r1.loss, r2.loss)

    def test_rmsprop_equals_adam_beta1_zero(self):
        rng = np.random.default_rng(6)
        prob = multiclass_problem(rng, n=20)
        rms = O.OptimizerConfig(method="rmsprop", alpha=0.05, beta1=0.5,
                                beta2=0.9, batch_size=4)
        adam = O.OptimizerConfig(method="adam", alpha=0.05, beta1=0.0,
                                 beta2=0.9, batch_size=4)
        r1 = O.run(prob, rms, T=80, seed=1, metric_tick=1)
        r2 = O.run(prob, adam, T=80, seed=1, metric_tick=1)
        assert np.array_equal(r1.theta, r2.theta)

    def test_adam_equals_amsgrad_while_v_nondecreasing(self):
        # single example, tiny step: the gradient is deterministic and
        # barely moves, so v rises monotonically from zero and the max()
        # in amsgrad never binds
        prob = centroid_problem([[2.0, -1.0]])
        kw = dict(alpha=1e-4, beta1=0.9, beta2=0.99, batch_size=1)
        adam = O.OptimizerConfig(method="adam", **kw)
        ams = O.OptimizerConfig(method="amsgrad", **kw)
        state = O.MomentState.zeros(2)
        probs = np.array([1.0])
        tree = S.SamplingTree(probs)
        rng = np.random.default_rng(11)
        theta = np.zeros(2)
        prev_v = np.zeros(2)
        for t in range(1, 61):
            theta, _ = O.step_general(prob, theta, state, probs, tree, rng,
                                      adam, t)
            assert np.all(state.v >= prev_v), \
                "test premise: v must rise along this run"
            prev_v = state.v.copy()
        r1 = O.run(prob, adam, T=60, seed=11, metric_tick=1)
        r2 = O.run(prob, ams, T=60, seed=11, metric_tick=1)
        assert np.array_equal(r1.theta, r2.theta)


class TestRefresh:
    def test_equal_scores_give_uniform(self):
        prob = centroid_problem([[1.0], [3.0]])
        # theta = 2 is equidistant from both examples
        cfg = O.OptimizerConfig(method="ap_sgd")
        tree = S.SamplingTree(np.full(2, 0.5))
        state = O.MomentState.zeros(1)
        probs = O.refresh_probabilities(prob, np.array([2.0]), state, cfg, tree)
        assert probs[0] == probs[1]
        np.testing.assert_allclose(tree.leaves(), probs)

    def test_dominant_example_gets_proportional_mass(self):
        prob = centroid_problem([[1.0], [10.0]])
        cfg = O.OptimizerConfig(method="ap_sgd", epsilon_prob=1e-12)
        tree = S.SamplingTree(np.full(2, 0.5))
        state = O.MomentState.zeros(1)
        probs = O.refresh_probabilities(prob, np.array([0.0]), state, cfg, tree)
        assert probs[1] / probs[0] == pytest.approx(10.0, rel=1e-9)

    def test_tree_root_is_one_and_sampling_matches(self):
        rng = np.random.default_rng(7)
        prob = centroid_problem(rng.standard_normal((50, 3)))
        cfg = O.OptimizerConfig(method="ap_sgd")
        tree = S.SamplingTree(np.full(50, 1.0 / 50))
        state = O.MomentState.zeros(3)
        probs = O.refresh_probabilities(prob, rng.standard_normal(3), state,
                                        cfg, tree)
        assert abs(tree.total - 1.0) <= 1e-9
        draws = tree.sample_many(np.random.default_rng(8), 100_000)
        freq = np.bincount(draws, minlength=50) / 100_000
        bound = 4 * np.sqrt(probs * (1 - probs) / 100_000)
        assert np.all(np.abs(freq - probs) <= bound)

    def test_schedule(self):
        rng = np.random.default_rng(9)
        prob = centroid_problem(rng.standard_normal((10, 2)))
        cfg = O.OptimizerConfig(method="dasgrad", refresh_period=5,
                                batch_size=1)
        assert not O._wants_refresh(cfg, 1)
        assert O._wants_refresh(cfg, 5)
        ap = O.OptimizerConfig(method="ap_sgd", refresh_period=5)
        assert O._wants_refresh(ap, 1)
        assert O._wants_refresh(ap, 5)
        assert not O._wants_refresh(ap, 3)
        frozen = O.OptimizerConfig(method="dasgrad", refresh_period=5,
                                   freeze_probabilities=True)
        assert not O._wants_refresh(frozen, 5)


class TestRun:
    def test_single_step_equals_step_general(self):
        rng = np.random.default_rng(10)
        prob = multiclass_problem(rng, n=10)
        cfg = O.OptimizerConfig(method="amsgrad", batch_size=3)
        result = O.run(prob, cfg, T=1, seed=5, metric_tick=1)
        state = O.MomentState.zeros(prob.param_dim)
        probs = np.full(prob.n, 1.0 / prob.n)
        tree = S.SamplingTree(probs)
        theta, idx = O.step_general(prob, np.zeros(prob.param_dim), state,
                                    probs, tree, np.random.default_rng(5),
                                    cfg, 1)
        assert np.array_equal(result.theta, theta)
        assert np.array_equal(result.indices[0], idx)

    def test_identical_seeds_identical_traces(self):
        rng = np.random.default_rng(11)
        prob = multiclass_problem(rng, n=15)
        cfg = O.OptimizerConfig(method="dasgrad", batch_size=4,
                                refresh_period=3)
        r1 = O.run(prob, cfg, T=60, seed=42, metric_tick=5)
        r2 = O.run(prob, cfg, T=60, seed=42, metric_tick=5)
        assert np.array_equal(r1.indices, r2.indices)
        assert np.array_equal(r1.theta, r2.theta)
        assert np.array_equal(r1.loss, r2.loss)

    def test_centroid_sgd_converges(self):
        rng = np.random.default_rng(12)
        prob = centroid_problem(rng.standard_normal((40, 3)))
        cfg = O.OptimizerConfig(method="sgd", alpha=0.3, batch_size=8)
        result = O.run(prob, cfg, T=3000, seed=0, metric_tick=3000)
        reference = M.solve_reference(prob)
        assert result.loss[-1] - reference.f_star < 1e-3

    def test_vhat_monotone_along_run(self):
        rng = np.random.default_rng(13)
        prob = centroid_problem(rng.standard_normal((8, 3)))
        cfg = O.OptimizerConfig(method="amsgrad", alpha=0.2, batch_size=2)
        state = O.MomentState.zeros(3)
        probs = np.full(8, 1.0 / 8)
        tree = S.SamplingTree(probs)
        gen = np.random.default_rng(1)
        theta = np.zeros(3)
        prev = np.zeros(3)
        for t in range(1, 501):
            theta, _ = O.step_general(prob, theta, state, probs, tree, gen,
                                      cfg, t)
            assert np.all(state.v_hat >= prev)
            prev = state.v_hat.copy()
