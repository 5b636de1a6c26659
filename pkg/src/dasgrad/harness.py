"""Experiment harness: config files, trace/aggregate/comparison CSV
emission, and the desk-scale experiment protocols.

Trace CSV schema (one row per metric tick)::

    step,loss,accuracy,inst_regret,cum_regret,grad_norm_var

``accuracy`` is blank for centroid problems. Floats are written with 17
significant digits so reruns of the same config are byte identical. The
recorded loss includes the L2 regularizer (it is part of every f_i).

Config files are flat ``key = value`` lines with ``#`` comments; each
``[optimizer.<name>]`` section header starts one optimizer block. See
``configs/`` for working examples.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import datasets as _datasets
from . import metrics as _metrics
from . import optimizers as _optimizers
from . import problems as _problems
from . import sampling as _sampling

# footnote presets of the convex experiments
CONVEX_ALPHA = 0.01
CONVEX_BETA1 = 0.9
CONVEX_BETA2 = 0.99
CONVEX_BATCH = 32
CONVEX_REFRESH = 10


def _fmt(x):
    return format(float(x), ".17g")


@dataclass(frozen=True)
class ProblemSpec:
    kind: str
    path: str | None = None
    sparse: bool = False
    n: int = 200
    d: int = 10
    num_classes: int = 2
    sigma: float = 1.0
    margin: float = 4.0
    sparsity: float = 0.0
    data_seed: int = 0
    l2_lambda: float = 0.0

    def build(self):
        if self.path:
            loader = _datasets.load_sparse if self.sparse \
                else _datasets.load_dense_csv
            dataset = loader(self.path)
        elif self.kind == _problems.CENTROID:
            dataset = _datasets.synth_centroid(self.n, self.d, self.sigma,
                                               self.data_seed)
        else:
            dataset = _datasets.synth_classification(
                self.n, self.d, self.num_classes, margin=self.margin,
                sparsity=self.sparsity, seed=self.data_seed)
        return dataset, _datasets.make_problem(dataset, self.kind,
                                               self.l2_lambda)


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemSpec
    optimizers: dict            # name -> OptimizerConfig
    T: int = 500
    seeds: tuple = (0, 1)
    metric_tick: int = 10
    output_dir: str = "out"
    reference_tol: float = 1e-6
    reference_max_iters: int = 2000

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("need at least one seed")
        if not self.optimizers:
            raise ValueError("need at least one optimizer")


def convex_preset(method, **overrides):
    """OptimizerConfig with the convex-experiment hyperparameters."""
    base = dict(method=method, alpha=CONVEX_ALPHA, beta1=CONVEX_BETA1,
                beta2=CONVEX_BETA2, batch_size=CONVEX_BATCH,
                refresh_period=CONVEX_REFRESH)
    base.update(overrides)
    return _optimizers.OptimizerConfig(**base)


# ---------------------------------------------------------------------------
# config file parsing

def parse_config_text(text, base_dir="."):
    """Parse the flat key = value format into an ExperimentConfig."""
    globals_kv = {}
    optimizer_kv = {}
    current = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not (line.startswith("[optimizer.") and line.endswith("]")):
                raise ValueError("line %d: bad section header %r"
                                 % (line_no, line))
            name = line[len("[optimizer."):-1]
            if not name or name in optimizer_kv:
                raise ValueError("line %d: bad or duplicate optimizer name"
                                 % line_no)
            optimizer_kv[name] = {}
            current = name
            continue
        if "=" not in line:
            raise ValueError("line %d: expected key = value" % line_no)
        key, value = (part.strip() for part in line.split("=", 1))
        if current is None:
            globals_kv[key] = value
        else:
            optimizer_kv[current][key] = value

    if not optimizer_kv:
        raise ValueError("config defines no [optimizer.*] section")

    kind = globals_kv.get("kind", _problems.CENTROID)
    path = globals_kv.get("path")
    if path is not None and not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    spec = ProblemSpec(
        kind=kind,
        path=path,
        sparse=_parse_bool(globals_kv.get("sparse", "false")),
        n=int(globals_kv.get("n", 200)),
        d=int(globals_kv.get("d", 10)),
        num_classes=int(globals_kv.get("classes", 2)),
        sigma=float(globals_kv.get("sigma", 1.0)),
        margin=float(globals_kv.get("margin", 4.0)),
        sparsity=float(globals_kv.get("sparsity", 0.0)),
        data_seed=int(globals_kv.get("data_seed", 0)),
        l2_lambda=float(globals_kv.get("lambda", 0.0)),
    )
    seeds = tuple(int(s) for s in globals_kv.get("seeds", "0,1").split(","))
    opts = {}
    for name, kv in optimizer_kv.items():
        opts[name] = _optimizer_from_kv(kv)
    return ExperimentConfig(
        problem=spec, optimizers=opts,
        T=int(globals_kv.get("T", 500)),
        seeds=seeds,
        metric_tick=int(globals_kv.get("metric_tick", 10)),
        output_dir=globals_kv.get("output_dir", "out"),
        reference_tol=float(globals_kv.get("reference_tol", 1e-6)),
        reference_max_iters=int(globals_kv.get("reference_max_iters", 2000)),
    )


def load_config(path):
    with open(path) as fh:
        return parse_config_text(fh.read(), base_dir=os.path.dirname(path) or ".")


def _parse_bool(text):
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ValueError("expected a boolean, got %r" % text)


def _optimizer_from_kv(kv):
    kwargs = dict(method=kv.get("method", "sgd"))
    float_keys = {"alpha": "alpha", "beta1": "beta1", "beta2": "beta2",
                  "epsilon_div": "epsilon_div", "epsilon_prob": "epsilon_prob",
                  "beta1_decay": "beta1_decay"}
    int_keys = {"refresh_period": "refresh_period", "batch_size": "batch_size"}
    for key, attr in float_keys.items():
        if key in kv:
            kwargs[attr] = float(kv[key])
    for key, attr in int_keys.items():
        if key in kv:
            kwargs[attr] = int(kv[key])
    if "weight_mode" in kv:
        kwargs["weight_mode"] = kv["weight_mode"]
    if "score_mode" in kv:
        kwargs["score_mode"] = kv["score_mode"]
    if "freeze_probabilities" in kv:
        kwargs["freeze_probabilities"] = _parse_bool(kv["freeze_probabilities"])
    if "box" in kv:
        lo, hi = (float(v) for v in kv["box"].split(","))
        kwargs["projection"] = (lo, hi)
    return _optimizers.OptimizerConfig(**kwargs)


# ---------------------------------------------------------------------------
# CSV emission

TRACE_HEADER = "step,loss,accuracy,inst_regret,cum_regret,grad_norm_var"


def write_trace_csv(path, result, f_star):
    ledger = _metrics.regret_ledger(result.ticks, result.loss, f_star)
    with open(path, "w") as fh:
        fh.write(TRACE_HEADER + "\n")
        for row, step in enumerate(result.ticks):
            acc = "" if result.accuracy is None \
                else _fmt(result.accuracy[row])
            fh.write(",".join([
                str(int(step)), _fmt(result.loss[row]), acc,
                _fmt(ledger.instantaneous[row]), _fmt(ledger.cumulative[row]),
                _fmt(result.grad_norm_var[row])]) + "\n")


def read_trace_csv(path):
    """Trace rows as a dict of column arrays (accuracy may hold NaN)."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != TRACE_HEADER:
            raise ValueError("unexpected trace header %r in %s"
                             % (header, path))
        cols = {name: [] for name in header.split(",")}
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) != 6:
                raise ValueError("malformed trace row in %s" % path)
            for name, value in zip(cols, parts):
                if name == "step":
                    cols[name].append(int(value))
                else:
                    cols[name].append(float(value) if value else np.nan)
    return {name: np.array(vals) for name, vals in cols.items()}


def _write_aggregate_csv(path, steps, named_aggregates):
    """named_aggregates: list of (metric_name, AggregateTrace or None)."""
    header = ["step"]
    for name, agg in named_aggregates:
        header += ["%s_mean" % name, "%s_ci_low" % name, "%s_ci_high" % name]
    header.append("n_seeds")
    n_seeds = next(agg.n_seeds for _, agg in named_aggregates if agg is not None)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row, step in enumerate(steps):
            fields = [str(int(step))]
            for name, agg in named_aggregates:
                if agg is None:
                    fields += ["", "", ""]
                else:
                    fields += [_fmt(agg.mean[row]), _fmt(agg.ci_low[row]),
                               _fmt(agg.ci_high[row])]
            fields.append(str(n_seeds))
            fh.write(",".join(fields) + "\n")


def run_experiment(config):
    """Execute every (optimizer, seed) run, then write per-seed traces, one
    aggregate CSV per optimizer, a dasgrad-vs-baseline comparison CSV, and a
    metadata file. Returns the in-memory results keyed (name, seed)."""
    dataset, problem = config.problem.build()
    out = config.output_dir
    os.makedirs(out, exist_ok=True)

    if problem.kind == _problems.CENTROID:
        reference = _metrics.solve_reference(problem)
    else:
        reference = _metrics.solve_reference(
            problem, tol=config.reference_tol,
            max_iters=config.reference_max_iters)

    results = {}
    failures = []
    for name, opt in sorted(config.optimizers.items()):
        for seed in config.seeds:
            try:
                result = _optimizers.run(problem, opt, config.T, seed,
                                         metric_tick=config.metric_tick)
            except _optimizers.DivergenceError as exc:
                failures.append((name, seed, exc.step, str(exc)))
                continue
            results[(name, seed)] = result
            write_trace_csv(os.path.join(out, "trace_%s_%d.csv" % (name, seed)),
                            result, reference.f_star)

    per_opt = {}
    for name in sorted(config.optimizers):
        seed_results = [results[(name, s)] for s in config.seeds
                        if (name, s) in results]
        if len(seed_results) < 2:
            continue
        steps = seed_results[0].ticks
        loss_agg = _metrics.aggregate_runs([r.loss for r in seed_results], steps)
        cum_agg = _metrics.aggregate_runs(
            [_metrics.regret_ledger(r.ticks, r.loss, reference.f_star).cumulative
             for r in seed_results], steps)
        acc_agg = None
        if seed_results[0].accuracy is not None:
            acc_agg = _metrics.aggregate_runs(
                [r.accuracy for r in seed_results], steps)
        per_opt[name] = (steps, loss_agg, acc_agg, cum_agg, seed_results)
        _write_aggregate_csv(
            os.path.join(out, "aggregate_%s.csv" % name), steps,
            [("loss", loss_agg), ("accuracy", acc_agg),
             ("cum_regret", cum_agg)])

    if "dasgrad" in per_opt and len(per_opt) > 1:
        _write_comparison_csv(os.path.join(out, "comparison.csv"), per_opt)

    if failures:
        with open(os.path.join(out, "failures.csv"), "w") as fh:
            fh.write("optimizer,seed,step,message\n")
            for name, seed, step, message in failures:
                fh.write("%s,%d,%d,%s\n" % (name, seed, step, message))

    _write_metadata(os.path.join(out, "metadata.txt"), config, dataset,
                    problem, reference)
    return results


def _write_comparison_csv(path, per_opt):
    """Per-tick improvement of dasgrad over each baseline. Loss improvement
    is baseline_mean - dasgrad_mean; accuracy improvement is
    dasgrad_mean - baseline_mean. Paired columns use per-seed differences,
    unpaired columns treat the seed samples as independent."""
    steps, das_loss, das_acc, _, das_runs = per_opt["dasgrad"]
    baselines = [n for n in sorted(per_opt) if n != "dasgrad"]
    header = ["step", "baseline",
              "loss_gain_mean", "loss_gain_paired_lo", "loss_gain_paired_hi",
              "loss_gain_unpaired_lo", "loss_gain_unpaired_hi",
              "acc_gain_mean", "acc_gain_paired_lo", "acc_gain_paired_hi",
              "acc_gain_unpaired_lo", "acc_gain_unpaired_hi"]
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for base in baselines:
            _, base_loss, base_acc, _, base_runs = per_opt[base]
            das_loss_stack = np.vstack([r.loss for r in das_runs])
            base_loss_stack = np.vstack([r.loss for r in base_runs])
            has_acc = das_acc is not None and base_acc is not None
            if has_acc:
                das_acc_stack = np.vstack([r.accuracy for r in das_runs])
                base_acc_stack = np.vstack([r.accuracy for r in base_runs])
            for row, step in enumerate(steps):
                lg, lg_lo, lg_hi = _metrics.paired_ci(base_loss_stack[:, row],
                                                      das_loss_stack[:, row])
                _, lgu_lo, lgu_hi = _metrics.unpaired_ci(
                    base_loss_stack[:, row], das_loss_stack[:, row])
                fields = [str(int(step)), base, _fmt(lg), _fmt(lg_lo),
                          _fmt(lg_hi), _fmt(lgu_lo), _fmt(lgu_hi)]
                if has_acc:
                    ag, ag_lo, ag_hi = _metrics.paired_ci(
                        das_acc_stack[:, row], base_acc_stack[:, row])
                    _, agu_lo, agu_hi = _metrics.unpaired_ci(
                        das_acc_stack[:, row], base_acc_stack[:, row])
                    fields += [_fmt(ag), _fmt(ag_lo), _fmt(ag_hi),
                               _fmt(agu_lo), _fmt(agu_hi)]
                else:
                    fields += ["", "", "", "", ""]
                fh.write(",".join(fields) + "\n")


def _write_metadata(path, config, dataset, problem, reference):
    lines = [
        "provenance = %s" % dataset.provenance,
        "kind = %s" % problem.kind,
        "n = %d" % problem.n,
        "d = %d" % problem.d,
        "classes = %d" % problem.num_classes,
        "lambda = %s" % _fmt(problem.l2_lambda),
        "T = %d" % config.T,
        "seeds = %s" % ",".join(str(s) for s in config.seeds),
        "metric_tick = %d" % config.metric_tick,
        "loss_includes_regularizer = true",
        "reference_f_star = %s" % _fmt(reference.f_star),
        "reference_grad_norm = %s" % _fmt(reference.grad_norm_at_star),
        "reference_converged = %s" % str(reference.converged).lower(),
        "reference_iterations = %d" % reference.solver_iterations,
    ]
    if dataset.provenance.startswith("synth"):
        lines.append("note = synthetic stand-in dataset; real corpora enter "
                     "via the CSV/sparse loaders")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# experiment protocols

# calibrated desk-scale defaults for the centroid variance sweep
SWEEP_DEFAULTS = dict(n=200, d=10, T=500, batch_size=8, alpha=0.01,
                      metric_tick=1, data_seed=11)


def sweep_variance(sigmas, seeds, output_dir, n=None, d=None, T=None,
                   alpha=None, batch_size=None, metric_tick=None,
                   data_seed=None, methods=("amsgrad", "dasgrad")):
    """Centroid variance sweep: for each sigma, run the listed methods over
    the given seeds, write one aggregate CSV of cumulative regret per sigma
    plus a summary CSV of final-regret gaps (first method minus dasgrad,
    paired CI). Returns {sigma: {method: [RunResult per seed]}}."""
    p = dict(SWEEP_DEFAULTS)
    for key, val in dict(n=n, d=d, T=T, alpha=alpha, batch_size=batch_size,
                         metric_tick=metric_tick, data_seed=data_seed).items():
        if val is not None:
            p[key] = val
    if "dasgrad" not in methods or len(methods) < 2:
        raise ValueError("the sweep compares dasgrad against a baseline")
    os.makedirs(output_dir, exist_ok=True)
    baseline = next(m for m in methods if m != "dasgrad")

    all_results = {}
    summary_rows = []
    for sigma in sigmas:
        dataset = _datasets.synth_centroid(p["n"], p["d"], sigma,
                                           p["data_seed"])
        problem = _datasets.make_problem(dataset, _problems.CENTROID)
        reference = _metrics.solve_reference(problem)
        sigma_results = {}
        for method in methods:
            cfg = convex_preset(method, alpha=p["alpha"],
                                batch_size=p["batch_size"])
            sigma_results[method] = [
                _optimizers.run(problem, cfg, p["T"], seed,
                                metric_tick=p["metric_tick"])
                for seed in seeds]
        all_results[sigma] = sigma_results

        steps = sigma_results[methods[0]][0].ticks
        named = []
        finals = {}
        for method in methods:
            cums = [_metrics.regret_ledger(r.ticks, r.loss,
                                           reference.f_star).cumulative
                    for r in sigma_results[method]]
            named.append((method, _metrics.aggregate_runs(cums, steps)))
            finals[method] = np.array([c[-1] for c in cums])
        _write_aggregate_csv(
            os.path.join(output_dir, "sweep_aggregate_sigma%s.csv"
                         % _sigma_tag(sigma)), steps, named)
        gap, gap_lo, gap_hi = _metrics.paired_ci(finals[baseline],
                                                 finals["dasgrad"])
        summary_rows.append((sigma, finals["dasgrad"].mean(),
                             finals[baseline].mean(), gap, gap_lo, gap_hi))

    with open(os.path.join(output_dir, "sweep_summary.csv"), "w") as fh:
        fh.write("sigma,dasgrad_final_mean,%s_final_mean,gap_mean,"
                 "gap_paired_lo,gap_paired_hi\n" % baseline)
        for row in summary_rows:
            fh.write(",".join([_fmt(row[0])] + [_fmt(v) for v in row[1:]])
                     + "\n")
    return all_results


def _sigma_tag(sigma):
    return ("%g" % sigma).replace(".", "p")


# calibrated desk-scale defaults for the distribution-matching experiment
MATCHING_DEFAULTS = dict(n_train=2000, n_eval=800, d=40, num_classes=4,
                         margin=3.0, drop_labels=(1, 3), keep_fraction=0.1,
                         l2_lambda=1e-3, T=2000, alpha=0.01, batch_size=32,
                         metric_tick=20, data_seed=23)


def matching_experiment(seeds, output_dir, **overrides):
    """Distribution-matching protocol: unbalance two classes of a synthetic
    multiclass problem, train DASGrad with target-distribution importance
    weights against a uniform-sampling AMSGrad baseline, and compare
    balanced-test accuracy. Writes per-seed traces and a summary CSV with
    the paired CI of the final accuracy gap."""
    p = dict(MATCHING_DEFAULTS)
    p.update(overrides)
    os.makedirs(output_dir, exist_ok=True)

    total = _datasets.synth_classification(
        p["n_train"] + p["n_eval"], p["d"], p["num_classes"],
        margin=p["margin"], seed=p["data_seed"])
    train = _datasets.Dataset(examples=total.examples[:p["n_train"]],
                              d=total.d, num_classes=total.num_classes,
                              provenance=total.provenance + "|train")
    eval_ds = _datasets.Dataset(examples=total.examples[p["n_train"]:],
                                d=total.d, num_classes=total.num_classes,
                                provenance=total.provenance + "|eval")
    train = _datasets.unbalance(train, p["drop_labels"], p["keep_fraction"],
                                p["data_seed"])
    problem = _datasets.make_problem(train, _problems.MULTICLASS_LOGISTIC,
                                     p["l2_lambda"])
    eval_counts = eval_ds.label_counts()

    arms = {
        "dasgrad_target": convex_preset(
            "dasgrad", alpha=p["alpha"], batch_size=p["batch_size"],
            weight_mode="target", target_label_counts=eval_counts,
            target_m=eval_ds.n),
        "amsgrad_uniform": convex_preset(
            "amsgrad", alpha=p["alpha"], batch_size=p["batch_size"]),
    }

    reference = _metrics.solve_reference(problem, tol=1e-6, max_iters=2000)
    results = {name: [] for name in arms}
    for name, cfg in arms.items():
        for seed in seeds:
            result = _optimizers.run(problem, cfg, p["T"], seed,
                                     metric_tick=p["metric_tick"],
                                     eval_examples=eval_ds.examples)
            results[name].append(result)
            write_trace_csv(os.path.join(
                output_dir, "matching_trace_%s_%d.csv" % (name, seed)),
                result, reference.f_star)

    final_acc = {name: np.array([r.accuracy[-1] for r in results[name]])
                 for name in arms}
    gap, gap_lo, gap_hi = _metrics.paired_ci(final_acc["dasgrad_target"],
                                             final_acc["amsgrad_uniform"])
    with open(os.path.join(output_dir, "matching_summary.csv"), "w") as fh:
        fh.write("arm,final_balanced_accuracy_mean\n")
        for name in sorted(arms):
            fh.write("%s,%s\n" % (name, _fmt(final_acc[name].mean())))
        fh.write("accuracy_gap_mean,%s\n" % _fmt(gap))
        fh.write("accuracy_gap_paired_lo,%s\n" % _fmt(gap_lo))
        fh.write("accuracy_gap_paired_hi,%s\n" % _fmt(gap_hi))
    return results, (gap, gap_lo, gap_hi)


# ---------------------------------------------------------------------------
# self verification

def self_check(verbose=True):
    """Fast internal consistency suite: gradient checks, the sampler law,
    and the importance-sampling identities. Returns True when every check
    passes."""
    checks = []

    rng = np.random.default_rng(404)
    ok = True
    for kind in _problems.KINDS:
        worst = 0.0
        for _ in range(20):
            problem, theta = _random_instance(kind, rng)
            worst = max(worst,
                        _problems.finite_difference_check(problem, theta, 1e-6))
        ok &= worst < 1e-5
        checks.append(("gradient/%s (max rel err %.2e)" % (kind, worst),
                       worst < 1e-5))

    weights = 0.1 + np.random.default_rng(7).random(1000)
    tree = _sampling.SamplingTree(weights)
    draws = tree.sample_many(np.random.default_rng(7), 200_000)
    freq = np.bincount(draws, minlength=1000) / 200_000
    p = weights / weights.sum()
    bound = 4.0 * np.sqrt(p * (1 - p) / 200_000)
    sampler_ok = bool(np.all(np.abs(freq - p) <= bound))
    checks.append(("sampler law (200k draws, 4 sigma)", sampler_ok))

    upd_rng = np.random.default_rng(8)
    for _ in range(2000):
        tree.update(int(upd_rng.integers(0, 1000)),
                    0.1 + upd_rng.random())
    sums_ok = _tree_sums_consistent(tree)
    checks.append(("tree sum invariant after updates", sums_ok))

    id_rng = np.random.default_rng(9)
    ident_ok = True
    for _ in range(50):
        n = int(id_rng.integers(2, 50))
        probs = _sampling.normalize_scores(id_rng.random(n), 1e-3)
        g = id_rng.standard_normal((n, 3))
        w = _sampling.importance_weight(probs, n)
        lhs = (probs[:, None] * w[:, None] * g).sum(axis=0)
        ident_ok &= bool(np.all(np.abs(lhs - g.mean(axis=0)) < 1e-12))
    checks.append(("unbiasedness identity", ident_ok))

    lm_rng = np.random.default_rng(10)
    lemma_ok = True
    for _ in range(20):
        norms = 0.05 + lm_rng.random(50)
        p_star = _sampling.normalize_scores(norms, 1e-12)
        val = _sampling.expected_weighted_second_moment(p_star, norms)
        target = norms.mean() ** 2
        lemma_ok &= abs(val - target) <= 1e-10 * target
        identity = (norms**2).mean() - np.var(norms)
        lemma_ok &= abs(val - identity) <= 1e-9 * identity
    checks.append(("weighted-second-moment minimum identity", lemma_ok))

    all_ok = all(passed for _, passed in checks)
    if verbose:
        for label, passed in checks:
            print("%s %s" % ("PASS" if passed else "FAIL", label))
        print("self-check %s" % ("OK" if all_ok else "FAILED"))
    return all_ok


def _tree_sums_consistent(tree, rel=1e-9):
    nodes = tree.nodes
    for idx in range(1, tree.capacity):
        child_sum = nodes[2 * idx] + nodes[2 * idx + 1]
        if abs(nodes[idx] - child_sum) > rel * max(1e-300, abs(child_sum)):
            return False
    return True


def _random_instance(kind, rng):
    n = int(rng.integers(3, 10))
    d = int(rng.integers(2, 6))
    if kind == _problems.CENTROID:
        examples = [_problems.Example(rng.standard_normal(d), 0)
                    for _ in range(n)]
        problem = _problems.Problem(examples, kind)
    elif kind == _problems.BINARY_LOGISTIC:
        examples = [_problems.Example(rng.standard_normal(d),
                                      int(rng.integers(0, 2)))
                    for _ in range(n)]
        problem = _problems.Problem(examples, kind, l2_lambda=0.1)
    else:
        k = int(rng.integers(3, 5))
        examples = [_problems.Example(rng.standard_normal(d),
                                      int(rng.integers(0, k)))
                    for _ in range(n)]
        problem = _problems.Problem(examples, kind, l2_lambda=0.1,
                                    num_classes=k)
    theta = rng.standard_normal(problem.param_dim)
    return problem, theta
