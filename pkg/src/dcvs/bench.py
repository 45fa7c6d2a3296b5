"""Success-rate sweeps over synthetic phase retrieval grids.

A sweep runs ``trials`` seeded instances for every grid cell
``(n/d, p_fail, s)`` and every configured loss, records per-trial
outcomes, and aggregates success rates, errors, iteration counts and
timings per cell.  The per-trial seed is ``base_seed + trial``, so
outcomes depend only on the cell parameters, the trial index, and the
base seed — never on grid order or on how many workers executed the
trials.  Within a trial the spectral initial point is shared by all
losses.
"""

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from .losses import make_loss
from .maps import rpr_map
from .retrieval import generate_instance, spectral_init, success
from .solver import SolverConfig, SolverError, solve

__all__ = (
    "SweepConfig",
    "SweepResult",
    "loss_from_spec",
    "loss_label",
    "run_sweep",
    "emit_outputs",
    "sweep_config_from_dict",
)

SUMMARY_COLUMNS = (
    "d", "n", "n_over_d", "p_fail", "s", "loss", "params",
    "success_rate", "mean_rel_err", "mean_seconds", "mean_iters",
)
TRIAL_COLUMNS = (
    "d", "n", "n_over_d", "p_fail", "s", "loss", "params", "trial", "seed",
    "rel_error", "success", "iterations", "termination", "seconds", "error",
)


@dataclass
class SweepConfig:
    """Grid, loss list, and solver settings for one sweep."""

    d: int
    n_over_d: list
    p_fail: list
    s: list
    losses: list
    trials: int = 50
    base_seed: int = 0
    outlier_kind: str = "cauchy"
    noise_variance: float = 1e-6
    solver: SolverConfig = field(default_factory=SolverConfig)
    output_dir: Optional[str] = None

    def __post_init__(self):
        if not (self.n_over_d and self.p_fail and self.s and self.losses):
            raise ValueError("all grids and the loss list must be nonempty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for spec in self.losses:
            # dry-build against a representative n so a bad loss entry
            # fails at config time, not mid-sweep
            loss_from_spec(spec, max(self.d * max(self.n_over_d), 2))

    def cells(self):
        """Canonical cell order: n_over_d outer, then p_fail, then s."""
        return list(product(self.n_over_d, self.p_fail, self.s))


@dataclass
class SweepResult:
    config: SweepConfig
    trial_rows: list   # dicts keyed by TRIAL_COLUMNS plus cell/loss indices
    summary_rows: list  # dicts keyed by SUMMARY_COLUMNS, cell-major order


def loss_from_spec(spec, n):
    """Build a catalog loss from a config dict like
    ``{"name": "trimmed_l1", "K_over_n": 0.4}``.

    MCP takes ``lambda`` and ``beta``; capped l1 takes ``beta``; trimmed
    l1 takes ``K_over_n`` which is rounded to a count per cell.
    """
    try:
        name = spec["name"]
        if name == "trimmed_l1":
            K = int(round(float(spec.get("K_over_n", 0.0)) * n))
            return make_loss(name, n, K=K)
        if name == "mcp":
            return make_loss(name, n, lam=float(spec.get("lambda", 1.0)),
                             beta=float(spec["beta"]))
        if name == "capped_l1":
            return make_loss(name, n, beta=float(spec["beta"]))
        return make_loss(name, n)
    except KeyError as err:
        raise ValueError(f"loss spec {spec!r} is missing {err}") from None


def loss_label(spec):
    """Short deterministic label for file names and CSV rows."""
    name = spec["name"]
    if name == "mcp":
        return f"mcp_lam{float(spec.get('lambda', 1.0)):g}_beta{float(spec['beta']):g}"
    if name == "capped_l1":
        return f"capped_l1_beta{float(spec['beta']):g}"
    if name == "trimmed_l1":
        return f"trimmed_l1_Kn{float(spec.get('K_over_n', 0.0)):g}"
    return name


def _params_json(spec):
    return json.dumps({k: v for k, v in sorted(spec.items()) if k != "name"})


def _run_trial(args):
    """One (cell, trial) work item: a fresh instance, a shared initial
    point, one solve per loss.  Returns plain-dict rows (picklable)."""
    (cell_idx, nd, p_fail, s_val, trial, cfg_dict) = args
    cfg = cfg_dict
    d = cfg["d"]
    n = d * nd
    seed = cfg["base_seed"] + trial
    inst = generate_instance(
        d, n, p_fail, s_val,
        outlier_kind=cfg["outlier_kind"],
        noise_variance=cfg["noise_variance"],
        seed=seed,
    )
    x1 = spectral_init(inst.A, inst.b, seed)
    smooth_map = rpr_map(inst.A, inst.b)
    rows = []
    for loss_idx, spec in enumerate(cfg["losses"]):
        loss = loss_from_spec(spec, n)
        base = {
            "cell_idx": cell_idx, "loss_idx": loss_idx,
            "d": d, "n": n, "n_over_d": nd, "p_fail": p_fail, "s": s_val,
            "loss": loss_label(spec), "params": _params_json(spec),
            "trial": trial, "seed": seed,
        }
        try:
            record = solve(loss, smooth_map, x1, cfg["solver"])
            rel, ok = success(record.x_final, inst.x_star)
            base.update(
                rel_error=rel, success=int(ok),
                iterations=record.iterations,
                termination=record.termination,
                seconds=record.wall_seconds, error="",
            )
        except SolverError as err:
            base.update(
                rel_error=float("inf"), success=0, iterations=0,
                termination="error", seconds=0.0, error=str(err),
            )
        rows.append(base)
    return rows


def resolve_workers(workers=None):
    """Worker count: the DCVS_WORKERS environment variable overrides any
    requested value; the fallback is serial execution."""
    env = os.environ.get("DCVS_WORKERS")
    if env is not None:
        return max(1, int(env))
    return max(1, int(workers)) if workers else 1


def run_sweep(config, workers=None):
    """Execute the whole grid and aggregate per (cell, loss).

    Deterministic for a fixed ``base_seed`` whatever the worker count:
    trial seeds are scheduling-independent and rows are sorted before
    aggregation.  A solver failure is recorded on its trial row, counts
    as an unsuccessful trial, and never aborts the sweep.
    """
    workers = resolve_workers(workers)
    if workers > 1 and config.solver.kappa_fn is not None:
        raise ValueError("kappa_fn closures cannot cross process boundaries; "
                         "run with workers=1")
    cfg_dict = {
        "d": config.d,
        "base_seed": config.base_seed,
        "outlier_kind": config.outlier_kind,
        "noise_variance": config.noise_variance,
        "losses": config.losses,
        "solver": config.solver,
    }
    items = [
        (cell_idx, nd, p_fail, s_val, trial, cfg_dict)
        for cell_idx, (nd, p_fail, s_val) in enumerate(config.cells())
        for trial in range(config.trials)
    ]
    if workers == 1:
        chunks = map(_run_trial, items)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_trial, items, chunksize=1))
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r["cell_idx"], r["loss_idx"], r["trial"]))

    summary = []
    for cell_idx, (nd, p_fail, s_val) in enumerate(config.cells()):
        for loss_idx, spec in enumerate(config.losses):
            group = [
                r for r in rows
                if r["cell_idx"] == cell_idx and r["loss_idx"] == loss_idx
            ]
            trials = len(group)
            successes = sum(r["success"] for r in group)
            rel = [r["rel_error"] for r in group]
            summary.append({
                "d": config.d, "n": config.d * nd, "n_over_d": nd,
                "p_fail": p_fail, "s": s_val,
                "loss": loss_label(spec), "params": _params_json(spec),
                "success_rate": successes / trials,
                "mean_rel_err": sum(rel) / trials,
                "median_rel_err": float(np.median(rel)),
                "mean_seconds": sum(r["seconds"] for r in group) / trials,
                "mean_iters": sum(r["iterations"] for r in group) / trials,
                "cell_idx": cell_idx, "loss_idx": loss_idx,
            })
    return SweepResult(config=config, trial_rows=rows, summary_rows=summary)


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(row[col]) for col in header))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_outputs(result, out_dir):
    """Write summary.csv, trials.csv, and one success-rate matrix per
    loss (and per outlier scale when several are swept).

    Heatmap files hold p_fail rows against n_over_d columns with an axis
    header row and column.  Returns the list of written paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []

    path = os.path.join(out_dir, "summary.csv")
    _write_csv(path, SUMMARY_COLUMNS, result.summary_rows)
    written.append(path)

    path = os.path.join(out_dir, "trials.csv")
    _write_csv(path, TRIAL_COLUMNS, result.trial_rows)
    written.append(path)

    config = result.config
    by_key = {
        (row["loss"], row["s"], row["p_fail"], row["n_over_d"]): row["success_rate"]
        for row in result.summary_rows
    }
    single_s = len(config.s) == 1
    for spec in config.losses:
        label = loss_label(spec)
        for s_val in config.s:
            name = f"heatmap_{label}.csv" if single_s else f"heatmap_{label}_s{s_val:g}.csv"
            path = os.path.join(out_dir, name)
            lines = ["p_fail\\n_over_d," + ",".join(str(nd) for nd in config.n_over_d)]
            if result.summary_rows:
                for p_fail in config.p_fail:
                    cells = [
                        _fmt(by_key[(label, s_val, p_fail, nd)])
                        for nd in config.n_over_d
                    ]
                    lines.append(_fmt(p_fail) + "," + ",".join(cells))
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("\n".join(lines) + "\n")
            written.append(path)
    return written


def sweep_config_from_dict(raw):
    """Build a :class:`SweepConfig` from parsed JSON, filling benchmark
    defaults for anything omitted."""
    solver_raw = dict(raw.get("solver", {}))
    solver = SolverConfig(
        alpha=solver_raw.get("alpha", 3.0),
        eta=solver_raw.get("eta", 0.5),
        rho=solver_raw.get("rho", 0.8),
        c=solver_raw.get("c", 1e-4),
        rel_tol=solver_raw.get("rel_tol", 1e-7),
        max_iters=solver_raw.get("max_iters", 10000),
        time_cap_seconds=solver_raw.get("time_cap_seconds", 30.0),
    )
    return SweepConfig(
        d=int(raw["d"]),
        n_over_d=[int(v) for v in raw["n_over_d"]],
        p_fail=[float(v) for v in raw["p_fail"]],
        s=[float(v) for v in raw.get("s", [1.0])],
        losses=list(raw["losses"]),
        trials=int(raw.get("trials", 50)),
        base_seed=int(raw.get("base_seed", 0)),
        outlier_kind=raw.get("outlier_kind", "cauchy"),
        noise_variance=float(raw.get("noise_variance", 1e-6)),
        solver=solver,
        output_dir=raw.get("output_dir"),
    )
