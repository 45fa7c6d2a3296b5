"""A small success-rate sweep across outlier fractions.

Runs 10 seeded trials per cell for three losses over increasing outlier
fractions, prints the success-rate table, and writes the summary /
per-trial / heatmap CSVs to sweep_out/.  Identical seeds give identical
results whatever the worker count.
"""

from dcvs.bench import SweepConfig, emit_outputs, run_sweep
from dcvs.solver import SolverConfig

config = SweepConfig(
    d=50,
    n_over_d=[10],
    p_fail=[0.0, 0.2, 0.4],
    s=[1.0],
    losses=[
        {"name": "l1"},
        {"name": "capped_l1", "beta": 1000},
        {"name": "trimmed_l1", "K_over_n": 0.4},
    ],
    trials=10,
    base_seed=0,
    solver=SolverConfig(time_cap_seconds=None),
)

result = run_sweep(config, workers=2)
written = emit_outputs(result, "sweep_out")

print("success rates (10 trials per cell, d=50, n=500, Cauchy outliers):")
print(f"  {'p_fail':>8s} {'l1':>10s} {'capped':>10s} {'trimmed':>10s}")
for p_fail in config.p_fail:
    rates = [
        row["success_rate"]
        for row in result.summary_rows
        if row["p_fail"] == p_fail
    ]
    print(f"  {p_fail:8.2f} " + " ".join(f"{r:10.2f}" for r in rates))

print()
for path in written:
    print(f"wrote {path}")
