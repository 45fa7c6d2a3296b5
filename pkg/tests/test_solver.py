import numpy as np
import pytest
from helpers import small_instance

from dcvs import (
    SolverConfig,
    backtrack,
    generate_instance,
    kappa_fn_for_loss,
    make_loss,
    mu_schedule,
    rpr_map,
    solve,
    spectral_init,
    surrogate_oracle,
)
from dcvs.solver import SolverError, surrogate_value, write_trace


def test_mu_schedule_values():
    assert mu_schedule(1, 0.5, 3) == pytest.approx(1.0)
    assert mu_schedule(8, 0.5, 3) == pytest.approx(0.5)
    assert mu_schedule(1, 1.0, 1) == pytest.approx(0.5)


def test_mu_schedule_monotone_and_capped():
    vals = [mu_schedule(k, 0.5, 3) for k in range(1, 200)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert max(vals) <= 1.0
    with pytest.raises(ValueError):
        mu_schedule(0, 0.5, 3)
    with pytest.raises(ValueError):
        mu_schedule(2, 0.5, 0.5)


def test_surrogate_oracle_exact_instance():
    inst = generate_instance(5, 20, 0.0, 1.0, noise_variance=0.0, seed=0)
    m = rpr_map(inst.A, inst.b)
    for name in ("l1", "trimmed_l1"):
        loss = make_loss(name, 20, K=5) if name == "trimmed_l1" else make_loss(name, 20)
        val, grad = surrogate_oracle(loss, m, inst.x_star, 0.7)
        assert val == pytest.approx(0.0)
        assert np.allclose(grad, 0.0)


def test_surrogate_oracle_1d_frozen_example():
    m = rpr_map(np.array([[1.0]]), np.array([1.0]))
    val, grad = surrogate_oracle(make_loss("l1", 1), m, np.array([2.0]), 1.0)
    assert val == pytest.approx(2.5)
    assert np.allclose(grad, [4.0])


def test_surrogate_oracle_trimmed_k0_matches_l1():
    inst, m = small_instance(seed=1, d=10, n=40)
    x = np.random.default_rng(3).standard_normal(10)
    v1, g1 = surrogate_oracle(make_loss("l1", 40), m, x, 0.5)
    v2, g2 = surrogate_oracle(make_loss("trimmed_l1", 40, K=0), m, x, 0.5)
    assert v1 == pytest.approx(v2)
    assert np.allclose(g1, g2)


def test_backtrack_immediate_accept():
    # evaluator already satisfying the Armijo test at gamma_init
    gamma, count = backtrack(
        lambda z: 0.0, np.array([1.0]), 1.0, np.array([1.0]), 0.5, 0.8, 1e-4
    )
    assert (gamma, count) == (0.5, 0)


def test_backtrack_frozen_quadratic_example():
    gamma, count = backtrack(
        lambda z: float(z[0] ** 2), np.array([1.0]), 1.0, np.array([2.0]),
        1.0, 0.8, 1e-4,
    )
    assert gamma == pytest.approx(0.8)
    assert count == 1


def test_backtrack_zero_gradient_rejected():
    with pytest.raises(ValueError):
        backtrack(lambda z: 0.0, np.array([1.0]), 1.0, np.array([0.0]), 1.0, 0.8, 1e-4)


def test_backtrack_cap_is_loud():
    with pytest.raises(SolverError):
        backtrack(lambda z: np.inf, np.array([1.0]), 1.0, np.array([1.0]),
                  1.0, 0.8, 1e-4, max_backtracks=20)


def test_backtrack_below_descent_threshold_accepts_first():
    # quadratic with curvature kappa = 2: any gamma_init < 2(1-c)/kappa
    # passes the Armijo test immediately
    c = 1e-6
    for gamma_init in (0.2, 0.5, 0.9):
        gamma, count = backtrack(
            lambda z: float(z @ z), np.array([1.0]), 1.0, np.array([2.0]),
            gamma_init, 0.8, c,
        )
        assert gamma == gamma_init and count == 0


def test_solve_exact_start_terminates_immediately():
    inst = generate_instance(6, 24, 0.0, 1.0, noise_variance=0.0, seed=2)
    m = rpr_map(inst.A, inst.b)
    rec = solve(make_loss("l1", 24), m, inst.x_star, SolverConfig())
    assert rec.termination == "rel_tol"
    assert rec.iterations == 0
    assert np.allclose(rec.x_final, inst.x_star)
    assert rec.grad_norms[0] == 0.0


def test_solve_1d_reaches_minimizer_set():
    # minimizers of |x^2 - 1| are +-1; the first accepted step determines
    # which basin the iterates fall into
    m = rpr_map(np.array([[1.0]]), np.array([1.0]))
    rec = solve(make_loss("l1", 1), m, np.array([2.0]), SolverConfig())
    assert min(abs(rec.x_final[0] - 1.0), abs(rec.x_final[0] + 1.0)) < 1e-3


def test_solve_records_are_consistent():
    inst, m = small_instance(seed=3, d=15, n=75)
    loss = make_loss("capped_l1", 75, beta=20.0)
    cfg = SolverConfig(max_iters=300, time_cap_seconds=None, store_iterates=True)
    rec = solve(loss, m, spectral_init(inst.A, inst.b, 3), cfg)
    steps = rec.iterations
    assert rec.mus.size in (steps, steps + 1)
    assert rec.iterates.shape == (steps + 1, 15)
    assert np.all(rec.backtrack_counts >= 0)
    assert np.allclose(
        rec.gammas, rec.gamma_inits * cfg.rho**rec.backtrack_counts
    )
    running_min = np.minimum.accumulate(rec.grad_norms)
    assert np.all(np.diff(running_min) <= 0.0)
    # warm-started stepsizes never increase
    assert np.all(np.diff(rec.gammas) <= 1e-15)


def test_solve_armijo_holds_post_hoc():
    inst, m = small_instance(seed=4, d=12, n=60)
    loss = make_loss("trimmed_l1", 60, K=15)
    cfg = SolverConfig(max_iters=200, time_cap_seconds=None, store_iterates=True)
    rec = solve(loss, m, spectral_init(inst.A, inst.b, 4), cfg)
    c = cfg.c
    for i in range(rec.iterations):
        lhs = surrogate_value(loss, m, rec.iterates[i + 1], rec.mus[i])
        rhs = (
            rec.surrogate_values[i]
            - c * rec.gammas[i] * rec.grad_norms[i] ** 2
        )
        assert lhs <= rhs + 1e-9 * (1.0 + abs(rhs))


def test_solve_gamma_init_rules():
    inst, m = small_instance(seed=5, d=10, n=50)
    loss = make_loss("l1", 50)
    x1 = spectral_init(inst.A, inst.b, 5)

    const = SolverConfig(gamma_init_rule="constant", gamma_init_value=0.25,
                         max_iters=50, time_cap_seconds=None)
    rec = solve(loss, m, x1, const)
    assert np.all(rec.gamma_inits == 0.25)

    kap = kappa_fn_for_loss(inst.A, inst.b, loss)
    ksafe = SolverConfig(gamma_init_rule="kappa", kappa_fn=kap,
                         max_iters=50, time_cap_seconds=None)
    rec = solve(loss, m, x1, ksafe)
    # the curvature-based initial guess already satisfies the Armijo
    # test, so the line search never shrinks it
    assert np.all(rec.backtrack_counts == 0)
    expected = 2.0 * (1.0 - ksafe.c) / np.array([kap(mu) for mu in rec.mus[: rec.iterations]])
    assert np.allclose(rec.gammas, expected)


def test_solve_gradient_decay_on_clean_instance():
    inst = generate_instance(15, 90, 0.0, 1.0, noise_variance=0.0, seed=6)
    m = rpr_map(inst.A, inst.b)
    cfg = SolverConfig(rel_tol=1e-14, max_iters=2000, time_cap_seconds=None)
    rec = solve(make_loss("l1", 90), m, spectral_init(inst.A, inst.b, 6), cfg)
    assert rec.grad_norms.min() < 1e-3


def test_solve_max_iters_termination():
    inst, m = small_instance(seed=7, d=8, n=40)
    cfg = SolverConfig(rel_tol=0.0, max_iters=5, time_cap_seconds=None)
    rec = solve(make_loss("l1", 40), m, spectral_init(inst.A, inst.b, 7), cfg)
    assert rec.termination == "max_iters"
    assert rec.iterations == 5


def test_solve_time_cap_termination():
    inst, m = small_instance(seed=8, d=20, n=100)
    cfg = SolverConfig(rel_tol=0.0, max_iters=10**6, time_cap_seconds=0.05)
    rec = solve(make_loss("l1", 100), m, spectral_init(inst.A, inst.b, 8), cfg)
    assert rec.termination == "time_cap"


def test_solve_validates_inputs():
    inst, m = small_instance(seed=9, d=5, n=25)
    loss = make_loss("l1", 25)
    with pytest.raises(ValueError):
        solve(loss, m, np.full(5, np.nan), SolverConfig())
    with pytest.raises(ValueError):
        solve(loss, m, np.zeros(4), SolverConfig())
    with pytest.raises(ValueError):
        # schedule starts above the loss smoothing cap
        solve(loss, m, np.zeros(5), SolverConfig(eta=0.25))


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(rho=1.0)
    with pytest.raises(ValueError):
        SolverConfig(c=0.0)
    with pytest.raises(ValueError):
        SolverConfig(alpha=0.5)
    with pytest.raises(ValueError):
        SolverConfig(gamma_init_rule="kappa")


def test_write_trace_round_trip(tmp_path):
    inst, m = small_instance(seed=10, d=6, n=30)
    cfg = SolverConfig(max_iters=20, time_cap_seconds=None)
    rec = solve(make_loss("l1", 30), m, spectral_init(inst.A, inst.b, 10), cfg)
    path = tmp_path / "trace.csv"
    write_trace(rec, path)
    body = path.read_text(encoding="utf-8").strip().split("\n")
    assert body[0] == "k,mu,F_k,grad_norm,gamma,backtracks,true_cost"
    assert len(body) == 1 + rec.iterations
    first = body[1].split(",")
    assert int(first[0]) == 1
    assert float(first[1]) == rec.mus[0]
    assert float(first[4]) == rec.gammas[0]
    assert float(first[6]) == rec.cost_values[0]


def test_mirrored_trajectory_from_negated_start():
    inst, m = small_instance(seed=11, d=10, n=50)
    loss = make_loss("trimmed_l1", 50, K=12)
    x1 = spectral_init(inst.A, inst.b, 11)
    cfg = SolverConfig(max_iters=100, time_cap_seconds=None, store_iterates=True)
    rec_pos = solve(loss, m, x1, cfg)
    rec_neg = solve(loss, m, -x1, cfg)
    assert rec_pos.termination == rec_neg.termination
    assert np.array_equal(rec_pos.iterates, -rec_neg.iterates)
    assert np.array_equal(rec_pos.gammas, rec_neg.gammas)
