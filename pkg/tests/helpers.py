"""Shared fixtures-in-code for the test suite: loss catalogs, random
instances, and breakpoint-distance predicates for finite-difference
checks."""

import numpy as np

from dcvs import generate_instance, make_loss, rpr_map
from dcvs.prox import _clip_threshold


def catalog_losses(n):
    """One representative loss per catalog family, sized for residual
    dimension n."""
    return [
        make_loss("l1", n),
        make_loss("mcp", n, lam=1.0, beta=2.0),
        make_loss("capped_l1", n, beta=1.5),
        make_loss("trimmed_l1", n, K=max(1, int(0.3 * n)) if n > 1 else 0),
    ]


def small_instance(seed, d=20, n=100, p_fail=0.25, s=1.0):
    inst = generate_instance(d, n, p_fail, s, seed=seed)
    return inst, rpr_map(inst.A, inst.b)


def breakpoint_gap(loss, z, mu):
    """Distance from the residual z to the nearest kink of the smoothed
    loss gradient.  Finite-difference checks redraw their sample when
    this is small."""
    a = np.abs(np.asarray(z, dtype=float))
    lam = loss.params.get("lam", 1.0)
    gaps = [float(np.min(np.abs(a - mu * lam)))]
    if loss.name == "mcp":
        beta = loss.params["beta"]
        gaps.append(float(np.min(np.abs(a - (beta + mu) * lam))))
    elif loss.name == "capped_l1":
        beta = loss.params["beta"]
        gaps.append(float(np.min(np.abs(a - beta))))
        gaps.append(float(np.min(np.abs(a - (beta + mu)))))
    elif loss.name == "trimmed_l1":
        K = loss.params["K"]
        if K > 0:
            theta = _clip_threshold(a, mu, mu * K)
            slack = float(np.minimum(a, mu).sum() - mu * K)
            if theta > 0.0:
                gaps.append(float(np.min(np.abs(a - theta))))
            gaps.append(float(np.min(np.abs(a - (theta + mu)))))
            # theta switching between zero and positive is itself a kink
            gaps.append(abs(slack) / a.size)
    return min(gaps)


def draw_x_away_from_kinks(rng, loss, A, smooth_map, mu, scale=1.0, h=1e-6):
    """Random point whose residual keeps a safe margin from every
    envelope kink, so central differences stay on one smooth piece."""
    a_max = float(np.abs(A).max())
    for _ in range(200):
        x = scale * rng.standard_normal(smooth_map.in_dim)
        z = smooth_map.eval(x)
        # one fd probe x +- h*e_j moves residual i by at most
        # 2h|<a_i,x>||a_ij| + h^2 a_ij^2
        shift = 2.0 * h * float(np.abs(A @ x).max()) * a_max + h * h * a_max**2
        margin = max(1e-4, 10.0 * shift)
        if breakpoint_gap(loss, z, mu) > margin:
            return x
    raise RuntimeError("could not find an x clear of envelope kinks")
