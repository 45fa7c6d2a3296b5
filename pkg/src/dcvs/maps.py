"""Smooth inner mappings and their transposed-Jacobian products.

The only derivative primitive is ``jt_vec(x, v) = D S(x)^T v``; full
Jacobians are never materialized.  The quadratic residual map used by
robust phase retrieval is provided, plus a builder that folds a smooth
additive term into the composite by extending the residual by one entry.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .losses import DcLoss

__all__ = (
    "SmoothMap",
    "rpr_eval",
    "rpr_jt_vec",
    "rpr_lip_ds",
    "rpr_map",
    "compose_with_smooth_term",
)


@dataclass(frozen=True)
class SmoothMap:
    """A differentiable mapping R^in_dim -> R^out_dim.

    ``eval`` maps a point to the residual vector; ``jt_vec(x, v)`` applies
    the transposed derivative at ``x`` to ``v``.  ``lip_ds`` optionally
    records a Lipschitz constant of the derivative.
    """

    in_dim: int
    out_dim: int
    eval: Callable
    jt_vec: Callable
    lip_ds: Optional[float] = None


def _check_rpr_shapes(A, x, b=None):
    if A.ndim != 2:
        raise ValueError(f"A must be a matrix, got ndim={A.ndim}")
    n, d = A.shape
    if x.shape != (d,):
        raise ValueError(f"x must have shape ({d},), got {x.shape}")
    if b is not None and b.shape != (n,):
        raise ValueError(f"b must have shape ({n},), got {b.shape}")


def rpr_eval(A, b, x):
    """Quadratic measurement residual ``(Ax) ⊙ (Ax) - b``."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_rpr_shapes(A, x, b)
    Ax = A @ x
    return Ax * Ax - b


def rpr_jt_vec(A, x, v):
    """Transposed-derivative product ``2 A^T ((Ax) ⊙ v)`` of the
    quadratic residual map."""
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_rpr_shapes(A, x)
    if v.shape != (A.shape[0],):
        raise ValueError(f"v must have shape ({A.shape[0]},), got {v.shape}")
    return 2.0 * (A.T @ ((A @ x) * v))


def rpr_lip_ds(A):
    """Lipschitz constant ``2 sqrt(sum_i ||a_i||^4)`` of the derivative of
    the quadratic residual map (rows ``a_i``)."""
    A = np.asarray(A, dtype=float)
    row_sq = np.sum(A * A, axis=1)
    out = 2.0 * float(np.sqrt(np.sum(row_sq**2)))
    if out == 0.0:
        raise ValueError("A must be nonzero")
    return out


def rpr_map(A, b):
    """Bundle the quadratic residual map for measurements ``(A, b)``."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n, d = A.shape
    if b.shape != (n,):
        raise ValueError(f"b must have shape ({n},), got {b.shape}")
    return SmoothMap(
        in_dim=d,
        out_dim=n,
        eval=lambda x: rpr_eval(A, b, x),
        jt_vec=lambda x, v: rpr_jt_vec(A, x, v),
        lip_ds=rpr_lip_ds(A),
    )


def compose_with_smooth_term(h_value, h_grad, loss, smooth_map):
    """Fold a smooth additive term ``h`` into the DC composite.

    ``h(x) + (f - g)(S(x))`` equals ``(f' - g')(S'(x))`` with the lifted
    residual ``S'(x) = [S(x), h(x)]``, ``f'([z, t]) = f(z) + t`` and
    ``g'([z, t]) = g(z)``.  The lifted f-prox acts as (f-prox on z,
    ``t - mu``); the g-prox leaves the last entry untouched.  Returns the
    lifted ``(DcLoss, SmoothMap)`` pair.
    """
    n = smooth_map.out_dim
    base = loss

    def f_value(w):
        return base.f_value(w[:n]) + float(w[n])

    def f_prox(w, mu):
        return np.concatenate([np.atleast_1d(base.f_prox(w[:n], mu)), [w[n] - mu]])

    def g_value(w):
        return base.g_value(w[:n])

    def g_prox(w, mu):
        return np.concatenate([np.atleast_1d(base.g_prox(w[:n], mu)), [w[n]]])

    lifted_loss = DcLoss(
        name=base.name,
        params=dict(base.params),
        n=n + 1,
        f_value=f_value,
        g_value=g_value,
        f_prox=f_prox,
        g_prox=g_prox,
        L_f=float(np.hypot(base.L_f, 1.0)),
        L_g=base.L_g,
        eta_f=base.eta_f,
        eta_g=base.eta_g,
        eta=base.eta,
    )

    def lifted_eval(x):
        return np.concatenate([np.atleast_1d(smooth_map.eval(x)), [h_value(x)]])

    def lifted_jt_vec(x, v):
        return smooth_map.jt_vec(x, v[:n]) + h_grad(x) * float(v[n])

    lifted_map = SmoothMap(
        in_dim=smooth_map.in_dim,
        out_dim=n + 1,
        eval=lifted_eval,
        jt_vec=lifted_jt_vec,
        lip_ds=None,
    )
    return lifted_loss, lifted_map
