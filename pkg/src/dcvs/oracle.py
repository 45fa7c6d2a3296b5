"""Brute-force and finite-difference verifiers.

Deliberately dumb and independent of the closed forms they check: grid
argmin for prox problems, central differences for gradients, and a direct
evaluation of the quadratic-upper-bound inequality used by the solver
analysis.  These are the ground truth the rest of the library is tested
against.
"""

import math

import numpy as np

__all__ = ("brute_prox_1d", "brute_prox_nd", "fd_grad", "check_descent")

_CHUNK = 1_000_000


def brute_prox_1d(value_fn, t, mu, radius, step):
    """Grid argmin of ``value_fn(z) + (z - t)^2/(2*mu)`` over
    ``[t - radius, t + radius]``; ties broken toward smaller ``|z|``.

    ``value_fn`` must accept a numpy array and evaluate elementwise.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if radius < step:
        raise ValueError("radius must be at least one step")
    if not mu > 0:
        raise ValueError("mu must be positive")
    half = int(math.ceil(radius / step))
    best_obj = math.inf
    best_z = None
    for start in range(-half, half + 1, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, half + 1))
        zs = t + idx * step
        obj = np.asarray(value_fn(zs), dtype=float) + (zs - t) ** 2 / (2.0 * mu)
        if not np.all(np.isfinite(obj)):
            raise FloatingPointError("non-finite objective on the oracle grid")
        m = float(obj.min())
        cand = zs[obj == m]
        z = float(cand[np.argmin(np.abs(cand))])
        if m < best_obj or (m == best_obj and abs(z) < abs(best_z)):
            best_obj, best_z = m, z
    return best_z


def brute_prox_nd(value_fn, z, mu, radius, step):
    """Grid argmin of ``value_fn(w) + ||w - z||^2/(2*mu)`` over the product
    grid ``z_i +- radius`` with spacing ``step``; dimension capped at 3.

    ``value_fn`` takes an ``(m, dim)`` array of points and returns ``m``
    values.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    dim = z.size
    if dim > 3:
        raise ValueError("grid oracle limited to dim <= 3")
    if step <= 0 or radius < step:
        raise ValueError("need step > 0 and radius >= step")
    if not mu > 0:
        raise ValueError("mu must be positive")
    half = int(math.ceil(radius / step))
    offsets = np.arange(-half, half + 1) * step
    axes = [zi + offsets for zi in z]

    if dim == 1:
        rest = np.zeros((1, 0))
    else:
        mesh = np.meshgrid(*axes[1:], indexing="ij")
        rest = np.stack([g.ravel() for g in mesh], axis=-1)
    m_rest = rest.shape[0]
    block = max(1, _CHUNK // m_rest)

    best_obj = math.inf
    best_w = None
    first = axes[0]
    for i in range(0, first.size, block):
        xs = first[i:i + block]
        pts = np.concatenate(
            [np.repeat(xs, m_rest)[:, None], np.tile(rest, (xs.size, 1))], axis=1
        )
        obj = np.asarray(value_fn(pts), dtype=float)
        obj = obj + np.sum((pts - z) ** 2, axis=1) / (2.0 * mu)
        if not np.all(np.isfinite(obj)):
            raise FloatingPointError("non-finite objective on the oracle grid")
        j = int(np.argmin(obj))
        if obj[j] < best_obj:
            best_obj = float(obj[j])
            best_w = pts[j].copy()
    return best_w


def fd_grad(scalar_fn, x, h=1e-6):
    """Central-difference gradient of ``scalar_fn`` at ``x``."""
    if h <= 0:
        raise ValueError("h must be positive")
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (scalar_fn(x + e) - scalar_fn(x - e)) / (2.0 * h)
    if not np.all(np.isfinite(g)):
        raise FloatingPointError("non-finite finite-difference gradient")
    return g


def check_descent(value_grad_fn, x, y, kappa):
    """True iff F(y) <= F(x) + <grad F(x), y - x> + (kappa/2)||y - x||^2,
    up to a small floating-point slack.

    ``value_grad_fn`` maps a point to a ``(value, gradient)`` pair.
    """
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    fx, gx = value_grad_fn(x)
    fy, _ = value_grad_fn(y)
    d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    bound = fx + float(np.dot(gx, d)) + 0.5 * kappa * float(np.dot(d, d))
    return fy <= bound + 1e-9 * (1.0 + abs(fx))
