"""Proximity operators and Moreau envelopes for the loss building blocks.

The scalar operators accept floats or numpy arrays and act elementwise.
Each closed form here is independently cross-checked against the
brute-force grid oracles in :mod:`dcvs.oracle` by the test suite, so the
formulas are never trusted on their own.
"""

import numpy as np

__all__ = (
    "prox_scaled_abs",
    "huber_value",
    "mcp_value",
    "prox_huber",
    "prox_capped_complement",
    "prox_topk",
    "topk_value",
    "moreau_value_and_grad",
)


def _require_positive(**params):
    for name, value in params.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value!r}")


def prox_scaled_abs(t, mu, lam):
    """Prox of ``lam * |.|``, i.e. soft thresholding.

    Solves ``argmin_z  lam*|z| + (z - t)^2 / (2*mu)`` elementwise::

        prox(t) = sign(t) * max(|t| - mu*lam, 0)

    Parameters
    ----------
    t : scalar or array
        Input point(s).
    mu : float
        Prox scale, positive.
    lam : float
        Weight of the absolute value, positive.
    """
    _require_positive(mu=mu, lam=lam)
    t = np.asarray(t, dtype=float)
    return np.sign(t) * np.maximum(np.abs(t) - mu * lam, 0.0)


def huber_value(t, lam, beta):
    """Huber function: quadratic ``t^2/(2*beta)`` for ``|t| <= beta*lam``,
    linear ``lam*|t| - beta*lam^2/2`` beyond.

    This is also the Moreau envelope of ``lam * |.|`` at scale ``beta``,
    and the concave-correction part ``g`` of the MCP decomposition.
    """
    _require_positive(lam=lam, beta=beta)
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    return np.where(a <= beta * lam, t * t / (2.0 * beta), lam * a - beta * lam**2 / 2.0)


def mcp_value(t, lam, beta):
    """Minimax concave penalty: ``lam*|t| - t^2/(2*beta)`` for
    ``|t| <= beta*lam``, constant ``beta*lam^2/2`` beyond.

    Satisfies ``mcp_value + huber_value == lam*|t|`` pointwise.
    """
    _require_positive(lam=lam, beta=beta)
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    return np.where(a <= beta * lam, lam * a - t * t / (2.0 * beta), beta * lam**2 / 2.0)


def prox_huber(t, lam, beta, mu):
    """Prox of the Huber function ``huber_value(., lam, beta)``.

    Shrinks toward zero by the factor ``beta/(beta+mu)`` on the quadratic
    branch (``|t| <= (beta+mu)*lam``) and soft-thresholds by ``mu*lam`` on
    the linear branch; the two branches agree at the boundary.
    """
    _require_positive(lam=lam, beta=beta, mu=mu)
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    return np.where(a <= (beta + mu) * lam, beta / (beta + mu) * t, t - mu * lam * np.sign(t))


def prox_capped_complement(t, beta, mu):
    """Prox of ``max(|z| - beta, 0)``, the convex part subtracted off the
    capped absolute value.

    Identity inside ``[-beta, beta]``, clamps to ``sign(t)*beta`` for
    ``beta < |t| <= beta + mu``, and shifts by ``mu`` toward zero beyond.
    """
    _require_positive(beta=beta, mu=mu)
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    s = np.sign(t)
    return np.where(a <= beta, t, np.where(a <= beta + mu, s * beta, t - mu * s))


def topk_value(z, K):
    """Sum of the K largest absolute entries of ``z`` (the top-K norm)."""
    z = np.asarray(z, dtype=float)
    n = z.size
    if not 0 <= K <= n:
        raise ValueError(f"K must be in [0, {n}], got {K}")
    if K == 0:
        return 0.0
    a = np.abs(z)
    return float(np.partition(a, n - K)[n - K:].sum())


def prox_topk(z, K, mu):
    """Prox of the top-K norm ``w -> sum of K largest |w_i|``.

    Computed through the Moreau decomposition: the prox equals ``z`` minus
    the Euclidean projection of ``z`` onto the scaled dual ball
    ``{w : |w_i| <= mu, sum_i |w_i| <= mu*K}``.  ``K = 0`` makes the norm
    vanish, so the prox is the identity; ``K = n`` reduces to elementwise
    soft thresholding by ``mu``.
    """
    _require_positive(mu=mu)
    z = np.asarray(z, dtype=float)
    n = z.size
    if not 0 <= K <= n:
        raise ValueError(f"K must be in [0, {n}], got {K}")
    if K == 0:
        return z.copy()
    return z - _project_box_l1(z, mu, mu * K)


def _clip_threshold(a, box, total):
    """Shift ``theta >= 0`` such that ``sum_i clip(a_i - theta, 0, box)``
    meets the l1 budget ``total``; zero when the plain box clip already
    fits.

    The slack is piecewise linear and nonincreasing in ``theta`` with
    kinks only at ``a_i`` and ``a_i - box``, so the crossing segment is
    located by sorted prefix sums and the root recovered by exact linear
    interpolation.
    """
    if np.minimum(a, box).sum() <= total:
        return 0.0

    kinks = np.unique(np.concatenate([a, a - box, [0.0]]))
    kinks = kinks[kinks >= 0.0]
    a_sorted = np.sort(a)
    prefix = np.concatenate([[0.0], np.cumsum(a_sorted)])

    def min_sum(t):
        # sum_i min(a_i, t) for an array of thresholds t
        pos = np.searchsorted(a_sorted, t)
        return prefix[pos] + t * (a.size - pos)

    # clip(a - theta, 0, box) = min(a, theta + box) - min(a, theta)
    slack = min_sum(kinks + box) - min_sum(kinks) - total
    hi = int(np.argmax(slack <= 0.0))  # slack(0) > 0 here, slack(max a) < 0
    lo = hi - 1
    return float(
        kinks[lo] + slack[lo] * (kinks[hi] - kinks[lo]) / (slack[lo] - slack[hi])
    )


def _project_box_l1(z, box, total):
    """Euclidean projection onto {w : |w_i| <= box, sum_i |w_i| <= total}."""
    a = np.abs(z)
    theta = _clip_threshold(a, box, total)
    return np.sign(z) * np.clip(a - theta, 0.0, box)


def moreau_value_and_grad(prox_point, z, value_at_prox, mu):
    """Envelope value and gradient from an already-computed prox.

    Given ``prox_point = prox(z)`` for some function psi at scale ``mu``
    and ``value_at_prox = psi(prox_point)``, returns the Moreau envelope
    value ``psi(p) + ||p - z||^2/(2*mu)`` and its gradient ``(z - p)/mu``.
    """
    _require_positive(mu=mu)
    prox_point = np.asarray(prox_point, dtype=float)
    z = np.asarray(z, dtype=float)
    diff = z - prox_point
    value = float(value_at_prox) + float(np.sum(diff * diff)) / (2.0 * mu)
    return value, diff / mu
