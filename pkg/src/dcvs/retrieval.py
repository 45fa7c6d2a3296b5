"""Synthetic robust phase retrieval instances and their metrics.

Measurements are ``b_i = <a_i, x*>^2 + eps_i`` for inliers and ``b_i =
xi_i`` for outliers, with Gaussian ``A``, sign vector ``x*``, Gaussian
noise, and heavy-tailed (Cauchy) or uniform outliers scaled by the
largest clean measurement.  All randomness flows through a single seeded
PCG64 generator (``numpy.random.default_rng``) with a fixed draw order,
so an instance is a pure function of its parameters and seed.
"""

import json
from dataclasses import asdict, dataclass

import numpy as np

__all__ = (
    "GenParams",
    "Instance",
    "generate_instance",
    "spectral_init",
    "success",
    "kappa_mu",
    "kappa_fn_for_loss",
    "save_instance",
    "load_instance",
)

OUTLIER_KINDS = ("cauchy", "uniform")


@dataclass(frozen=True)
class GenParams:
    d: int
    n: int
    p_fail: float
    s: float
    outlier_kind: str
    noise_variance: float
    seed: int


@dataclass(frozen=True)
class Instance:
    """One problem: measurements, ground truth, and the outlier set."""

    A: np.ndarray
    b: np.ndarray
    x_star: np.ndarray
    outlier_idx: np.ndarray
    params: GenParams


def generate_instance(d, n, p_fail, s, outlier_kind="cauchy",
                      noise_variance=1e-6, seed=0):
    """Draw one instance, bit-reproducible from ``seed``.

    Draw order: ``A`` (n*d standard normals), ``x*`` (d uniforms mapped
    to +-1), noise (n normals), outlier positions (choice without
    replacement), outlier uniforms ``u_i``.  Outlier values are
    ``s*M*tan(0.5*pi*u)`` (cauchy) or ``s*M*u`` (uniform) with ``M`` the
    largest clean measurement; they replace the affected entries.
    """
    if not (n >= d >= 1):
        raise ValueError(f"need n >= d >= 1, got n={n}, d={d}")
    if not 0.0 <= p_fail < 1.0:
        raise ValueError(f"p_fail must lie in [0, 1), got {p_fail}")
    if not s > 0:
        raise ValueError("s must be positive")
    if noise_variance < 0:
        raise ValueError("noise_variance must be nonnegative")
    if outlier_kind not in OUTLIER_KINDS:
        raise ValueError(f"outlier_kind must be one of {OUTLIER_KINDS}")
    n_out = int(round(p_fail * n))
    if n_out >= n:
        raise ValueError(f"round(p_fail*n) = {n_out} leaves no inliers")

    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, d))
    x_star = np.where(rng.random(d) < 0.5, 1.0, -1.0)
    eps = rng.normal(0.0, np.sqrt(noise_variance), n)
    outlier_idx = np.sort(rng.choice(n, size=n_out, replace=False))
    u = rng.random(n_out)

    clean = (A @ x_star) ** 2
    b = clean + eps
    if n_out:
        M = float(clean.max())
        if outlier_kind == "cauchy":
            xi = s * M * np.tan(0.5 * np.pi * u)
        else:
            xi = s * M * u
        b[outlier_idx] = xi

    params = GenParams(d=d, n=n, p_fail=float(p_fail), s=float(s),
                       outlier_kind=outlier_kind,
                       noise_variance=float(noise_variance), seed=int(seed))
    return Instance(A=A, b=b, x_star=x_star,
                    outlier_idx=outlier_idx.astype(np.int64), params=params)


SPECTRAL_CAP_MULTIPLE = 3.0
SPECTRAL_POWER_ITERS = 100


def spectral_init(A, b, seed):
    """Median-saturated spectral initial point.

    Runs 100 power iterations on the PSD quadratic form
    ``(1/n) * sum_i min(b_i, tau) a_i a_i^T`` over the nonnegative
    measurements, with the saturation level ``tau = 3 * median(|b|)``,
    and scales the unit top-eigenvector estimate by
    ``sqrt(median of the b_i inside [0, tau])``.  Saturating rather than
    dropping large measurements keeps the direction informative on clean
    data (where the largest measurements carry most of the signal) while
    bounding what any single outlier can contribute.  Degenerate inputs
    (no usable measurements or an identically zero form) fall back to a
    seeded random unit direction with radius
    ``sqrt(max(median(|b|), 1e-12))``.  The power-iteration start vector
    is drawn from ``default_rng([seed, 1])``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n, d = A.shape
    if n < 1:
        raise ValueError("need at least one measurement")
    rng = np.random.default_rng([seed, 1])
    v = rng.standard_normal(d)
    v /= np.linalg.norm(v)

    med = float(np.median(np.abs(b)))
    tau = SPECTRAL_CAP_MULTIPLE * med
    keep = b >= 0.0
    weights = np.minimum(b[keep], tau)
    degenerate = not keep.any() or not np.any(weights)
    if not degenerate:
        Ak = A[keep]
        Y = Ak.T @ (weights[:, None] * Ak) / n
        degenerate = not np.any(Y)
    if degenerate:
        r = float(np.sqrt(max(med, 1e-12)))
        return r * v

    for _ in range(SPECTRAL_POWER_ITERS):
        w = Y @ v
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            break
        v = w / norm_w
    inside = (b >= 0.0) & (b <= tau)
    r = float(np.sqrt(np.median(b[inside])))
    return r * v


def success(x, x_star, threshold=1e-3):
    """Relative error up to the global sign ambiguity, and whether it
    beats ``threshold``."""
    x = np.asarray(x, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    norm_star = np.linalg.norm(x_star)
    if norm_star == 0.0:
        raise ValueError("x_star must be nonzero")
    rel = min(np.linalg.norm(x_star - x), np.linalg.norm(x_star + x)) / norm_star
    return float(rel), bool(rel < threshold)


def kappa_mu(A, b, lam, L_g, mu):
    """Global curvature bound for the smoothed composite on a quadratic
    residual instance:

        2*L_g*sqrt(sum_i ||a_i||^4) + 6*lam*sum_i ||a_i||^2
            + 4*sum_i(||a_i||^2 |b_i|) / mu

    The first term is a weak-convexity constant of the smoothed
    subtracted part; the rest aggregates the per-measurement
    gradient-Lipschitz constants ``6*lam*||a_i||^2 + 4||a_i||^2|b_i|/mu``
    of the smoothed additive part.  Summing over measurements is what the
    triangle inequality supports for a dense A; taking the largest
    single-measurement constant instead is valid only when each
    measurement touches its own coordinate, and gradient-descent
    trajectories do exceed that smaller value on Gaussian instances.
    ``lam`` is the MCP weight and is 1 for the other losses.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    if not lam > 0:
        raise ValueError("lam must be positive")
    if L_g < 0:
        raise ValueError("L_g must be nonnegative")
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    row_sq = np.sum(A * A, axis=1)
    return (
        2.0 * L_g * float(np.sqrt(np.sum(row_sq**2)))
        + 6.0 * lam * float(row_sq.sum())
        + 4.0 * float((row_sq * np.abs(b)).sum()) / mu
    )


def kappa_fn_for_loss(A, b, loss):
    """Per-scale curvature bound ``mu -> kappa_mu`` for a catalog loss."""
    lam = loss.params.get("lam", 1.0)
    L_g = loss.L_g
    return lambda mu: kappa_mu(A, b, lam, L_g, mu)


def save_instance(instance, path):
    """Write an instance to a ``.npz`` container; round-trips bit-exactly."""
    np.savez(
        path,
        A=instance.A,
        b=instance.b,
        x_star=instance.x_star,
        outlier_idx=instance.outlier_idx,
        gen_params=json.dumps(asdict(instance.params), sort_keys=True),
    )


def load_instance(path):
    """Read an instance written by :func:`save_instance`."""
    with np.load(path, allow_pickle=False) as data:
        params = GenParams(**json.loads(str(data["gen_params"])))
        return Instance(
            A=data["A"],
            b=data["b"],
            x_star=data["x_star"],
            outlier_idx=data["outlier_idx"],
            params=params,
        )
