"""Closed-form expectations, edgelength densities and tail bounds.

Every polygon here has total length 2. The four non-equilateral spaces carry
the measure pushed forward from the uniform measure on their model space;
the equilateral spaces carry the product (or closed-subspace) measure on
edges of length ``2/n``.
"""

import enum
import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "SpaceKind",
    "TheoryValue",
    "UnsupportedSpace",
    "euler_beta",
    "edge_moment",
    "edge_variance",
    "edge_covariance",
    "expected_ftc_sq",
    "expected_chord",
    "expected_gyradius",
    "expected_dot",
    "edgelength_pdf",
    "edgelength_domain",
    "edgelength_beta_params",
    "edgelength_tail_exact",
    "edgelength_tail_bound",
    "acceptance_estimate",
    "lambda_for_acceptance",
    "hk_pdf",
    "chord_ratio_bounds",
    "conjectured_total_curvature",
    "evaluate",
]


class UnsupportedSpace(ValueError):
    """Raised when a formula does not exist for the requested space."""


class SpaceKind(enum.Enum):
    ARM2 = "arm2"
    ARM3 = "arm3"
    POL2 = "pol2"
    POL3 = "pol3"
    EARM2 = "earm2"
    EARM3 = "earm3"
    EPOL2 = "epol2"
    EPOL3 = "epol3"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown polygon space {value!r}") from None

    @property
    def dim(self):
        return int(self.value[-1])

    @property
    def closed(self):
        return "pol" in self.value

    @property
    def equilateral(self):
        return self.value.startswith("e")

    @property
    def min_n(self):
        return 3 if self.closed else 2


class TheoryValue(NamedTuple):
    value: float
    formula: str
    inputs: dict


def _space(space):
    return SpaceKind.parse(space)


def _require_beta_space(space):
    space = _space(space)
    if space.equilateral:
        raise UnsupportedSpace(f"no formula for equilateral space {space.value}")
    return space


def _check_n(space, n, minimum=None):
    minimum = space.min_n if minimum is None else minimum
    if n < minimum:
        raise ValueError(f"{space.value} needs n >= {minimum}, got {n}")


def euler_beta(p, q):
    if p <= 0 or q <= 0:
        raise ValueError("beta function needs positive arguments")
    return math.exp(math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q))


def _log_beta(p, q):
    return math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q)


def edge_moment(space, n, p):
    """``E(|e_i|^p)`` for one edge of a random ``n``-edge polygon.

    Spatial arms ``2^p B(p,2n)/B(p,2)``, spatial polygons ``B(p,n)/B(p,2)``,
    planar arms ``2^p B(p,n)/B(p,1)``, planar polygons ``B(p,n/2)/B(p,1)``.
    """
    space = _require_beta_space(space)
    _check_n(space, n, 2)
    if p <= 0:
        raise ValueError("moment order must be positive")
    if space is SpaceKind.ARM3:
        logv = p * math.log(2.0) + _log_beta(p, 2 * n) - _log_beta(p, 2)
    elif space is SpaceKind.POL3:
        logv = _log_beta(p, n) - _log_beta(p, 2)
    elif space is SpaceKind.ARM2:
        logv = p * math.log(2.0) + _log_beta(p, n) - _log_beta(p, 1)
    else:
        logv = _log_beta(p, n / 2) - _log_beta(p, 1)
    return math.exp(logv)


def edge_variance(space, n):
    space = _require_beta_space(space)
    _check_n(space, n, 2)
    if space is SpaceKind.ARM3:
        return 2 * (n - 1) / (n * n * (n + 0.5))
    if space is SpaceKind.POL3:
        return 2 * (n - 2) / (n * n * (n + 1))
    if space is SpaceKind.ARM2:
        return 4 * (n - 1) / (n * n * (n + 1))
    return 4 * (n - 2) / (n * n * (n + 2))


def edge_covariance(space, n):
    """Covariance of two distinct edgelengths of the same polygon."""
    space = _require_beta_space(space)
    _check_n(space, n, 2)
    if space is SpaceKind.ARM3:
        return -2 / (n * n * (n + 0.5))
    if space is SpaceKind.POL3:
        return (n - 2) / (n - 1) * (-2 / (n * n * (n + 1)))
    if space is SpaceKind.ARM2:
        return -4 / (n * n * (n + 1))
    return (n - 2) / (n - 1) * (-4 / (n * n * (n + 2)))


def expected_ftc_sq(space, n):
    """Mean squared failure to close, ``n E(|e|^2)``, for the arm spaces."""
    space = _require_beta_space(space)
    if space.closed:
        raise UnsupportedSpace("failure to close is identically zero on closed spaces")
    return n * edge_moment(space, n, 2)


def _check_k(space, n, k):
    if not 1 <= k <= n:
        raise ValueError(f"chord skip k must lie in [1, {n}], got {k}")


def expected_chord(space, n, k):
    """Expected squared length of the chord spanning ``k`` consecutive edges."""
    space = _space(space)
    _check_n(space, n, 2)
    _check_k(space, n, k)
    closing = (n - k) / (n - 1) if space.closed else 1.0
    if space.equilateral:
        return closing * 4 * k / (n * n)
    if space is SpaceKind.ARM3:
        return 6 * k / (n * (n + 0.5))
    if space is SpaceKind.POL3:
        return closing * 6 * k / (n * (n + 1))
    if space is SpaceKind.ARM2:
        return 8 * k / (n * (n + 1))
    return closing * 8 * k / (n * (n + 2))


def expected_gyradius(space, n):
    space = _space(space)
    _check_n(space, n)
    if space.equilateral:
        if space.closed:
            return (n + 1) / (3 * n * n)
        return 2 / 3 * (n + 2) / (n * (n + 1))
    if space is SpaceKind.ARM3:
        return (n + 2) / ((n + 1) * (n + 0.5))
    if space is SpaceKind.POL3:
        return 1 / (2 * n)
    if space is SpaceKind.ARM2:
        return 4 / 3 * (n + 2) / (n + 1) ** 2
    return 2 / 3 * (n + 1) / (n * (n + 2))


def expected_dot(space, n):
    """Expected inner product ``<e_i, e_j>`` of two distinct edges."""
    space = _space(space)
    _check_n(space, n)
    if not space.closed:
        return 0.0
    if space.equilateral:
        return -4 / (n * n * (n - 1))
    if space is SpaceKind.POL3:
        return -6 / (n ** 3 - n)
    return -8 / ((n - 1) * n * (n + 2))


def edgelength_domain(space):
    space = _require_beta_space(space)
    return 1.0 if space.closed else 2.0


def edgelength_beta_params(space, n):
    """``(alpha, beta, scale)``: edgelength / scale is Beta(alpha, beta)."""
    space = _require_beta_space(space)
    _check_n(space, n)
    if space is SpaceKind.ARM3:
        return 2.0, 2.0 * n - 2, 2.0
    if space is SpaceKind.POL3:
        return 2.0, n - 2.0, 1.0
    if space is SpaceKind.ARM2:
        return 1.0, n - 1.0, 2.0
    return 1.0, n / 2 - 1, 1.0


def _check_domain(space, y):
    y = np.asarray(y, dtype=float)
    top = edgelength_domain(space)
    if np.any((y < 0) | (y > top)) or np.any(np.isnan(y)):
        raise ValueError(f"edgelength outside [0, {top}] for {space.value}")
    return y


def edgelength_pdf(space, n, y):
    """Density of one edgelength at ``y``; vectorised over ``y``."""
    space = _require_beta_space(space)
    _check_n(space, n)
    if space is SpaceKind.POL2 and n <= 2:
        raise ValueError("planar polygon density needs n >= 3")
    y = _check_domain(space, y)
    alpha, beta, scale = edgelength_beta_params(space, n)
    x = y / scale
    # Beta(alpha, beta) on [0, scale] with alpha in {1, 2}; normalising
    # constants written out so large n cannot overflow.
    with np.errstate(divide="ignore"):
        tail = np.power(1 - x, beta - 1)
    if alpha == 2:
        out = beta * (beta + 1) * x * tail / scale
    else:
        out = beta * tail / scale
    if out.ndim == 0:
        return float(out)
    return out


def edgelength_tail_exact(space, n, t):
    """``P[|e_i| >= t]`` from the closed-form survival function."""
    space = _require_beta_space(space)
    _check_n(space, n)
    t = _check_domain(space, t)
    alpha, beta, scale = edgelength_beta_params(space, n)
    x = t / scale
    with np.errstate(divide="ignore"):
        base = np.exp(beta * np.log1p(-x))
    out = base * (1 + beta * x) if alpha == 2 else base
    out = np.where(x >= 1, 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def edgelength_tail_bound(space, n, c):
    """Upper bound on ``P[|e_i| >= c log(n)/n]``, valid for ``c > 4/log n``."""
    space = _require_beta_space(space)
    _check_n(space, n)
    logn = math.log(n)
    if c <= 4 / logn:
        raise ValueError(f"bound needs c > 4/log(n) = {4 / logn:.6g}, got {c}")
    if space.dim == 3:
        return (1 + c * logn) / n ** c
    return n ** (-c / 2)


def acceptance_estimate(space, n, lam):
    """Chance that all ``n`` edges are below ``lam * 2/n`` if they were independent."""
    space = _require_beta_space(space)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    t = lam * 2 / n
    if t >= edgelength_domain(space):
        return 1.0
    tail = edgelength_tail_exact(space, n, t)
    return math.exp(n * math.log1p(-tail)) if tail < 1 else 0.0


def lambda_for_acceptance(space, n, target):
    """The ``lam`` at which :func:`acceptance_estimate` equals ``target``."""
    if not 0 < target < 1:
        raise ValueError("target acceptance must lie in (0, 1)")
    space = _require_beta_space(space)
    hi = edgelength_domain(space) * n / 2
    return brentq(lambda lam: acceptance_estimate(space, n, lam) - target, 1.0, hi, xtol=1e-12)


def hk_pdf(n, k, r):
    """Gaussian approximation to the ``k``-th chord length density of a closed
    equilateral polygon with unit edges."""
    if not 0 < k < n:
        raise ValueError("hk_pdf needs 0 < k < n")
    s = k * (n - k) / n
    r = np.asarray(r, dtype=float)
    out = (3 / (2 * math.pi * s)) ** 1.5 * 4 * math.pi * r * r * np.exp(-1.5 * r * r / s)
    if out.ndim == 0:
        return float(out)
    return out


def chord_ratio_bounds(n, delta):
    """Bracket for ``E Chord(delta n)`` on polygons over arms."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    return (1 - delta) * n / (n + 1), (1 - delta) * n / (n - 1)


def conjectured_total_curvature(n):
    """``n pi/2 + pi/4``: observed numerically for closed space polygons, not proven."""
    return n * math.pi / 2 + math.pi / 4


_FORMULAS = {
    "edge_moment": edge_moment,
    "edge_variance": edge_variance,
    "edge_covariance": edge_covariance,
    "expected_ftc_sq": expected_ftc_sq,
    "expected_chord": expected_chord,
    "expected_gyradius": expected_gyradius,
    "expected_dot": expected_dot,
    "acceptance_estimate": acceptance_estimate,
}


def evaluate(formula, space, **inputs):
    """Evaluate a named formula and keep its inputs alongside the value."""
    value = _FORMULAS[formula](_space(space), **inputs)
    return TheoryValue(float(value), formula, {"space": _space(space).value, **inputs})
