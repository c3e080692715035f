"""
The bump zeta and the substrate potential V(x) = lam * zeta(x - nearest chain point).
"""

import logging
from typing import NamedTuple, Optional, Tuple

import numpy as np

from . import chain, fibword
from .golden import GoldenNumber, Number
from .models import PotentialSpec

logger = logging.getLogger(__name__)

ZETA_AT_ZERO = 160.0 / 27.0
ZETA_SECOND_AT_ZERO = -128.0
CORE = 0.25
EDGE = 1.0 / 3.0
_FLANK = 64.0 / 27.0

DEFAULT_SPEC = PotentialSpec()


class Curvature(NamedTuple):
    """Second derivative; at |x| = 1/3 value is the inner limit and outer the outer one."""
    value: float
    one_sided: bool = False
    outer: Optional[float] = None


def zeta(x: float) -> float:
    t = abs(x)
    if t <= CORE:
        return -64.0 * x * x + ZETA_AT_ZERO
    if t < EDGE:
        return _FLANK * (3.0 * t - 1.0) ** 2 * (96.0 * t - 11.0)
    return 0.0


def zeta_prime(x: float) -> float:
    t = abs(x)
    if t <= CORE:
        return -128.0 * x
    if t < EDGE:
        return float(np.sign(x)) * _FLANK * (3.0 * t - 1.0) * (864.0 * t - 162.0)
    return 0.0


def zeta_second(x: float) -> Curvature:
    t = abs(x)
    if t <= CORE:
        return Curvature(ZETA_SECOND_AT_ZERO)
    if t < EDGE:
        return Curvature(_FLANK * (5184.0 * t - 1350.0))
    if t == EDGE:
        return Curvature(_FLANK * (5184.0 * EDGE - 1350.0), one_sided=True, outer=0.0)
    return Curvature(0.0)


def zeta_array(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    t = np.abs(x)
    return np.select(
        [t <= CORE, t < EDGE],
        [-64.0 * x * x + ZETA_AT_ZERO, _FLANK * (3.0 * t - 1.0) ** 2 * (96.0 * t - 11.0)],
        0.0,
    )


def zeta_prime_array(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    t = np.abs(x)
    return np.select(
        [t <= CORE, t < EDGE],
        [-128.0 * x, np.sign(x) * _FLANK * (3.0 * t - 1.0) * (864.0 * t - 162.0)],
        0.0,
    )


def zeta_second_at_zero() -> float:
    return ZETA_SECOND_AT_ZERO


def min_lambda_nonminimal() -> float:
    """-4 / zeta''(0) = 1/32."""
    return -4.0 / ZETA_SECOND_AT_ZERO


def nearest_point(x: Number, spec: PotentialSpec = DEFAULT_SPEC) -> GoldenNumber:
    """alpha(x) if 2x <= alpha + beta, else beta."""
    x = GoldenNumber.coerce(x)
    evaluator = spec.evaluator or chain.alpha_beta
    a, b = evaluator(x)
    return a if x * 2 <= a + b else b


def offset(x: Number, spec: PotentialSpec = DEFAULT_SPEC) -> float:
    """x minus its nearest chain point, evaluated exactly and then rounded."""
    x = GoldenNumber.coerce(x)
    return float(x - nearest_point(x, spec))


def V(x: Number, spec: PotentialSpec = DEFAULT_SPEC) -> float:
    if not spec.substrate:
        return 0.0
    return spec.lam * zeta(offset(x, spec))


def V_prime(x: Number, spec: PotentialSpec = DEFAULT_SPEC) -> float:
    if not spec.substrate:
        return 0.0
    return spec.lam * zeta_prime(offset(x, spec))


def V_second(x: Number, spec: PotentialSpec = DEFAULT_SPEC) -> Curvature:
    if not spec.substrate:
        return Curvature(0.0)
    c = zeta_second(offset(x, spec))
    outer = None if c.outer is None else spec.lam * c.outer
    return Curvature(spec.lam * c.value, c.one_sided, outer)


def _nearest_array(xs: np.ndarray) -> np.ndarray:
    lo = chain.point_index(chain.alpha(float(np.min(xs)) - 2.0))
    hi = chain.point_index(chain.beta(float(np.max(xs)) + 2.0))
    pts = chain.chain_floats(lo, hi)
    k = np.searchsorted(pts, xs, side="right") - 1
    a, b = pts[k], pts[k + 1]
    return np.where(2.0 * xs <= a + b, a, b)


def V_array(xs, spec: PotentialSpec = DEFAULT_SPEC) -> np.ndarray:
    """Vectorised V on floats."""
    xs = np.asarray(xs, dtype=float)
    if not spec.substrate or xs.size == 0:
        return np.zeros_like(xs)
    return spec.lam * zeta_array(xs - _nearest_array(xs))


def V_prime_array(xs, spec: PotentialSpec = DEFAULT_SPEC) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if not spec.substrate or xs.size == 0:
        return np.zeros_like(xs)
    return spec.lam * zeta_prime_array(xs - _nearest_array(xs))


def matched_pair(x: Number, search_radius: int = 200, rng: Optional[np.random.Generator] = None,
                 context: int = 3) -> Optional[GoldenNumber]:
    """
    Find y != x whose surrounding letters agree with those of x.

    The chain index i of alpha(x) is matched against indices j within
    search_radius whose letters w[j-context, j+context) coincide, and
    y = x + S_j - S_i is returned; None when no such j exists.
    """
    x = GoldenNumber.coerce(x)
    i = chain.point_index(chain.alpha(x))
    ctx = fibword.two_sided_window(i - context, i + context).letters
    base = i - search_radius
    text = fibword.two_sided_window(base - context, i + search_radius + context).letters
    hits = []
    p = text.find(ctx)
    while p != -1:
        if base + p != i:
            hits.append(base + p)
        p = text.find(ctx, p + 1)
    if not hits:
        return None
    j = hits[int(rng.integers(len(hits)))] if rng is not None else hits[0]
    return x + (chain.point(j) - chain.point(i))


def check_equivariance(x: Number, y: Number, spec: PotentialSpec = DEFAULT_SPEC) -> bool:
    """Equal radius-1 patches at x and y imply V(x) == V(y)."""
    if not chain.local_patch(x, 1).matches(chain.local_patch(y, 1)):
        return True
    return V(x, spec) == V(y, spec)


def random_golden(rng: np.random.Generator, bound: int = 1000) -> GoldenNumber:
    """a + b tau with |a|, |b| <= bound."""
    a, b = rng.integers(-bound, bound + 1, size=2)
    return GoldenNumber(int(a), int(b))


def equivariance_sweep(samples: int, seed: int = 0, bound: int = 1000,
                       spec: PotentialSpec = DEFAULT_SPEC) -> Tuple[int, int]:
    """Draw matched pairs and count those with exactly equal V; returns (equal, tried)."""
    rng = np.random.default_rng(seed)
    equal = tried = 0
    while tried < samples:
        x = random_golden(rng, bound)
        y = matched_pair(x, rng=rng)
        if y is None:
            continue
        tried += 1
        if chain.local_patch(x, 1).matches(chain.local_patch(y, 1)) and V(x, spec) == V(y, spec):
            equal += 1
    logger.info("equivariance: %d/%d matched pairs agree", equal, tried)
    return equal, tried
