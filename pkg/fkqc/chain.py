"""
Exact geometry of the Fibonacci chain S.

S_0 = 0 and S_{i+1} - S_i = |w_i| with |a| = tau, |b| = 1, so every point is
a GoldenNumber b_count + a_count * tau and its index is a + b.
"""

import bisect
import logging
import math
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from . import fibword
from .errors import NumericalError, ValidationError, WindowError
from .golden import ONE, TAU, TAU_FLOAT, ZERO, GoldenNumber, Number, tau_power
from .models import IntervalType, Patch, Word

logger = logging.getLogger(__name__)

TAU2 = tau_power(2)


def point(i: int) -> GoldenNumber:
    """S_i."""
    fibword._check_index(i)
    return _point(i)


@lru_cache(maxsize=1 << 16)
def _point(i: int) -> GoldenNumber:
    if i >= 0:
        n_a = fibword.count_a_prefix(i)
        return GoldenNumber(i - n_a, n_a)
    j = -i
    if j == 1:
        return -TAU
    # w_-1 .. w_-j spell "ab" followed by u_0 .. u_{j-3}
    m = j - 2
    k = fibword.count_a_prefix(m)
    return GoldenNumber(-(1 + m - k), -(1 + k))


def point_index(p: GoldenNumber) -> int:
    """Index of a chain point: S_i = a + b tau has i = a + b."""
    if not p.is_integral:
        raise ValidationError(f"{p} is not in Z[tau]")
    return p.a + p.b


def points_range(lo: int, hi: int) -> List[GoldenNumber]:
    """S_lo .. S_hi inclusive."""
    if hi < lo:
        return []
    cur = point(lo)
    out = [cur]
    for c in fibword.two_sided_window(lo, hi).letters:
        cur = cur + (TAU if c == "a" else ONE)
        out.append(cur)
    return out


def chain_floats(lo: int, hi: int) -> np.ndarray:
    """S_lo .. S_hi as floats, built from exact integer coefficients."""
    start = point(lo)
    letters = np.frombuffer(fibword.two_sided_window(lo, hi).letters.encode("ascii"), dtype=np.uint8)
    is_a = (letters == ord("a")).astype(np.int64)
    a = np.concatenate(([0], np.cumsum(1 - is_a))) + start.a
    b = np.concatenate(([0], np.cumsum(is_a))) + start.b
    return a.astype(float) + b.astype(float) * TAU_FLOAT


def greedy_decomposition(x: Number) -> List[int]:
    """Exponents n_1 > n_2 > ... with 0 <= x - sum tau^n_k < tau (x >= 0)."""
    r = GoldenNumber.coerce(x)
    if r < 0:
        raise ValidationError(f"greedy decomposition needs x >= 0, got {r}")
    exps = []
    while r >= TAU:
        n = max(1, int(math.floor(math.log(float(r)) / math.log(TAU_FLOAT))))
        while tau_power(n + 1) <= r:
            n += 1
        while tau_power(n) > r:
            n -= 1
        exps.append(n)
        r = r - tau_power(n)
    return exps


def _alpha_beta_nonneg(x: GoldenNumber) -> Tuple[GoldenNumber, GoldenNumber]:
    exps = greedy_decomposition(x)
    alpha = ZERO
    for n in exps:
        alpha = alpha + tau_power(n)
    # next step is b exactly when the smallest exponent is 1
    step = ONE if exps and exps[-1] == 1 else TAU
    return alpha, alpha + step


def _alpha_beta_mirror(y: GoldenNumber) -> Tuple[GoldenNumber, GoldenNumber]:
    # -S on the negative side: {0, tau} together with tau^2 + S_+
    if y < TAU2:
        return _alpha_beta_nonneg(y)
    a, b = _alpha_beta_nonneg(y - TAU2)
    return a + TAU2, b + TAU2


def alpha_beta(x: Number) -> Tuple[GoldenNumber, GoldenNumber]:
    """(alpha(x), beta(x)): the chain points with alpha <= x < beta, exact."""
    x = GoldenNumber.coerce(x)
    if x >= 0:
        return _alpha_beta_nonneg(x)
    y = -x
    at, bt = _alpha_beta_mirror(y)
    if at == y:
        return x, x + fibword.two_sided_letter(point_index(x)).length
    return -bt, -at


def alpha(x: Number) -> GoldenNumber:
    return alpha_beta(x)[0]


def beta(x: Number) -> GoldenNumber:
    return alpha_beta(x)[1]


def gap(x: Number) -> GoldenNumber:
    """beta(x) - alpha(x), either 1 or tau."""
    a, b = alpha_beta(x)
    return b - a


def scan_alpha_beta(x: Number, points: Sequence[GoldenNumber]) -> Tuple[GoldenNumber, GoldenNumber]:
    """alpha/beta by bisection over an enumerated increasing window of S."""
    x = GoldenNumber.coerce(x)
    k = bisect.bisect_right(points, x)
    if k == 0 or k == len(points):
        raise WindowError(f"{x} lies outside the enumerated window")
    return points[k - 1], points[k]


def points_between(lo: Number, hi: Number) -> List[GoldenNumber]:
    """S intersected with the closed interval [lo, hi]."""
    lo, hi = GoldenNumber.coerce(lo), GoldenNumber.coerce(hi)
    if hi < lo:
        return []
    i = point_index(alpha(lo))
    j = point_index(alpha(hi))
    return [p for p in points_range(i, j) if p >= lo]


def local_patch(x: Number, radius: Number) -> Patch:
    """(S - x) intersected with the open ball of the given radius, as exact offsets."""
    x = GoldenNumber.coerce(x)
    r = GoldenNumber.coerce(radius)
    if not r > 0:
        raise ValidationError(f"patch radius must be positive, got {radius}")
    i0 = point_index(alpha(x))
    left = []
    i = i0
    while x - point(i) < r:
        left.append(point(i) - x)
        i -= 1
    right = []
    i = i0 + 1
    while point(i) - x < r:
        right.append(point(i) - x)
        i += 1
    return Patch(tuple(reversed(left)) + tuple(right), float(r))


def letter_frequency_estimate(level: int) -> float:
    """f_{level-1} / f_level, which tends to 1/tau."""
    if level < 2:
        raise ValidationError(f"level must be >= 2, got {level}")
    return fibword.fibonacci(level - 1) / fibword.fibonacci(level)


def super_points(l: int, lo: int, hi: int) -> List[GoldenNumber]:
    """Points of S^l whose chain index lies in [lo, hi]."""
    if l < 1:
        raise ValidationError(f"level must be >= 1, got {l}")
    idx = fibword.super_indices(l, lo, hi)
    if not idx:
        return []
    pts = points_range(idx[0], idx[-1])
    return [pts[i - idx[0]] for i in idx]


def super_alpha_beta(l: int, x: Number) -> Tuple[GoldenNumber, GoldenNumber]:
    """(alpha_l(x), beta_l(x)): neighbouring points of S^l around x."""
    if l < 1:
        raise ValidationError(f"level must be >= 1, got {l}")
    x = GoldenNumber.coerce(x)
    i0 = point_index(alpha(x))
    reach = fibword.fibonacci(2 * l + 2) + fibword.fibonacci(2 * l) + 2
    pts = super_points(l, i0 - reach, i0 + reach)
    k = bisect.bisect_right(pts, x)
    if k == 0 or k == len(pts):
        raise WindowError(f"no level-{l} super-points around {x}")
    return pts[k - 1], pts[k]


def super_alpha(l: int, x: Number) -> GoldenNumber:
    return super_alpha_beta(l, x)[0]


def super_beta(l: int, x: Number) -> GoldenNumber:
    return super_alpha_beta(l, x)[1]


def interval_type(l: int, length: GoldenNumber) -> IntervalType:
    if length == tau_power(2 * l + 1):
        return IntervalType.A
    if length == tau_power(2 * l + 2):
        return IntervalType.B
    raise NumericalError(f"level-{l} super-interval of unexpected length {length}")


def classify_interval(l: int, x: Number) -> IntervalType:
    """Type of the level-l super-interval containing x (level 0: a-step is A, b-step is B)."""
    if l == 0:
        return IntervalType.A if gap(x) == TAU else IntervalType.B
    a, b = super_alpha_beta(l, x)
    return interval_type(l, b - a)


def patch_classes(radius: Number, lo: int, hi: int) -> int:
    """Number of translation classes of radius-R patches centred at S_lo .. S_hi."""
    r = GoldenNumber.coerce(radius)
    k = int(math.ceil(float(r))) + 1
    pts = points_range(lo - k, hi + k)
    classes = set()
    for c in range(k, len(pts) - k):
        center = pts[c]
        key = tuple(
            (p - center).coef for p in pts[c - k:c + k + 1] if -r < p - center < r
        )
        classes.add(key)
    logger.debug("patch classes of radius %s over [%d, %d]: %d", r, lo, hi, len(classes))
    return len(classes)


def is_non_periodic_window(word: Word) -> bool:
    """True when no period p <= len/2 fits the whole window."""
    s = word.letters
    return not any(s[p:] == s[:-p] for p in range(1, len(s) // 2 + 1))
