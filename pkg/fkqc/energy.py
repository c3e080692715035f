"""
Energies, equilibrium residuals and minimality checks for configurations.

H(xi, eta) = (xi - eta)^2 / 2 + lam * V(xi); a segment x_j .. x_k has energy
sum_{i=j}^{k-1} H(x_i, x_{i+1}).
"""

import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .errors import PreconditionError, ValidationError, WindowError
from .models import AnchorFn, Configuration, PotentialSpec
from .potential import CORE, DEFAULT_SPEC, V, V_array, V_prime_array, nearest_point, offset

logger = logging.getLogger(__name__)


class Improvement(NamedTuple):
    position: float
    decrease: float


class RotationEstimate(NamedTuple):
    estimate: float
    error_bound: Optional[float]


@dataclass
class RotationReport:
    """Slopes of a configuration over its full window and its central half."""
    full: RotationEstimate
    half: RotationEstimate
    left_slope: float
    right_slope: float
    no_rotation_number: Optional[bool]

    def to_json(self) -> dict:
        return {
            "estimate": self.full.estimate,
            "error_bound": self.full.error_bound,
            "half_estimate": self.half.estimate,
            "half_error_bound": self.half.error_bound,
            "left_slope": self.left_slope,
            "right_slope": self.right_slope,
            "no_rotation_number": self.no_rotation_number,
        }


@dataclass
class SegmentMinimum:
    """Best competitor found by the brute-force segment search."""
    energy: float
    positions: np.ndarray
    current: float

    @property
    def improvement(self) -> float:
        return self.current - self.energy


def pair_energy(xi: float, eta: float, spec: PotentialSpec = DEFAULT_SPEC) -> float:
    return 0.5 * (xi - eta) ** 2 + V(xi, spec)


def segment_energy(config: Configuration, j: int, k: int,
                   spec: PotentialSpec = DEFAULT_SPEC) -> float:
    if not j < k:
        raise ValidationError(f"segment needs j < k, got [{j}, {k}]")
    if not (config.contains(j) and config.contains(k)):
        raise WindowError(f"segment [{j}, {k}] outside [{config.i_min}, {config.i_max}]")
    return sum(pair_energy(config.at(i), config.at(i + 1), spec) for i in range(j, k))


def _segment_energy_array(xs: np.ndarray, spec: PotentialSpec) -> float:
    return float(0.5 * np.sum(np.diff(xs) ** 2) + np.sum(V_array(xs[:-1], spec)))


def residuals(config: Configuration, spec: PotentialSpec = DEFAULT_SPEC) -> np.ndarray:
    """2x_i - x_{i-1} - x_{i+1} + lam V'(x_i) at the interior sites."""
    if len(config) < 3:
        raise ValidationError("residuals need a window of at least 3 sites")
    x = config.positions
    return 2.0 * x[1:-1] - x[:-2] - x[2:] + V_prime_array(x[1:-1], spec)


def equilibrium_residual(config: Configuration, spec: PotentialSpec = DEFAULT_SPEC,
                         edge: int = 0) -> float:
    """Largest interior residual, ignoring `edge` further sites at each end."""
    r = residuals(config, spec)
    if edge:
        r = r[edge:-edge]
    if r.size == 0:
        raise ValidationError("window too small for the requested edge trim")
    return float(np.max(np.abs(r)))


def _window_estimate(config: Configuration, half_width: int,
                     anchor: Optional[AnchorFn]) -> RotationEstimate:
    idx = np.arange(-half_width, half_width + 1)
    x = config.positions[idx - config.i_min]
    est = (x[-1] - x[0]) / (2 * half_width)
    if anchor is None:
        return RotationEstimate(float(est), None)
    dist = float(np.max(np.abs(x - anchor.values(idx))))
    return RotationEstimate(float(est), 2.0 * dist / (2 * half_width))


def _check_symmetric(config: Configuration) -> int:
    n = config.i_max
    if config.i_min != -n or n < 10:
        raise ValidationError(
            f"rotation estimates need a window [-n, n] with n >= 10, got "
            f"[{config.i_min}, {config.i_max}]"
        )
    return n


def rotation_number_estimate(config: Configuration) -> RotationEstimate:
    """(x_max - x_min) / (i_max - i_min) with 2 sup|x - h| / (i_max - i_min) as bound."""
    n = _check_symmetric(config)
    return _window_estimate(config, n, config.anchor)


def rotation_report(config: Configuration) -> RotationReport:
    n = _check_symmetric(config)
    anchor = config.anchor
    full = _window_estimate(config, n, anchor)
    half = _window_estimate(config, n // 2, anchor)
    x0 = config.at(0)
    left = (x0 - config.at(-n)) / n
    right = (config.at(n) - x0) / n
    flag = None
    if anchor is not None:
        flag = abs(full.estimate - half.estimate) > full.error_bound + half.error_bound
    return RotationReport(full, half, left, right, flag)


def type_distance(config: Configuration, h: AnchorFn) -> float:
    """sup_i |x_i - h(i)| over the window."""
    return float(np.max(np.abs(config.positions - h.values(config.indices))))


def single_site_improvement(config: Configuration, i: int,
                            spec: PotentialSpec = DEFAULT_SPEC) -> Optional[Improvement]:
    """
    Move x_i to lower H(x_{i-1}, .) + H(., x_{i+1}).

    With u = (x_{i-1} + x_{i+1}) / 2 and g the chain point nearest x_i the
    candidate is u when |u - g| <= 1/2, g + 1/3 when u - g > 1/2 and
    g - 1/3 when u - g < -1/2. Returns None unless the decrease is positive.
    """
    if not config.i_min < i < config.i_max:
        raise ValidationError(f"site {i} is not interior to [{config.i_min}, {config.i_max}]")
    x = config.at(i)
    if abs(offset(x, spec)) > CORE:
        raise PreconditionError(f"x_{i} = {x} is outside the quadratic part of V")
    g = float(nearest_point(x, spec))
    left, right = config.at(i - 1), config.at(i + 1)
    ubar = 0.5 * (left + right)
    d = ubar - g
    if abs(d) <= 0.5:
        new = ubar
    elif d > 0.5:
        new = g + 1.0 / 3.0
    else:
        new = g - 1.0 / 3.0
    before = pair_energy(left, x, spec) + pair_energy(x, right, spec)
    after = pair_energy(left, new, spec) + pair_energy(new, right, spec)
    decrease = before - after
    if decrease > 0:
        return Improvement(new, decrease)
    return None


def find_improvable_site(config: Configuration, spec: PotentialSpec = DEFAULT_SPEC,
                         edge: int = 0) -> Optional[Tuple[int, Improvement]]:
    """Interior site with the largest single-site decrease, if any."""
    best = None
    for i in range(config.i_min + 1 + edge, config.i_max - edge):
        try:
            imp = single_site_improvement(config, i, spec)
        except PreconditionError:
            continue
        if imp is not None and (best is None or imp.decrease > best[1].decrease):
            best = (i, imp)
    return best


def _grid_minimum(grids: List[np.ndarray], x_start: float, x_end: float,
                  spec: PotentialSpec) -> Tuple[float, np.ndarray]:
    # min-plus sweep over the interior sites, endpoints fixed
    v_start = float(V_array(np.array([x_start]), spec)[0])
    cost = 0.5 * (x_start - grids[0]) ** 2 + v_start + V_array(grids[0], spec)
    back = []
    for prev, cur in zip(grids[:-1], grids[1:]):
        total = cost[:, None] + 0.5 * (prev[:, None] - cur[None, :]) ** 2
        arg = np.argmin(total, axis=0)
        back.append(arg)
        cost = total[arg, np.arange(cur.size)] + V_array(cur, spec)
    final = cost + 0.5 * (grids[-1] - x_end) ** 2
    k = int(np.argmin(final))
    picks = [k]
    for arg in reversed(back):
        picks.append(int(arg[picks[-1]]))
    picks.reverse()
    return float(final[k]), np.array([g[p] for g, p in zip(grids, picks)])


def segment_minimum(config: Configuration, j: int, k: int, grid_step: float = 1e-2,
                    spec: PotentialSpec = DEFAULT_SPEC, refine_step: float = 1e-3) -> SegmentMinimum:
    """Minimise the segment energy over interior sites on x_i +- 1, endpoints fixed."""
    if not (config.contains(j) and config.contains(k)):
        raise WindowError(f"segment [{j}, {k}] outside [{config.i_min}, {config.i_max}]")
    if not 1 <= k - j <= 4:
        raise ValidationError(f"brute force needs 1 <= k - j <= 4, got {k - j}")
    xs = config.positions[j - config.i_min:k - config.i_min + 1]
    current = _segment_energy_array(xs, spec)
    if k - j == 1:
        # no interior site to vary
        return SegmentMinimum(current, np.empty(0), current)

    steps = int(round(1.0 / grid_step))
    offsets = grid_step * np.arange(-steps, steps + 1)
    energy, best = _grid_minimum([x + offsets for x in xs[1:-1]], xs[0], xs[-1], spec)

    if refine_step:
        fine = refine_step * np.arange(-int(round(grid_step / refine_step)),
                                       int(round(grid_step / refine_step)) + 1)
        e2, b2 = _grid_minimum([b + fine for b in best], xs[0], xs[-1], spec)
        if e2 < energy:
            energy, best = e2, b2
    return SegmentMinimum(energy, best, current)


def brute_force_segment_check(config: Configuration, j: int, k: int, grid_step: float = 1e-2,
                              spec: PotentialSpec = DEFAULT_SPEC, refine_step: float = 1e-3,
                              tol: float = 1e-10) -> bool:
    """True iff no grid competitor with the same endpoints has lower energy."""
    result = segment_minimum(config, j, k, grid_step, spec, refine_step)
    if result.improvement > tol:
        logger.debug("segment [%d, %d] improvable by %.3e", j, k, result.improvement)
        return False
    return True
