"""
Minimal configurations through the level-l branched manifolds.

At level l the line is cut at the super-points S^l into blocks A_l (length
tau^(2l+1)) and B_l (length tau^(2l+2)). Rolling every block onto its own
circle gives two circles tangent at R_l. Atoms are optimized once per circle
and the optimum is copied into every block of the same type.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import chain, fibword
from .energy import brute_force_segment_check
from .errors import InsufficientWindowError, ValidationError
from .golden import DEFAULT_THETA, SQRT5, TAU, TAU_FLOAT, ZERO, GoldenNumber, Number, tau_power
from .models import (AnchorFn, CirclePoint, Configuration, LevelConfig,
                     LevelGeometry, PotentialSpec)
from .potential import CORE, DEFAULT_SPEC, EDGE, V, zeta_array, zeta_prime_array

logger = logging.getLogger(__name__)

_BUMP_CUTS = np.array([-EDGE, -CORE, 0.0, CORE, EDGE])
# largest |zeta''|, reached on the flank at |x| = 1/3
_ZETA_SECOND_MAX = 896.0


@dataclass
class OptimizerSettings:
    """Knobs of the per-circle minimisation."""
    restarts: int = 20
    sweeps: int = 4
    rounds: int = 40
    seed: int = 0
    grid: int = 64
    xatol: float = 1e-12
    tol: float = 1e-12
    jitter: float = 0.25
    polish: bool = True

    def __post_init__(self):
        if self.restarts < 1 or self.sweeps < 1 or self.rounds < 1 or self.grid < 2:
            raise ValidationError("restarts, sweeps and rounds must be >= 1 and grid >= 2")


@dataclass
class CircleMinimum:
    energy: float
    points: np.ndarray
    converged: bool


@dataclass
class OptimizationReport:
    """Per-circle outcome over all restarts."""
    level: int
    uniform_energy: Tuple[float, float]
    best_energy: Tuple[float, float]
    minima: Dict[int, List[CircleMinimum]] = field(default_factory=dict)
    converged: bool = True

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "uniform_energy": list(self.uniform_energy),
            "best_energy": list(self.best_energy),
            "distinct_minima": {str(c): [m.energy for m in ms] for c, ms in self.minima.items()},
            "converged": self.converged,
        }


@dataclass
class CertificateReport:
    """Atoms per super-interval and the largest gap of a lifted configuration."""
    counts: Dict[str, List[int]]
    spread: Dict[str, int]
    max_gap: float
    gap_bound: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "counts": {k: len(v) for k, v in self.counts.items()},
            "spread": self.spread,
            "max_gap": self.max_gap,
            "gap_bound": self.gap_bound,
            "passed": self.passed,
        }


class SandwichBound(NamedTuple):
    """Slope bracket of a lifted window and the resulting bounds on |slope - rho|."""
    lower: float
    upper: float
    rotation: float
    estimate: float
    discrepancy: float
    window: int

    @property
    def bracket_width(self) -> float:
        return max(abs(self.lower - self.rotation), abs(self.upper - self.rotation))

    @property
    def width(self) -> float:
        return min(self.bracket_width, self.discrepancy / self.window)

    def contains_estimate(self, tol: float = 1e-9) -> bool:
        return self.lower - tol <= self.estimate <= self.upper + tol

    def to_json(self) -> dict:
        return dict(self._asdict(), bracket_width=self.bracket_width, width=self.width)


@dataclass
class StabilizationReport:
    configuration: Configuration
    differences: List[float]
    levels: List[LevelConfig] = field(repr=False, default_factory=list)


def level_counts(l: int) -> Tuple[int, int]:
    """(N_{l,1}, N_{l,2}) from N_1 = (2, 2) and N_{l+1} = M N_l."""
    if l < 1:
        raise ValidationError(f"level must be >= 1, got {l}")
    n1, n2 = 2, 2
    for _ in range(l - 1):
        n1, n2 = n1 + n2, n1 + 2 * n2
    return n1, n2


def level_circumferences(l: int) -> Tuple[GoldenNumber, GoldenNumber]:
    return tau_power(2 * l + 1), tau_power(2 * l + 2)


def level_geometry(l: int) -> LevelGeometry:
    """Geometry of level l with free atoms spaced uniformly on each circle."""
    counts = level_counts(l)
    circ = level_circumferences(l)
    free = tuple(float(c) * np.arange(1, n) / n for c, n in zip(circ, counts))
    return LevelGeometry(l, circ, counts, free)


def project(l: int, x: Number) -> CirclePoint:
    """pi_l: x lands on the circle of its super-interval at arc x - alpha_l(x)."""
    x = GoldenNumber.coerce(x)
    a, b = chain.super_alpha_beta(l, x)
    return CirclePoint(chain.interval_type(l, b - a).circle, x - a)


def collapse(l: int, p: CirclePoint) -> CirclePoint:
    """kappa_l: a level-(l+1) point to the level-l block containing it (A' = AB, B' = ABB)."""
    if l < 1:
        raise ValidationError(f"level must be >= 1, got {l}")
    a_len, b_len = level_circumferences(l)
    limit = a_len + (b_len if p.circle == 1 else b_len * 2)
    s = p.arc
    if not s < limit:
        raise ValidationError(f"arc {s} exceeds the level-{l + 1} circle {p.circle}")
    if s < a_len:
        return CirclePoint(1, s)
    s = s - a_len
    if s < b_len:
        return CirclePoint(2, s)
    return CirclePoint(2, s - b_len)


def preimage(l: int, p: CirclePoint) -> GoldenNumber:
    """A point of the line over p: the A_l block after 0 or the B_l block before 0."""
    if p.circle == 1:
        return p.arc
    return p.arc - level_circumferences(l)[1]


def potential_on_level(l: int, p: CirclePoint, spec: PotentialSpec = DEFAULT_SPEC) -> float:
    return V(preimage(l, p), spec)


class CirclePotential:
    """Vectorised V on one circle, read off the chain points of its block."""

    def __init__(self, l: int, circle: int, spec: PotentialSpec = DEFAULT_SPEC):
        self.l = l
        self.circle = circle
        self.spec = spec
        block = fibword.super_words(l)[circle - 1]
        arcs = [ZERO]
        for c in block.letters:
            arcs.append(arcs[-1] + (TAU if c == "a" else 1))
        self.points = np.array([float(p) for p in arcs])
        self.circumference = float(level_circumferences(l)[circle - 1])

    def _offset(self, s: np.ndarray) -> np.ndarray:
        k = np.clip(np.searchsorted(self.points, s, side="right") - 1, 0, self.points.size - 2)
        a, b = self.points[k], self.points[k + 1]
        return s - np.where(2.0 * s <= a + b, a, b)

    def __call__(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if not self.spec.substrate:
            return np.zeros_like(s)
        return self.spec.lam * zeta_array(self._offset(s))

    def derivative(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if not self.spec.substrate:
            return np.zeros_like(s)
        return self.spec.lam * zeta_prime_array(self._offset(s))


def circle_energy(points: np.ndarray, potential: CirclePotential) -> float:
    """Sum over the closed chain R, b_1, .., b_{N-1}, R of spring and site terms."""
    p = np.concatenate(([0.0], points, [potential.circumference]))
    return float(0.5 * np.sum(np.diff(p) ** 2) + np.sum(potential(p[:-1])))


def circle_energy_gradient(points: np.ndarray, potential: CirclePotential) -> np.ndarray:
    p = np.concatenate(([0.0], points, [potential.circumference]))
    return 2.0 * p[1:-1] - p[:-2] - p[2:] + potential.derivative(p[1:-1])


def level_one_energy(circle: int, d: float, spec: PotentialSpec = DEFAULT_SPEC) -> float:
    """E(R_1, b, R_1) = d^2 - tau^(2+i) d + V(d) + tau^(4+2i)/2 + V(0), V read on circle i."""
    c = TAU_FLOAT ** (2 + circle)
    v_d = potential_on_level(1, CirclePoint(circle, d), spec)
    v_0 = potential_on_level(1, CirclePoint(circle, 0), spec)
    return d * d - c * d + v_d + c * c / 2.0 + v_0


class LevelOptimizer:
    """Cyclic coordinate descent with bounded line searches, polished by L-BFGS-B."""

    def __init__(self, l: int, settings: Optional[OptimizerSettings] = None,
                 spec: PotentialSpec = DEFAULT_SPEC):
        if l < 1:
            raise ValidationError(f"level must be >= 1, got {l}")
        self.l = l
        self.settings = settings or OptimizerSettings()
        self.spec = spec
        self.geometry = level_geometry(l)

    def _candidates(self, lo: float, hi: float,
                    potential: CirclePotential) -> Tuple[np.ndarray, np.ndarray]:
        """Sample points in (lo, hi) reaching every well, and the stretch each one lies in."""
        near = potential.points[(potential.points > lo - EDGE) & (potential.points < hi + EDGE)]
        cuts = (near[:, None] + _BUMP_CUTS[None, :]).ravel()
        stops = np.concatenate(([lo], np.sort(cuts[(cuts > lo) & (cuts < hi)]), [hi]))
        # off the bumps the energy is the spring parabola, clipped to each stretch
        flat = np.clip(0.5 * (lo + hi), stops[:-1], stops[1:])
        ticks = EDGE * np.linspace(-1.0, 1.0, self.settings.grid)
        bumps = (near[:, None] + ticks[None, :]).ravel()
        cand = np.concatenate((flat, bumps))
        cand = cand[(cand > lo) & (cand < hi)]
        stretch = np.clip(np.searchsorted(stops, cand, side="right") - 1, 0, stops.size - 2)
        return cand, stretch

    def _line_search(self, p: np.ndarray, j: int, potential: CirclePotential) -> None:
        lo, hi = p[j - 1], p[j + 1]

        def f(s):
            return 0.5 * (s - lo) ** 2 + 0.5 * (hi - s) ** 2 + float(potential(s))

        best_x, best = p[j], f(p[j])
        cand, stretch = self._candidates(lo, hi, potential)
        if cand.size == 0:
            return
        values = 0.5 * (cand - lo) ** 2 + 0.5 * (hi - cand) ** 2 + potential(cand)
        h = 2.0 * EDGE / (self.settings.grid - 1)
        floor = float(np.min(values))
        # tick sampling misjudges a well by at most curvature * h^2 / 8
        margin = (2.0 + self.spec.lam * _ZETA_SECOND_MAX) * h * h / 4.0
        for k in np.unique(stretch):
            idx = np.flatnonzero(stretch == k)
            i = idx[np.argmin(values[idx])]
            if values[i] > floor + margin:
                continue
            if values[i] < best:
                best_x, best = cand[i], values[i]
            res = minimize_scalar(f, bounds=(max(lo, cand[i] - h), min(hi, cand[i] + h)),
                                  method="bounded", options={"xatol": self.settings.xatol})
            if res.fun < best and lo < res.x < hi:
                best_x, best = res.x, res.fun
        p[j] = best_x

    def _polish(self, b: np.ndarray, potential: CirclePotential) -> np.ndarray:
        c = potential.circumference
        res = minimize(circle_energy, b, args=(potential,), jac=circle_energy_gradient,
                       method="L-BFGS-B", bounds=[(0.0, c)] * b.size,
                       options={"ftol": 1e-15, "gtol": 1e-11, "maxiter": 2000})
        cand = np.sort(res.x)
        ok = (cand.size == 0 or (cand[0] > 0 and cand[-1] < c and np.all(np.diff(cand) > 0)))
        if ok and circle_energy(cand, potential) < circle_energy(b, potential):
            return cand
        return b

    def minimize_circle(self, circle: int, start: np.ndarray) -> CircleMinimum:
        potential = CirclePotential(self.l, circle, self.spec)
        p = np.concatenate(([0.0], start, [potential.circumference]))
        energy = circle_energy(p[1:-1], potential)
        converged = False
        for round_no in range(self.settings.rounds):
            before = p.copy()
            for _ in range(self.settings.sweeps):
                for j in range(1, p.size - 1):
                    self._line_search(p, j, potential)
            if self.settings.polish and p.size > 3:
                p[1:-1] = self._polish(p[1:-1], potential)
            new_energy = circle_energy(p[1:-1], potential)
            change = float(np.max(np.abs(p - before))) if p.size > 2 else 0.0
            logger.debug("level %d circle %d round %d: energy %.15g change %.3e",
                         self.l, circle, round_no, new_energy, change)
            if energy - new_energy <= self.settings.tol and change <= 1e-9:
                energy = new_energy
                converged = True
                break
            energy = new_energy
        if not converged:
            logger.warning("level %d circle %d: optimizer stopped after %d rounds",
                           self.l, circle, self.settings.rounds)
        return CircleMinimum(energy, p[1:-1].copy(), converged)

    def _starts(self, circle: int) -> List[np.ndarray]:
        uniform = self.geometry.free_points[circle - 1]
        c = self.geometry.circumference(circle)
        n = self.geometry.counts[circle - 1]
        rng = np.random.default_rng([self.settings.seed, self.l, circle])
        starts = [uniform.copy()]
        for _ in range(self.settings.restarts - 1):
            jitter = rng.uniform(-1.0, 1.0, uniform.size) * self.settings.jitter * c / n
            starts.append(np.clip(np.sort(uniform + jitter), 1e-9, c - 1e-9))
        return starts

    @staticmethod
    def _distinct(results: List[CircleMinimum]) -> List[CircleMinimum]:
        kept: List[CircleMinimum] = []
        for r in sorted(results, key=lambda m: m.energy):
            if not any(abs(r.energy - k.energy) <= 1e-9 and
                       (r.points.size == 0 or np.max(np.abs(r.points - k.points)) <= 1e-6)
                       for k in kept):
                kept.append(r)
        return kept

    def run(self) -> LevelGeometry:
        best_points = []
        minima = {}
        uniform_energy = []
        best_energy = []
        converged = True
        for circle in (1, 2):
            potential = CirclePotential(self.l, circle, self.spec)
            uniform_energy.append(circle_energy(self.geometry.free_points[circle - 1], potential))
            results = [self.minimize_circle(circle, s) for s in self._starts(circle)]
            distinct = self._distinct(results)
            minima[circle] = distinct
            best_points.append(distinct[0].points)
            best_energy.append(distinct[0].energy)
            converged = converged and distinct[0].converged
            logger.info("level %d circle %d: %d distinct minima, best energy %.12g",
                        self.l, circle, len(distinct), distinct[0].energy)
        report = OptimizationReport(self.l, tuple(uniform_energy), tuple(best_energy),
                                    minima, converged)
        return LevelGeometry(self.l, self.geometry.circumferences, self.geometry.counts,
                             (best_points[0], best_points[1]), report=report)


def optimize_level(l: int, settings: Optional[OptimizerSettings] = None,
                   spec: PotentialSpec = DEFAULT_SPEC) -> LevelGeometry:
    """Minimise the cyclic segment energy on both circles of level l."""
    return LevelOptimizer(l, settings, spec).run()


def _chain_reach(geometry: LevelGeometry, window: int) -> int:
    # chain points average 1 + 1/tau^2 apart, atoms about (3 tau + 1)/2
    atoms = window + max(geometry.counts) + 1
    length = float(DEFAULT_THETA) * atoms + 2.0 * geometry.circumference(2)
    return int(math.ceil(length / (1.0 + TAU_FLOAT ** -2))) + fibword.fibonacci(2 * geometry.l + 2)


def lift(l: int, geometry: LevelGeometry, window: int) -> LevelConfig:
    """Copy the circle atoms into every super-interval and index them with theta_0 = 0."""
    if geometry.l != l:
        raise ValidationError(f"geometry is for level {geometry.l}, not {l}")
    if window < 1:
        raise ValidationError(f"window must be >= 1, got {window}")
    reach = _chain_reach(geometry, window)
    while True:
        pts = chain.super_points(l, -reach, reach)
        types = [chain.interval_type(l, b - a) for a, b in zip(pts, pts[1:])]
        blocks = [float(a) + geometry.atoms(t.circle) for a, t in zip(pts, types)]
        pinned = [np.arange(blk.size) == 0 for blk in blocks]
        zero = pts.index(ZERO)
        k0 = sum(blk.size for blk in blocks[:zero])
        total = sum(blk.size for blk in blocks)
        if k0 >= window and total - k0 > window:
            break
        reach *= 2
    theta = np.concatenate(blocks)[k0 - window:k0 + window + 1]
    mask = np.concatenate(pinned)[k0 - window:k0 + window + 1]
    meta = {"anchor": AnchorFn.linear(), "level": l, "pinned": mask}
    config = Configuration(theta, -window, meta)
    return LevelConfig(l, geometry, config, list(pts), types)


def free_atom_indices(level_config: LevelConfig) -> np.ndarray:
    """Indices n whose atom is not pinned at a point of S^l."""
    config = level_config.configuration
    return config.indices[~config.meta["pinned"]]


def combinatorics_certificate(level_config: LevelConfig, min_intervals: int = 10) -> CertificateReport:
    """Atoms per complete super-interval (spread <= 2 per type) and max gap <= 2 tau^(2l+3)."""
    theta = level_config.theta
    l = level_config.level
    counts: Dict[str, List[int]] = {"A": [], "B": []}
    for a, b, t in zip(level_config.boundaries, level_config.boundaries[1:], level_config.types):
        fa, fb = float(a), float(b)
        if fa < theta[0] or fb > theta[-1]:
            continue
        n = int(np.searchsorted(theta, fb, side="left") - np.searchsorted(theta, fa, side="left"))
        counts[t.value].append(n)
    for key, values in counts.items():
        if len(values) < min_intervals:
            raise InsufficientWindowError(
                f"window holds {len(values)} complete {key}-intervals, need {min_intervals}"
            )
    spread = {key: max(v) - min(v) for key, v in counts.items()}
    max_gap = float(np.max(np.diff(theta)))
    gap_bound = 2.0 * float(tau_power(2 * l + 3))
    passed = all(s <= 2 for s in spread.values()) and max_gap <= gap_bound
    return CertificateReport(counts, spread, max_gap, gap_bound, passed)


def _block_walk(types: List, w: int, counts: Tuple[int, int],
                lengths: Tuple[float, float]) -> Tuple[float, float]:
    """Length of the complete blocks spanned by atoms 0..w, and of the block w falls into."""
    atoms, length = 0, 0.0
    for t in types:
        n, size = counts[t.circle - 1], lengths[t.circle - 1]
        if atoms + n > w:
            return length, size
        atoms += n
        length += size
        if atoms == w:
            return length, 0.0
    raise InsufficientWindowError(f"super-intervals end before atom {w}")


def sandwich_bound(level_config: LevelConfig) -> SandwichBound:
    """
    Bracket for the slope (theta_W - theta_-W) / 2W from block counts alone.

    Walking out from the origin, atoms 0..W fill complete A_l and B_l blocks
    of N_1 and N_2 atoms and then part of one more, so theta_W lies between
    the summed block lengths and that sum plus the partial block (zero when W
    lands on a super-point). The left side is read the same way. Separately,
    |slope - rho| <= sup_n |theta_n - rho n| / W.
    """
    l = level_config.level
    config = level_config.configuration
    w = config.i_max
    counts = level_counts(l)
    lengths = tuple(float(c) for c in level_circumferences(l))
    zero = level_config.boundaries.index(ZERO)
    right_full, right_part = _block_walk(level_config.types[zero:], w, counts, lengths)
    left_full, left_part = _block_walk(level_config.types[:zero][::-1], w, counts, lengths)

    rho = float(rotation_number_level(l))
    theta = level_config.theta
    return SandwichBound(
        lower=(right_full + left_full) / (2 * w),
        upper=(right_full + right_part + left_full + left_part) / (2 * w),
        rotation=rho,
        estimate=float(theta[-1] - theta[0]) / (2 * w),
        discrepancy=float(np.max(np.abs(theta - rho * config.indices))),
        window=w,
    )


def rotation_number_level(l: int) -> GoldenNumber:
    """1 / (N_1 / (sqrt5 tau^(2l+2)) + N_2 / (sqrt5 tau^(2l+1))), exactly."""
    n1, n2 = level_counts(l)
    freq_a = (SQRT5 * tau_power(2 * l + 2)).inverse()
    freq_b = (SQRT5 * tau_power(2 * l + 1)).inverse()
    return (freq_a * n1 + freq_b * n2).inverse()


def stabilize_across_levels(l_max: int, window: int, settings: Optional[OptimizerSettings] = None,
                            spec: PotentialSpec = DEFAULT_SPEC) -> StabilizationReport:
    """Lift levels 1 .. l_max on [-window, window] and report sup |theta_{l+1} - theta_l|."""
    if l_max < 2:
        raise ValidationError(f"l_max must be >= 2, got {l_max}")
    levels = []
    for l in range(1, l_max + 1):
        geometry = optimize_level(l, settings, spec)
        levels.append(lift(l, geometry, window))
    diffs = [float(np.max(np.abs(b.theta - a.theta))) for a, b in zip(levels, levels[1:])]
    for l, d in enumerate(diffs, start=1):
        logger.info("sup |theta_%d - theta_%d| = %.6g", l + 1, l, d)
    return StabilizationReport(levels[-1].configuration, diffs, levels)


def minimality_sweep(level_config: LevelConfig, samples: int = 50, seed: int = 0,
                     grid_step: float = 1e-2, spec: PotentialSpec = DEFAULT_SPEC) -> Tuple[int, int]:
    """Brute-force random 3-site segments centred on free atoms; returns (passed, tried)."""
    config = level_config.configuration
    free = free_atom_indices(level_config)
    free = free[(free > config.i_min) & (free < config.i_max)]
    if free.size == 0:
        raise InsufficientWindowError("no interior free atoms in the window")
    rng = np.random.default_rng(seed)
    centres = rng.choice(free, size=samples, replace=free.size < samples)
    passed = sum(brute_force_segment_check(config, int(n) - 1, int(n) + 1, grid_step, spec)
                 for n in centres)
    logger.info("minimality: %d/%d segments pass", passed, samples)
    return passed, samples
