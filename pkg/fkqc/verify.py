"""
Verification runner for the invariant suites.
"""

import logging
from typing import Callable, Dict, List, Tuple

import numpy as np

from . import chain, fibword
from .energy import equilibrium_residual, find_improvable_site, segment_energy
from .errors import ContractionError, FKQCError
from .golden import DEFAULT_THETA, TAU_FLOAT, tau_power
from .minimal import (OptimizerSettings, collapse, combinatorics_certificate, level_one_energy, lift,
                      minimality_sweep, optimize_level, project, rotation_number_level,
                      sandwich_bound)
from .models import AILParams, LevelConfig, LevelGeometry
from .potential import (DEFAULT_SPEC, V, ZETA_AT_ZERO, equivariance_sweep, random_golden, zeta,
                        zeta_prime, zeta_second_at_zero)
from .solver import FixedPointResult, equilibrium, solve_fixed_point

logger = logging.getLogger(__name__)

SUITES = ("fibword", "chain", "potential", "solver", "minimal")

# windows holding at least ten complete super-intervals of each type
_CERTIFICATE_WINDOWS = {1: 40, 2: 100, 3: 300, 4: 600}


class Check:
    """A single named invariant check."""

    def __init__(self, name: str, func: Callable[[], Tuple[bool, str]]):
        self.name = name
        self.func = func
        self.detail = ""
        self.passed = False

    def run(self) -> bool:
        try:
            self.passed, self.detail = self.func()
        except FKQCError as e:
            self.passed, self.detail = False, f"error: {e}"
        return self.passed

    def __repr__(self):
        return f"Check({self.name!r}, passed={self.passed})"


class VerificationRunner:
    """Runs named checks grouped in suites and reports results."""

    def __init__(self, samples: int = 1000, seed: int = 0):
        self.samples = samples
        self.seed = seed
        self.settings = OptimizerSettings(restarts=3, seed=seed)
        self._equilibria: Dict[str, FixedPointResult] = {}
        self._geometries: Dict[int, LevelGeometry] = {}
        self._levels: Dict[Tuple[int, int], LevelConfig] = {}

    def run(self, suite: str = "all") -> Tuple[int, int]:
        """
        Run one suite, or every suite for "all".

        Returns:
            Tuple of (passed_count, total_count)
        """
        if suite == "all":
            passed = total = 0
            for name in SUITES:
                p, t = self.run(name)
                passed += p
                total += t
            print("\nAll suites")
            self._print_summary(passed, total)
            return passed, total

        checks = self.checks(suite)
        passed = 0
        self._print_header(suite)
        for i, check in enumerate(checks):
            logger.debug("running %s", check.name)
            if check.run():
                passed += 1
            self._print_check_result(i + 1, check)
        self._print_summary(passed, len(checks))
        return passed, len(checks)

    def checks(self, suite: str) -> List[Check]:
        table = {
            "fibword": [
                ("|u^(i)| = tau^i for i <= 30", self.check_word_lengths),
                ("letter counts (f_{i-1}, f_{i-2})", self.check_letter_counts),
                ("palindrome cores for 3 <= i <= 20", self.check_palindromes),
                ("no bb or aaa in w", self.check_forbidden),
                ("M^n through tau-powers", self.check_matrix_powers),
            ],
            "chain": [
                ("alpha/beta greedy equals window scan", self.check_alpha_beta),
                ("finite local complexity", self.check_flc),
                ("window is non-periodic", self.check_non_periodic),
                ("super-intervals have lengths tau^(2l+1), tau^(2l+2)", self.check_super_intervals),
            ],
            "potential": [
                ("V equivariant on matched patches", self.check_equivariance),
                ("zeta is C1 at 1/4 and 1/3", self.check_c1),
                ("zeta''(0) = -128", self.check_curvature),
                ("V on chain points equals lam zeta(0)", self.check_maxima),
            ],
            "solver": [
                ("contraction ratio <= 1/32", self.check_contraction_ratio),
                ("equilibrium residual and ball", self.check_equilibrium),
                ("tridiagonal agrees with fixed point", self.check_method_agreement),
                ("lambda below threshold is rejected", self.check_threshold),
                ("equilibrium is not minimal", self.check_non_minimal),
            ],
            "minimal": [
                ("rho_l = (3 tau + 1)/2 exactly", self.check_rotation_identity),
                ("level-1 optimum is antipodal", self.check_level_one),
                ("collapse after project equals project", self.check_project_collapse),
                ("atoms per sheet spread <= 2", self.check_certificate),
                ("3-site segments are minimal", self.check_minimality),
                ("slope within the sandwich bound", self.check_sandwich),
                ("level-5 atoms stay near the line rho n", self.check_figure_band),
            ],
        }
        if suite not in table:
            raise ValueError(f"Unknown suite {suite!r}, expected one of {SUITES + ('all',)}")
        return [Check(name, func) for name, func in table[suite]]

    # fibword

    def check_word_lengths(self) -> Tuple[bool, str]:
        bad = [i for i in range(1, 31) if fibword.one_sided_word(i).length != tau_power(i)]
        return not bad, f"mismatching levels: {bad}" if bad else "levels 1..30"

    def check_letter_counts(self) -> Tuple[bool, str]:
        f = fibword.fibonacci
        bad = [i for i in range(1, 31) if fibword.letter_counts(i) != (f(i - 1), f(i - 2))]
        return not bad, f"mismatching levels: {bad}" if bad else "levels 1..30"

    def check_palindromes(self) -> Tuple[bool, str]:
        bad = [i for i in range(3, 21) if not fibword.is_palindrome_core(i)]
        return not bad, f"failing levels: {bad}" if bad else "levels 3..20"

    def check_forbidden(self) -> Tuple[bool, str]:
        span = fibword.fibonacci(18)
        ok = not fibword.contains_forbidden(fibword.two_sided_window(-span, span))
        return ok, f"window [-{span}, {span})"

    def check_matrix_powers(self) -> Tuple[bool, str]:
        bad = []
        for n in range(1, 21):
            exact = fibword.substitution_matrix_power(n).astype(float)
            if not np.allclose(exact, fibword.substitution_matrix_closed_form(n), rtol=1e-12):
                bad.append(n)
        return not bad, f"mismatching powers: {bad}" if bad else "n = 1..20"

    # chain

    def check_alpha_beta(self) -> Tuple[bool, str]:
        rng = np.random.default_rng(self.seed)
        points = chain.points_range(-800, 800)
        mismatches = 0
        tried = 0
        while tried < self.samples:
            x = random_golden(rng, 400)
            if not -1000 <= x <= 1000:
                continue
            tried += 1
            if chain.alpha_beta(x) != chain.scan_alpha_beta(x, points):
                mismatches += 1
        return mismatches == 0, f"{tried - mismatches}/{tried} inputs agree"

    def check_flc(self) -> Tuple[bool, str]:
        small = chain.patch_classes(2, -500, 500)
        large = chain.patch_classes(2, -2000, 2000)
        return small == large, f"radius-2 classes: {small} on [-500, 500], {large} on [-2000, 2000]"

    def check_non_periodic(self) -> Tuple[bool, str]:
        return chain.is_non_periodic_window(fibword.two_sided_window(-500, 500)), "w[-500, 500)"

    def check_super_intervals(self) -> Tuple[bool, str]:
        counted = []
        for l in (1, 2, 3):
            pts = chain.super_points(l, -3000, 3000)
            for a, b in zip(pts, pts[1:]):
                chain.interval_type(l, b - a)
            counted.append(len(pts) - 1)
        return True, f"intervals checked per level: {counted}"

    # potential

    def check_equivariance(self) -> Tuple[bool, str]:
        equal, tried = equivariance_sweep(self.samples, self.seed)
        return equal == tried, f"{equal}/{tried} matched pairs agree exactly"

    def check_c1(self) -> Tuple[bool, str]:
        eps = 1e-9
        jumps = []
        for t in (0.25, 1.0 / 3.0, -0.25, -1.0 / 3.0):
            jumps.append(abs(zeta(t - eps) - zeta(t + eps)))
            jumps.append(abs(zeta_prime(t - eps) - zeta_prime(t + eps)))
        worst = max(jumps)
        return worst < 1e-5, f"largest jump across a seam: {worst:.3e}"

    def check_curvature(self) -> Tuple[bool, str]:
        h = 1e-6
        fd = (zeta_prime(0.1 + h) - zeta_prime(0.1 - h)) / (2 * h)
        ok = zeta_second_at_zero() == -128.0 and abs(fd + 128.0) < 1e-6
        return ok, f"finite difference at 0.1: {fd:.9f}"

    def check_maxima(self) -> Tuple[bool, str]:
        bad = [i for i in range(-200, 201) if V(chain.point(i)) != DEFAULT_SPEC.lam * ZETA_AT_ZERO]
        return not bad, f"{len(bad)} of 401 chain points differ"

    # solver

    def _equilibrium(self, method: str = "fixed-point") -> FixedPointResult:
        if method not in self._equilibria:
            self._equilibria[method] = equilibrium(AILParams(n=500), method)
        return self._equilibria[method]

    def check_contraction_ratio(self) -> Tuple[bool, str]:
        deltas = self._equilibrium().deltas
        ratios = [b / a for a, b in zip(deltas, deltas[1:]) if a > 1e-14]
        worst = max(ratios) if ratios else 0.0
        return worst <= 1.0 / 32.0 + 1e-9, f"observed ratio {worst:.6g} over {len(deltas)} iterations"

    def check_equilibrium(self) -> Tuple[bool, str]:
        result = self._equilibrium()
        config = result.configuration
        window = config.meta["window"]
        residual = equilibrium_residual(config, edge=1)
        spread = float(np.max(np.abs(config.meta["deviation"])))
        ok = result.iterations <= 12 and residual <= 1e-9 and spread <= TAU_FLOAT / 62.0
        return ok, (f"{result.iterations} iterations, residual {residual:.3e}, "
                    f"sup|u - g| = {spread:.6g} (ball {TAU_FLOAT / 62.0:.6g}, n = {window.n})")

    def check_method_agreement(self) -> Tuple[bool, str]:
        a = self._equilibrium().configuration
        b = self._equilibrium("tridiagonal").configuration
        central = slice(250, 751)
        diff = float(np.max(np.abs(a.positions[central] - b.positions[central])))
        return diff <= 1e-8, f"central sup difference {diff:.3e}"

    def check_threshold(self) -> Tuple[bool, str]:
        try:
            solve_fixed_point(AILParams(lam=0.01, n=20))
        except ContractionError as e:
            return True, str(e)
        return False, "lambda = 0.01 was accepted"

    def check_non_minimal(self) -> Tuple[bool, str]:
        config = self._equilibrium().configuration
        found = find_improvable_site(config, edge=2)
        if found is None:
            return False, "no improvable site"
        i, imp = found
        moved = config.with_position(i, imp.position)
        direct = segment_energy(config, i - 1, i + 1) - segment_energy(moved, i - 1, i + 1)
        ok = imp.decrease > 1e-10 and abs(direct - imp.decrease) <= 1e-12
        return ok, f"site {i}: decrease {imp.decrease:.6g}, direct {direct:.6g}"

    # minimal

    def _geometry(self, l: int) -> LevelGeometry:
        if l not in self._geometries:
            self._geometries[l] = optimize_level(l, self.settings)
        return self._geometries[l]

    def _level(self, l: int, window: int) -> LevelConfig:
        key = (l, window)
        if key not in self._levels:
            self._levels[key] = lift(l, self._geometry(l), window)
        return self._levels[key]

    def check_rotation_identity(self) -> Tuple[bool, str]:
        bad = [l for l in range(1, 7) if rotation_number_level(l) != DEFAULT_THETA]
        return not bad, f"mismatching levels: {bad}" if bad else f"levels 1..6 give {DEFAULT_THETA}"

    def check_level_one(self) -> Tuple[bool, str]:
        geometry = self._geometry(1)
        worst_pos = worst_energy = 0.0
        for circle in (1, 2):
            c = geometry.circumference(circle)
            d = float(geometry.free_points[circle - 1][0])
            worst_pos = max(worst_pos, abs(d - c / 2.0))
            best = geometry.report.best_energy[circle - 1]
            worst_energy = max(worst_energy, abs(best - level_one_energy(circle, d)))
        ok = worst_pos <= 1e-6 and worst_energy <= 1e-10
        return ok, f"distance from antipode {worst_pos:.3e}, energy mismatch {worst_energy:.3e}"

    def check_project_collapse(self) -> Tuple[bool, str]:
        rng = np.random.default_rng(self.seed)
        xs: List = list(chain.points_range(-60, 60))
        xs += [float(x) for x in rng.uniform(-150.0, 150.0, size=min(self.samples, 200))]
        bad = 0
        for l in (1, 2):
            for x in xs:
                if collapse(l, project(l + 1, x)) != project(l, x):
                    bad += 1
        return bad == 0, f"{2 * len(xs) - bad}/{2 * len(xs)} points agree"

    def check_certificate(self) -> Tuple[bool, str]:
        spreads = {}
        ok = True
        for l, window in _CERTIFICATE_WINDOWS.items():
            report = combinatorics_certificate(self._level(l, window))
            spreads[l] = report.spread
            ok = ok and report.passed
        return ok, f"spread per level: {spreads}"

    def check_minimality(self) -> Tuple[bool, str]:
        passed, tried = minimality_sweep(self._level(4, 200), samples=50, seed=self.seed)
        return passed == tried, f"{passed}/{tried} segments admit no cheaper competitor"

    def check_sandwich(self) -> Tuple[bool, str]:
        bound = sandwich_bound(self._level(5, 50))
        error = abs(bound.estimate - bound.rotation)
        ok = bound.contains_estimate() and error <= bound.width + 1e-12 and bound.width <= 0.4
        return ok, (f"{bound.lower:.6f} <= {bound.estimate:.6f} <= {bound.upper:.6f}, "
                    f"|slope - rho| = {error:.3e} <= {bound.width:.3e}")

    def check_figure_band(self) -> Tuple[bool, str]:
        band = TAU_FLOAT / 2.0 + TAU_FLOAT / 62.0
        d = sandwich_bound(self._level(5, 50)).discrepancy
        return d <= band, f"sup |theta_n - rho n| = {d:.4f} (band {band:.4f})"

    def _print_header(self, suite: str):
        """Print suite header."""
        print(f"\nVerifying {suite} suite")
        print("=" * 50)

    def _print_check_result(self, check_num: int, check: Check):
        """Print result for a single check."""
        status = "PASS" if check.passed else "FAIL"
        print(f"Check {check_num}: {status}")
        print(f"  Name:   {check.name}")
        print(f"  Detail: {check.detail}")
        print()

    def _print_summary(self, passed: int, total: int):
        """Print run summary."""
        print("=" * 50)
        print(f"Summary: {passed}/{total} checks passed")

        if passed == total:
            print("All checks passed! ✓")
        else:
            failed = total - passed
            print(f"{failed} check(s) failed ✗")