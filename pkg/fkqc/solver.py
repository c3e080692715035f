"""
Anti-integrable equilibrium solver.

Near the anti-integrable limit every atom sits on the quadratic cap of a bump,
so the equilibrium equation 2u_i - u_{i-1} - u_{i+1} + lam V'(u_i) = 0 becomes
u_i = g(i) + (Delta u)_i / (lam zeta''(0)), where g(i) is the chain point
nearest the anchor h(i). The right-hand side is a contraction on the ball
|u_i - g(i)| <= r and is iterated from u = g.
"""

import logging
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from .errors import ContractionError, ConvergenceError, PreconditionError, ValidationError
from .golden import TAU_FLOAT, GoldenNumber
from .models import AILParams, AnchorFn, Configuration, PotentialSpec, TridiagonalSystem
from .potential import V_prime_array, min_lambda_nonminimal, nearest_point, zeta_second_at_zero

logger = logging.getLogger(__name__)

METHODS = ("fixed-point", "tridiagonal")


class FixedPointResult(NamedTuple):
    configuration: Configuration
    iterations: int
    final_delta: float
    deltas: List[float]


@dataclass
class AnchorWindow:
    """Anchor h and nearest chain points g on [-n-1, n+1]; the outer two are ghosts."""
    anchor: AnchorFn
    n: int
    g_exact: List[GoldenNumber] = field(repr=False)
    g: np.ndarray = field(repr=False)
    h: np.ndarray = field(repr=False)
    delta_g: np.ndarray = field(repr=False)

    @property
    def g_inner(self) -> np.ndarray:
        return self.g[1:-1]

    @property
    def h_inner(self) -> np.ndarray:
        return self.h[1:-1]


def anchor_g(h: AnchorFn, i: int) -> GoldenNumber:
    """Chain point nearest h(i), ties resolved towards alpha."""
    return nearest_point(h.exact(i))


def anchor_window(h: AnchorFn, n: int) -> AnchorWindow:
    g_exact = [anchor_g(h, i) for i in range(-n - 1, n + 2)]
    # second differences taken exactly, they stay O(1) while g grows with n
    delta = [float(g_exact[k - 1] - g_exact[k] * 2 + g_exact[k + 1])
             for k in range(1, len(g_exact) - 1)]
    return AnchorWindow(
        anchor=h,
        n=n,
        g_exact=g_exact,
        g=np.array([float(p) for p in g_exact]),
        h=h.values(range(-n - 1, n + 2)),
        delta_g=np.array(delta),
    )


def anchor_delta_sup(h: AnchorFn, n: int) -> float:
    """sup |(Delta h)_i| over [-n, n]."""
    return h.delta_bound(n)


def contraction_radius(lam: float, delta_h_sup: float) -> float:
    """Radius of the ball the contraction maps into itself.

    r = (2 tau + sup|Delta h|) / (-lam zeta''(0) - 4)
    """
    denom = -lam * zeta_second_at_zero() - 4.0
    if denom <= 0:
        raise ContractionError(f"lambda = {lam} gives no contraction (needs lambda > 1/32)")
    return (2.0 * TAU_FLOAT + delta_h_sup) / denom


# lam = 1 with a linear anchor: 2 tau / 124 = tau / 62
DEFAULT_RADIUS = contraction_radius(1.0, 0.0)


def lambda_threshold(h: AnchorFn, n: int) -> float:
    """max((2 tau + 1 + sup|Delta h|) / 32, 1/32) with the sup taken over [-n, n]."""
    d = anchor_delta_sup(h, n)
    if not np.isfinite(d):
        raise ValidationError(f"anchor {h} has unbounded second differences")
    return max((2.0 * TAU_FLOAT + 1.0 + d) / 32.0, min_lambda_nonminimal())


def check_contraction(params: AILParams) -> float:
    """Raise unless lambda exceeds the threshold; returns the ball radius."""
    threshold = lambda_threshold(params.anchor, params.n)
    if not params.lam > threshold:
        raise ContractionError(
            f"lambda = {params.lam} is below the threshold {threshold:.6g} "
            f"for guaranteed contraction"
        )
    return contraction_radius(params.lam, anchor_delta_sup(params.anchor, params.n))


def _phi_deviation(v: np.ndarray, delta_g: np.ndarray, step: float) -> np.ndarray:
    padded = np.concatenate(([0.0], v, [0.0]))
    lap = padded[:-2] - 2.0 * padded[1:-1] + padded[2:]
    return -step * (delta_g + lap)


def contraction_step(u: Configuration, window: AnchorWindow, step: float,
                     radius: float = DEFAULT_RADIUS) -> Configuration:
    """
    Phi(u)_i = g(i) - step * (Delta u)_i with ghosts u_{+-(n+1)} = g(+-(n+1)).

    Phi is defined on the ball sup |u - g| <= radius only; inputs outside it
    raise PreconditionError.
    """
    if len(u) != 2 * window.n + 1:
        raise ValidationError(f"configuration has {len(u)} sites, window needs {2 * window.n + 1}")
    v = u.positions - window.g_inner
    if np.max(np.abs(v)) > radius * (1.0 + 1e-12):
        raise PreconditionError(f"configuration lies outside the ball of radius {radius:.6g}")
    v_new = _phi_deviation(v, window.delta_g, step)
    return Configuration(window.g_inner + v_new, -window.n, dict(u.meta))


def fixed_point_defect(u: Configuration, window: AnchorWindow, step: float,
                       radius: float = DEFAULT_RADIUS) -> float:
    """sup |u - Phi(u)|."""
    return float(np.max(np.abs(contraction_step(u, window, step, radius).positions - u.positions)))


def _result_meta(params: AILParams, method: str, deviation: np.ndarray, window: AnchorWindow) -> dict:
    return {
        "anchor": params.anchor,
        "lam": params.lam,
        "method": method,
        "closure": params.closure,
        "deviation": deviation,
        "window": window,
    }


def solve_fixed_point(params: AILParams, window: Optional[AnchorWindow] = None) -> FixedPointResult:
    """Iterate the contraction from u = g until the sup-change is at most tol."""
    radius = check_contraction(params)
    window = window or anchor_window(params.anchor, params.n)
    step = params.step
    v = np.zeros(2 * params.n + 1)
    deltas: List[float] = []

    for iteration in range(1, params.max_iter + 1):
        v_new = _phi_deviation(v, window.delta_g, step)
        delta = float(np.max(np.abs(v_new - v)))
        deltas.append(delta)
        v = v_new
        logger.debug("iteration %d: sup-change %.3e", iteration, delta)
        if delta <= params.tol:
            break
    else:
        best = Configuration(window.g_inner + v, -params.n,
                             _result_meta(params, "fixed-point", v, window))
        raise ConvergenceError(
            f"no convergence to {params.tol:g} in {params.max_iter} iterations "
            f"(last change {deltas[-1]:.3e})",
            best=best, deltas=deltas,
        )

    spread = float(np.max(np.abs(v)))
    if spread > radius:
        logger.warning("fixed point leaves the ball: %.3e > %.3e", spread, radius)
    logger.info("fixed point after %d iterations, sup|u - g| = %.3e", iteration, spread)
    config = Configuration(window.g_inner + v, -params.n,
                           _result_meta(params, "fixed-point", v, window))
    return FixedPointResult(config, iteration, deltas[-1], deltas)


def thomas(sub: np.ndarray, main: np.ndarray, sup: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Forward elimination and back substitution, no pivoting."""
    m = rhs.size
    w = np.zeros(max(m - 1, 0))
    q = np.zeros(m)
    u = np.zeros(m)

    denom = main[0]
    q[0] = rhs[0] / denom
    for i in range(1, m):
        w[i - 1] = sup[i - 1] / denom
        denom = main[i] - sub[i - 1] * w[i - 1]
        q[i] = (rhs[i] - sub[i - 1] * q[i - 1]) / denom

    u[-1] = q[-1]
    for i in range(m - 2, -1, -1):
        u[i] = q[i] - w[i] * u[i + 1]
    return u


def tridiagonal_solve(n: int, alpha: float, rhs) -> np.ndarray:
    """Solve T_{2n+1} u = rhs for the (alpha, 1 - 2 alpha, alpha) matrix."""
    system = TridiagonalSystem(alpha, rhs)
    if system.size != 2 * n + 1:
        raise ValidationError(f"rhs has {system.size} entries, expected {2 * n + 1}")
    if alpha >= 0.25:
        logger.warning("alpha = %g: matrix is not diagonally dominant", alpha)
    return thomas(*system.diagonals(), system.rhs)


def solve_tridiagonal(params: AILParams, window: Optional[AnchorWindow] = None) -> FixedPointResult:
    """Equilibrium as the solution of the truncated linear system."""
    check_contraction(params)
    window = window or anchor_window(params.anchor, params.n)
    alpha = params.step
    rhs = window.g_inner.copy()
    if params.closure == "anchor":
        rhs[0] -= alpha * window.g[0]
        rhs[-1] -= alpha * window.g[-1]
    u = tridiagonal_solve(params.n, alpha, rhs)
    config = Configuration(u, -params.n,
                           _result_meta(params, "tridiagonal", u - window.g_inner, window))
    return FixedPointResult(config, 0, 0.0, [])


def equilibrium(params: AILParams, method: str = "fixed-point") -> FixedPointResult:
    if method == "fixed-point":
        return solve_fixed_point(params)
    if method == "tridiagonal":
        return solve_tridiagonal(params)
    raise ValidationError(f"unknown method {method!r}, expected one of {METHODS}")


def boundary_residuals(config: Configuration, window: AnchorWindow, spec: PotentialSpec) -> np.ndarray:
    """Equilibrium residual at every site, using the ghost anchors g(+-(n+1)) as outer neighbours."""
    x = np.concatenate(([window.g[0]], config.positions, [window.g[-1]]))
    return 2.0 * x[1:-1] - x[:-2] - x[2:] + V_prime_array(x[1:-1], spec)
