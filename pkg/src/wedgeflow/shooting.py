"""Shooting-method reference solver for the wedge-flow profile.

Rewrites the third-order boundary value problem as the first-order system

    y0' = y1,  y1' = y2,  y2' = -2 Re alpha y0 y1 - 4 alpha^2 y1,
    y0(0) = 1, y1(0) = 0, y2(0) = s,

and iterates on the unknown initial curvature s with the secant method until
y0(1) = 0.  The converged trajectory is stored on a dense uniform grid and
interpolated with piecewise quintic Hermite polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import BPoly

from .solver import JhProblem

DEFAULT_DENSE_POINTS = 4097
DEFAULT_END_TOL = 1e-13
DEFAULT_RTOL = 1e-13
DEFAULT_ATOL = 1e-14


class ShootingError(RuntimeError):
    """Raised when the secant iteration or the IVP integration fails."""

    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = tuple(history)


class IvpState(NamedTuple):
    y0: float
    y1: float
    y2: float


def ivp_rhs(problem: JhProblem, y) -> IvpState:
    """Right-hand side of the first-order system at state y = (y0, y1, y2)."""
    c = 2.0 * problem.reynolds * problem.alpha
    a2 = 4.0 * problem.alpha**2
    return IvpState(y[1], y[2], -c * y[0] * y[1] - a2 * y[1])


def integrate(
    problem: JhProblem,
    s: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    n_dense: int = DEFAULT_DENSE_POINTS,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the IVP with initial curvature s over eta in [0, 1].

    Uses an adaptive 8th-order embedded Runge-Kutta scheme; the trajectory is
    reported on a uniform dense grid of `n_dense` points via the integrator's
    continuous extension.

    Returns
    -------
    (grid, states)
        `grid` has n_dense uniform samples; `states` is (n_dense, 3) holding
        (y0, y1, y2) per sample.
    """
    if rtol <= 0 or atol <= 0:
        raise ValueError("tolerances must be positive")
    if n_dense < 2:
        raise ValueError("dense grid needs at least two points")
    grid = np.linspace(0.0, 1.0, n_dense)
    sol = solve_ivp(
        lambda _t, y: ivp_rhs(problem, y),
        (0.0, 1.0),
        [1.0, 0.0, s],
        method="DOP853",
        rtol=rtol,
        atol=atol,
        t_eval=grid,
        dense_output=False,
    )
    if not sol.success:
        raise ShootingError(f"integration failed near eta = {sol.t[-1] if sol.t.size else 0.0}: {sol.message}")
    return grid, sol.y.T.copy()


def _end_value(problem: JhProblem, s: float, rtol: float, atol: float) -> float:
    sol = solve_ivp(
        lambda _t, y: ivp_rhs(problem, y),
        (0.0, 1.0),
        [1.0, 0.0, s],
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise ShootingError(f"integration failed near eta = {sol.t[-1] if sol.t.size else 0.0}: {sol.message}")
    return float(sol.y[0, -1])


@dataclass(frozen=True)
class ReferenceSolution:
    """Dense shooting trajectory at the converged initial curvature s."""

    problem: JhProblem
    s: float
    grid: np.ndarray
    states: np.ndarray
    achieved_tol: float

    @cached_property
    def _interp_f(self) -> BPoly:
        return BPoly.from_derivatives(self.grid, self.states)

    @cached_property
    def _interp_fp(self) -> BPoly:
        # Interpolate f' from (y1, y2, y3) directly -- differentiating the
        # quintic for f would amplify coefficient roundoff by 1/spacing.
        y3 = np.array([ivp_rhs(self.problem, y)[2] for y in self.states])
        data = np.column_stack([self.states[:, 1], self.states[:, 2], y3])
        return BPoly.from_derivatives(self.grid, data)

    @cached_property
    def _interp_fpp(self) -> BPoly:
        y3 = np.array([ivp_rhs(self.problem, y)[2] for y in self.states])
        data = np.column_stack([self.states[:, 2], y3])
        return BPoly.from_derivatives(self.grid, data)

    def fp_right(self) -> float:
        return float(self.states[-1, 1])


def shoot(
    problem: JhProblem,
    end_tol: float = DEFAULT_END_TOL,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    n_dense: int = DEFAULT_DENSE_POINTS,
) -> ReferenceSolution:
    """Find s with y0(1; s) = 0 by secant iteration and return the trajectory.

    Starts from s = -2 (the Poiseuille value) and s = -2.5; fails with the
    iteration history attached if 50 secant steps cannot reach `end_tol`.
    """
    if end_tol < 1e-13:
        raise ValueError("end_tol below 1e-13 is tighter than the integration error")
    s_prev, s_curr = -2.0, -2.5
    g_prev = _end_value(problem, s_prev, rtol, atol)
    g_curr = _end_value(problem, s_curr, rtol, atol)
    history = [(s_prev, g_prev), (s_curr, g_curr)]
    best_s, best_g = (s_prev, g_prev) if abs(g_prev) <= abs(g_curr) else (s_curr, g_curr)
    # Polish well below end_tol so the reported trajectory is limited by
    # integration error, not by the secant stopping point.
    target = end_tol * 1e-2
    for _ in range(50):
        if abs(best_g) <= target:
            break
        if g_curr == g_prev:
            break
        s_next = s_curr - g_curr * (s_curr - s_prev) / (g_curr - g_prev)
        g_next = _end_value(problem, s_next, rtol, atol)
        history.append((s_next, g_next))
        s_prev, g_prev, s_curr, g_curr = s_curr, g_curr, s_next, g_next
        if abs(g_next) < abs(best_g):
            best_s, best_g = s_next, g_next
    if abs(best_g) > end_tol:
        raise ShootingError(
            f"secant iteration stalled at |f(1)| = {abs(best_g):.3e} > {end_tol:.3e}",
            history,
        )
    grid, states = integrate(problem, best_s, rtol, atol, n_dense)
    return ReferenceSolution(
        problem=problem,
        s=best_s,
        grid=grid,
        states=states,
        achieved_tol=abs(float(states[-1, 0])),
    )


def evaluate_reference(ref: ReferenceSolution, eta):
    """Interpolate (f, f', f'') from the dense trajectory at eta in [0, 1].

    Quintic Hermite interpolation between dense-grid samples; dense-grid
    points reproduce the stored states exactly.
    """
    eta_arr = np.atleast_1d(np.asarray(eta, dtype=np.float64))
    if np.any(eta_arr < 0.0) or np.any(eta_arr > 1.0):
        raise ValueError("evaluation points must lie in [0, 1]")
    f = ref._interp_f(eta_arr)
    fp = ref._interp_fp(eta_arr)
    fpp = ref._interp_fpp(eta_arr)
    if np.isscalar(eta) or np.ndim(eta) == 0:
        return float(f[0]), float(fp[0]), float(fpp[0])
    return f, fp, fpp
