"""Riccati gamma-iteration: the centralized comparison controller.

Convention (state feedback, disturbance entering through I, output (x, u)):

    A^T X + X A + X (gamma^-2 I - B B^T) X + I = 0,    L_G = -B^T X,

with X >= 0 stabilizing.  A level gamma is feasible iff such an X exists.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._hamiltonian import stable_subspace_solution
from .errors import ConsistencyViolation, NoStabilizingSolution
from .hinfnorm import closed_loop, hinf_norm_bisect
from .model import PD_TOL, GainMatrix, LtiSystem
from .synthesis import optimal_gamma

CARE_TOL = 1e-8
GAMMA_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class CareSolution:
    x: np.ndarray
    residual: float
    closed_loop_spectrum: np.ndarray
    gamma: float


def care_residual(sys: LtiSystem, gamma: float, x) -> np.ndarray:
    n = sys.n
    return sys.a.T @ x + x @ sys.a + x @ (np.eye(n) / gamma**2 - sys.b @ sys.b.T) @ x + np.eye(n)


def solve_hinf_care(sys: LtiSystem, gamma: float, care_tol: float = CARE_TOL,
                    pd_tol: float = PD_TOL) -> CareSolution:
    """Stabilizing, positive semidefinite solution of the H-infinity ARE at ``gamma``."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    n = sys.n
    h = np.block([
        [sys.a, np.eye(n) / gamma**2 - sys.b @ sys.b.T],
        [-np.eye(n), -sys.a.T],
    ])
    x = stable_subspace_solution(h)
    xnorm = np.linalg.norm(x, 2)
    if np.linalg.eigvalsh(x)[0] < -pd_tol * max(1.0, xnorm):
        raise NoStabilizingSolution("stabilizing solution is not positive semidefinite")
    res = float(np.linalg.norm(care_residual(sys, gamma, x)))
    if res > care_tol * (1 + xnorm**2):
        raise NoStabilizingSolution(f"ARE residual {res:.3g} above tolerance")
    spec = np.linalg.eigvals(sys.a - sys.b @ sys.b.T @ x)
    return CareSolution(x, res, spec, float(gamma))


def central_gain(sys: LtiSystem, sol: CareSolution) -> GainMatrix:
    return GainMatrix(-sys.b.T @ sol.x)


def _feasible(sys, gamma):
    try:
        return solve_hinf_care(sys, gamma)
    except NoStabilizingSolution:
        return None


def synth_are(sys: LtiSystem, gamma_tol: float = GAMMA_TOL, max_iter: int = 200):
    """Bisect the ARE feasibility level down to the infimum.

    Returns ``(L_G, achieved_gamma)``: the central gain at
    ``gamma_inf * (1 + 10 * gamma_tol)``, where the Riccati solution is still
    well conditioned.
    """
    if gamma_tol <= 0:
        raise ValueError("gamma_tol must be positive")
    # open loop (L = 0) norm is ||A^{-1}||, always achievable
    gamma0 = float(1.0 / np.min(np.abs(np.linalg.eigvalsh(sys.a))))
    hi = gamma0 * 1.01
    while _feasible(sys, hi) is None:
        hi *= 2
        if hi > 1e6 * gamma0:
            raise NoStabilizingSolution("no feasible level found above the open-loop norm")

    lo = optimal_gamma(sys) * (1 - 1e-3)
    while _feasible(sys, lo) is not None:
        # a feasible level below the closed-form optimum would refute it; keep going
        lo /= 2
        if lo < 1e-12:
            raise ConsistencyViolation("every probed level is feasible")
    if lo >= hi:
        raise ConsistencyViolation(f"infeasible level {lo:.10g} above feasible {hi:.10g}")

    it = 0
    while hi - lo > gamma_tol * max(1.0, hi):
        it += 1
        if it > max_iter:
            raise ConsistencyViolation("gamma bisection did not converge")
        mid = 0.5 * (lo + hi)
        if _feasible(sys, mid) is None:
            lo = mid
        else:
            hi = mid

    achieved = hi * (1 + 10 * gamma_tol)
    sol = _feasible(sys, achieved)
    if sol is None:
        raise ConsistencyViolation(
            f"level {achieved:.10g} infeasible although {hi:.10g} was feasible"
        )
    gain = central_gain(sys, sol)
    norm = hinf_norm_bisect(closed_loop(sys, gain), bisect_tol=gamma_tol)
    if norm.lower > achieved:
        raise ConsistencyViolation(
            f"central controller norm {norm.gamma:.10g} exceeds level {achieved:.10g}"
        )
    return gain, achieved
