"""H-infinity norm oracle.

The bisection works on the classical fact that, for a stable realization with
d = 0, gamma is exceeded by the norm iff

    H(gamma) = [[a, b b^T / gamma^2], [-c^T c, -a^T]]

has an eigenvalue on the imaginary axis.  For d != 0 the usual augmented
form with R = gamma^2 I - d^T d is used.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from ._hamiltonian import near_axis_eigs, stable_subspace_solution
from .errors import DimensionMismatch, NoConvergence, NotStable, UnstableClosedLoop
from .model import CostWeights, GainMatrix, LtiSystem, StateSpace

BISECT_TOL = 1e-6
IMAG_TOL = 1e-8
MAX_ITER = 200


@dataclass(frozen=True)
class NormResult:
    gamma: float
    lower: float
    upper: float
    peak_frequency: float
    iterations: int
    bisect_tol: float = BISECT_TOL
    imag_tol: float = IMAG_TOL


def _require_stable(a, exc=NotStable):
    if a.size == 0:
        return
    worst = np.max(np.linalg.eigvals(a).real)
    if not worst < 0:
        raise exc(f"state matrix has eigenvalue with real part {worst:.6g} >= 0")


def closed_loop(sys: LtiSystem, l, weights: CostWeights | None = None) -> StateSpace:
    """Map from w to the performance output (x, u) under u = l x.

    With ``weights`` the output is the scaled (C x, D u), Q = C^T C, R = D^T D.
    """
    l = l.l if isinstance(l, GainMatrix) else np.asarray(l, dtype=float)
    if l.shape != (sys.m, sys.n):
        raise DimensionMismatch(f"gain shape {l.shape}, plant needs {(sys.m, sys.n)}")
    acl = sys.a + sys.b @ l
    _require_stable(acl, UnstableClosedLoop)
    if weights is None:
        c = np.vstack([np.eye(sys.n), l])
    else:
        cq, dr = weights.output_factors()
        c = np.vstack([cq, dr @ l])
    return StateSpace(acl, np.eye(sys.n), c, np.zeros((sys.n + sys.m, sys.n)))


def sigma_max(ss: StateSpace, omega: float) -> float:
    g = ss.freqresp(omega)
    if g.size == 0:
        return 0.0
    return float(np.linalg.norm(g, 2))


def freq_sweep_norm(ss: StateSpace, grid) -> float:
    """Largest singular value over a frequency grid (a lower bound on the norm)."""
    grid = np.asarray(list(grid), dtype=float)
    if grid.size == 0 or not np.all(np.isfinite(grid)):
        raise ValueError("grid must be non-empty and finite")
    _require_stable(ss.a)
    return max(sigma_max(ss, w) for w in grid)


def hamiltonian(ss: StateSpace, gamma: float) -> np.ndarray:
    a, b, c, d = ss.a, ss.b, ss.c, ss.d
    if not np.any(d):
        return np.block([[a, b @ b.T / gamma**2], [-c.T @ c, -a.T]])
    r = gamma**2 * np.eye(d.shape[1]) - d.T @ d
    rinv_dtc = np.linalg.solve(r, d.T @ c)
    ah = a + b @ rinv_dtc
    s = c.T @ (np.eye(d.shape[0]) + d @ np.linalg.solve(r, d.T)) @ c
    return np.block([[ah, b @ np.linalg.solve(r, b.T)], [-s, -ah.T]])


def hankel_upper_bound(ss: StateSpace) -> float:
    """sigma_max(d) + 2 * sum of Hankel singular values >= H-infinity norm."""
    p = la.solve_continuous_lyapunov(ss.a, -ss.b @ ss.b.T)
    q = la.solve_continuous_lyapunov(ss.a.T, -ss.c.T @ ss.c)
    hsv = np.sqrt(np.clip(np.linalg.eigvals(p @ q).real, 0.0, None))
    dn = np.linalg.norm(ss.d, 2) if ss.d.size else 0.0
    return float(dn + 2.0 * hsv.sum())


def _initial_grid(a):
    eigs = np.linalg.eigvals(a)
    mags = np.abs(eigs)
    pts = {0.0}
    pts.update(float(v) for v in np.abs(eigs.imag))
    pts.update(float(v) for v in mags)
    if mags.size:
        pts.update(np.geomspace(max(mags.min(), 1e-6) / 10, mags.max() * 10, 25).tolist())
    return sorted(pts)


def hinf_norm_bisect(
    ss: StateSpace,
    bisect_tol: float = BISECT_TOL,
    imag_tol: float = IMAG_TOL,
    max_iter: int = MAX_ITER,
) -> NormResult:
    """H-infinity norm of a stable realization by Hamiltonian bisection.

    Stops once ``upper - lower <= bisect_tol * max(1, lower)``.  Every rejected
    level also yields the frequencies where sigma_max(G) = gamma; evaluating
    the response there tightens the lower bound.
    """
    if bisect_tol <= 0:
        raise ValueError("bisect_tol must be positive")
    _require_stable(ss.a)
    dnorm = np.linalg.norm(ss.d, 2) if ss.d.size else 0.0

    grid = _initial_grid(ss.a)
    sweep = [sigma_max(ss, w) for w in grid]
    k = int(np.argmax(sweep))
    lower, peak = max(dnorm, sweep[k]), grid[k]
    if lower == 0.0:
        return NormResult(0.0, 0.0, 0.0, 0.0, 0, bisect_tol, imag_tol)
    upper = max(hankel_upper_bound(ss), lower * (1 + 2 * bisect_tol))

    def crosses(g):
        eigs, on_axis = near_axis_eigs(hamiltonian(ss, g), imag_tol)
        return np.abs(eigs[on_axis].imag)

    # guard against a bound spoiled by roundoff
    for _ in range(60):
        if not crosses(upper).size:
            break
        upper *= 2
    else:
        raise NoConvergence("could not find a level above the norm")

    it = 0
    while upper - lower > bisect_tol * max(1.0, lower):
        if it >= max_iter:
            raise NoConvergence(
                f"bisection stalled after {it} iterations in [{lower:.10g}, {upper:.10g}]"
            )
        it += 1
        mid = 0.5 * (lower + upper)
        freqs = crosses(mid)
        if freqs.size:
            vals = [sigma_max(ss, w) for w in freqs]
            j = int(np.argmax(vals))
            lower = max(lower, mid, min(vals[j], upper))
            peak = float(freqs[j])
        else:
            upper = mid
    return NormResult(0.5 * (lower + upper), lower, upper, peak, it, bisect_tol, imag_tol)


def bounded_real_storage(ss: StateSpace, gamma: float, imag_tol: float = IMAG_TOL):
    """Storage matrix P and the largest eigenvalue of the dissipation LMI at gamma.

    P solves a^T P + P a + gamma^-2 P b b^T P + c^T c = 0 (d = 0); the LMI
    [[a^T P + P a + c^T c, P b], [b^T P, -gamma^2 I]] is then negative
    semidefinite, so its top eigenvalue should be ~0 from below.
    """
    if np.any(ss.d):
        raise ValueError("storage certificate implemented for d = 0 only")
    p = stable_subspace_solution(hamiltonian(ss, gamma), imag_tol)
    lmi = np.block([
        [ss.a.T @ p + p @ ss.a + ss.c.T @ ss.c, p @ ss.b],
        [ss.b.T @ p, -gamma**2 * np.eye(ss.b.shape[1])],
    ])
    top = float(np.linalg.eigvalsh((lmi + lmi.T) / 2)[-1])
    return p, top
