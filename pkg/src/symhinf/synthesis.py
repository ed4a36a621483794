"""Closed-form optimal H-infinity state feedback for symmetric Hurwitz plants.

For dx/dt = A x + B u + w with performance output (x, u), the gain
``L = B^T A^{-1}`` attains the smallest closed-loop H-infinity norm over all
static state feedbacks, and that norm is ``1 / sqrt(lambda_min(A^2 + B B^T))``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .errors import (
    DimensionMismatch,
    InadmissibleWeights,
    IncompatibleInputWidths,
    SingularStateMatrix,
)
from .model import CostWeights, GainMatrix, LtiSystem, validate_system

COND_LIMIT = 1e12


def _solve_right_ainv(a, m_t, cond_limit):
    # M A^{-1} = Z^T with A^T Z = M^T; m_t is M^T
    if a.size and np.linalg.cond(a) > cond_limit:
        raise SingularStateMatrix(f"cond(A) = {np.linalg.cond(a):.3g} > {cond_limit:g}")
    return np.linalg.solve(a.T, m_t).T


def synth_optimal(sys: LtiSystem, cond_limit: float = COND_LIMIT) -> GainMatrix:
    """Optimal static gain ``B^T A^{-1}``."""
    return GainMatrix(_solve_right_ainv(sys.a, sys.b, cond_limit))


def optimal_gamma(sys: LtiSystem) -> float:
    """Minimal achievable closed-loop norm, ``1/sqrt(lambda_min(A^2 + B B^T))``."""
    m = sys.a @ sys.a + sys.b @ sys.b.T
    lam = np.linalg.eigvalsh((m + m.T) / 2)[0]
    return float(1.0 / np.sqrt(lam))


def synth_weighted(sys: LtiSystem, w: CostWeights, cond_limit: float = COND_LIMIT) -> GainMatrix:
    """Optimal gain ``R^{-1} B^T Q A^{-1}`` for the scaled output (C x, D u)."""
    if w.q.shape != (sys.n, sys.n) or w.r.shape != (sys.m, sys.m):
        raise DimensionMismatch(
            f"weights {w.q.shape}/{w.r.shape} do not fit plant n={sys.n}, m={sys.m}"
        )
    if not w.admissible(sys.a):
        raise InadmissibleWeights("-A Q^{-1} must be symmetric positive definite")
    btqainv = _solve_right_ainv(sys.a, w.q.T @ sys.b, cond_limit)
    return GainMatrix(np.linalg.solve(w.r, btqainv))


# --- coordination -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CoordinatedPlant:
    """Subsystems dx_i = A_i x_i + B_i u_i + w_i tied by sum_i u_i = 0."""

    blocks: tuple
    m: int = field(init=False)

    def __post_init__(self):
        blocks = []
        for a, b in self.blocks:
            b = np.atleast_2d(np.asarray(b, dtype=float))
            sys = validate_system(a, b)
            blocks.append((sys.a, sys.b))
        if not blocks:
            raise DimensionMismatch("coordinated plant needs at least one block")
        widths = {b.shape[1] for _, b in blocks}
        if len(widths) != 1:
            raise IncompatibleInputWidths(f"block input widths differ: {sorted(widths)}")
        object.__setattr__(self, "blocks", tuple(blocks))
        object.__setattr__(self, "m", widths.pop())

    @property
    def nu(self) -> int:
        return len(self.blocks)

    @property
    def state_dims(self):
        return [a.shape[0] for a, _ in self.blocks]

    def full_system(self) -> LtiSystem:
        """Unconstrained block-diagonal plant (A, diag(B_i))."""
        return LtiSystem(block_diag(*(a for a, _ in self.blocks)),
                         block_diag(*(b for _, b in self.blocks)))


@dataclass(frozen=True, eq=False)
class CoordinatedGain:
    """u_i = local_i x_i - sum_k global_k x_k, with global_k = local_k / nu."""

    local_terms: tuple
    global_terms: tuple

    @property
    def nu(self):
        return len(self.local_terms)

    def stacked(self) -> np.ndarray:
        """Full gain of shape (m*nu, sum n_i) mapping the stacked state to u."""
        glob = np.hstack(self.global_terms)
        rows = []
        for i, loc in enumerate(self.local_terms):
            row = -glob.copy()
            off = sum(t.shape[1] for t in self.local_terms[:i])
            row[:, off:off + loc.shape[1]] += loc
            rows.append(row)
        return np.vstack(rows)

    def inputs(self, xs):
        """Evaluate every u_i for per-block states ``xs``."""
        common = sum(g @ x for g, x in zip(self.global_terms, xs))
        return [loc @ x - common for loc, x in zip(self.local_terms, xs)]


def synth_coordinated(plant: CoordinatedPlant, cond_limit: float = COND_LIMIT) -> CoordinatedGain:
    if plant.nu < 2:
        raise DimensionMismatch("coordination needs at least two subsystems")
    local = tuple(_solve_right_ainv(a, b, cond_limit) for a, b in plant.blocks)
    glob = tuple(t / plant.nu for t in local)
    return CoordinatedGain(local, glob)


def coordination_basis(nu: int, m: int = 1) -> np.ndarray:
    """D with u = D u~, u~ = (u_2..u_nu): first block row -1^T, then identity."""
    d = np.vstack([-np.ones((1, nu - 1)), np.eye(nu - 1)])
    return np.kron(d, np.eye(m))


def reduce_coordination(plant: CoordinatedPlant):
    """Eliminate u_1 via the constraint.

    Returns the reduced plant (A, B D), weights (I, D^T D = I + 1 1^T) and D.
    """
    if plant.nu < 2:
        raise DimensionMismatch("coordination needs at least two subsystems")
    full = plant.full_system()
    d = coordination_basis(plant.nu, plant.m)
    reduced = LtiSystem(full.a, full.b @ d)
    weights = CostWeights(np.eye(full.n), d.T @ d)
    return reduced, weights, d


def expand_reduced_gain(d, gain: GainMatrix) -> np.ndarray:
    """Map a gain for u~ back to the full input u = D u~."""
    return d @ gain.l
