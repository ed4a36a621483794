"""Metzler and internal-positivity certificates."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConsistencyViolation, DimensionMismatch, NotDiagonalA
from .model import LtiSystem, StateSpace
from .synthesis import synth_optimal

POS_TOL = 1e-12


def metzler_violation(m, tol: float = POS_TOL):
    """Most negative off-diagonal entry as ``(i, j, value)``, or None if Metzler."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"Metzler test needs a square matrix, got {m.shape}")
    off = m.copy()
    np.fill_diagonal(off, np.inf)
    if off.size == 0:
        return None
    i, j = np.unravel_index(np.argmin(off), off.shape)
    if off[i, j] >= -tol:
        return None
    return int(i), int(j), float(off[i, j])


def is_metzler(m, tol: float = POS_TOL) -> bool:
    return metzler_violation(m, tol) is None


def _negative_entry(m, tol):
    m = np.asarray(m, dtype=float)
    if m.size == 0 or m.min() >= -tol:
        return None
    i, j = np.unravel_index(np.argmin(m), m.shape)
    return int(i), int(j), float(m[i, j])


@dataclass(frozen=True)
class PositivityCertificate:
    metzler_a: bool
    nonneg_b: bool
    nonneg_c: bool
    nonneg_d: bool
    witness: Optional[tuple] = None  # ("a"|"b"|"c"|"d", i, j, value)

    @property
    def verdict(self) -> bool:
        return self.metzler_a and self.nonneg_b and self.nonneg_c and self.nonneg_d


def internal_positivity(ss: StateSpace, tol: float = POS_TOL) -> PositivityCertificate:
    """Check a Metzler and b, c, d entrywise nonnegative; report the worst violation."""
    found = {"a": metzler_violation(ss.a, tol)}
    for k in "bcd":
        found[k] = _negative_entry(getattr(ss, k), tol)
    bad = [(k, *v) for k, v in found.items() if v is not None]
    witness = min(bad, key=lambda t: t[3]) if bad else None
    return PositivityCertificate(
        found["a"] is None, found["b"] is None, found["c"] is None, found["d"] is None, witness
    )


def state_map(sys: LtiSystem, l) -> StateSpace:
    """Closed loop from w to x only (c = I, d = 0)."""
    l = getattr(l, "l", l)
    n = sys.n
    return StateSpace(sys.a + sys.b @ np.asarray(l, dtype=float), np.eye(n), np.eye(n),
                      np.zeros((n, n)))


def closed_loop_positivity_condition(sys: LtiSystem, tol: float = POS_TOL) -> bool:
    """For diagonal A: the optimal closed loop is Metzler iff -B B^T is Metzler.

    Both sides are evaluated; disagreement raises ConsistencyViolation.
    """
    if np.any(sys.a - np.diag(np.diag(sys.a))):
        raise NotDiagonalA("the -B B^T criterion applies to diagonal A only")
    by_b = is_metzler(-sys.b @ sys.b.T, tol)
    by_loop = is_metzler(sys.a + sys.b @ synth_optimal(sys).l, tol)
    if by_b != by_loop:
        raise ConsistencyViolation(
            f"-BB^T Metzler = {by_b} but A + B L* Metzler = {by_loop}"
        )
    return by_b
