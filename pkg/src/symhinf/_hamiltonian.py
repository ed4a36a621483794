"""Hamiltonian-matrix helpers shared by the norm oracle and the Riccati solver."""
import numpy as np
import scipy.linalg as la

from .errors import IllConditionedSubspace, NoStabilizingSolution

SUBSPACE_COND_LIMIT = 1e10


def near_axis_eigs(h, imag_tol_rel):
    """Eigenvalues of ``h`` and a mask of those within imag_tol_rel*||h|| of iR."""
    eigs = np.linalg.eigvals(h)
    tol = imag_tol_rel * max(np.linalg.norm(h, 1), 1e-300)
    return eigs, np.abs(eigs.real) <= tol


def stable_subspace_solution(h, imag_tol_rel=1e-8, cond_limit=SUBSPACE_COND_LIMIT):
    """Stabilizing Riccati solution X = U2 U1^{-1} from the stable invariant subspace.

    ``h`` is 2n x 2n Hamiltonian; the ordered real Schur form puts the n
    open-left-half-plane eigenvalues first.
    """
    n = h.shape[0] // 2
    eigs, on_axis = near_axis_eigs(h, imag_tol_rel)
    if np.any(on_axis):
        raise NoStabilizingSolution(
            f"Hamiltonian has {int(on_axis.sum())} eigenvalue(s) on the imaginary axis"
        )
    _, z, sdim = la.schur(h, output="real", sort="lhp")
    if sdim != n:
        raise NoStabilizingSolution(f"stable subspace has dimension {sdim}, expected {n}")
    u1, u2 = z[:n, :n], z[n:, :n]
    cond = np.linalg.cond(u1)
    if not np.isfinite(cond) or cond > cond_limit:
        raise IllConditionedSubspace(f"cond(U1) = {cond:.3g} exceeds {cond_limit:g}")
    x = np.linalg.solve(u1.T, u2.T).T
    return (x + x.T) / 2
