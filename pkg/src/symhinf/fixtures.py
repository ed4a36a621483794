"""Reference plants and their known gains, shared by tests and scripts."""
import numpy as np
from scipy.linalg import block_diag

from .model import validate_system

# three-buffer network with a through-flow input
BUF3_A = -np.diag([1.0, 3.0, 2.0])
BUF3_B = np.array([[-1.0, 0.0, 0.0], [1.0, 1.0, -1.0], [0.0, 0.0, 1.0]])

# closed-form gain B^T A^{-1} for the system above
L1_REF = np.array([[1.0, -1 / 3, 0.0], [0.0, -1 / 3, 0.0], [0.0, 1 / 3, -1 / 2]])
# dense Riccati-based gain for the same plant, given to two decimals
L2_REF = np.array([[0.93, -0.11, 0.00], [-0.05, -0.17, -0.01], [0.04, 0.16, -0.26]])

# buffer chain: B is the incidence matrix of 1 -> 2 -> 3
CHAIN_A = -np.diag([1.0, 2.0, 4.0])
CHAIN_B = np.array([[-1.0, 0.0], [1.0, -1.0], [0.0, 1.0]])
CHAIN_LSTAR = np.array([[1.0, -1 / 2, 0.0], [0.0, 1 / 2, -1 / 4]])


def buffer3_system():
    return validate_system(BUF3_A, BUF3_B)


def chain_system():
    return validate_system(CHAIN_A, CHAIN_B)


def room_temperature_system(r1, r2, r3, r12, r23):
    """Three rooms in a row; every room has its own heating/cooling input."""
    a = np.array(
        [
            [-r1 - r12, r12, 0.0],
            [r12, -r2 - r12 - r23, r23],
            [0.0, r23, -r3 - r23],
        ]
    )
    return validate_system(a, np.eye(3))


def buffer_network(a_params, b_params):
    """Randomized three-buffer plant: A = -diag(a), B from five link gains."""
    a1, a2, a3 = a_params
    b1, b2, b3, b4, b5 = b_params
    a = -np.diag([a1, a2, a3])
    b = np.array([[-b1, 0.0, 0.0], [b2, b3, -b4], [0.0, 0.0, b5]])
    return validate_system(a, b)


def area_system(a_blocks, b_blocks, extended=False):
    """Chain of areas S1..S3 (S4 appended when ``extended``).

    ``a_blocks`` = [A1, A2, A3(, A4)], ``b_blocks`` = [B1..B4(, B5, B6)]
    where u1 drives S1 (B1) and S2 (B2), u2 drives S2 (B3) and S3 (B4),
    u3 drives S3 (B5) and S4 (B6).
    """
    nblk = 4 if extended else 3
    a = block_diag(*a_blocks[:nblk])
    ns = [blk.shape[0] for blk in a_blocks[:nblk]]
    links = [(0, 1, 0, 1), (1, 2, 2, 3)]
    if extended:
        links.append((2, 3, 4, 5))
    widths = [b_blocks[2 * k].shape[1] for k in range(len(links))]
    b = np.zeros((sum(ns), sum(widths)))
    offs = np.concatenate([[0], np.cumsum(ns)])
    col = 0
    for (s1, s2, i1, i2), w in zip(links, widths):
        b[offs[s1]:offs[s1 + 1], col:col + w] = b_blocks[i1]
        b[offs[s2]:offs[s2 + 1], col:col + w] = b_blocks[i2]
        col += w
    return validate_system(a, b)


def random_system(rng, n, m, diagonal=False):
    """Random symmetric negative definite A (entries O(1)) and Gaussian B."""
    if diagonal:
        a = -np.diag(rng.uniform(0.1, 3.0, n))
    else:
        g = rng.normal(size=(n, n))
        a = -(g @ g.T / n + rng.uniform(0.1, 1.0) * np.eye(n))
    return validate_system(a, rng.normal(size=(n, m)))
