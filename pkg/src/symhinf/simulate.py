"""Exact (zero-order-hold) step responses and the randomized comparison experiment."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import NonFiniteResult, NotStable, SymHinfError
from .fixtures import buffer_network
from .hinfnorm import closed_loop, hinf_norm_bisect
from .model import StateSpace
from .riccati import synth_are
from .synthesis import optimal_gamma, synth_optimal

# Pade-13 coefficients and the theta_m bounds of Higham (2005)
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0, 10559470521600.0, 670442572800.0, 33522128640.0,
    1323241920.0, 40840800.0, 960960.0, 16380.0, 182.0, 1.0,
)
_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
}
_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1, 7: 9.504178996162932e-1,
          9: 2.097847961257068e0, 13: 5.371920351148152e0}


def matrix_exponential(m) -> np.ndarray:
    """exp(m) by scaling and squaring with a diagonal Pade approximant."""
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"square matrix required, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteResult("matrix exponential of non-finite input")
    n = a.shape[0]
    ident = np.eye(n)
    if n == 0:
        return ident
    norm1 = np.linalg.norm(a, 1)
    a2 = a @ a
    for deg in (3, 5, 7, 9):
        if norm1 <= _THETA[deg]:
            c = _PADE[deg]
            u = a @ sum(c[k] * np.linalg.matrix_power(a2, (k - 1) // 2)
                        for k in range(1, deg + 1, 2))
            v = sum(c[k] * np.linalg.matrix_power(a2, k // 2) for k in range(0, deg + 1, 2))
            return np.linalg.solve(v - u, v + u)

    s = max(0, int(math.ceil(math.log2(norm1 / _THETA[13]))))
    a = a / 2**s
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    b = _PADE13
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    r = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        r = r @ r
    if not np.all(np.isfinite(r)):
        raise NonFiniteResult("matrix exponential overflowed")
    return r


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (len(times), n)
    inputs: np.ndarray  # (len(times), m); m = 0 when no gain was supplied

    def __post_init__(self):
        if not (len(self.times) == len(self.states) == len(self.inputs)):
            raise ValueError("trajectory arrays have inconsistent lengths")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n, m = self.states.shape[1], self.inputs.shape[1]
        w.writerow(["time"] + [f"x{i + 1}" for i in range(n)] + [f"u{i + 1}" for i in range(m)])
        for t, x, u in zip(self.times, self.states, self.inputs):
            w.writerow([format(v, ".12g") for v in (t, *x, *u)])
        return buf.getvalue()


def zoh_step_matrices(a, bw, dt):
    """(e^{a dt}, int_0^dt e^{a s} ds bw) from one augmented exponential."""
    n = a.shape[0]
    aug = np.zeros((n + 1, n + 1))
    aug[:n, :n] = a
    aug[:n, n] = bw
    e = matrix_exponential(aug * dt)
    return e[:n, :n], e[:n, n]


def step_response(ss: StateSpace, w, horizon: float = 10.0, dt: float = 0.01,
                  gain=None) -> Trajectory:
    """State response to the constant disturbance ``w`` from x(0) = 0.

    ``gain`` (if given) is only used to record u = gain x alongside the states.
    """
    if dt <= 0 or horizon <= 0:
        raise ValueError("dt and horizon must be positive")
    if ss.a.size and np.max(np.linalg.eigvals(ss.a).real) >= 0:
        raise NotStable("step response requested for a non-Hurwitz state matrix")
    w = np.asarray(w, dtype=float).reshape(-1)
    steps = int(round(horizon / dt))
    phi, gam = zoh_step_matrices(ss.a, ss.b @ w, dt)
    xs = np.zeros((steps + 1, ss.n))
    for k in range(steps):
        xs[k + 1] = phi @ xs[k] + gam
    if not np.all(np.isfinite(xs)):
        raise NonFiniteResult("trajectory overflowed")
    times = dt * np.arange(steps + 1)
    if gain is None:
        us = np.zeros((steps + 1, 0))
    else:
        us = xs @ np.asarray(getattr(gain, "l", gain), dtype=float).T
    return Trajectory(times, xs, us)


# --- randomized comparison ---------------------------------------------------

CONTROLLERS = ("Lstar", "LG")


@dataclass(frozen=True)
class ExperimentConfig:
    num_systems: int = 50
    param_low: float = 0.1
    param_high: float = 5.0
    seed: int = 20150415
    horizon: float = 10.0
    dt: float = 0.01
    gamma_tol: float = 1e-6
    workers: int = 1

    def __post_init__(self):
        if not 0 < self.param_low < self.param_high:
            raise ValueError("need 0 < param_low < param_high")
        if self.num_systems < 1:
            raise ValueError("num_systems must be at least 1")
        if self.dt <= 0 or self.horizon <= 0:
            raise ValueError("dt and horizon must be positive")


@dataclass
class DrawResult:
    index: int
    params: tuple
    gamma_star: float
    norms: dict
    responses: dict  # (controller, disturbance) -> |x| array (steps+1, 3)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    times: np.ndarray
    disturbances: tuple
    mean_abs: dict  # (controller, disturbance) -> (steps+1, 3)
    draws: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def used(self) -> int:
        return len(self.draws)

    def peak(self, controller, disturbance, state):
        return float(self.mean_abs[controller, disturbance][:, state].max())

    def to_csv(self) -> str:
        buf = io.StringIO()
        cfg = asdict(self.config)
        cfg.pop("workers")
        buf.write("# " + " ".join(f"{k}={v}" for k, v in cfg.items())
                  + f" used={self.used} failed={len(self.failures)}\n")
        w = csv.writer(buf, lineterminator="\n")
        cols = [(c, d, i) for c in CONTROLLERS for d in self.disturbances for i in range(3)]
        w.writerow(["time"] + [f"{c}_{d}_x{i + 1}" for c, d, i in cols])
        for k, t in enumerate(self.times):
            w.writerow([format(t, ".12g")]
                       + [format(self.mean_abs[c, d][k, i], ".12g") for c, d, i in cols])
        return buf.getvalue()


DISTURBANCES = {"w1": (1.0, 0.0, 0.0), "w2": (0.0, 1.0, 0.0), "w3": (0.0, 0.0, 1.0),
                "ones": (1.0, 1.0, 1.0)}


def draw_parameters(cfg: ExperimentConfig, index: int):
    """Eight parameters uniform in (low, high], reproducible per (seed, index)."""
    rng = np.random.default_rng([cfg.seed, index])
    u = rng.random(8)
    vals = cfg.param_high - (cfg.param_high - cfg.param_low) * u
    return tuple(vals[:3]), tuple(vals[3:])


def run_draw(cfg: ExperimentConfig, index: int) -> DrawResult:
    a_par, b_par = draw_parameters(cfg, index)
    sys = buffer_network(a_par, b_par)
    gains = {"Lstar": synth_optimal(sys)}
    gains["LG"], _ = synth_are(sys, cfg.gamma_tol)
    norms, responses = {}, {}
    for name, gain in gains.items():
        ss = closed_loop(sys, gain)
        norms[name] = hinf_norm_bisect(ss, bisect_tol=cfg.gamma_tol).gamma
        for dname, w in DISTURBANCES.items():
            traj = step_response(ss, w, cfg.horizon, cfg.dt)
            responses[name, dname] = np.abs(traj.states)
    return DrawResult(index, a_par + b_par, optimal_gamma(sys), norms, responses)


def _safe_draw(args):
    cfg, index = args
    try:
        return run_draw(cfg, index)
    except SymHinfError as exc:
        return index, f"{type(exc).__name__}: {exc}"


def run_comparison_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Average |x_i(t)| over random buffer networks under L* and the Riccati gain.

    Failed draws are recorded in ``failures`` and left out of the averages.
    """
    jobs = [(cfg, i) for i in range(cfg.num_systems)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            outcomes = list(pool.map(_safe_draw, jobs))
    else:
        outcomes = [_safe_draw(j) for j in jobs]

    steps = int(round(cfg.horizon / cfg.dt))
    times = cfg.dt * np.arange(steps + 1)
    sums = {(c, d): np.zeros((steps + 1, 3)) for c in CONTROLLERS for d in DISTURBANCES}
    draws, failures = [], []
    for out in outcomes:  # draw order, so the reduction is deterministic
        if isinstance(out, DrawResult):
            draws.append(out)
            for key in sums:
                sums[key] += out.responses[key]
        else:
            failures.append(out)
    count = max(len(draws), 1)
    mean_abs = {k: v / count for k, v in sums.items()}
    return ExperimentResult(cfg, times, tuple(DISTURBANCES), mean_abs, draws, failures)
