import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symhinf.errors import NotStable, UnstableClosedLoop
from symhinf.fixtures import L1_REF, L2_REF, random_system
from symhinf.hinfnorm import (
    bounded_real_storage,
    closed_loop,
    freq_sweep_norm,
    hankel_upper_bound,
    hinf_norm_bisect,
)
from symhinf.model import StateSpace, validate_system
from symhinf.synthesis import optimal_gamma, synth_optimal

from .test_synthesis import GAMMA_BUF3

SCALAR = StateSpace([[-1.0]], [[1.0]], [[1.0]], [[0.0]])


def random_stable_ss(rng, n, p, q, with_d=False):
    a = rng.normal(size=(n, n))
    a -= (np.max(np.linalg.eigvals(a).real) + rng.uniform(0.1, 1.0)) * np.eye(n)
    d = rng.normal(size=(q, p)) * 0.5 if with_d else np.zeros((q, p))
    return StateSpace(a, rng.normal(size=(n, p)), rng.normal(size=(q, n)), d)


def test_closed_loop_buf3(buf3):
    ss = closed_loop(buf3, L1_REF)
    assert np.allclose(ss.a, buf3.a + buf3.b @ L1_REF)
    assert np.max(np.linalg.eigvals(ss.a).real) < 0
    assert ss.c.shape == (6, 3) and ss.d.shape == (6, 3)


def test_closed_loop_zero_gain(buf3):
    ss = closed_loop(buf3, np.zeros((3, 3)))
    assert np.array_equal(ss.a, buf3.a)
    assert np.array_equal(ss.c, np.vstack([np.eye(3), np.zeros((3, 3))]))


def test_closed_loop_unstable():
    sys = validate_system([[-1.0]], [[1.0]])
    with pytest.raises(UnstableClosedLoop):
        closed_loop(sys, [[1.0]])


def test_scalar_norm():
    res = hinf_norm_bisect(SCALAR)
    assert res.gamma == pytest.approx(1.0, abs=1e-6)
    assert res.lower <= res.gamma <= res.upper
    assert res.peak_frequency == 0.0


def test_unstable_realization_rejected():
    with pytest.raises(NotStable):
        hinf_norm_bisect(StateSpace([[1.0]], [[1.0]], [[1.0]], [[0.0]]))


def test_buf3_norm_matches_formula(buf3):
    res = hinf_norm_bisect(closed_loop(buf3, synth_optimal(buf3)))
    assert abs(res.gamma - GAMMA_BUF3) <= 1e-6


def test_buf3_reference_l2_is_near_optimal(buf3):
    res = hinf_norm_bisect(closed_loop(buf3, L2_REF))
    assert abs(res.gamma - GAMMA_BUF3) <= 5e-2


def test_chain_sweep_matches_bisection(chain):
    ss = closed_loop(chain, synth_optimal(chain))
    res = hinf_norm_bisect(ss)
    sweep = freq_sweep_norm(ss, np.geomspace(1e-3, 1e3, 1000))
    assert abs(sweep - res.gamma) <= 1e-3
    assert sweep <= res.upper


def test_sweep_scalar_at_zero():
    assert freq_sweep_norm(SCALAR, [0.0]) == pytest.approx(1.0, abs=1e-15)


def test_resonant_peak():
    # lightly damped oscillator, |G| peaks near omega = 1 at 1/(2*zeta)
    zeta = 0.05
    ss = StateSpace([[0.0, 1.0], [-1.0, -2 * zeta]], [[0.0], [1.0]], [[1.0, 0.0]], [[0.0]])
    res = hinf_norm_bisect(ss, bisect_tol=1e-9)
    exact = 1 / (2 * zeta * np.sqrt(1 - zeta**2))
    assert res.gamma == pytest.approx(exact, rel=1e-8)
    assert res.peak_frequency == pytest.approx(np.sqrt(1 - 2 * zeta**2), rel=1e-3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_bracket_contains_sweep(seed, with_d):
    rng = np.random.default_rng(seed)
    ss = random_stable_ss(rng, int(rng.integers(1, 6)), int(rng.integers(1, 4)),
                          int(rng.integers(1, 4)), with_d)
    res = hinf_norm_bisect(ss)
    dense = freq_sweep_norm(ss, np.concatenate([[0.0], np.geomspace(1e-3, 1e3, 2000)]))
    assert dense <= res.upper * (1 + 1e-12)
    assert res.upper - res.lower <= res.bisect_tol * max(1.0, res.lower)
    assert res.upper <= hankel_upper_bound(ss) * (1 + 1e-9) or res.upper <= 2 * res.lower


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10.0))
def test_scaling_output(seed, alpha):
    rng = np.random.default_rng(seed)
    ss = random_stable_ss(rng, int(rng.integers(1, 5)), 2, 2)
    g1 = hinf_norm_bisect(ss).gamma
    scaled = StateSpace(ss.a, ss.b, alpha * ss.c, alpha * ss.d)
    g2 = hinf_norm_bisect(scaled).gamma
    assert abs(g2 - alpha * g1) <= 2e-6 * max(1.0, alpha * g1)


def test_closed_form_equivalence_random():
    rng = np.random.default_rng(1234)
    for _ in range(100):
        sys = random_system(rng, int(rng.integers(1, 7)), int(rng.integers(1, 7)))
        g = optimal_gamma(sys)
        res = hinf_norm_bisect(closed_loop(sys, synth_optimal(sys)))
        assert abs(res.gamma - g) <= max(1e-6, 1e-6 * g)


def test_storage_certificate(buf3):
    ss = closed_loop(buf3, synth_optimal(buf3))
    p, top = bounded_real_storage(ss, 1.001 * GAMMA_BUF3)
    assert np.linalg.eigvalsh(p)[0] > 0
    assert top <= 1e-8
