import itertools

import numpy as np
import pytest

from bdirs.channel import ChannelPair
from bdirs.errors import ContractError, SolverError
from bdirs.objective import LinkObjective
from bdirs.optimizer import initialize, OptimizerConfig
from bdirs.precoder import (
    SolverConfig,
    cg_direction,
    line_search,
    mrt_codeword,
    numerical_gradient,
    solve_p1,
)
from bdirs.quantizer import XI_SET, ScaledCodeword, project_to_xi

from conftest import link

P_W = 0.01


def brute_force_p1(objective, phi, n, p_w):
    best, best_cw = -1.0, None
    for cw in itertools.product(XI_SET, repeat=n):
        v = ScaledCodeword.from_codeword(np.array(cw), p_w)
        se = objective.se(v, phi)
        if se > best:
            best, best_cw = se, v
    return best, best_cw


def random_objective(seed, n, m, sigma2=1.0):
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    g = rng.normal(size=m) + 1j * rng.normal(size=m)
    return rng, LinkObjective(ChannelPair(h, g), sigma2)


# --- numerical gradient -------------------------------------------------------

def test_gradient_of_constant():
    g = numerical_gradient(lambda v: 3.0, np.ones(4, dtype=complex), 1e-4)
    np.testing.assert_array_equal(g, 0)


def test_gradient_of_linear():
    g = numerical_gradient(lambda v: v[0].real, np.array([0.3 + 2j, 5j]), 0.37)
    np.testing.assert_allclose(g, [1, 0], atol=1e-12)


def test_gradient_of_quadratic():
    g = numerical_gradient(lambda v: abs(v[0]) ** 2, np.array([1 + 0j]), 1e-4)
    assert abs(g[0] - 2) < 1e-8


def test_gradient_nonfinite_aborts():
    with pytest.raises(SolverError):
        numerical_gradient(lambda v: np.inf, np.ones(2, dtype=complex), 1e-4)


def test_gradient_central_symmetry():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.normal(size=3) + 1j * rng.normal(size=3)
        f = lambda v, a=a: np.abs(np.vdot(a, v)) ** 3 + np.sum(v.real * v.imag)
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        lhs = numerical_gradient(f, v, 1e-4)
        rhs = -numerical_gradient(lambda z: f(-z), -v, 1e-4)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-9)


def test_kernel_gradient_matches_generic():
    from bdirs import kernels
    rng = np.random.default_rng(0)
    w = rng.normal(size=9) + 1j * rng.normal(size=9)
    v = XI_SET[rng.integers(0, 4, 9)].astype(complex) + 0.1 * rng.normal(size=9)
    gain = 2.5

    def f(z):
        return np.log2(1 + gain * abs(np.vdot(w, z)) ** 2 / np.vdot(z, z).real)

    expect = numerical_gradient(f, v, 1e-4)
    np.testing.assert_allclose(kernels.precoder_gradient(w, v, gain, 1e-4), expect,
                               rtol=1e-7, atol=1e-10)


# --- CG direction / line search -----------------------------------------------

def test_cg_direction_cases():
    g = np.array([1.0 + 2j, -0.5j])
    np.testing.assert_array_equal(cg_direction(g), g)
    np.testing.assert_allclose(cg_direction(g, g, g), 2 * g)
    np.testing.assert_array_equal(cg_direction(g, np.zeros(2), g), g)
    np.testing.assert_array_equal(cg_direction(g, g, g, restart=True), g)


def test_line_search_zero_direction():
    step, val = line_search(np.ones(2), np.zeros(2), lambda z: 7.0, [1.0, 0.5])
    assert (step, val) == (0.0, 7.0)


def test_line_search_increasing():
    step, val = line_search(np.zeros(1), np.ones(1), lambda z: float(z[0]), [0.25, 1.0, 0.5])
    assert step == 1.0 and val == 1.0


def test_line_search_no_improvement():
    step, val = line_search(np.zeros(1), np.ones(1), lambda z: -float(z[0]), [1.0, 0.5])
    assert step == 0.0 and val == 0.0


@pytest.mark.parametrize("seed", range(10))
def test_line_search_exhaustive(seed):
    rng, obj = random_objective(seed, 2, 3)
    phi = np.eye(3)
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    d = rng.normal(size=2) + 1j * rng.normal(size=2)
    steps = [2.0 ** -k for k in range(11)]

    def score(z):
        return obj.se(ScaledCodeword.from_codeword(project_to_xi(z), 1.0), phi)

    step, val = line_search(v, d, score, steps)
    assert val >= score(v)
    for t in steps:
        assert val >= score(v + t * d)
    if step > 0:
        assert val == score(v + step * d)


# --- solve_p1 -----------------------------------------------------------------

def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(delta=0)
    with pytest.raises(ValueError):
        SolverConfig(step_candidates=())
    assert SolverConfig(step_candidates=(0.1, 1.0)).step_candidates == (1.0, 0.1)


@pytest.mark.parametrize("seed", range(10))
def test_single_antenna_matches_brute_force(seed):
    _, obj = random_objective(seed, 1, 1)
    phi = np.eye(1)
    init = ScaledCodeword.from_codeword(np.array([-1 - 1j]), P_W)
    out, trace = solve_p1(obj, phi, init, SolverConfig(), P_W)
    best, _ = brute_force_p1(obj, phi, 1, P_W)
    assert obj.se(out, phi) == pytest.approx(best, rel=1e-12)


def test_optimal_init_is_kept():
    for seed in range(30):
        _, obj = random_objective(seed, 2, 2)
        phi = np.eye(2)
        best, best_v = brute_force_p1(obj, phi, 2, P_W)
        out, trace = solve_p1(obj, phi, best_v, SolverConfig(), P_W)
        assert len(trace) >= 1
        assert obj.se(out, phi) == best


def test_zero_channel():
    obj = LinkObjective(ChannelPair(np.ones((3, 4)), np.zeros(3)), 1.0)
    init = ScaledCodeword.from_codeword(np.full(4, 1 + 1j), P_W)
    out, trace = solve_p1(obj, np.eye(3), init, SolverConfig(), P_W)
    assert trace == [0.0] and len(trace) <= 2


def test_infeasible_init_rejected():
    _, obj = random_objective(0, 2, 2)
    with pytest.raises(ContractError):
        solve_p1(obj, np.eye(2), ScaledCodeword(np.array([1 + 1j, 0.5]), 0.01), SolverConfig(), P_W)
    with pytest.raises(ContractError):
        solve_p1(obj, np.eye(2), ScaledCodeword(np.array([1 + 1j, 1 - 1j]), 10.0),
                 SolverConfig(), P_W)


def test_feasibility_and_monotone_states():
    _, obj = random_objective(7, 12, 6)
    phi = np.eye(6)
    init = ScaledCodeword.from_codeword(np.full(12, -1 + 1j), P_W)
    seen = []

    def cb(state):
        assert np.all(np.isin(state.v_quant.codeword, XI_SET))
        assert state.v_quant.power == pytest.approx(P_W, rel=1e-12)
        assert state.step >= 0
        seen.append(state.best_se)

    out, trace = solve_p1(obj, phi, init, SolverConfig(), P_W, callback=cb)
    assert all(b >= a for a, b in zip(trace, trace[1:]))
    assert seen == trace[1:]
    assert obj.se(out, phi) >= obj.se(init, phi)
    assert out.power == pytest.approx(P_W, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_oracle_bound_small_n(n):
    hits = 0
    for seed in range(100):
        _, obj = random_objective(1000 * n + seed, n, 3)
        phi = np.eye(3)
        init = ScaledCodeword.from_codeword(mrt_codeword(obj, phi), P_W)
        out, _ = solve_p1(obj, phi, init, SolverConfig(), P_W)
        best, _ = brute_force_p1(obj, phi, n, P_W)
        hits += obj.se(out, phi) >= 0.9 * best
    assert hits >= 90


def test_never_worse_than_init_on_los():
    for seed in range(20):
        obj = link(seed, n=16, m=8)
        v0, phi = initialize(obj, OptimizerConfig())
        bad = ScaledCodeword.from_codeword(np.roll(v0.codeword, 3), P_W)
        out, trace = solve_p1(obj, phi, bad, SolverConfig(), P_W)
        assert obj.se(out, phi) >= obj.se(bad, phi)
        assert trace[-1] == obj.se(out, phi)
