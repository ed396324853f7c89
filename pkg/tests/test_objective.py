import math

import numpy as np
import pytest

from bdirs.channel import ChannelPair
from bdirs.errors import ContractError
from bdirs.objective import (
    LinkObjective,
    effective_channel,
    noise_power,
    snr,
    spectral_efficiency,
)
from bdirs.quantizer import XI_SET, QuantSpec, ScaledCodeword

from conftest import link


def test_effective_channel_examples():
    h = np.array([[2 - 1j]])
    assert effective_channel(h, np.eye(1), np.array([0.5j]))[0] == pytest.approx((2 + 1j) * 0.5j)
    assert not np.any(effective_channel(np.ones((3, 2)), np.zeros((3, 3)), np.ones(3)))
    out = effective_channel(np.ones((2, 1)), np.eye(2), np.array([1, -1]))
    assert out[0] == 0


def test_effective_channel_shape_check():
    with pytest.raises(ContractError):
        effective_channel(np.ones((3, 2)), np.eye(2), np.ones(3))


def test_snr_examples():
    assert snr(np.zeros(3), np.ones(3), 1.0) == 0.0
    assert snr(np.array([1.0]), ScaledCodeword(np.array([1 + 1j]), 1.0), 2.0) == pytest.approx(1.0)
    # |h^H v|^2 with h = (1, j), v = (1+j, 1-j): (1+j) + (-j)(1-j) = 0
    v = ScaledCodeword(np.array([1 + 1j, 1 - 1j]), 1.0)
    assert snr(np.array([1, 1j]), v, 1.0) == pytest.approx(0.0, abs=1e-15)
    # conjugate-aligned channel gives the coherent sum |2+2j|^2 = 8
    assert snr(np.array([1, -1j]), v, 1.0) == pytest.approx(8.0)


def test_spectral_efficiency():
    assert spectral_efficiency(0.0) == 0.0
    assert spectral_efficiency(1.0) == pytest.approx(1.0, rel=1e-15)
    assert spectral_efficiency(1023.0) == pytest.approx(10.0, rel=1e-15)
    g = np.sort(np.random.default_rng(0).exponential(size=200))
    se = [spectral_efficiency(x) for x in g]
    assert all(b > a for a, b in zip(se, se[1:]))


def test_noise_power():
    assert noise_power(-174, 1.0) == pytest.approx(3.981071705534973e-21, rel=1e-12)
    assert noise_power(-174, 1e6) == pytest.approx(3.981071705534973e-15, rel=1e-12)
    assert noise_power(-30, 1.0) == pytest.approx(1e-6, rel=1e-15)


def _random_case(seed, n=6, m=5):
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    g = rng.normal(size=m) + 1j * rng.normal(size=m)
    obj = LinkObjective(ChannelPair(h, g), 0.3)
    v = ScaledCodeword(XI_SET[rng.integers(0, 4, n)], 0.7)
    phi = QuantSpec(2).zeta[rng.integers(0, 4, (m, m))]
    return rng, obj, v, phi


@pytest.mark.parametrize("seed", range(10))
def test_global_phase_invariance(seed):
    rng, obj, v, phi = _random_case(seed)
    theta = rng.uniform(0, 2 * math.pi)
    assert obj.se(v, np.exp(1j * theta) * phi) == pytest.approx(obj.se(v, phi), rel=1e-10)


@pytest.mark.parametrize("seed", range(10))
def test_power_scaling(seed):
    _, obj, v, phi = _random_case(seed)
    doubled = ScaledCodeword(v.codeword, 2 * v.scale)
    assert obj.snr(doubled, phi) == pytest.approx(4 * obj.snr(v, phi), rel=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_phase_coefficients_reproduce_snr(seed):
    _, obj, v, phi = _random_case(seed)
    c = obj.phase_coefficients(v)
    s = np.sum(phi * c)
    assert abs(s) ** 2 / obj.noise_power_w == pytest.approx(obj.snr(v, phi), rel=1e-12)


def test_rank_one_separation():
    # LoS: SNR factors into a BS-side and an IRS-side term
    obj = link(4, n=8, m=6)
    rng = np.random.default_rng(0)
    v = ScaledCodeword(XI_SET[rng.integers(0, 4, 8)], 0.1)
    phi = QuantSpec(1).zeta[rng.integers(0, 2, (6, 6))]
    u = obj.h @ v.vector
    direct = abs(np.vdot(u, phi @ obj.g)) ** 2 / obj.noise_power_w
    assert obj.snr(v, phi) == pytest.approx(direct, rel=1e-12)


def test_invalid_objective():
    with pytest.raises(ContractError):
        LinkObjective(ChannelPair(np.ones((1, 1)), np.ones(1)), 0.0)
