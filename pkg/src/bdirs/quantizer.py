"""1-bit precoder alphabet, L-bit IRS phase alphabet, projections, power scaling."""

from dataclasses import dataclass, field
import math

import numpy as np

from bdirs.errors import ContractError

XI_SET = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j], dtype=np.complex128)


def _phase_alphabet(l_bits, amp):
    k = np.arange(2**l_bits)
    ang = 2.0 * np.pi * k / 2**l_bits
    re, im = np.cos(ang), np.sin(ang)
    # snap cos/sin residue so 1-bit and 2-bit alphabets are exactly {+-1, +-j}
    re[np.abs(re) < 1e-15] = 0.0
    im[np.abs(im) < 1e-15] = 0.0
    return amp * (re + 1j * im)


@dataclass(frozen=True)
class QuantSpec:
    l_bits: int = 1
    xi_amp: float = 1.0
    zeta: np.ndarray = field(init=False, repr=False, compare=False)
    xi_set: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.l_bits < 1:
            raise ContractError(f"l_bits must be >= 1, got {self.l_bits}")
        if not self.xi_amp > 0:
            raise ContractError(f"xi_amp must be > 0, got {self.xi_amp}")
        zeta = _phase_alphabet(self.l_bits, self.xi_amp)
        zeta.setflags(write=False)
        xi = XI_SET.copy()
        xi.setflags(write=False)
        object.__setattr__(self, "zeta", zeta)
        object.__setattr__(self, "xi_set", xi)

    @property
    def size(self):
        return self.zeta.shape[0]


@dataclass(frozen=True)
class ScaledCodeword:
    """Transmit vector ``v = scale * codeword`` with codeword entries in XI_SET."""
    codeword: np.ndarray
    scale: float

    @property
    def vector(self):
        return self.scale * self.codeword

    @property
    def power(self):
        return self.scale**2 * float(np.vdot(self.codeword, self.codeword).real)

    @classmethod
    def from_codeword(cls, codeword, p_tot_w):
        codeword = np.asarray(codeword, dtype=np.complex128)
        return cls(codeword=codeword, scale=power_scale(codeword.shape[0], p_tot_w))

    def check_feasible(self, p_tot_w):
        cw = self.codeword
        if not np.all(np.isin(cw, XI_SET)):
            raise ContractError("codeword has entries outside {+-1 +-1j}")
        if self.scale <= 0 or self.scale**2 * 2 * cw.shape[0] > p_tot_w * (1 + 1e-12):
            raise ContractError(
                f"power {self.power:.6g} W violates the budget {p_tot_w:.6g} W")


def project_to_xi(z):
    """Entrywise nearest point of {+-1 +-1j}: sign of each quadrature,
    zero (including -0.0) mapped to +1."""
    z = np.asarray(z)
    re = np.where(np.real(z) >= 0, 1.0, -1.0)
    im = np.where(np.imag(z) >= 0, 1.0, -1.0)
    return re + 1j * im


def project_to_zeta(z, spec: QuantSpec):
    """Entrywise nearest member of the phase alphabet after normalizing to the
    unit circle. Zero maps to the first member; exact ties go to the lower index."""
    z = np.asarray(z, dtype=np.complex128)
    unit_alpha = spec.zeta / spec.xi_amp
    mag = np.abs(z)
    safe = np.where(mag > 0, z / np.where(mag > 0, mag, 1.0), 1.0 + 0j)
    dist = np.abs(safe[..., None] - unit_alpha)
    idx = np.argmin(dist, axis=-1)
    out = spec.zeta[idx]
    if np.ndim(z) == 0:
        return complex(out)
    return out


def rotated_projection(z, weights, project, order, rel_tol=1e-12):
    """Quantize ``exp(j theta) z`` with the theta that maximizes
    ``|sum(weights * q)|``, searched over every theta.

    ``project`` is an entrywise nearest-point map onto an alphabet that is
    invariant under rotation by ``2 pi / order`` (4 for {+-1 +-1j}, 2**L for
    the phase alphabet). Over one rotation step each entry crosses exactly
    one decision boundary, so sorting the crossings and accumulating the
    change in the sum visits every distinct projection in O(K log K).
    theta = 0 is among the candidates, and near-ties keep the smallest
    rotation, so the result is never worse than ``project(z)``.
    """
    z = np.asarray(z, dtype=np.complex128)
    w = np.asarray(weights, dtype=np.complex128).ravel()
    flat = z.ravel()
    q0 = project(flat)
    step = 2.0 * np.pi / order
    rot = np.exp(1j * step)
    cross = np.mod(np.angle(q0) + 0.5 * step - np.angle(flat), step)
    seq = np.argsort(cross, kind="stable")
    sums = np.sum(q0 * w) + np.concatenate(([0.0], np.cumsum(q0[seq] * (rot - 1.0) * w[seq])))
    val = np.abs(sums) ** 2
    k = int(np.argmax(val >= val.max() * (1.0 - rel_tol)))
    out = q0.copy()
    out[seq[:k]] = project(q0[seq[:k]] * rot)
    return out.reshape(z.shape)


def power_scale(n, p_tot_w):
    """Analog gain that puts a length-n codeword exactly on the power budget."""
    if n < 1 or not p_tot_w > 0:
        raise ContractError(f"need n >= 1 and p_tot_w > 0, got n={n}, p={p_tot_w}")
    return math.sqrt(p_tot_w / (2.0 * n))


def dbm_to_watts(p_dbm):
    return 10.0 ** ((p_dbm - 30.0) / 10.0)
