"""Cascaded channel, receive SNR and spectral efficiency.

The link is single-user single-stream, so there is no interference term and
the quantity the literature calls SINR is a plain SNR here.
"""

from dataclasses import dataclass
import math

import numpy as np

from bdirs.channel import ChannelPair
from bdirs.errors import ContractError
from bdirs.quantizer import ScaledCodeword, dbm_to_watts


def effective_channel(h, phi, g):
    """``H^H Phi g`` as a length-N vector."""
    h = np.asarray(h)
    phi = np.asarray(phi)
    g = np.asarray(g).reshape(-1)
    m = h.shape[0]
    if phi.shape != (m, m) or g.shape[0] != m:
        raise ContractError(
            f"shape mismatch: H {h.shape}, Phi {phi.shape}, g {g.shape}")
    return np.conj(h).T @ (phi @ g)


def snr(h_eff, v, sigma2):
    """``|h_eff^H v|^2 / sigma2``; ``v`` is a ScaledCodeword or a plain vector."""
    vec = v.vector if isinstance(v, ScaledCodeword) else np.asarray(v)
    s = np.vdot(np.asarray(h_eff).reshape(-1), vec.reshape(-1))
    return float(s.real**2 + s.imag**2) / sigma2


def spectral_efficiency(gamma):
    return math.log1p(gamma) / math.log(2.0)


def noise_power(n0_dbm_hz, bandwidth_hz):
    if not bandwidth_hz > 0:
        raise ContractError(f"bandwidth must be > 0, got {bandwidth_hz}")
    return dbm_to_watts(n0_dbm_hz + 10.0 * math.log10(bandwidth_hz))


@dataclass(frozen=True)
class LinkObjective:
    """Evaluates SE for (v, Phi) pairs on a fixed channel realization.

    ``se`` is the single source of truth used for every accept/reject
    decision in the solvers; the fast kernels only rank candidates.
    """
    channels: ChannelPair
    noise_power_w: float
    bandwidth_hz: float = 1e6

    def __post_init__(self):
        if not self.noise_power_w > 0:
            raise ContractError(f"noise power must be > 0, got {self.noise_power_w}")
        if not self.bandwidth_hz > 0:
            raise ContractError(f"bandwidth must be > 0, got {self.bandwidth_hz}")

    @property
    def h(self):
        return self.channels.h_bs_irs

    @property
    def g(self):
        return self.channels.g_irs_user

    def h_eff(self, phi):
        return effective_channel(self.h, phi, self.g)

    def snr(self, v, phi):
        return snr(self.h_eff(phi), v, self.noise_power_w)

    def se(self, v, phi):
        return spectral_efficiency(self.snr(v, phi))

    def phase_coefficients(self, v):
        """Matrix C with ``|sum(Phi * C)|^2 / sigma2`` equal to the SNR.

        ``(H^H Phi g)^H v = conj(u^H Phi g)`` with ``u = H v``, so
        ``C[i, j] = conj(u_i) g_j``.
        """
        vec = v.vector if isinstance(v, ScaledCodeword) else np.asarray(v)
        u = self.h @ vec
        return np.outer(np.conj(u), self.g)
