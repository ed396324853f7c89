"""Line-of-sight THz channels: BS -> IRS matrix H and IRS -> user vector g."""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from bdirs.errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_CARRIER_HZ = 0.1e12
# typical molecular absorption around 0.1 THz; a scenario knob, not a measured value
DEFAULT_MU_ABS = 0.0033

_HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class ChannelParams:
    carrier_freq_hz: float = DEFAULT_CARRIER_HZ
    d1_m: float = 10.0
    d2_m: float = 5.0
    mu_abs_per_m: float = DEFAULT_MU_ABS
    antenna_spacing_m: float | None = None  # None -> half wavelength
    n_bs: int = 16
    m_irs: int = 16
    theta_t_rad: float = 0.0
    theta_r_rad: float = 0.0
    theta_u_rad: float = 0.0
    c_mps: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not self.carrier_freq_hz > 0:
            raise DomainError(f"carrier frequency must be > 0, got {self.carrier_freq_hz}")
        if not (self.d1_m > 0 and self.d2_m > 0):
            raise DomainError(f"distances must be > 0, got d1={self.d1_m}, d2={self.d2_m}")
        if not self.mu_abs_per_m >= 0:
            raise DomainError(f"absorption coefficient must be >= 0, got {self.mu_abs_per_m}")
        if self.n_bs < 1 or self.m_irs < 1:
            raise DomainError(f"array sizes must be >= 1, got N={self.n_bs}, M={self.m_irs}")
        for name in ("theta_t_rad", "theta_r_rad", "theta_u_rad"):
            th = getattr(self, name)
            if not -_HALF_PI < th < _HALF_PI:
                raise DomainError(f"{name} must lie in (-pi/2, pi/2), got {th}")
        if self.antenna_spacing_m is None:
            object.__setattr__(self, "antenna_spacing_m", self.c_mps / (2.0 * self.carrier_freq_hz))

    def with_sizes(self, n_bs=None, m_irs=None):
        return replace(self,
                       n_bs=self.n_bs if n_bs is None else int(n_bs),
                       m_irs=self.m_irs if m_irs is None else int(m_irs))


@dataclass(frozen=True)
class ChannelPair:
    h_bs_irs: np.ndarray  # (M, N)
    g_irs_user: np.ndarray  # (M,)
    params: ChannelParams | None = field(default=None, compare=False)

    @property
    def m(self):
        return self.h_bs_irs.shape[0]

    @property
    def n(self):
        return self.h_bs_irs.shape[1]


def path_loss(f, d, mu=0.0, c=SPEED_OF_LIGHT):
    """Free-space spreading times half the molecular absorption exponent:
    ``c / (4 pi f d) * exp(-mu d / 2)``.
    """
    if not f > 0:
        raise DomainError(f"frequency must be > 0, got {f}")
    if not d > 0:
        raise DomainError(f"distance must be > 0, got {d}")
    if not mu >= 0:
        raise DomainError(f"absorption must be >= 0, got {mu}")
    return c / (4.0 * math.pi * f * d) * math.exp(-0.5 * mu * d)


def spatial_frequency(d0, f, theta, c=SPEED_OF_LIGHT):
    return 2.0 * d0 * f * math.sin(theta) / c


def steering_vector(n_elems, upsilon):
    """ULA response ``exp(j pi k upsilon)`` for k = 0..n_elems-1."""
    if n_elems < 1:
        raise DomainError(f"n_elems must be >= 1, got {n_elems}")
    k = np.arange(n_elems)
    return np.exp(1j * np.pi * k * upsilon)


def make_channels(params: ChannelParams) -> ChannelPair:
    """Build ``H = rho1 a_M(u_r) a_N(u_t)^H`` and ``g = rho2 conj(a_M(u_u))``.

    g is kept as a length-M column (the conjugated IRS response) so that
    ``H^H Phi g`` is well typed.
    """
    p = params
    rho1 = path_loss(p.carrier_freq_hz, p.d1_m, p.mu_abs_per_m, p.c_mps)
    rho2 = path_loss(p.carrier_freq_hz, p.d2_m, p.mu_abs_per_m, p.c_mps)
    d0 = p.antenna_spacing_m
    a_r = steering_vector(p.m_irs, spatial_frequency(d0, p.carrier_freq_hz, p.theta_r_rad, p.c_mps))
    a_t = steering_vector(p.n_bs, spatial_frequency(d0, p.carrier_freq_hz, p.theta_t_rad, p.c_mps))
    a_u = steering_vector(p.m_irs, spatial_frequency(d0, p.carrier_freq_hz, p.theta_u_rad, p.c_mps))
    h = rho1 * np.outer(a_r, np.conj(a_t))
    g = rho2 * np.conj(a_u)
    return ChannelPair(h_bs_irs=h, g_irs_user=g, params=p)


@dataclass(frozen=True)
class Geometry:
    """Node placement used by :func:`sample_geometry`.

    Fixed ``d1_m``/``d2_m`` override the positional distances. The user is
    drawn uniformly in the square ``[0, area_m]^2`` and redrawn while it sits
    closer than ``min_distance_m`` to the IRS.
    """
    area_m: float = 10.0
    bs_xy: tuple = (0.0, 0.0)
    irs_xy: tuple = (5.0, 5.0)
    min_distance_m: float = 1.0
    d1_m: float | None = None
    d2_m: float | None = None


def sample_geometry(rng_seed, geometry: Geometry | None = None, base: ChannelParams | None = None):
    """Seeded draw of the three angles and the link distances."""
    geometry = geometry or Geometry()
    base = base or ChannelParams()
    rng = np.random.default_rng(rng_seed)
    lo = np.nextafter(-_HALF_PI, 0.0)
    thetas = rng.uniform(lo, _HALF_PI, size=3)

    bs = np.asarray(geometry.bs_xy, dtype=float)
    irs = np.asarray(geometry.irs_xy, dtype=float)
    d1 = geometry.d1_m if geometry.d1_m is not None else float(np.hypot(*(irs - bs)))
    if geometry.d2_m is not None:
        d2 = geometry.d2_m
    else:
        for _ in range(10_000):
            user = rng.uniform(0.0, geometry.area_m, size=2)
            d2 = float(np.hypot(*(user - irs)))
            if d2 >= geometry.min_distance_m:
                break
        else:
            raise DomainError("could not place the user outside min_distance_m of the IRS")
    return replace(base, d1_m=float(d1), d2_m=float(d2),
                   theta_t_rad=float(thetas[0]),
                   theta_r_rad=float(thetas[1]),
                   theta_u_rad=float(thetas[2]))
