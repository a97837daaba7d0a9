"""Mixed LoS/NLoS Rician channel synthesis and noisy channel estimation.

Per-link model: h_m = sqrt(p_m) * (b_m * sqrt(K/(K+1)) * e^{-j 2 pi d_m / lambda}
+ sqrt(1/(K+1)) * n_m) with n_m circularly-symmetric complex Gaussian of unit
variance. The estimate is h_hat = h + v with v ~ CN(0, sigma_v^2 I).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import AntennaArray, Point2D, RoomLayout, antenna_distances, los_bits

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class ChannelParams:
    fc_ghz: float = 28.0
    k_factor_db: float = 25.0
    gamma_v_db: float | None = None
    sigma_v_sq: float | None = None

    def __post_init__(self):
        if self.fc_ghz <= 0:
            raise ValueError("carrier frequency must be positive")
        if (self.gamma_v_db is None) == (self.sigma_v_sq is None):
            raise ValueError("supply exactly one of gamma_v_db / sigma_v_sq")
        if self.sigma_v_sq is not None and self.sigma_v_sq < 0:
            raise ValueError("sigma_v_sq must be nonnegative")

    @property
    def wavelength(self) -> float:
        """Carrier wavelength in meters."""
        return SPEED_OF_LIGHT / (self.fc_ghz * 1e9)

    @property
    def k_linear(self) -> float:
        return 10.0 ** (self.k_factor_db / 10.0)

    @property
    def gamma_v_linear(self) -> float:
        if self.gamma_v_db is None:
            raise ValueError("gamma_v_db not set")
        return 10.0 ** (self.gamma_v_db / 10.0)


@dataclass
class ChannelRealization:
    """One draw of the M-link channel between a terminal position and the array."""

    d: np.ndarray             # per-link distance, meters
    p: np.ndarray             # linear path gain
    b: np.ndarray             # ground-truth LoS bits
    h_los_phase: np.ndarray   # unit-magnitude LoS phasors
    h: np.ndarray             # true channel
    h_hat: np.ndarray | None = None
    sigma_v_sq: float | None = None

    @property
    def m_antennas(self) -> int:
        return self.d.shape[0]


def path_loss_db(d, fc_ghz):
    """Indoor path loss in dB: 32.4 + 17.3 log10(d[m]) + 20 log10(fc[GHz])."""
    d = np.asarray(d, dtype=float)
    fc = float(fc_ghz)
    if np.any(d <= 0) or fc <= 0:
        raise ValueError("distance and carrier frequency must be positive")
    out = 32.4 + 17.3 * np.log10(d) + 20.0 * np.log10(fc)
    return float(out) if out.ndim == 0 else out


def path_gain_linear(pl_db):
    """Linear power gain corresponding to a loss in dB."""
    out = 10.0 ** (-np.asarray(pl_db, dtype=float) / 10.0)
    return float(out) if out.ndim == 0 else out


def los_phase(d, wavelength: float):
    """Unit phasor e^{-j 2 pi d / lambda} of the direct path."""
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    out = np.exp(-2j * math.pi * np.asarray(d, dtype=float) / wavelength)
    return complex(out) if out.ndim == 0 else out


def complex_normal(rng: np.random.Generator, size, variance=1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples; variance is per complex sample."""
    scale = np.sqrt(np.asarray(variance, dtype=float) / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def draw_channel(layout: RoomLayout, array: AntennaArray, mt: Point2D,
                 params: ChannelParams, rng: np.random.Generator) -> ChannelRealization:
    """Synthesize the true channel for one terminal position.

    The estimate (h_hat) is left unset; call estimate_channel afterwards.
    """
    d = antenna_distances(mt, array)
    b = los_bits(mt, array, layout)
    p = path_gain_linear(path_loss_db(d, params.fc_ghz))
    phase = los_phase(d, params.wavelength)
    k = params.k_linear
    nlos = complex_normal(rng, array.m_antennas)
    h = np.sqrt(p) * (b * math.sqrt(k / (k + 1.0)) * phase
                      + math.sqrt(1.0 / (k + 1.0)) * nlos)
    return ChannelRealization(d=d, p=p, b=b, h_los_phase=phase, h=h)


def sigma_v_from_gamma(realization: ChannelRealization, params: ChannelParams) -> float:
    """Estimation-noise variance that realizes the configured channel-energy ratio.

    E{||h||^2} is evaluated analytically from the ground-truth LoS bits,
    sum_m p_m (b_m K + 1) / (K + 1), so the calibration itself carries no
    Monte Carlo noise.
    """
    k = params.k_linear
    energy = float(np.sum(realization.p * (realization.b * k + 1.0) / (k + 1.0)))
    return energy / (realization.m_antennas * params.gamma_v_linear)


def estimate_channel(realization: ChannelRealization, sigma_v_sq: float,
                     rng: np.random.Generator) -> ChannelRealization:
    """Return a copy of the realization with h_hat = h + CN(0, sigma_v_sq) noise."""
    if sigma_v_sq < 0:
        raise ValueError("sigma_v_sq must be nonnegative")
    v = complex_normal(rng, realization.m_antennas, sigma_v_sq)
    return replace(realization, h_hat=realization.h + v, sigma_v_sq=float(sigma_v_sq))
