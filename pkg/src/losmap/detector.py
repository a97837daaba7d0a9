"""Per-link LoS state detection as a binary hypothesis test.

Observation model per link: h_hat_m = b_m * phi_m + omega_m with
omega_m ~ CN(0, sigma_omega_m^2). The likelihood-ratio test reduces to
comparing |h_hat|^2 - |h_hat - phi|^2 against a per-link threshold; with
equal priors the threshold is zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

DECISION_RULES = ("optimal-threshold", "zero-threshold")
# The test threshold derived from the likelihood ratio is
# sigma_omega^2 * ln(P(H0)/P(H1)) ("derivation"). Some write-ups carry the
# inverted prior ratio; "printed" selects that variant. Both vanish for
# equal priors.
THRESHOLD_CONVENTIONS = ("derivation", "printed")


@dataclass(frozen=True)
class DetectorConfig:
    prior_h1: float = 0.5
    rule: str = "optimal-threshold"
    threshold_convention: str = "derivation"
    sigma_omega_scale: float = 1.0  # mismatch knob on the assumed noise variance

    def __post_init__(self):
        if not 0.0 < self.prior_h1 < 1.0:
            raise ValueError("prior_h1 must lie strictly inside (0, 1)")
        if self.rule not in DECISION_RULES:
            raise ValueError(f"rule must be one of {DECISION_RULES}")
        if self.threshold_convention not in THRESHOLD_CONVENTIONS:
            raise ValueError(f"threshold_convention must be one of {THRESHOLD_CONVENTIONS}")
        if self.sigma_omega_scale <= 0:
            raise ValueError("sigma_omega_scale must be positive")


@dataclass
class DetectionResult:
    statistic: np.ndarray
    threshold: np.ndarray
    b_hat: np.ndarray
    phi: np.ndarray
    sigma_omega_sq: np.ndarray


def phi(p, k_linear: float, d, wavelength: float):
    """Deterministic direct-path component sqrt(K p / (K+1)) e^{-j 2 pi d / lambda}."""
    if k_linear < 0:
        raise ValueError("K must be nonnegative")
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise ValueError("path gains must be positive")
    out = np.sqrt(k_linear * p / (k_linear + 1.0)) * np.exp(
        -2j * math.pi * np.asarray(d, dtype=float) / wavelength)
    return complex(out) if out.ndim == 0 else out


def sigma_omega_sq(p, k_linear: float, sigma_v_sq: float):
    """Variance of the combined NLoS-plus-estimation-noise term: p/(K+1) + sigma_v^2."""
    if k_linear < 0 or sigma_v_sq < 0:
        raise ValueError("K and sigma_v_sq must be nonnegative")
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise ValueError("path gains must be positive")
    out = p / (k_linear + 1.0) + sigma_v_sq
    return float(out) if out.ndim == 0 else out


def statistic(h_hat, phi_val):
    """Test statistic |h_hat|^2 - |h_hat - phi|^2."""
    h_hat = np.asarray(h_hat)
    phi_val = np.asarray(phi_val)
    out = np.abs(h_hat) ** 2 - np.abs(h_hat - phi_val) ** 2
    return float(out) if out.ndim == 0 else out


def optimal_threshold(sigma_omega_sq_val, prior_h1: float,
                      convention: str = "derivation"):
    """Error-probability-minimizing threshold for the statistic.

    With the likelihood-ratio derivation this is sigma_omega^2 * ln(P(H0)/P(H1));
    convention="printed" flips the prior ratio.
    """
    if not 0.0 < prior_h1 < 1.0:
        raise ValueError("prior_h1 must lie strictly inside (0, 1)")
    if convention not in THRESHOLD_CONVENTIONS:
        raise ValueError(f"convention must be one of {THRESHOLD_CONVENTIONS}")
    so2 = np.asarray(sigma_omega_sq_val, dtype=float)
    if np.any(so2 <= 0):
        raise ValueError("sigma_omega_sq must be positive")
    ratio = (1.0 - prior_h1) / prior_h1
    if convention == "printed":
        ratio = 1.0 / ratio
    out = so2 * math.log(ratio)
    return float(out) if out.ndim == 0 else out


def detect(h_hat: np.ndarray, phi_vec: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Per-link LoS decisions; statistic must exceed the threshold strictly.

    Ties decide NLoS: a tie is measure-zero and NLoS never carves the map.
    """
    h_hat = np.asarray(h_hat)
    phi_vec = np.asarray(phi_vec)
    thresholds = np.asarray(thresholds, dtype=float)
    if not (h_hat.shape == phi_vec.shape == thresholds.shape):
        raise ValueError("h_hat, phi and thresholds must have equal shapes")
    return (statistic(h_hat, phi_vec) > thresholds).astype(np.int8)


def lrt_oracle(h_hat, phi_val, sigma_omega_sq_val, prior_h1: float = 0.5):
    """Reference decision via explicit conditional densities.

    Evaluates both complex-Gaussian pdfs of the observation and compares
    their ratio against P(H0)/P(H1). Intended as an independent check of
    detect(); it does not share its algebraic shortcut.
    """
    h_hat = np.asarray(h_hat)
    phi_val = np.asarray(phi_val)
    so2 = np.asarray(sigma_omega_sq_val, dtype=float)
    norm = 1.0 / (math.pi * so2)
    pdf_h0 = norm * np.exp(-np.abs(h_hat) ** 2 / so2)
    pdf_h1 = norm * np.exp(-np.abs(h_hat - phi_val) ** 2 / so2)
    ratio = pdf_h1 / pdf_h0
    out = (ratio > (1.0 - prior_h1) / prior_h1).astype(np.int8)
    return int(out) if out.ndim == 0 else out


def q_function(x):
    """Gaussian tail probability Q(x) = 0.5 erfc(x / sqrt(2))."""
    out = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


def theoretical_error(p, k_linear: float, sigma_v_sq: float) -> float:
    """Closed-form average LoS-state error probability under equal priors.

    (1/M) sum_m Q( sqrt( K p_m / (2 p_m + 2 (K+1) sigma_v^2) ) ).
    """
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise ValueError("path gains must be positive")
    arg = np.sqrt(k_linear * p / (2.0 * p + 2.0 * (k_linear + 1.0) * sigma_v_sq))
    return float(np.mean(q_function(arg)))


def empirical_error_rate(b_hat: np.ndarray, b: np.ndarray) -> float:
    """Fraction of links whose estimated LoS state differs from the truth."""
    b_hat = np.asarray(b_hat)
    b = np.asarray(b)
    if b_hat.shape != b.shape:
        raise ValueError("b_hat and b must have equal shapes")
    return float(np.mean(b_hat != b))


def full_detection(h_hat: np.ndarray, d: np.ndarray, p: np.ndarray,
                   k_linear: float, sigma_v_sq: float, wavelength: float,
                   config: DetectorConfig) -> DetectionResult:
    """Assemble phi, noise variances, thresholds and decisions for an M-link vector."""
    phi_vec = phi(p, k_linear, d, wavelength)
    so2 = sigma_omega_sq(p, k_linear, sigma_v_sq) * config.sigma_omega_scale
    so2 = np.broadcast_to(np.asarray(so2, dtype=float), h_hat.shape).copy()
    if config.rule == "zero-threshold":
        thresholds = np.zeros_like(so2)
    else:
        thresholds = optimal_threshold(so2, config.prior_h1, config.threshold_convention)
        thresholds = np.broadcast_to(np.asarray(thresholds, dtype=float), h_hat.shape).copy()
    b_hat = detect(h_hat, phi_vec, thresholds)
    return DetectionResult(statistic=statistic(h_hat, phi_vec), threshold=thresholds,
                           b_hat=b_hat, phi=phi_vec, sigma_omega_sq=so2)
