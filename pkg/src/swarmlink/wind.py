"""Atmospheric turbulence spectra (Dryden / Von Karman), turbulence
time-series synthesis, wind-shear response split and airflow drag force.

Spectra are two-sided densities over spatial frequency Omega (rad/m): for
the longitudinal component the integral of the density over the whole real
line equals sigma**2.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TurbulenceModel",
    "TurbulenceSpec",
    "WindShearCoeff",
    "dryden_psd",
    "von_karman_psd",
    "turbulence_psd",
    "synthesize_turbulence",
    "wind_shear_response",
    "airflow_drag_force",
]

VON_KARMAN_A = 1.339

_COMPONENTS = ("u", "v", "w")


class TurbulenceModel(enum.Enum):
    DRYDEN = "dryden"
    VON_KARMAN = "von_karman"


@dataclass(frozen=True)
class TurbulenceSpec:
    """Turbulence intensities (m/s) and scale lengths (m) per axis."""

    sigma: tuple[float, float, float]
    length: tuple[float, float, float]
    model: TurbulenceModel = TurbulenceModel.DRYDEN
    von_karman_a: float = VON_KARMAN_A

    def __post_init__(self):
        if self.von_karman_a != VON_KARMAN_A:
            raise ValueError("von_karman_a is fixed at 1.339")
        if len(self.sigma) != 3 or len(self.length) != 3:
            raise ValueError("sigma and length must be 3-vectors")
        if any(s < 0 for s in self.sigma):
            raise ValueError("sigma components must be non-negative")
        if any(l <= 0 for l in self.length):
            raise ValueError("length components must be positive")

    def params_for(self, component: str) -> tuple[float, float]:
        try:
            i = _COMPONENTS.index(component)
        except ValueError:
            raise ValueError(f"component must be one of {_COMPONENTS}") from None
        return self.sigma[i], self.length[i]


@dataclass(frozen=True)
class WindShearCoeff:
    """Scalar coupling between a mean-wind change and the ground-speed
    change of the vehicle; |p| < 1."""

    p: float

    def __post_init__(self):
        if abs(self.p) >= 1:
            raise ValueError("|p| must be < 1")


def dryden_psd(spec: TurbulenceSpec, component: str, omega):
    """Dryden spectral density at spatial frequency ``omega`` (rad/m)."""
    sigma, length = spec.params_for(component)
    omega = np.asarray(omega, dtype=float)
    lo2 = (length * omega) ** 2
    if component == "u":
        shape = 1.0 / (1.0 + lo2)
    else:
        shape = (1.0 + 12.0 * lo2) / (1.0 + 4.0 * lo2) ** 2
    return sigma ** 2 * length / np.pi * shape


def von_karman_psd(spec: TurbulenceSpec, component: str, omega):
    """Von Karman spectral density at spatial frequency ``omega`` (rad/m)."""
    sigma, length = spec.params_for(component)
    omega = np.asarray(omega, dtype=float)
    a = spec.von_karman_a
    if component == "u":
        shape = (1.0 + (a * length * omega) ** 2) ** (-5.0 / 6.0)
    else:
        lo2 = (length * omega) ** 2
        shape = (1.0 + (8.0 / 3.0) * (2.0 * a) ** 2 * lo2) \
            / (1.0 + 2.0 * a * lo2) ** (11.0 / 6.0)
    return sigma ** 2 * length / np.pi * shape


def turbulence_psd(spec: TurbulenceSpec, component: str, omega):
    """Dispatch to the spectral density selected by ``spec.model``."""
    if spec.model is TurbulenceModel.DRYDEN:
        return dryden_psd(spec, component, omega)
    return von_karman_psd(spec, component, omega)


def synthesize_turbulence(spec: TurbulenceSpec, component: str,
                          sample_spacing: float, n_samples: int,
                          seed: int) -> np.ndarray:
    """Synthesize a zero-mean gust series whose periodogram follows the
    selected spectral density.

    White Gaussian noise is shaped in the frequency domain by the square
    root of the target density. ``n_samples`` must be a power of two and
    the DC bin is zeroed so the series is exactly zero-mean.
    """
    if sample_spacing <= 0:
        raise ValueError("sample_spacing must be > 0")
    if n_samples < 2 or n_samples & (n_samples - 1):
        raise ValueError("n_samples must be a power of two >= 2")
    rng = np.random.default_rng(seed)
    white = rng.standard_normal(n_samples)
    freqs = np.fft.rfftfreq(n_samples, d=sample_spacing)  # cycles per meter
    omega = 2.0 * np.pi * freqs
    psd = turbulence_psd(spec, component, omega)
    # white noise with unit variance has two-sided density spacing/(2*pi)
    gain = np.sqrt(psd * 2.0 * np.pi / sample_spacing)
    spectrum = np.fft.rfft(white) * gain
    spectrum[0] = 0.0
    series = np.fft.irfft(spectrum, n=n_samples)
    return series


def wind_shear_response(coeff: WindShearCoeff,
                        delta_vw: float) -> tuple[float, float]:
    """Split a mean-wind change into (ground-speed, airspeed) changes:
    (p * dVw, (1 - p) * dVw). The two parts always sum to ``delta_vw``."""
    dvg = coeff.p * delta_vw
    return dvg, delta_vw - dvg


def airflow_drag_force(air_density: float, airflow_speed: float,
                       drag_coeff: float, windward_area: float) -> float:
    """Airflow force rho * v**2 * C_D * S.

    Deliberately lacks the 1/2 factor of the textbook drag equation; the
    bare product is the model reproduced here.
    """
    if min(air_density, airflow_speed, drag_coeff, windward_area) < 0:
        raise ValueError("all inputs must be non-negative")
    return air_density * airflow_speed ** 2 * drag_coeff * windward_area
