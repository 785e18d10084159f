"""Physical-layer models: Friis and two-ray ground-reflection received
power, QPSK modulation/demodulation, AWGN / Rician / Rayleigh channels,
and analytic plus Monte Carlo bit-error rates.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import erfc

__all__ = [
    "LinkParams",
    "FadingKind",
    "FadingParams",
    "friis_received_power",
    "two_ray_received_power",
    "crossover_distance",
    "qpsk_modulate",
    "qpsk_demodulate",
    "apply_channel",
    "ber_qpsk_awgn_theoretical",
    "ber_monte_carlo",
    "watts_to_dbm",
]

# Gray map: bit pair (b0, b1) -> (I, Q) signs, unit symbol energy.
_SCALE = 1.0 / math.sqrt(2.0)


def watts_to_dbm(p_watts) -> float:
    return 10.0 * np.log10(np.asarray(p_watts) / 1e-3)


@dataclass(frozen=True)
class LinkParams:
    """Physical description of one point-to-point RF link."""

    tx_power: float          # W
    wavelength: float        # m
    distance: float          # m
    tx_gain: float = 1.0     # linear
    rx_gain: float = 1.0     # linear
    tx_height: float = 100.0  # m
    rx_height: float = 100.0  # m
    ground_reflection: float = -1.0  # in [-1, 0]

    def __post_init__(self):
        if self.tx_power <= 0 or self.wavelength <= 0:
            raise ValueError("tx_power and wavelength must be > 0")
        if self.tx_gain <= 0 or self.rx_gain <= 0:
            raise ValueError("antenna gains must be > 0")
        if not -1.0 <= self.ground_reflection <= 0.0:
            raise ValueError("ground_reflection must lie in [-1, 0]")


class FadingKind(enum.Enum):
    AWGN = "awgn"
    RICIAN = "rician"
    RAYLEIGH = "rayleigh"


@dataclass(frozen=True)
class FadingParams:
    """Channel selector; ``rician_k`` is the linear LOS-to-scatter power
    ratio and only applies to the Rician kind."""

    kind: FadingKind = FadingKind.AWGN
    rician_k: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.rician_k < 0:
            raise ValueError("rician_k must be >= 0")


def friis_received_power(link: LinkParams, distance: float | None = None):
    """Free-space received power Pt*Gt*Gr*lambda^2 / (4*pi*d)^2."""
    d = link.distance if distance is None else distance
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be > 0")
    factor = link.wavelength / (4.0 * np.pi * d)
    return link.tx_power * link.tx_gain * link.rx_gain * factor ** 2


def crossover_distance(link: LinkParams) -> float:
    """Distance beyond which the two-ray model decays as 1/d^4."""
    return 4.0 * np.pi * link.tx_height * link.rx_height / link.wavelength


def two_ray_received_power(link: LinkParams, distance: float | None = None):
    """Coherent sum of the direct ray and the ground-reflected ray.

    Pr = Pt * (lambda/4pi)^2 * |sqrt(G)/d_los + R*exp(j*phi)*sqrt(G)/d_ref|^2
    with phi = 2*pi*(d_ref - d_los)/lambda and G = Gt*Gr on both paths.
    With R = 0 this reduces to Friis evaluated at d_los.
    """
    d = link.distance if distance is None else distance
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be > 0")
    if link.tx_height <= 0 or link.rx_height <= 0:
        raise ValueError("antenna heights must be > 0")
    dh = link.tx_height - link.rx_height
    sh = link.tx_height + link.rx_height
    d_los = np.sqrt(d ** 2 + dh ** 2)
    d_ref = np.sqrt(d ** 2 + sh ** 2)
    phi = 2.0 * np.pi * (d_ref - d_los) / link.wavelength
    gain = math.sqrt(link.tx_gain * link.rx_gain)
    field = gain / d_los + link.ground_reflection * np.exp(1j * phi) * gain / d_ref
    return link.tx_power * (link.wavelength / (4.0 * np.pi)) ** 2 * np.abs(field) ** 2


def qpsk_modulate(bits) -> np.ndarray:
    """Gray-map a bit sequence onto unit-energy QPSK symbols.

    Bit pairs map as (b0 -> I, b1 -> Q) with 0 -> +1/sqrt(2) and
    1 -> -1/sqrt(2), so 00 lands on (+, +). Requires an even bit count.
    """
    bits = np.asarray(bits, dtype=int)
    if bits.size % 2:
        raise ValueError("bit count must be even")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("bits must be 0 or 1")
    i = 1.0 - 2.0 * bits[0::2]
    q = 1.0 - 2.0 * bits[1::2]
    return _SCALE * (i + 1j * q)


def qpsk_demodulate(symbols) -> np.ndarray:
    """Minimum-distance (sign) decisions inverse to :func:`qpsk_modulate`."""
    symbols = np.asarray(symbols, dtype=complex)
    bits = np.empty(2 * symbols.size, dtype=int)
    bits[0::2] = symbols.real < 0
    bits[1::2] = symbols.imag < 0
    return bits


def apply_channel(symbols, fading: FadingParams, ebn0_db: float) -> np.ndarray:
    """Pass QPSK symbols through the configured channel at the given Eb/N0.

    AWGN adds complex Gaussian noise sized for 2 bits/symbol. Rician
    multiplies each symbol by a random complex gain with LOS power
    fraction K/(K+1) before the noise, and the receiver is assumed to
    know the gain (it is divided out so a coherent decision follows).
    Rayleigh is Rician with K = 0. Deterministic per seed.
    """
    symbols = np.asarray(symbols, dtype=complex)
    rng = np.random.default_rng(fading.seed)
    ebn0 = 10.0 ** (ebn0_db / 10.0)
    es_n0 = 2.0 * ebn0  # 2 bits per symbol, unit symbol energy
    sigma = math.sqrt(1.0 / (2.0 * es_n0))
    if fading.kind is FadingKind.AWGN:
        h = np.ones(symbols.shape)
    else:
        k = fading.rician_k if fading.kind is FadingKind.RICIAN else 0.0
        scatter = (rng.standard_normal(symbols.shape)
                   + 1j * rng.standard_normal(symbols.shape)) / math.sqrt(2.0)
        h = (math.sqrt(k / (k + 1.0))
             + math.sqrt(1.0 / (k + 1.0)) * scatter)
    noise = sigma * (rng.standard_normal(symbols.shape)
                     + 1j * rng.standard_normal(symbols.shape))
    return (h * symbols + noise) / h


def ber_qpsk_awgn_theoretical(ebn0_db) -> float:
    """Analytic QPSK bit-error rate on AWGN: 0.5*erfc(sqrt(Eb/N0))."""
    ebn0 = 10.0 ** (np.asarray(ebn0_db, dtype=float) / 10.0)
    return 0.5 * erfc(np.sqrt(ebn0))


def ber_monte_carlo(fading: FadingParams, ebn0_db: float, n_bits: int,
                    seed: int | None = None) -> tuple[float, int]:
    """Measure BER by transmitting ``n_bits`` random bits.

    Returns ``(ber, n_errors)``. The bit source is seeded from ``seed``
    (defaults to ``fading.seed``) so repeated runs are identical.
    """
    if n_bits % 2 or n_bits < 2:
        raise ValueError("n_bits must be even and >= 2")
    if seed is None:
        seed = fading.seed
    # separate, independent streams for the bit source and the channel
    bit_ss, chan_ss = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.default_rng(bit_ss)
    bits = rng.integers(0, 2, size=n_bits)
    symbols = qpsk_modulate(bits)
    chan = replace(fading, seed=int(chan_ss.generate_state(1)[0]))
    received = apply_channel(symbols, chan, ebn0_db)
    decided = qpsk_demodulate(received)
    n_errors = int(np.count_nonzero(decided != bits))
    return n_errors / n_bits, n_errors
