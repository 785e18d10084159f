"""Wind module tests: spectral values against hand-computed oracles, a
Welch periodogram oracle for the synthesizer, and shear/drag identities."""
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad
from scipy.signal import welch

from swarmlink.wind import (TurbulenceModel, TurbulenceSpec, WindShearCoeff,
                            airflow_drag_force, dryden_psd,
                            synthesize_turbulence, turbulence_psd,
                            von_karman_psd, wind_shear_response)

SPEC_D = TurbulenceSpec(sigma=(1.5, 1.2, 0.8), length=(200.0, 150.0, 50.0),
                        model=TurbulenceModel.DRYDEN)
SPEC_VK = TurbulenceSpec(sigma=(1.5, 1.2, 0.8), length=(200.0, 150.0, 50.0),
                         model=TurbulenceModel.VON_KARMAN)


def test_zero_frequency_value():
    # both models: Phi_u(0) = sigma^2 * L / pi, exactly
    for spec in (SPEC_D, SPEC_VK):
        for comp in ("u", "v", "w"):
            sigma, length = spec.params_for(comp)
            assert turbulence_psd(spec, comp, 0.0) == pytest.approx(
                sigma ** 2 * length / np.pi, rel=1e-15)


def test_dryden_u_hand_value():
    # sigma^2*L/pi / (1 + (L*Omega)^2) at Omega = 0.01, L = 200, sigma = 1.5
    omega = 0.01
    expected = 1.5 ** 2 * 200.0 / np.pi / (1.0 + (200.0 * omega) ** 2)
    assert dryden_psd(SPEC_D, "u", omega) == pytest.approx(expected, rel=1e-15)


def test_dryden_v_hand_value():
    omega = 0.02
    lo2 = (150.0 * omega) ** 2
    expected = 1.2 ** 2 * 150.0 / np.pi * (1 + 12 * lo2) / (1 + 4 * lo2) ** 2
    assert dryden_psd(SPEC_D, "v", omega) == pytest.approx(expected, rel=1e-15)


def test_von_karman_u_hand_value():
    omega = 0.02
    a = 1.339
    expected = (1.5 ** 2 * 200.0 / np.pi
                * (1.0 + (a * 200.0 * omega) ** 2) ** (-5.0 / 6.0))
    assert von_karman_psd(SPEC_VK, "u", omega) == pytest.approx(
        expected, rel=1e-15)


def test_von_karman_w_hand_value():
    omega = 0.05
    a = 1.339
    lo2 = (50.0 * omega) ** 2
    expected = (0.8 ** 2 * 50.0 / np.pi
                * (1 + (8.0 / 3.0) * (2 * a) ** 2 * lo2)
                / (1 + 2 * a * lo2) ** (11.0 / 6.0))
    assert von_karman_psd(SPEC_VK, "w", omega) == pytest.approx(
        expected, rel=1e-15)


@pytest.mark.parametrize("spec", [SPEC_D, SPEC_VK])
def test_u_psd_integrates_to_variance(spec):
    # two-sided density: integral over the real line equals sigma^2
    sigma, _ = spec.params_for("u")
    half, _ = quad(lambda w: float(turbulence_psd(spec, "u", w)),
                   0.0, np.inf, limit=400)
    assert 2.0 * half == pytest.approx(sigma ** 2, rel=1e-4)


def test_high_frequency_rolloff():
    # Dryden u falls as Omega^-2, Von Karman u as Omega^-5/3
    w1, w2 = 1.0, 10.0
    ratio_d = dryden_psd(SPEC_D, "u", w1) / dryden_psd(SPEC_D, "u", w2)
    assert ratio_d == pytest.approx((w2 / w1) ** 2, rel=0.01)
    ratio_vk = von_karman_psd(SPEC_VK, "u", w1) / von_karman_psd(SPEC_VK, "u", w2)
    assert ratio_vk == pytest.approx((w2 / w1) ** (5.0 / 3.0), rel=0.01)


def test_synthesized_series_is_zero_mean_and_deterministic():
    series = synthesize_turbulence(SPEC_D, "u", 1.0, 4096, seed=7)
    assert series.shape == (4096,)
    assert abs(series.mean()) < 1e-12
    again = synthesize_turbulence(SPEC_D, "u", 1.0, 4096, seed=7)
    assert np.array_equal(series, again)
    other = synthesize_turbulence(SPEC_D, "u", 1.0, 4096, seed=8)
    assert not np.array_equal(series, other)


def test_synthesized_variance_near_target():
    # variance over many samples approaches sigma^2 (minus the tiny tail
    # above Nyquist, negligible for this spacing/length combination)
    spec = TurbulenceSpec(sigma=(1.0, 1.0, 1.0), length=(200.0, 200.0, 50.0))
    acc = []
    for seed in range(8):
        s = synthesize_turbulence(spec, "u", 1.0, 1 << 15, seed=seed)
        acc.append(s.var())
    assert np.mean(acc) == pytest.approx(1.0, rel=0.1)


def test_periodogram_matches_target_psd():
    """Welch periodogram oracle: the one-sided temporal density P(f)
    relates to the two-sided spatial density by S(Omega) = P(f)/(4*pi)
    with Omega = 2*pi*f for unit sample spacing."""
    spec = TurbulenceSpec(sigma=(1.0, 1.0, 1.0), length=(200.0, 200.0, 50.0))
    series = synthesize_turbulence(spec, "u", 1.0, 1 << 14, seed=0)
    freqs, pxx = welch(series, fs=1.0, nperseg=256)
    omega = 2.0 * np.pi * freqs[1:]
    measured = pxx[1:] / (4.0 * np.pi)
    target = turbulence_psd(spec, "u", omega)
    # band-average over the central decade in 5 logarithmic bins
    lo, hi = omega[0] * 3.0, omega[0] * 30.0
    edges = np.logspace(np.log10(lo), np.log10(hi), 6)
    for a, b in zip(edges[:-1], edges[1:]):
        mask = (omega >= a) & (omega < b)
        assert mask.any()
        ratio = measured[mask].mean() / target[mask].mean()
        assert 0.8 <= ratio <= 1.2


def test_synthesis_rejects_bad_sizes():
    with pytest.raises(ValueError):
        synthesize_turbulence(SPEC_D, "u", 1.0, 1000, seed=0)  # not 2^k
    with pytest.raises(ValueError):
        synthesize_turbulence(SPEC_D, "u", 0.0, 1024, seed=0)


@given(st.floats(-0.999, 0.999), st.floats(-50, 50))
def test_shear_split_sums(p, delta_vw):
    dvg, dva = wind_shear_response(WindShearCoeff(p=p), delta_vw)
    assert dvg + dva == pytest.approx(delta_vw, abs=1e-9)
    assert dvg == pytest.approx(p * delta_vw, abs=1e-9)


def test_shear_coeff_validation():
    with pytest.raises(ValueError):
        WindShearCoeff(p=1.0)
    with pytest.raises(ValueError):
        WindShearCoeff(p=-1.5)


def test_drag_force_formula():
    # rho * v^2 * C_D * S, no 1/2 factor
    assert airflow_drag_force(1.225, 10.0, 0.5, 0.2) == pytest.approx(
        1.225 * 100.0 * 0.5 * 0.2, rel=1e-15)
    assert airflow_drag_force(1.225, 0.0, 0.5, 0.2) == 0.0
    with pytest.raises(ValueError):
        airflow_drag_force(-1.0, 1.0, 1.0, 1.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        TurbulenceSpec(sigma=(1.0, 1.0), length=(1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        TurbulenceSpec(sigma=(1.0, 1.0, 1.0), length=(1.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        TurbulenceSpec(sigma=(1.0, 1.0, 1.0), length=(1.0, 1.0, 1.0),
                       von_karman_a=1.4)
    with pytest.raises(ValueError):
        SPEC_D.params_for("x")
