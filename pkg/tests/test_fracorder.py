"""Band-limited fractional differ-integrator approximation tests.

The oracle throughout is direct evaluation of the zero/pole/gain
product; the state-space realization must reproduce it everywhere.
"""

import numpy as np
import pytest

from hybridctl.fracorder import (LinearStateSpace, ZpkFilter, freq_response,
                                 oustaloup_zpk, zpk_to_state_space)

W_LO, W_HI, N_PAIRS = 1e-2, 1e2, 2


def reference_frequencies(n=50):
    return np.logspace(-3, 3, n)


def test_zero_pole_layout_matches_recursive_formula():
    # Independent recomputation of the corner frequencies.
    alpha = 0.37
    f = oustaloup_zpk(alpha, W_LO, W_HI, N_PAIRS)
    n_sec = 2 * N_PAIRS + 1
    ratio = W_HI / W_LO
    ks = np.arange(-N_PAIRS, N_PAIRS + 1)
    zeros = -W_LO * ratio ** ((ks + N_PAIRS + 0.5 * (1 - alpha)) / n_sec)
    poles = -W_LO * ratio ** ((ks + N_PAIRS + 0.5 * (1 + alpha)) / n_sec)
    assert np.allclose(f.zeros, zeros, rtol=1e-12)
    assert np.allclose(f.poles, poles, rtol=1e-12)
    assert f.gain == pytest.approx(W_HI ** alpha, rel=1e-12)


def test_filter_shape_invariants():
    for alpha in (-1.0, -0.5, 0.25, 1.0):
        f = oustaloup_zpk(alpha, W_LO, W_HI, N_PAIRS)
        assert len(f.zeros) == len(f.poles) == 2 * N_PAIRS + 1
        mags_z = np.abs(f.zeros)
        mags_p = np.abs(f.poles)
        assert np.all(mags_z >= W_LO - 1e-12) and np.all(mags_z <= W_HI + 1e-9)
        assert np.all(mags_p >= W_LO - 1e-12) and np.all(mags_p <= W_HI + 1e-9)
        assert np.all(np.diff(mags_z) > 0)
        assert np.all(np.diff(mags_p) > 0)


def test_alpha_zero_is_unity():
    f = oustaloup_zpk(0.0, W_LO, W_HI, N_PAIRS)
    assert np.allclose(f.zeros, f.poles)
    assert f.gain == pytest.approx(1.0)
    for w in (0.01, 1.0, 50.0):
        assert f.evaluate(1j * w) == pytest.approx(1.0 + 0.0j, abs=1e-12)


def test_alpha_one_gain():
    assert oustaloup_zpk(1.0, W_LO, W_HI, N_PAIRS).gain == pytest.approx(100.0)


def test_half_order_band_center():
    f = oustaloup_zpk(0.5, W_LO, W_HI, N_PAIRS)
    h = f.evaluate(1j * 1.0)
    assert abs(h) == pytest.approx(1.0, rel=0.03)
    assert np.degrees(np.angle(h)) == pytest.approx(45.0, abs=3.0)


def test_midband_fractional_slope():
    # Phase within 5 deg of alpha*90 and magnitude within 0.5 dB of w^alpha
    # at 20 log-spaced probes inside the inner decade band.  |alpha| = 1
    # telescopes to a single lead section whose phase error touches 5.77
    # deg exactly at the 10*w_lo and w_hi/10 endpoints, so the probes stay
    # strictly interior.
    ws = np.logspace(np.log10(10 * W_LO), np.log10(W_HI / 10), 22)[1:-1]
    for alpha in (-1.0, -0.5, 0.0, 0.5, 1.0):
        f = oustaloup_zpk(alpha, W_LO, W_HI, N_PAIRS)
        h = np.array([f.evaluate(1j * w) for w in ws])
        phase_err = np.degrees(np.angle(h)) - alpha * 90.0
        mag_err_db = 20 * np.log10(np.abs(h)) - 20 * alpha * np.log10(ws)
        assert np.max(np.abs(phase_err)) < 5.0
        assert np.max(np.abs(mag_err_db)) < 0.5


def test_opposite_orders_compose_to_allpass():
    up = oustaloup_zpk(0.5, W_LO, W_HI, N_PAIRS)
    down = oustaloup_zpk(-0.5, W_LO, W_HI, N_PAIRS)
    ws = np.logspace(-1, 1, 15)
    gains_db = [20 * np.log10(abs(up.evaluate(1j * w) * down.evaluate(1j * w)))
                for w in ws]
    assert np.max(np.abs(gains_db)) < 0.5


def test_invalid_arguments():
    with pytest.raises(ValueError):
        oustaloup_zpk(1.5, W_LO, W_HI, N_PAIRS)
    with pytest.raises(ValueError):
        oustaloup_zpk(0.5, 10.0, 0.1, N_PAIRS)
    with pytest.raises(ValueError):
        oustaloup_zpk(0.5, W_LO, W_HI, 0)


def test_state_space_matches_zpk_response():
    for alpha in (-1.0, -0.6, 0.3, 0.9):
        f = oustaloup_zpk(alpha, W_LO, W_HI, N_PAIRS)
        ss = zpk_to_state_space(f)
        assert ss.order == 2 * N_PAIRS + 1
        for w in reference_frequencies():
            want = f.evaluate(1j * w)
            got = freq_response(ss, w)
            assert abs(got - want) / abs(want) < 1e-9


def test_state_space_unity_realization():
    ss = zpk_to_state_space(oustaloup_zpk(0.0, W_LO, W_HI, N_PAIRS))
    assert ss.d == pytest.approx(1.0)
    assert np.allclose(ss.c, 0.0)
    assert freq_response(ss, 3.7) == pytest.approx(1.0 + 0.0j, abs=1e-12)


def test_state_space_dc_gain():
    f = oustaloup_zpk(-0.4, W_LO, W_HI, N_PAIRS)
    ss = zpk_to_state_space(f)
    want = f.gain * np.prod(np.abs(f.zeros) / np.abs(f.poles))
    assert abs(ss.dc_gain() - want) / abs(want) < 1e-9
    assert f.dc_gain() == pytest.approx(want, rel=1e-12)


def test_state_space_is_hurwitz():
    for alpha in (-1.0, -0.5, 0.0, 0.5, 1.0):
        ss = zpk_to_state_space(oustaloup_zpk(alpha, W_LO, W_HI, N_PAIRS))
        assert np.all(np.linalg.eigvals(ss.a).real < 0)


def test_differentiator_midband_probe():
    ss = zpk_to_state_space(oustaloup_zpk(1.0, W_LO, W_HI, N_PAIRS))
    h = freq_response(ss, 1.0)
    assert abs(h) == pytest.approx(1.0, rel=0.03)
    assert np.degrees(np.angle(h)) == pytest.approx(90.0, abs=3.0)


def test_state_derivative_consistency():
    # Integrating the realization against a constant input must settle at
    # the DC gain.
    f = oustaloup_zpk(-0.5, W_LO, W_HI, N_PAIRS)
    ss = zpk_to_state_space(f)
    x = np.zeros(ss.order)
    h = 0.005
    for _ in range(400_000):
        k1 = ss.derivative(x, 1.0)
        k2 = ss.derivative(x + 0.5 * h * k1, 1.0)
        k3 = ss.derivative(x + 0.75 * h * k2, 1.0)
        x = x + h * (2 * k1 + 3 * k2 + 4 * k3) / 9.0
    assert ss.output(x, 1.0) == pytest.approx(ss.dc_gain(), rel=1e-6)
