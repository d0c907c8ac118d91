"""Plant model tests: component lags, power balance, frequency dynamics."""

import numpy as np
import pytest

from hybridctl.plant import (COMPONENTS, FirstOrderLag, PlantConfig,
                             STATE_NAMES, ae_input, grid_frequency_derivative,
                             lag_derivative, plant_derivatives, power_balance)


def state_with(**kwargs) -> np.ndarray:
    x = np.zeros(11)
    for name, value in kwargs.items():
        x[STATE_NAMES.index(name)] = value
    return x


def test_lag_reference_derivatives():
    assert FirstOrderLag(1.0, 1.5).derivative(1.0) == pytest.approx(2.0 / 3.0)
    assert FirstOrderLag(-0.7, 0.9).derivative(1.0) == pytest.approx(-0.7 / 0.9)
    deg = FirstOrderLag(0.003, 2.0, state=0.001)
    assert deg.derivative(1.0) == pytest.approx(0.001)
    assert lag_derivative(deg, 1.0) == pytest.approx(0.001)


def test_lag_rate_limit_saturates():
    lag = FirstOrderLag(0.003, 2.0, rate_limit=0.001)
    assert lag.derivative(100.0) == 0.001
    assert lag.derivative(-100.0) == -0.001
    assert lag.derivative(0.1) == pytest.approx(0.00015)  # inside the limit


def test_lag_settles_at_dc_gain():
    lag = FirstOrderLag(1.8, 1.8)
    h = 0.001
    for _ in range(30_000):
        lag.state += h * lag.derivative(1.0)
    assert lag.state == pytest.approx(1.8, rel=1e-6)
    lag.reset()
    assert lag.state == 0.0


def test_state_layout():
    assert len(STATE_NAMES) == 11
    with pytest.raises(ValueError):
        plant_derivatives(PlantConfig(), np.zeros(7), 0.0, 0.0, 0.0, 0.0)


def test_renewable_split():
    cfg = PlantConfig()
    x = state_with(wtg=1.0, stpg_b=0.5)
    assert ae_input(cfg, x) == pytest.approx(0.4 * 1.5)
    assert power_balance(cfg, x, 0.0) == pytest.approx(0.6 * 1.5)


def test_power_balance_signs():
    x = state_with(fc1=0.2, fc2=0.1, deg=0.05, fess=0.3, bess=0.2, uc=0.1)
    cfg = PlantConfig()
    assert power_balance(cfg, x, 0.4) == pytest.approx(0.35 - 0.6 - 0.4)
    literal = PlantConfig(storage_balance_sign=1.0)
    assert power_balance(literal, x, 0.4) == pytest.approx(0.35 + 0.6 - 0.4)


def test_power_balance_matches_manual_formula():
    rng = np.random.default_rng(3)
    cfg = PlantConfig()
    for _ in range(50):
        x = rng.normal(size=11)
        load = rng.normal()
        want = (cfg.kn * (x[0] + x[2]) + x[4] + x[5] + x[6]
                - (x[7] + x[8] + x[9]) - load)
        assert power_balance(cfg, x, load) == pytest.approx(want, abs=1e-12)


def test_frequency_derivative():
    cfg = PlantConfig()
    got = grid_frequency_derivative(cfg, 0.1, 0.2)
    assert got == pytest.approx((0.2 - 0.03 * 0.1) / 0.4)
    x = state_with(df=0.1)
    dx = plant_derivatives(cfg, x, 0.0, 0.0, 0.0, 0.0)
    assert dx[10] == pytest.approx(grid_frequency_derivative(
        cfg, 0.1, power_balance(cfg, x, 0.0)))


def test_derivatives_superpose():
    # Without rate limits the plant map is linear in (state, inputs).
    cfg = PlantConfig()
    rng = np.random.default_rng(11)
    for _ in range(20):
        xa, xb = rng.normal(size=(2, 11))
        ua, ub, wa, wb, sa, sb, la, lb = rng.normal(size=8)
        lhs = plant_derivatives(cfg, xa + xb, ua + ub, wa + wb, sa + sb,
                                la + lb)
        rhs = (plant_derivatives(cfg, xa, ua, wa, sa, la)
               + plant_derivatives(cfg, xb, ub, wb, sb, lb))
        assert np.allclose(lhs, rhs, atol=1e-9)


def test_disconnect_freezes_component():
    cfg = PlantConfig().disconnect("fess", "bess")
    x = state_with(fess=0.3, bess=0.2, uc=0.1)
    dx = plant_derivatives(cfg, x, 1.0, 0.0, 0.0, 0.0)
    assert dx[STATE_NAMES.index("fess")] == 0.0
    assert dx[STATE_NAMES.index("bess")] == 0.0
    assert dx[STATE_NAMES.index("uc")] != 0.0
    # Frozen states also leave the balance.
    assert power_balance(cfg, x, 0.0) == pytest.approx(-0.1)
    # The original config is untouched.
    assert PlantConfig().connected["fess"] is True
    with pytest.raises(ValueError):
        cfg.disconnect("flux")


def test_fuel_cell_chain_settles():
    # Constant wind feeds the AE through the (1 - kn) split; both fuel
    # cells settle at k_fc * k_ae * 0.4 of the renewable power.
    cfg = PlantConfig()
    x = np.zeros(11)
    h = 0.01
    for _ in range(12_000):
        x = x + h * plant_derivatives(cfg, x, 0.0, 1.0, 0.0, 0.0)
    assert x[0] == pytest.approx(1.0, rel=1e-6)
    assert x[3] == pytest.approx(0.002 * 0.4, rel=1e-6)
    assert x[4] == pytest.approx(0.01 * 0.002 * 0.4, rel=1e-5)
    assert x[5] == pytest.approx(x[4])


def test_rate_limited_derivatives_clamped():
    cfg = PlantConfig().with_rate_limits({"uc": 0.001, "stpg": 0.01})
    dx = plant_derivatives(cfg, np.zeros(11), 1.0, 0.0, 10.0, 0.0)
    assert dx[STATE_NAMES.index("uc")] == -0.001
    assert dx[STATE_NAMES.index("stpg_a")] == 0.01
    assert dx[STATE_NAMES.index("stpg_b")] <= 0.01


def test_scale_uc():
    cfg = PlantConfig().scale_uc(1.3)
    assert cfg.k_uc == pytest.approx(-0.91)
    assert cfg.t_uc == pytest.approx(1.17)
    assert cfg.k_fess == PlantConfig().k_fess


def test_config_validation():
    with pytest.raises(ValueError):
        PlantConfig(connected={"flux": True})
    with pytest.raises(ValueError):
        PlantConfig(rate_limits={"flux": 0.1})
    with pytest.raises(ValueError):
        PlantConfig(t_uc=0.0)
    with pytest.raises(ValueError):
        PlantConfig(damping=-1.0)


def test_packed_layout():
    params, conn, limits = PlantConfig().packed()
    assert params.shape == (22,)
    assert conn.shape == (len(COMPONENTS),)
    assert np.all(conn == 1.0)
    assert limits.shape == (11,)
    assert np.all(np.isinf(limits))
