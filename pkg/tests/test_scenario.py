"""Scenario file parsing, writing, and config validation."""

from dataclasses import replace

import pytest

from hybridctl.controllers import FuzzyFOPIDParams, PIDParams
from hybridctl.scenario import (ScenarioConfig, _format_schedule,
                                _parse_schedule, load_scenario,
                                save_scenario)


def test_nominal_file_spells_out_the_defaults():
    cfg = load_scenario("scenarios/nominal.ini")
    assert cfg.controller == PIDParams(kp=2.04, ki=0.64, kd=0.61)
    assert replace(cfg, controller=None) == ScenarioConfig()


def test_missing_sections_fall_back_to_defaults(tmp_path):
    path = tmp_path / "empty.ini"
    path.write_text("[simulation]\nt_max = 30\n")
    cfg = load_scenario(path)
    assert cfg.t_max == 30.0
    assert cfg.step == 0.01
    assert cfg.plant == ScenarioConfig().plant
    assert cfg.controller is None


def test_seed_key_maps_to_master_seed(tmp_path):
    path = tmp_path / "s.ini"
    path.write_text("[simulation]\nseed = 17\nrealizations = 6\n")
    cfg = load_scenario(path)
    assert cfg.master_seed == 17
    assert cfg.realizations == 6


def test_save_load_roundtrip(tmp_path):
    cfg = ScenarioConfig(
        t_max=45.0, step=0.005, noise_dt=0.02, w1=2.0, w2=0.5,
        u_ss=((0.0, 0.75), (20.0, 0.25)), error_sign=1.0,
        master_seed=99, realizations=3,
        controller=FuzzyFOPIDParams(ke=0.5, kd=0.25, k_pi=1.5, k_pd=2.0,
                                lam=0.9, mu=0.85))
    cfg = cfg.with_plant(replace(
        cfg.plant.disconnect("bess").with_rate_limits({"deg": 0.001,
                                                       "uc": 1.2}),
        k_uc=-0.5, damping=0.05))
    cfg = replace(cfg, wind=replace(cfg.wind, eta=0.25,
                                    gamma=((0.0, 0.6), (10.0, -0.2))),
                  load=replace(cfg.load, additive=((5.0, 0.4),)))

    path = tmp_path / "round.ini"
    save_scenario(cfg, path)
    assert load_scenario(path) == cfg


def test_parse_schedule_variants():
    assert _parse_schedule("") == ()
    assert _parse_schedule("0:0.5, 40:-0.1") == ((0.0, 0.5), (40.0, -0.1))
    assert _parse_schedule("0:1,") == ((0.0, 1.0),)
    with pytest.raises(ValueError, match="malformed"):
        _parse_schedule("0:0.5:1")
    with pytest.raises(ValueError, match="malformed"):
        _parse_schedule("abc")


def test_format_schedule_inverts_parse():
    schedule = ((0.0, 0.81), (40.0, 0.17), (80.0, 1.12))
    assert _parse_schedule(_format_schedule(schedule)) == schedule


def test_unknown_disconnected_component_raises(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[plant]\ndisconnected = deg, toaster\n")
    with pytest.raises(ValueError, match="toaster"):
        load_scenario(path)


def test_missing_file_raises():
    with pytest.raises(FileNotFoundError):
        load_scenario("no/such/file.ini")


def test_profile_overrides_apply(tmp_path):
    path = tmp_path / "p.ini"
    path.write_text("[profile.solar]\neta = 0.2\n"
                    "gamma = 0:0.9, 15:-0.4\n")
    cfg = load_scenario(path)
    assert cfg.solar.eta == 0.2
    assert cfg.solar.gamma == ((0.0, 0.9), (15.0, -0.4))
    assert cfg.wind == ScenarioConfig().wind


def test_config_validation():
    with pytest.raises(ValueError, match="positive"):
        ScenarioConfig(step=0.0)
    with pytest.raises(ValueError, match="realizations"):
        ScenarioConfig(realizations=0)
    with pytest.raises(ValueError, match="error_sign"):
        ScenarioConfig(error_sign=0.5)
    with pytest.raises(ValueError, match="multiple"):
        ScenarioConfig(step=0.01, noise_dt=0.015)


def test_noise_stride_and_step_count():
    cfg = ScenarioConfig(t_max=2.0, step=0.01, noise_dt=0.05)
    assert cfg.n_steps == 200
    assert cfg.noise_stride == 5
    assert ScenarioConfig().noise_stride == 1
