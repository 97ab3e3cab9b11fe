from __future__ import annotations

import math

import pytest

from proca.config import RunConfig, Settings
from proca.errors import ConfigurationError, DomainError, HyperbolicityError

from conftest import config_text


def test_parses_base_keys(make_config):
    config = make_config()
    assert config.engine == "flat"
    assert config.grid.points == (32,)
    assert config.grid.lengths == (pytest.approx(2 * math.pi),)
    assert config.medium.n == 1.5
    assert config.lam == 0.5
    assert config.init.seed == 7
    assert config.evolution.cfl == 0.25
    assert config.output.probe == "auto"


def test_scalar_points_broadcast_and_pi_lengths(make_config):
    config = make_config(dim="2", points="16", lengths="pi, 0.5pi")
    assert config.grid.points == (16, 16)
    assert config.grid.lengths == pytest.approx((math.pi, 0.5 * math.pi))
    with pytest.raises(ConfigurationError):
        make_config(dim="2", points="16,16,16")


def test_text_round_trip(make_config):
    config = make_config(dim="2", points="16,32", keep_levels="yes", dt="0.01", sample_every="3")
    again = RunConfig.from_text(config.to_text())
    assert again == config
    assert again.digest() == config.digest()


def test_digest_tracks_every_value(make_config):
    assert make_config(seed="1").digest() != make_config(seed="2").digest()


def test_flat_defaults_lambda_to_zero(make_config):
    config = make_config(**{"lambda": None})
    assert config.lam == 0.0
    assert "lambda = 0.0" in config.to_text()


@pytest.mark.parametrize(
    "overrides",
    [
        {"colour": "blue"},
        {"engine": "curved"},
        {"n": "fast"},
        {"points": "32.5"},
        {"keep_levels": "maybe"},
        {"t_end": "inf"},
        {"init": "file"},
        {"probe": "a7"},
        {"n_profile": "sine"},
    ],
)
def test_rejects_bad_configs(make_config, overrides):
    with pytest.raises(ConfigurationError):
        make_config(**overrides)


@pytest.mark.parametrize("key", ["engine", "points", "n", "mu_p", "t_end"])
def test_missing_required_key(make_config, key):
    with pytest.raises(ConfigurationError, match=key):
        make_config(**{key: None})


@pytest.mark.parametrize("overrides", [{"n": "-1"}, {"mu_p": "-0.5"}, {"probe_index": "32"}])
def test_domain_errors(make_config, overrides):
    with pytest.raises(DomainError):
        make_config(**overrides)


@pytest.mark.parametrize("lam, kind", [("1", "elliptic-3d"), ("1.5", "elliptic-4d")])
def test_non_hyperbolic_lambda(make_config, lam, kind):
    with pytest.raises(HyperbolicityError, match=kind):
        make_config(**{"lambda": lam})


def test_gordon_refuses_lambda(make_config):
    with pytest.raises(ConfigurationError, match="lambda"):
        make_config(engine="gordon")
    config = make_config(engine="gordon", **{"lambda": None}, n_profile="sine", n_amplitude="0.1")
    assert config.lam is None
    assert config.medium_spec().lam is None


def test_refined_scales_grid_and_step(make_config):
    config = make_config(dt="0.02", sample_every="2")
    finer = config.refined(4)
    assert finer.grid.points == (128,)
    assert finer.evolution.dt == pytest.approx(0.005)
    assert finer.evolution.sample_every == 8
    assert finer.evolution.t_end == config.evolution.t_end


def test_probe_component(make_config):
    assert make_config().probe_component() == 0
    assert make_config(probe="a3").probe_component() == 3
    plane = make_config(init="plane_wave", mode_kind="transverse", mode_k="2")
    assert plane.probe_component() == 2
    assert make_config(init="plane_wave", mode_kind="longitudinal").probe_component() == 0


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigurationError, match="does not exist"):
        RunConfig.load(tmp_path / "absent.env")


def test_load_from_file(write_config):
    path = write_config("ladder.env", points="64")
    config = RunConfig.load(path)
    assert config.grid.points == (64,)
    assert config.output.directory.endswith("ladder")


def test_text_tolerates_comments():
    text = "# a flat run\n" + config_text() + "\n# trailing comment\n"
    assert RunConfig.from_text(text).engine == "flat"


def test_settings_from_env(monkeypatch):
    monkeypatch.setenv("PROCA_WORKERS", "0")
    monkeypatch.setenv("PROCA_LOG_LEVEL", "debug")
    monkeypatch.setenv("PROCA_ORDER_FLOOR", "1e-9")
    monkeypatch.delenv("PROCA_REDIS_URL", raising=False)
    settings = Settings.from_env()
    assert settings.workers == 1
    assert settings.log_level == "DEBUG"
    assert settings.order_floor == 1e-9
    assert settings.redis_url is None


def test_settings_reject_malformed_numbers(monkeypatch):
    monkeypatch.setenv("PROCA_WORKERS", "many")
    with pytest.raises(ValueError, match="PROCA_WORKERS"):
        Settings.from_env()
