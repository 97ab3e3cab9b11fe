"""End-to-end refinement and dispersion studies, marked slow; deselect with ``-m "not slow"``."""

from __future__ import annotations

import math

import numpy as np
import pytest

from proca.convergence import ConvergenceStudy, run_convergence
from proca.memory import RunLedger
from proca.stages import potential_of
from proca.workflow import run_simulation_workflow

pytestmark = pytest.mark.slow


def _final_fields(result) -> tuple[np.ndarray, float]:
    """A_μ stacked on ∂₀A_μ at the last step, in the physical potential."""
    final = result.state["result"].final
    potential, velocity = potential_of(result.state["engine"], final)
    return np.concatenate([potential, velocity]), final.t


def _ladder(config, quantities):
    return run_convergence(ConvergenceStudy(config, quantities=quantities), ledger=RunLedger())


def test_flat_constraints_converge_at_second_order(make_config):
    config = make_config(points="128", kmax="8", t_end="1", **{"lambda": "0.5"})
    report = _ladder(config, ("c1_l2", "c2_l2", "gauss_l2"))
    assert all(value <= 1e-10 for value in report.estimate("c1_l2").values)
    for quantity in ("c2_l2", "gauss_l2"):
        assert report.estimate(quantity).order == pytest.approx(2.0, abs=0.3), quantity


def test_field_equation_residual_converges_at_second_order(make_config):
    config = make_config(points="128", kmax="8", t_end="1", keep_levels="true", **{"lambda": "0.5"})
    report = _ladder(config, ("fieldeq_l2",))
    assert report.estimate("fieldeq_l2").order == pytest.approx(2.0, abs=0.3)


def test_gordon_constraints_converge_at_second_order(make_config):
    config = make_config(
        engine="gordon", n="1", n_profile="sine", n_amplitude="0.1", points="128", kmax="4", t_end="1",
        **{"lambda": None},
    )
    report = _ladder(config, ("lorenz_l2", "gauss_l2"))
    for quantity in ("lorenz_l2", "gauss_l2"):
        assert report.estimate(quantity).order == pytest.approx(2.0, abs=0.3), quantity


@pytest.mark.parametrize(
    "overrides, expected",
    [
        ({"n": "2", "lambda": "0", "mode_kind": "transverse", "mode_k": "2", "t_end": "30"}, math.sqrt(5) / 2),
        ({"n": "1", "lambda": "0.5", "mode_kind": "longitudinal", "mode_k": "2", "t_end": "12"}, 3.0),
    ],
)
def test_plane_wave_dispersion_converges(make_config, tmp_path, overrides, expected):
    errors = []
    for points in ("64", "128"):
        config = make_config(
            init="plane_wave", points=points, sample_every="100", output_dir=str(tmp_path / points), **overrides
        )
        dispersion = run_simulation_workflow(config, ledger=RunLedger()).summary["dispersion"]
        assert dispersion["expected"] == pytest.approx(expected)
        errors.append(dispersion["relative_error"])
    assert errors[0] < 0.01
    assert 2.8 <= errors[0] / errors[1] <= 5.2


@pytest.mark.parametrize("points", ["128", "256"])
def test_engines_agree_at_the_gordon_lambda(make_config, tmp_path, points):
    common = {"n": "1.5", "points": points, "kmax": "8", "t_end": "0.5"}
    flat = make_config(output_dir=str(tmp_path / "flat"), **common, **{"lambda": "-1.25"})
    gordon = make_config(engine="gordon", output_dir=str(tmp_path / "gordon"), **common, **{"lambda": None})
    flat_fields, flat_t = _final_fields(run_simulation_workflow(flat, ledger=RunLedger()))
    gordon_fields, gordon_t = _final_fields(run_simulation_workflow(gordon, ledger=RunLedger()))
    assert flat_t == pytest.approx(gordon_t)
    assert flat_fields.shape == gordon_fields.shape == (8, int(points))
    scale = max(1.0, np.max(np.abs(flat_fields)))
    assert np.max(np.abs(flat_fields - gordon_fields)) <= 1e-8 * scale


def test_near_elliptic_lambda_runs_with_tight_step(make_config):
    config = make_config(t_end="0.05", **{"lambda": "0.999"})
    summary = run_simulation_workflow(config, ledger=RunLedger()).summary
    h = 2 * math.pi / 32
    assert summary["dt"] <= 0.25 * h * math.sqrt(0.001) * (1 + 1e-12)
    assert summary["t_final"] == pytest.approx(0.05)

