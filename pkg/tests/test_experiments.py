import math

import pytest

from dosched.errors import SpecValidationError
from dosched.experiments import (
    COLUMNS,
    ResultRow,
    emit_plot_script,
    emit_results,
    list_presets,
    load_preset,
    load_results,
    load_spec,
    mc_max_density,
    run_experiment,
    spec_from_dict,
)


def _spec(**over):
    d = {
        "name": "small",
        "config": {"alpha": 4, "beta": 2, "distance": 8, "lambda_t": 1e-4},
        "schemes": [{"tag": "dcas", "channel": {"rho": 1, "exponent": 1}}, {"tag": "none"}],
        "sweep": {"variable": "lambda_t", "grid": [1e-5, 1e-4]},
        "mc": {"trials": 200, "master_seed": 9, "window_radius": 120},
        "outputs": ["csv", "json", "plot"],
    }
    d.update(over)
    return d


def test_validation_lists_every_problem():
    bad = _spec(bogus=1, schemes=[{"tag": "dcas", "channel": {"exponent": 1}}],
                sweep={"variable": "beta", "grid": [2, 1]})
    with pytest.raises(SpecValidationError) as info:
        spec_from_dict(bad)
    text = " ".join(info.value.problems)
    for needle in ("bogus", "rho", "sweep.variable", "increasing"):
        assert needle in text


def test_empty_schemes_rejected():
    with pytest.raises(SpecValidationError, match="schemes"):
        spec_from_dict(_spec(schemes=[]))


def test_epsilon_sweep_needs_lambda_grid():
    with pytest.raises(SpecValidationError, match="lambda_grid"):
        spec_from_dict(_spec(sweep={"variable": "epsilon", "grid": [0.1]}))


def test_missing_file(tmp_path):
    with pytest.raises(SpecValidationError):
        load_spec(tmp_path / "nope.yaml")


def test_presets_load():
    assert {"fig3", "fig4", "fig5"} <= set(list_presets())
    for name in list_presets():
        assert load_preset(name).name == name


@pytest.fixture(scope="module")
def small_rows():
    return run_experiment(spec_from_dict(_spec()))


def test_rows_ordered_and_filled(small_rows):
    assert [r.scheme for r in small_rows][:2] == ["dcas[rho_c=1,gamma=1]", "none"]
    for r in small_rows:
        assert not r.failed
        assert r.outage_lower <= r.outage_upper
        assert 0 <= r.mc_outage <= 1
        assert r.lambda_lower <= r.lambda_upper
        assert math.isnan(r.ic_lower)


def test_csv_json_round_trip(tmp_path, small_rows):
    for fmt in ("csv", "json"):
        p = emit_results(small_rows, fmt, tmp_path / f"r.{fmt}")
        back = load_results(p)
        assert len(back) == len(small_rows)
        for a, b in zip(small_rows, back):
            ra = a.rounded()
            for c in COLUMNS:
                x, y = getattr(ra, c), getattr(b, c)
                assert (x == y) or (isinstance(x, float) and math.isnan(x) and math.isnan(y))


def test_single_row_csv_has_two_lines(tmp_path):
    p = emit_results([ResultRow("lambda_t", 1e-4, "none")], "csv", tmp_path / "one.csv")
    lines = p.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0].split(",") == list(COLUMNS)


def test_rerun_is_byte_identical(tmp_path, small_rows):
    again = run_experiment(spec_from_dict(_spec(mc={"trials": 200, "master_seed": 9,
                                                    "window_radius": 120, "threads": 3})))
    a = emit_results(small_rows, "csv", tmp_path / "a.csv").read_bytes()
    b = emit_results(again, "csv", tmp_path / "b.csv").read_bytes()
    assert a == b


def test_plot_script_one_curve_per_scheme(tmp_path, small_rows):
    text = emit_plot_script(small_rows, tmp_path / "p.gp").read_text()
    assert text.count("<< EOD") == 2
    assert text.count("title 'none bounds'") == 1


def test_failed_point_does_not_stop_sweep():
    # DIAS with threshold 0 cannot schedule the reference link
    rows = run_experiment(spec_from_dict(_spec(
        schemes=[{"tag": "dias", "interferer": {"rho": 0.0}}, {"tag": "none"}])))
    assert rows[0].failed
    assert rows[0].error.startswith("DegenerateConfigError")
    assert not rows[1].failed


def test_mc_max_density_interpolates():
    import numpy as np

    parents = np.array([1e-5, 1e-4, 1e-3])
    actives = parents * 0.5
    outages = np.array([0.01, 0.05, 0.2])
    lam, cens = mc_max_density(parents, actives, outages, 0.1)
    assert 5e-5 < lam < 5e-4 and not cens
    assert mc_max_density(parents, actives, outages, 0.5) == (5e-4, True)
