import dataclasses
import math

import numpy as np
import pandas as pd
import pytest

from ambient_capacity.cache import EstimateCache
from ambient_capacity.config import apply_overrides
from ambient_capacity.errors import ConfigValidationError
from ambient_capacity.pipeline import (
    FIGURE_IDS,
    ScenarioRunner,
    SeriesSpec,
    ShapeCheck,
    SweepRunner,
    SweepSpec,
    available_quantities,
    evaluate_checks,
    figure_preset,
    get_quantity,
    parse_quantities,
    point_overrides,
)


@pytest.mark.unit
class TestQuantities:
    def test_registry(self):
        names = available_quantities()
        for expected in (
            "c3_no_backscatter",
            "c3_semianalytic",
            "c3_mc_full",
            "delta_c3",
            "outage",
            "c1_upper",
            "c1_lower_cutoff",
            "c1_mixture",
            "c4_upper",
            "c4_lower",
            "j_ratio_mc",
        ):
            assert expected in names
        assert names == sorted(names)

    def test_parse_keeps_order_and_drops_duplicates(self):
        parsed = parse_quantities("delta_c3, c1_upper,delta_c3")
        assert [q.name for q in parsed] == ["delta_c3", "c1_upper"]
        assert [q.name for q in parse_quantities(["c4_lower"])] == ["c4_lower"]

    def test_unknown_or_empty(self):
        with pytest.raises(ConfigValidationError, match="unknown quantity"):
            get_quantity("c5")
        with pytest.raises(ConfigValidationError):
            parse_quantities(" , ")

    def test_closed_forms_are_exact(self, default_scenario):
        estimate = get_quantity("c3_no_backscatter").evaluate(default_scenario, 10, 0, {})
        assert estimate.mean == pytest.approx(5.88405, abs=1e-4)
        assert estimate.std_error == 0.0


@pytest.mark.integration
class TestScenarioRunner:
    def test_default_quantities(self, small_config):
        result = ScenarioRunner().run_scenario(small_config)
        table = result.table.set_index("quantity")
        assert list(result.table.columns) == ["quantity", "mean", "std_error", "trials", "runtime_s"]
        assert table.loc["c3_no_backscatter", "mean"] == pytest.approx(5.8840, abs=1e-3)
        assert table.loc["c3_no_backscatter", "trials"] == 0
        assert table.loc["c3_semianalytic", "trials"] == 2000
        assert table.loc["delta_c3", "mean"] > 0.0
        assert result.metadata["seed"] == 0
        assert len(result.metadata["config_hash"]) == 16

    def test_sleep_mode_gain_is_zero(self, small_config):
        cfg = apply_overrides(small_config, {"power.alpha_sq_db": None})
        table = ScenarioRunner().run_scenario(cfg, "delta_c3").table
        assert table.loc[0, "mean"] == 0.0
        assert table.loc[0, "std_error"] == 0.0

    def test_undefined_quantity_gives_nan(self, small_config):
        cfg = apply_overrides(small_config, {"constellation.kind": "ASK4"})
        table = ScenarioRunner().run_scenario(cfg, ["delta_c3_high_snr"]).table
        assert math.isnan(table.loc[0, "mean"])
        assert table.loc[0, "trials"] == 0

    def test_deterministic(self, small_config):
        first = ScenarioRunner().run_scenario(small_config, "c1_lower_cutoff,c4_lower").table
        second = ScenarioRunner().run_scenario(small_config, "c1_lower_cutoff,c4_lower").table
        pd.testing.assert_frame_equal(first.drop(columns="runtime_s"), second.drop(columns="runtime_s"))

    def test_worker_count_does_not_change_numbers(self, small_config):
        parallel = apply_overrides(small_config, {"mc.workers": 3})
        serial_table = ScenarioRunner().run_scenario(small_config, "c4_upper").table
        parallel_table = ScenarioRunner().run_scenario(parallel, "c4_upper").table
        assert serial_table.loc[0, "mean"] == parallel_table.loc[0, "mean"]

    def test_cache(self, small_config, tmp_path):
        cache = EstimateCache(cache_dir=str(tmp_path))
        runner = ScenarioRunner(cache)
        first = runner.run_scenario(small_config, "c1_upper,c1_upper_large_m").table
        assert cache.size() == 1
        reloaded = ScenarioRunner(EstimateCache(cache_dir=str(tmp_path)))
        second = reloaded.run_scenario(small_config, "c1_upper").table
        assert second.loc[0, "mean"] == first.loc[0, "mean"]
        assert second.loc[0, "runtime_s"] == 0.0


@pytest.mark.unit
class TestSweepSpec:
    def test_defaults(self):
        spec = SweepSpec(variable="snr_l_db", grid=(0, 10), quantities=("c3_no_backscatter",))
        assert spec.grid == (0.0, 10.0)
        assert spec.series[0].label == "default"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"variable": "eta"},
            {"grid": ()},
            {"grid": (0.0, 10.0, 5.0)},
            {"grid": (0.0, float("inf"))},
            {"variable": "d12_ratio", "grid": (0.0, 0.5)},
            {"reference": "d23"},
            {"series": (SeriesSpec("a"), SeriesSpec("a"))},
            {"quantities": ("nope",)},
            {"checks": (ShapeCheck("c1_upper", "decreasing"),)},
            {"checks": (ShapeCheck("c3_no_backscatter", "decreasing", series=("other",)),)},
        ],
    )
    def test_invalid(self, kwargs):
        base = {"variable": "snr_l_db", "grid": (0.0, 10.0), "quantities": ("c3_no_backscatter",)}
        base.update(kwargs)
        with pytest.raises(ConfigValidationError):
            SweepSpec(**base)

    def test_invalid_check(self):
        with pytest.raises(ConfigValidationError):
            ShapeCheck("c1_upper", "flat")
        with pytest.raises(ConfigValidationError):
            ShapeCheck("c1_upper", "above")

    def test_from_dict(self):
        spec = SweepSpec.from_dict(
            {
                "variable": "alpha_sq_db",
                "grid": [-30, -20],
                "quantities": "c3_semianalytic,c3_no_backscatter",
                "checks": [{"quantity": "c3_semianalytic", "expect": "above", "other": "c3_no_backscatter"}],
            }
        )
        assert spec.quantities == ("c3_semianalytic", "c3_no_backscatter")
        assert spec.checks[0].k == 3.0

    def test_point_overrides(self, default_config):
        snr = SweepSpec(variable="snr_b_db", grid=(0.0,), quantities=("c4_lower",))
        assert point_overrides(default_config, snr, -10.0) == {
            "power.snr_b1_db": -10.0,
            "power.snr_b4_db": -10.0,
            "power.noise4_db": None,
        }
        cfg = apply_overrides(default_config, {"geometry.d14": 2.0})
        distance = SweepSpec(variable="d12_ratio", grid=(0.5,), quantities=("c4_lower",), reference="d14")
        assert point_overrides(cfg, distance, 0.5) == {"geometry.d12": 1.0}


@pytest.mark.unit
class TestChecks:
    @staticmethod
    def table(values, other=None, se=0.0):
        data = {"series": "default", "snr_l_db": np.arange(len(values), dtype=float)}
        data["c3_semianalytic"] = values
        data["c3_semianalytic_se"] = [se] * len(values)
        if other is not None:
            data["c3_no_backscatter"] = other
            data["c3_no_backscatter_se"] = [0.0] * len(values)
        return pd.DataFrame(data)

    @staticmethod
    def spec(*checks):
        return SweepSpec(
            variable="snr_l_db",
            grid=(0.0, 1.0, 2.0, 3.0),
            quantities=("c3_semianalytic", "c3_no_backscatter"),
            checks=checks,
        )

    def test_monotone(self):
        spec = self.spec(ShapeCheck("c3_semianalytic", "increasing"))
        assert evaluate_checks(self.table([1.0, 2.0, 3.0, 4.0]), spec)[0].passed
        assert not evaluate_checks(self.table([1.0, 2.0, 1.5, 4.0]), spec)[0].passed
        # a dip inside the standard-error slack is tolerated
        assert evaluate_checks(self.table([1.0, 2.0, 1.9, 4.0], se=0.1), spec)[0].passed

    def test_extrema(self):
        spec = self.spec(
            ShapeCheck("c3_semianalytic", "interior_minimum"),
            ShapeCheck("c3_semianalytic", "interior_maximum"),
        )
        results = evaluate_checks(self.table([3.0, 1.0, 2.0, 0.5]), spec)
        assert [r.passed for r in results] == [True, True]
        results = evaluate_checks(self.table([1.0, 2.0, 3.0, 4.0]), spec)
        assert [r.passed for r in results] == [False, False]

    def test_extrema_must_clear_standard_error(self):
        spec = self.spec(ShapeCheck("c3_semianalytic", "interior_maximum"))
        # a bump smaller than 3 SE of its neighbours is noise
        assert not evaluate_checks(self.table([1.0, 1.05, 1.0, 0.98], se=0.02), spec)[0].passed
        assert evaluate_checks(self.table([1.0, 1.5, 1.0, 0.98], se=0.02), spec)[0].passed
        # closed-form curves carry no SE and keep the strict comparison
        assert evaluate_checks(self.table([1.0, 1.0 + 1e-9, 1.0, 0.98]), spec)[0].passed

    def test_plateau(self):
        spec = self.spec(ShapeCheck("c3_semianalytic", "plateau", k=3.0))
        assert evaluate_checks(self.table([0.1, 1.0, 1.9, 1.93], se=0.01), spec)[0].passed
        # still climbing at the end of the grid
        assert not evaluate_checks(self.table([0.1, 1.0, 1.9, 2.8], se=0.01), spec)[0].passed
        # flat from the start
        assert not evaluate_checks(self.table([1.9, 1.9, 1.9, 1.9], se=0.01), spec)[0].passed
        relaxed = self.spec(ShapeCheck("c3_semianalytic", "plateau", rtol=0.05))
        assert evaluate_checks(self.table([0.1, 1.0, 1.9, 1.98]), relaxed)[0].passed

    def test_snr_preset_checks_for_saturation(self):
        _, spec = figure_preset(10)
        plateau = [c for c in spec.checks if c.expect == "plateau"]
        assert [c.quantity for c in plateau] == ["c4_lower"]
        curve = [0.05, 0.3, 0.9, 1.5, 1.8, 1.9, 1.93, 1.935]
        table = pd.concat(
            pd.DataFrame(
                {
                    "series": s.label,
                    "snr_b_db": spec.grid,
                    "c4_lower": curve,
                    "c4_lower_se": [1e-3] * len(curve),
                }
            )
            for s in spec.series
        )
        results = evaluate_checks(table, spec)
        assert results and all(r.passed for r in results)

    def test_comparisons(self):
        spec = self.spec(
            ShapeCheck("c3_semianalytic", "above", other="c3_no_backscatter"),
            ShapeCheck("c3_semianalytic", "below", other="c3_no_backscatter"),
        )
        results = evaluate_checks(self.table([2.0, 3.0, 4.0, 5.0], other=[1.0] * 4), spec)
        assert [r.passed for r in results] == [True, False]

    def test_nan_and_missing_series(self):
        spec = self.spec(ShapeCheck("c3_semianalytic", "increasing"))
        assert not evaluate_checks(self.table([1.0, np.nan, 3.0, 4.0]), spec)[0].passed
        empty = self.table([1.0, 2.0, 3.0, 4.0]).assign(series="elsewhere")
        assert evaluate_checks(empty, spec)[0].detail == "series not in table"


@pytest.mark.unit
class TestFigurePresets:
    @pytest.mark.parametrize("figure_id", list(FIGURE_IDS))
    def test_every_preset_loads(self, figure_id):
        cfg, spec = figure_preset(figure_id)
        assert spec.series
        assert spec.quantities

    def test_outage_preset(self):
        cfg, spec = figure_preset(5)
        assert cfg.rate.rs == 6.0
        assert spec.variable == "alpha_sq_db"
        assert "outage" in spec.quantities

    def test_distance_preset_by_name(self):
        _, spec = figure_preset("fig8")
        assert spec.variable == "d12_ratio"
        assert spec.quantities == ("c1_lower_cutoff",)

    @pytest.mark.parametrize("figure_id", [2, 12, "fig12", "figX"])
    def test_unknown_preset(self, figure_id):
        with pytest.raises(ConfigValidationError):
            figure_preset(figure_id)

    def test_base_config_is_kept(self, small_config):
        cfg, _ = figure_preset(3, base=small_config)
        assert cfg.mc.trials == 2000


@pytest.mark.integration
class TestSweepRunner:
    def test_single_point(self, small_config):
        spec = SweepSpec(variable="alpha_sq_db", grid=(-20.0,), quantities=("delta_c3",))
        result = SweepRunner().run_sweep(small_config, spec)
        assert list(result.table.columns) == [
            "series",
            "alpha_sq_db",
            "delta_c3",
            "delta_c3_se",
            "trials",
            "runtime_s",
        ]
        assert len(result.table) == 1
        assert result.metadata["variable"] == "alpha_sq_db"

    def test_reduced_legacy_figure(self, small_config):
        cfg, spec = figure_preset(3, base=small_config)
        spec = dataclasses.replace(spec, grid=(-40.0, -20.0, 0.0))
        result = SweepRunner().run_sweep(cfg, spec, preset="fig3")
        assert len(result.table) == 3 * len(spec.series)
        assert result.all_checks_passed
        assert result.metadata["preset"] == "fig3"
        assert "published 0.1315" in result.metadata["reference"]
        assert any(key.startswith("check_") for key in result.metadata)

    def test_sweep_is_deterministic(self, small_config):
        cfg, spec = figure_preset(10, base=small_config)
        spec = dataclasses.replace(spec, grid=(-10.0, 10.0), series=spec.series[:2], checks=())
        first = SweepRunner().run_sweep(cfg, spec).table.drop(columns="runtime_s")
        second = SweepRunner().run_sweep(cfg, spec).table.drop(columns="runtime_s")
        pd.testing.assert_frame_equal(first, second)

    def test_distance_sweep(self, small_config):
        cfg, spec = figure_preset(7, base=small_config)
        spec = dataclasses.replace(spec, grid=(0.1, 0.4, 1.0), series=spec.series[:1])
        result = SweepRunner().run_sweep(cfg, spec)
        assert result.all_checks_passed
        assert result.table["c1_upper"].is_monotonic_decreasing
