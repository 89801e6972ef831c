"""Command-line surface: argument handling, serialization formats,
byte determinism, the ray-set cache, and exit codes."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from bernrays import ClassSpec, __version__, cli, rays_corr, rays_mean
from bernrays.errors import LengthMismatch
from bernrays.rayset_io import (
    format_ray_set,
    load_cached_rays,
    parse_ray_set,
    store_cached_rays,
)


def run(*args):
    return CliRunner().invoke(cli.main, list(args), catch_exceptions=False)


class TestRaySetFormat:
    def test_roundtrip_is_exact(self):
        rays = rays_corr.enumerate_rays(ClassSpec(20, 0.266, 1 / 6))
        text = format_ray_set(20, 0.266, 1 / 6, rays)
        d, p, rho, parsed = parse_ray_set(text)
        assert (d, p, rho) == (20, 0.266, 1 / 6)
        assert len(parsed) == len(rays)
        for got, want in zip(parsed, rays):
            assert got.support == want.support
            assert got.masses == want.masses

    def test_mean_only_header_has_an_empty_rho_field(self):
        rays = rays_mean.enumerate_rays(ClassSpec(10, 0.31))
        text = format_ray_set(10, 0.31, None, rays)
        fields = text.splitlines()[0].split(",")
        assert fields[0] == "10"
        assert float(fields[1]) == 0.31
        assert fields[2] == ""
        assert fields[3] == str(len(rays))
        _, _, rho, _ = parse_ray_set(text)
        assert rho is None

    def test_header_count_must_match(self):
        rays = rays_mean.enumerate_rays(ClassSpec(10, 0.31))
        text = format_ray_set(10, 0.31, None, rays)
        clipped = "\n".join(text.splitlines()[:-1]) + "\n"
        with pytest.raises(LengthMismatch):
            parse_ray_set(clipped)


class TestRaySetCache:
    def test_store_then_load(self, tmp_path):
        rays = rays_mean.enumerate_rays(ClassSpec(30, 0.21))
        store_cached_rays(tmp_path, 30, 0.21, None, __version__, rays)
        assert len(list(tmp_path.glob("rayset_*.txt"))) == 1
        assert len(list(tmp_path.glob("rayset_*.sha256"))) == 1
        back = load_cached_rays(tmp_path, 30, 0.21, None, __version__)
        assert back is not None
        assert [r.support for r in back] == [r.support for r in rays]

    def test_missing_key_is_a_miss(self, tmp_path):
        assert load_cached_rays(tmp_path, 30, 0.21, None, __version__) is None

    def test_corruption_is_a_miss(self, tmp_path):
        rays = rays_mean.enumerate_rays(ClassSpec(30, 0.21))
        store_cached_rays(tmp_path, 30, 0.21, None, __version__, rays)
        victim = next(tmp_path.glob("rayset_*.txt"))
        victim.write_text(victim.read_text().replace("0", "1", 1))
        assert load_cached_rays(tmp_path, 30, 0.21, None, __version__) is None

    def test_version_bump_is_a_miss(self, tmp_path):
        rays = rays_mean.enumerate_rays(ClassSpec(30, 0.21))
        store_cached_rays(tmp_path, 30, 0.21, None, "0.0.0", rays)
        assert load_cached_rays(tmp_path, 30, 0.21, None, __version__) is None


class TestCommands:
    def test_rays_writes_the_serialized_set(self, tmp_path):
        result = run(
            "rays", "--d", "20", "--p", "0.25", "--out", str(tmp_path)
        )
        assert result.exit_code == 0
        path = next(tmp_path.glob("rays_*.txt"))
        d, p, rho, rays = parse_ray_set(path.read_text())
        assert (d, p, rho) == (20, 0.25, None)
        assert len(rays) == len(rays_mean.enumerate_rays(ClassSpec(20, 0.25)))

    def test_rays_streams_to_stdout(self):
        result = run("rays", "--d", "12", "--p", "0.25")
        assert result.exit_code == 0
        header = result.stdout.splitlines()[0]
        assert header.startswith("12,0.25")

    def test_bounds_csv_shape(self):
        result = run("bounds", "--scenario", "BBB")
        assert result.exit_code == 0
        lines = result.stdout.strip().split("\n")
        assert lines[0] == "alpha,var_min,var_max,es_min,es_max"
        assert lines[1] == "0.9,0,16,1.7,16.0"
        assert len(lines) == 4

    def test_bounds_with_correlation_appends_the_benchmark(self):
        result = run("bounds", "--scenario", "BBB", "--rho", "1/2")
        lines = result.stdout.strip().split("\n")
        assert lines[0] == "alpha,var_min,var_max,es_min,es_max,beta_var"
        cells = lines[3].split(",")
        assert cells[0] == "0.99"
        assert (cells[1], cells[2], cells[5]) == ("1", "93", "57")

    def test_moments_table(self):
        result = run("moments", "--scenario", "B")
        lines = result.stdout.strip().split("\n")
        assert lines[0] == "order,lower,upper"
        assert lines[1] == "1,0.266,0.266"
        assert lines[2] == "2,0.069,0.266"
        assert lines[3] == "3,0.017,0.266"
        assert lines[4] == "4,0.004,0.266"
        assert lines[5] == "rho,-0.010,1.000"

    def test_moments_rejects_a_correlation_target(self):
        result = CliRunner().invoke(
            cli.main, ["moments", "--scenario", "B", "--rho", "1/6"]
        )
        assert result.exit_code == cli.EXIT_INFEASIBLE

    def test_json_output_parses_and_rounds(self):
        result = run("moments", "--scenario", "B", "--format", "json")
        rows = json.loads(result.stdout)
        assert rows[1] == {"order": "2", "lower": 0.069, "upper": 0.266}

    def test_sweep_covers_the_grid(self):
        result = run(
            "sweep", "--d", "12", "--p", "0.25",
            "--grid", "3", "--alpha", "0.9",
        )
        lines = result.stdout.strip().split("\n")
        assert lines[0] == "rho,alpha,var_min,var_max,beta_var"
        rhos = [line.split(",")[0] for line in lines[1:]]
        assert rhos == [format(v, ".17g") for v in (0.0, 11 / 24, 11 / 12)]
        # no benchmark column at zero correlation
        assert lines[1].split(",")[4] == ""

    def test_sweep_rejects_an_explicit_rho(self):
        result = CliRunner().invoke(
            cli.main, ["sweep", "--scenario", "A", "--rho", "1/6"]
        )
        assert result.exit_code != 0

    def test_fraction_and_decimal_rho_agree(self):
        as_fraction = run("rays", "--d", "25", "--p", "0.2", "--rho", "1/6")
        as_decimal = run(
            "rays", "--d", "25", "--p", "0.2",
            "--rho", "0.16666666666666666",
        )
        assert as_fraction.stdout == as_decimal.stdout

    def test_output_is_byte_deterministic(self):
        first = run("bounds", "--scenario", "A", "--rho", "1/2")
        second = run("bounds", "--scenario", "A", "--rho", "1/2")
        assert first.stdout == second.stdout

    def test_cache_round_trip_preserves_output(self, tmp_path):
        cold = run(
            "bounds", "--scenario", "A", "--rho", "1/2",
            "--cache", str(tmp_path),
        )
        assert list(tmp_path.glob("rayset_*.txt"))
        warm = run(
            "bounds", "--scenario", "A", "--rho", "1/2",
            "--cache", str(tmp_path),
        )
        assert cold.stdout == warm.stdout


class TestExitCodes:
    def test_usage_error_without_a_class(self):
        result = CliRunner().invoke(cli.main, ["bounds"])
        assert result.exit_code != 0

    def test_usage_error_with_two_classes(self):
        result = CliRunner().invoke(
            cli.main, ["bounds", "--p", "0.1", "--scenario", "A"]
        )
        assert result.exit_code != 0

    def test_invalid_marginal_maps_to_the_infeasible_code(self):
        result = CliRunner().invoke(cli.main, ["bounds", "--p", "1.5"])
        assert result.exit_code == cli.EXIT_INFEASIBLE

    def test_unattainable_correlation_maps_to_the_infeasible_code(self):
        result = CliRunner().invoke(
            cli.main,
            ["bounds", "--d", "4", "--p", "0.5", "--rho", "-0.9"],
        )
        assert result.exit_code == cli.EXIT_INFEASIBLE

    def test_reproduction_mismatch_has_its_own_code(self, tmp_path,
                                                    monkeypatch):
        monkeypatch.setattr(cli, "cmd_reproduce", lambda out, cache=None: 2)
        result = CliRunner().invoke(
            cli.main, ["reproduce", "--out", str(tmp_path)]
        )
        assert result.exit_code == cli.EXIT_MISMATCH


class TestDiffing:
    def test_mismatched_cells_are_reported(self):
        rows = [{"alpha": "0.9", "var_min": "0", "var_max": "2"}]
        expected = [{"alpha": "0.9", "var_min": "0", "var_max": "3"}]
        diffs = cli._diff_rows(rows, expected, "table")
        assert len(diffs) == 1
        assert diffs[0]["column"] == "var_max"
        assert (diffs[0]["got"], diffs[0]["expected"]) == ("2", "3")

    def test_equal_rows_produce_no_diffs(self):
        rows = [{"alpha": "0.9", "var_min": "0", "var_max": "2"}]
        assert cli._diff_rows(rows, list(rows), "table") == []
