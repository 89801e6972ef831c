"""Command-line front end.

Every numeric cell an output table carries comes from exactly one
library call; this layer only parses flags, routes through the ray-set
cache, applies display rounding, and serializes. Outputs are
byte-deterministic for a given invocation: fixed float formats, LF line
endings, sorted JSON keys, and no timestamps.

Exit codes: 0 success, 2 infeasible or invalid input, 3 reproduction
mismatch.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import click

from . import __version__, betamix, rays_corr, rays_mean, risk
from . import _reference_tables as ref
from .errors import BernraysError, InadmissibleCorrelation, InfeasibleMoment
from .pmf import ClassSpec
from .rays_mean import RayDensity
from .rayset_io import format_ray_set, load_cached_rays, store_cached_rays

EXIT_INFEASIBLE = 2
EXIT_MISMATCH = 3


@dataclass(frozen=True)
class ScenarioConfig:
    """Resolved invocation parameters shared by the subcommands."""

    d: int
    p: float
    rho: float | None
    alphas: tuple[float, ...]
    fmt: str = "csv"
    out: Path | None = None
    cache: Path | None = None
    grid: int = 12

    def class_spec(self) -> ClassSpec:
        return ClassSpec(self.d, self.p, self.rho)

    def slug(self) -> str:
        tag = f"d{self.d}_p{self.p:g}"
        if self.rho is not None:
            tag += f"_rho{self.rho:g}"
        return tag


def parse_rho(text: str) -> float:
    """Parse a correlation given as a fraction or a decimal.

    Fractions like ``1/6`` go through exact rational arithmetic before
    the single final rounding to float, so ``1/6`` and ``0.1666...``
    typed to any precision never drift apart.
    """
    return float(Fraction(text))


def _parse_alphas(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def _enumerate_cached(config: ScenarioConfig) -> list[RayDensity]:
    """Enumerate the configured class, by way of the cache when one is
    given. Cache hits log their timing to stderr; stdout stays clean."""
    spec = config.class_spec()
    if config.cache is not None:
        start = time.perf_counter()
        rays = load_cached_rays(
            config.cache, spec.d, spec.p, spec.rho, __version__
        )
        if rays is not None:
            elapsed = (time.perf_counter() - start) * 1e3
            click.echo(
                f"cache: reused {len(rays)} rays for {config.slug()} "
                f"in {elapsed:.1f} ms",
                err=True,
            )
            return rays
    if spec.rho is None:
        rays = rays_mean.enumerate_rays(spec)
    else:
        rays = rays_corr.enumerate_rays(spec)
    if config.cache is not None:
        store_cached_rays(
            config.cache, spec.d, spec.p, spec.rho, __version__, rays
        )
    return rays


# ---------------------------------------------------------------------------
# Table construction: raw rows first, display formatting second.

_FORMATTERS = {
    "order": str,
    "alpha": lambda a: f"{a:g}",
    "rho": lambda r: f"{r:.17g}",
    "lower": lambda x: f"{x:.3f}",
    "upper": lambda x: f"{x:.3f}",
    "var_min": lambda v: str(int(v)),
    "var_max": lambda v: str(int(v)),
    "beta_var": lambda v: "" if v is None else str(int(v)),
    "es_min": lambda x: f"{x:.1f}",
    "es_max": lambda x: f"{x:.1f}",
}

_JSON_ROUNDERS = {
    "lower": lambda x: round(x, 3),
    "upper": lambda x: round(x, 3),
    "es_min": lambda x: round(x, 1),
    "es_max": lambda x: round(x, 1),
}


def _stringify(rows: list[dict]) -> list[dict]:
    return [
        {key: _FORMATTERS[key](value) for key, value in row.items()}
        for row in rows
    ]


def _render(rows: list[dict], columns: tuple[str, ...], fmt: str) -> str:
    if fmt == "json":
        payload = [
            {
                key: _JSON_ROUNDERS.get(key, lambda v: v)(value)
                for key, value in row.items()
            }
            for row in rows
        ]
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(_stringify(rows))
    return buffer.getvalue()


MOMENTS_COLUMNS = ("order", "lower", "upper")
BOUNDS_COLUMNS = ("alpha", "var_min", "var_max", "es_min", "es_max")
BOUNDS_BETA_COLUMNS = BOUNDS_COLUMNS + ("beta_var",)
VAR_COLUMNS = ("alpha", "var_min", "var_max")
VAR_BETA_COLUMNS = ("alpha", "var_min", "var_max", "beta_var")
ES_COLUMNS = ("alpha", "es_min", "es_max")
SWEEP_COLUMNS = ("rho", "alpha", "var_min", "var_max", "beta_var")


def _moments_rows(spec: ClassSpec) -> list[dict]:
    rows = []
    for order in (1, 2, 3, 4):
        bounds = rays_mean.moment_bounds(spec, order)
        rows.append(
            {"order": str(order), "lower": bounds.lower, "upper": bounds.upper}
        )
    low, high = rays_mean.correlation_bounds(spec)
    rows.append({"order": "rho", "lower": low, "upper": high})
    return rows


def _beta_var(config: ScenarioConfig, alpha: float) -> int | None:
    if config.rho is None:
        return None
    try:
        params = betamix.calibrate(config.p, config.rho)
    except InadmissibleCorrelation:
        return None
    return betamix.var(params, config.d, alpha)


def _bounds_rows(
    config: ScenarioConfig, rays: list[RayDensity]
) -> list[dict]:
    rows = []
    for alpha in config.alphas:
        bounds = risk.risk_bounds(rays, alpha)
        row = {
            "alpha": alpha,
            "var_min": bounds.var_min,
            "var_max": bounds.var_max,
            "es_min": bounds.es_min,
            "es_max": bounds.es_max,
        }
        if config.rho is not None:
            row["beta_var"] = _beta_var(config, alpha)
        rows.append(row)
    return rows


def _sweep_grid(n: int) -> list[float]:
    """``n`` equispaced correlations from 0 to 11/12 inclusive, built
    rationally so grid points coincide bit-for-bit with parsed
    fractions like 1/6."""
    top = Fraction(11, 12)
    return [float(top * Fraction(k, n - 1)) for k in range(n)]


def _sweep_rows(config: ScenarioConfig) -> list[dict]:
    rows = []
    for rho in _sweep_grid(config.grid):
        point = ScenarioConfig(
            d=config.d,
            p=config.p,
            rho=rho,
            alphas=config.alphas,
            cache=config.cache,
        )
        try:
            rays = _enumerate_cached(point)
        except InfeasibleMoment as exc:
            click.echo(f"sweep: skipping rho={rho:g}: {exc}", err=True)
            continue
        for alpha in config.alphas:
            bounds = risk.risk_bounds(rays, alpha)
            beta = _beta_var(point, alpha) if rho > 0.0 else None
            rows.append(
                {
                    "rho": rho,
                    "alpha": alpha,
                    "var_min": bounds.var_min,
                    "var_max": bounds.var_max,
                    "beta_var": beta,
                }
            )
    return rows


# ---------------------------------------------------------------------------
# Subcommand bodies, callable without click for tests and for reproduce.


def cmd_rays(config: ScenarioConfig) -> tuple[int, str]:
    """Enumerate the configured class; returns (count, serialized set)."""
    rays = _enumerate_cached(config)
    text = format_ray_set(config.d, config.p, config.rho, rays)
    return len(rays), text


def cmd_bounds(config: ScenarioConfig) -> str:
    """Risk-bounds table across the configured alpha levels."""
    rays = _enumerate_cached(config)
    columns = BOUNDS_BETA_COLUMNS if config.rho is not None else BOUNDS_COLUMNS
    return _render(_bounds_rows(config, rays), columns, config.fmt)


def cmd_moments(config: ScenarioConfig) -> str:
    """Moment-bound table (orders 1-4 plus the correlation row)."""
    if config.rho is not None:
        raise BernraysError(
            "moments describes the mean-constrained class; drop --rho"
        )
    return _render(_moments_rows(config.class_spec()), MOMENTS_COLUMNS,
                   config.fmt)


def cmd_sweep(config: ScenarioConfig) -> str:
    """Long-format dataset of bounds across the correlation grid."""
    return _render(_sweep_rows(config), SWEEP_COLUMNS, config.fmt)


# ---------------------------------------------------------------------------
# Reproduction gate.


def _expected_strings(kind: str, scenario: str, rho_label: str | None):
    """Reference tables rendered through the display formatters, so the
    comparison happens on the exact emitted strings."""
    if kind == "moments":
        rows = [
            {"order": order, "lower": low, "upper": high}
            for order, (low, high) in ref.MOMENTS[scenario].items()
        ]
    elif kind == "var":
        rows = [
            {"alpha": alpha, "var_min": low, "var_max": high}
            for alpha, (low, high) in ref.VAR_MEAN[scenario].items()
        ]
    elif kind == "es":
        rows = [
            {"alpha": alpha, "es_min": low, "es_max": high}
            for alpha, (low, high) in ref.ES_MEAN[scenario].items()
        ]
    else:
        rows = [
            {"alpha": alpha, "var_min": low, "var_max": high, "beta_var": beta}
            for alpha, (low, high, beta) in ref.VAR_CORR[
                (scenario, rho_label)
            ].items()
        ]
    return _stringify(rows)


def _diff_rows(
    got: list[dict], expected: list[dict], table: str
) -> list[dict]:
    diffs = []
    for index, (grow, erow) in enumerate(zip(got, expected)):
        for key, expected_value in erow.items():
            if grow.get(key) != expected_value:
                diffs.append(
                    {
                        "table": table,
                        "row": index,
                        "column": key,
                        "got": grow.get(key),
                        "expected": expected_value,
                    }
                )
    if len(got) != len(expected):
        diffs.append(
            {
                "table": table,
                "row": min(len(got), len(expected)),
                "column": "<row count>",
                "got": str(len(got)),
                "expected": str(len(expected)),
            }
        )
    return diffs


def cmd_reproduce(out_dir: Path, cache_dir: Path | None = None) -> int:
    """Regenerate every reference table and the sweep datasets.

    Writes one CSV per table plus ``manifest.json`` into ``out_dir``;
    returns the number of mismatched cells (0 means the full set of
    reference values was reproduced).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"version": __version__, "tables": {}}
    total_diffs = 0

    def record(name: str, columns, raw_rows, expected) -> None:
        nonlocal total_diffs
        text = _render(raw_rows, columns, "csv")
        path = out_dir / f"{name}.csv"
        path.write_text(text, encoding="utf-8")
        diffs = (
            _diff_rows(_stringify(raw_rows), expected, name)
            if expected is not None
            else []
        )
        total_diffs += len(diffs)
        cells = sum(len(row) for row in raw_rows)
        manifest["tables"][name] = {
            "file": path.name,
            "sha256": hashlib.sha256(text.encode()).hexdigest(),
            "checked_cells": cells if expected is not None else 0,
            "mismatches": diffs,
        }
        status = "OK" if not diffs else f"{len(diffs)} MISMATCHES"
        click.echo(f"{name}: {status}")

    for scenario, p in ref.SCENARIOS.items():
        start = time.perf_counter()
        base = ScenarioConfig(
            d=ref.DEFAULT_D,
            p=p,
            rho=None,
            alphas=ref.DEFAULT_ALPHAS,
            cache=cache_dir,
        )
        spec = base.class_spec()
        record(
            f"moments_{scenario}",
            MOMENTS_COLUMNS,
            _moments_rows(spec),
            _expected_strings("moments", scenario, None),
        )
        mean_rows = _bounds_rows(base, _enumerate_cached(base))
        record(
            f"var_{scenario}",
            VAR_COLUMNS,
            [
                {k: row[k] for k in VAR_COLUMNS}
                for row in mean_rows
            ],
            _expected_strings("var", scenario, None),
        )
        record(
            f"es_{scenario}",
            ES_COLUMNS,
            [{k: row[k] for k in ES_COLUMNS} for row in mean_rows],
            _expected_strings("es", scenario, None),
        )
        for rho_label in ref.RHO_LABELS:
            point = ScenarioConfig(
                d=ref.DEFAULT_D,
                p=p,
                rho=parse_rho(rho_label),
                alphas=ref.DEFAULT_ALPHAS,
                cache=cache_dir,
            )
            corr_rows = [
                {k: row[k] for k in VAR_BETA_COLUMNS}
                for row in _bounds_rows(point, _enumerate_cached(point))
            ]
            name = f"var_{scenario}_rho_{rho_label.replace('/', '_')}"
            record(
                name,
                VAR_BETA_COLUMNS,
                corr_rows,
                _expected_strings("corr", scenario, rho_label),
            )
        sweep_rows = _sweep_rows(base)
        sweep_expected = []
        for row in sweep_rows:
            for rho_label in ref.RHO_LABELS:
                if row["rho"] == parse_rho(rho_label):
                    low, high, beta = ref.VAR_CORR[(scenario, rho_label)][
                        row["alpha"]
                    ]
                    sweep_expected.append(
                        {
                            "rho": row["rho"],
                            "alpha": row["alpha"],
                            "var_min": low,
                            "var_max": high,
                            "beta_var": beta,
                        }
                    )
        checked = [
            row
            for row in sweep_rows
            if any(
                row["rho"] == parse_rho(label) for label in ref.RHO_LABELS
            )
        ]
        record(
            f"sweep_{scenario}",
            SWEEP_COLUMNS,
            sweep_rows,
            None,
        )
        diffs = _diff_rows(
            _stringify(checked),
            _stringify(sweep_expected),
            f"sweep_{scenario}",
        )
        total_diffs += len(diffs)
        manifest["tables"][f"sweep_{scenario}"]["mismatches"] = diffs
        manifest["tables"][f"sweep_{scenario}"]["checked_cells"] = sum(
            len(row) for row in checked
        )
        elapsed = time.perf_counter() - start
        click.echo(f"scenario {scenario}: {elapsed:.1f} s", err=True)

    manifest["status"] = "pass" if total_diffs == 0 else "fail"
    manifest_text = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    (out_dir / "manifest.json").write_text(manifest_text, encoding="utf-8")
    click.echo(
        f"manifest: {manifest['status']} "
        f"({len(manifest['tables'])} tables, {total_diffs} mismatches)"
    )
    return total_diffs


# ---------------------------------------------------------------------------
# Click wiring.


def _class_options(fn):
    fn = click.option(
        "--cache",
        type=click.Path(file_okay=False, path_type=Path),
        default=None,
        help="Directory for the ray-set cache.",
    )(fn)
    fn = click.option(
        "--out",
        type=click.Path(file_okay=False, path_type=Path),
        default=None,
        help="Write output into this directory instead of stdout.",
    )(fn)
    fn = click.option(
        "--rho",
        "rho_text",
        default=None,
        help="Pairwise correlation target; accepts fractions like 1/6.",
    )(fn)
    fn = click.option(
        "--scenario",
        type=click.Choice(sorted(ref.SCENARIOS)),
        default=None,
        help="Named rating scenario fixing p at d=100 defaults.",
    )(fn)
    fn = click.option(
        "--p", "p", type=float, default=None,
        help="Marginal default probability.",
    )(fn)
    fn = click.option(
        "--d", "d", type=click.IntRange(min=1), default=ref.DEFAULT_D,
        show_default=True, help="Portfolio size.",
    )(fn)
    return fn


def _format_option(fn):
    return click.option(
        "--format",
        "fmt",
        type=click.Choice(("csv", "json")),
        default="csv",
        show_default=True,
        help="Output serialization.",
    )(fn)


def _alpha_option(fn):
    return click.option(
        "--alpha",
        "alpha_text",
        default="0.90,0.95,0.99",
        show_default=True,
        help="Comma-separated confidence levels.",
    )(fn)


def _resolve(
    d: int,
    p: float | None,
    scenario: str | None,
    rho_text: str | None,
    alpha_text: str = "0.90,0.95,0.99",
    fmt: str = "csv",
    out: Path | None = None,
    cache: Path | None = None,
    grid: int = 12,
) -> ScenarioConfig:
    if (p is None) == (scenario is None):
        raise click.UsageError("provide exactly one of --p or --scenario")
    config = ScenarioConfig(
        d=d,
        p=p if p is not None else ref.SCENARIOS[scenario],
        rho=parse_rho(rho_text) if rho_text is not None else None,
        alphas=_parse_alphas(alpha_text),
        fmt=fmt,
        out=out,
        cache=cache,
        grid=grid,
    )
    config.class_spec()
    return config


def _emit(config: ScenarioConfig, name: str, text: str) -> None:
    if config.out is not None:
        config.out.mkdir(parents=True, exist_ok=True)
        path = config.out / name
        path.write_text(text, encoding="utf-8")
        click.echo(str(path))
    else:
        click.echo(text, nl=False)


def _guarded(body):
    try:
        return body()
    except BernraysError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INFEASIBLE)


@click.group()
@click.version_option(__version__, prog_name="bernrays")
def main():
    """Extremal rays and sharp risk bounds for exchangeable defaults."""


@main.command("rays")
@_class_options
def rays_command(d, p, scenario, rho_text, out, cache):
    """Enumerate extremal rays and emit the sparse ray-set file."""

    def body():
        config = _resolve(d, p, scenario, rho_text, out=out, cache=cache)
        count, text = cmd_rays(config)
        if config.out is not None:
            config.out.mkdir(parents=True, exist_ok=True)
            path = config.out / f"rays_{config.slug()}.txt"
            path.write_text(text, encoding="utf-8")
            click.echo(f"{count} rays -> {path}")
        else:
            click.echo(f"{count} rays", err=True)
            click.echo(text, nl=False)

    _guarded(body)


@main.command("bounds")
@_class_options
@_alpha_option
@_format_option
def bounds_command(d, p, scenario, rho_text, alpha_text, fmt, out, cache):
    """Sharp VaR/ES bounds per confidence level."""

    def body():
        config = _resolve(
            d, p, scenario, rho_text, alpha_text, fmt, out=out, cache=cache
        )
        _emit(config, f"bounds_{config.slug()}.{config.fmt}",
              cmd_bounds(config))

    _guarded(body)


@main.command("moments")
@_class_options
@_format_option
def moments_command(d, p, scenario, rho_text, fmt, out, cache):
    """Sharp cross-moment and correlation bounds (orders 1-4)."""

    def body():
        config = _resolve(
            d, p, scenario, rho_text, fmt=fmt, out=out, cache=cache
        )
        _emit(config, f"moments_{config.slug()}.{config.fmt}",
              cmd_moments(config))

    _guarded(body)


@main.command("sweep")
@_class_options
@_alpha_option
@_format_option
@click.option(
    "--grid",
    type=click.IntRange(min=2),
    default=12,
    show_default=True,
    help="Number of equispaced correlation grid points in [0, 11/12].",
)
def sweep_command(d, p, scenario, rho_text, alpha_text, fmt, grid, out, cache):
    """Bounds across a correlation grid, long format for plotting."""
    if rho_text is not None:
        raise click.UsageError("sweep builds its own grid; drop --rho")

    def body():
        config = _resolve(
            d, p, scenario, None, alpha_text, fmt,
            out=out, cache=cache, grid=grid,
        )
        _emit(config, f"sweep_{config.slug()}.{config.fmt}",
              cmd_sweep(config))

    _guarded(body)


@main.command("reproduce")
@click.option(
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("reproduction"),
    show_default=True,
    help="Output directory for tables and manifest.",
)
@click.option(
    "--cache",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Directory for the ray-set cache.",
)
def reproduce_command(out, cache):
    """Regenerate all reference tables and verify every cell."""

    def body():
        mismatches = cmd_reproduce(out, cache)
        if mismatches:
            sys.exit(EXIT_MISMATCH)

    _guarded(body)


if __name__ == "__main__":
    main()
