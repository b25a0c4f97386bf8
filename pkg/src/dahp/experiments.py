"""Experiment pipelines behind the CLI commands.

Each command builds the population demand model from the configured
consumers and data, runs one study, and writes schema-stable CSV files plus
a ``manifest.json`` recording the config hash, package and library
versions, and wall time.  Float cells are formatted to four decimals;
rerunning a command with the same config and seed reproduces the CSV bytes
exactly (the manifest's wall time is the one intentionally volatile field).
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy

from . import __version__
from .config import (
    ExperimentConfig,
    SeriesSpec,
    batteries_from_spec,
    config_hash,
    draw_population,
    resolve_eta_grid,
    resolved_dict,
)
from .demand import HOURS_PER_DAY, aggregate, build_consumer_model
from .errors import ConfigError
from .pricing import WholesaleCost, benchmark_trace, optimal_price, pareto_front
from .renewable import RenewableModel, benefit_split
from .simulate import baseline_thermostat, simulate_day
from .storage import arbitrage, optimize_price_with_storage
from .timeseries import HourlySeries, load_series, mean_day, synthetic_weather, synthetic_wholesale

COMMANDS = ("pareto", "benchmarks", "renewable", "storage", "simulate")

_PRICE_COLUMNS = [f"price_{i:02d}" for i in range(1, HOURS_PER_DAY + 1)]


@dataclass
class RunSummary:
    out_dir: Path
    files: list[str]
    manifest: Path


def _load_days(spec: SeriesSpec, kind: str) -> list[HourlySeries]:
    if spec.source == "file":
        return load_series(spec.path, kind)
    if kind == "weather":
        return synthetic_weather(spec.days)
    return synthetic_wholesale(spec.days)


def _fmt(value: float) -> str:
    text = f"{value:.4f}"
    return "0.0000" if text == "-0.0000" else text


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else _fmt(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n")


@dataclass
class _Workspace:
    """Model and market data shared by the study commands."""

    model: object
    cost: WholesaleCost
    weather_days: list[HourlySeries]
    population: list


def _build_workspace(config: ExperimentConfig) -> _Workspace:
    weather_days = _load_days(config.weather, "weather")
    price_days = _load_days(config.wholesale, "price")
    weather = mean_day(weather_days)
    cost = WholesaleCost(mean=mean_day(price_days), samples=np.array([d.values for d in price_days]))
    population = draw_population(config.consumers, config.seed)
    model = aggregate([build_consumer_model(p, weather) for p in population])
    return _Workspace(model=model, cost=cost, weather_days=weather_days, population=population)


def run_pareto(config: ExperimentConfig, out_dir: Path) -> list[str]:
    ws = _build_workspace(config)
    grid = resolve_eta_grid(config.eta_grid)
    points = pareto_front(ws.model, ws.cost, grid)
    rows = [[p.eta, p.cs, p.rp, p.sw, *p.price] for p in points]
    _write_csv(out_dir / "tradeoff.csv", ["eta", "cs", "rp", "sw", *_PRICE_COLUMNS], rows)
    return ["tradeoff.csv"]


def _default_sweeps(ws: _Workspace, points: int) -> dict[str, np.ndarray]:
    """Sweep grids spanning the economically interesting range: from below
    the wholesale level up toward the zero-demand price."""
    lam = ws.cost.mean
    zero_demand = ws.model.solve(ws.model.intercept_mean)
    level_hi = float(np.mean(zero_demand))
    level_lo = 0.5 * float(lam.min())
    gamma_hi = max(2.0, level_hi / float(np.mean(lam)))
    return {
        "cp": np.linspace(level_lo, level_hi, points),
        "tou": np.linspace(level_lo, level_hi / 1.2, points),
        "pmp": np.linspace(0.5, gamma_hi, points),
    }


def run_benchmarks(config: ExperimentConfig, out_dir: Path) -> list[str]:
    ws = _build_workspace(config)
    spec = config.benchmarks
    files = []

    grid = np.linspace(0.0, 1.0, spec.points)
    points = pareto_front(ws.model, ws.cost, grid)
    _write_csv(out_dir / "benchmark_dahp.csv", ["param", "cs", "rp"], [[p.eta, p.cs, p.rp] for p in points])
    files.append("benchmark_dahp.csv")

    for scheme, sweep in _default_sweeps(ws, spec.points).items():
        trace = benchmark_trace(
            ws.model, ws.cost, scheme, sweep,
            tou_ratio=spec.tou_ratio, peak_start=spec.peak_start, peak_end=spec.peak_end,
        )
        name = f"benchmark_{scheme}.csv"
        _write_csv(out_dir / name, ["param", "cs", "rp"], [[p.eta, p.cs, p.rp] for p in trace])
        files.append(name)
    return files


def run_renewable(config: ExperimentConfig, out_dir: Path) -> list[str]:
    ws = _build_workspace(config)
    grid = resolve_eta_grid(config.eta_grid)
    rows = []
    for eta in grid:
        for capacity in config.renewable.capacity_grid:
            renew = RenewableModel(capacity=float(capacity), marginal_cost=config.renewable.marginal_cost)
            split = benefit_split(ws.model, ws.cost, renew, float(eta))
            rows.append([float(eta), float(capacity), split.delta_cs, split.delta_rp, split.fraction])
    _write_csv(out_dir / "renewable.csv", ["eta", "K", "delta_cs", "delta_rp", "fraction"], rows)
    return ["renewable.csv"]


def run_storage(config: ExperimentConfig, out_dir: Path) -> list[str]:
    ws = _build_workspace(config)
    batteries = batteries_from_spec(config.storage)
    rows = []
    for eta in resolve_eta_grid(config.storage.eta_grid, "storage.eta_grid"):
        result = optimize_price_with_storage(
            ws.model, ws.cost, batteries, float(eta), max_evals=config.storage.max_evals
        )
        volume = sum(float(arbitrage(result.price, b, ws.model.horizon).charge.sum()) for b in batteries)
        rows.append([result.point.eta, result.point.cs, result.point.rp, volume, *result.price])
    _write_csv(
        out_dir / "storage.csv",
        ["eta", "cs", "rp", "arbitrage_volume", *_PRICE_COLUMNS],
        rows,
    )
    return ["storage.csv"]


def run_simulate(config: ExperimentConfig, out_dir: Path) -> list[str]:
    """Per-day population simulation under that day's optimal tariff.

    Alongside the responsive-policy rows, each configured thermostat
    tolerance is replayed on the same per-(consumer, day) noise so the two
    policies are comparable seed-for-seed.
    """
    weather_days = _load_days(config.weather, "weather")
    price_days = _load_days(config.wholesale, "price")
    cost = WholesaleCost(mean=mean_day(price_days))
    population = draw_population(config.consumers, config.seed)
    eta = float(config.simulate.eta)
    tolerances = [float(t) for t in config.simulate.thermostat_tolerances]

    rows = []
    baseline_rows = []
    for day_index, day in enumerate(weather_days):
        models = [build_consumer_model(p, day.values) for p in population]
        prices = optimal_price(aggregate(models), cost, eta)
        for consumer_id, params in enumerate(population):
            result = simulate_day(
                params, prices, day.values, config.seed, consumer_id=consumer_id, day=day_index,
            )
            rows.append([
                str(consumer_id), str(day_index), result.payment, result.discomfort, result.surplus,
            ])
            for tolerance in tolerances:
                base = baseline_thermostat(
                    params, tolerance, prices, day.values, config.seed,
                    consumer_id=consumer_id, day=day_index,
                )
                baseline_rows.append([
                    tolerance, str(consumer_id), str(day_index),
                    base.payment, base.discomfort, base.surplus,
                ])
    _write_csv(out_dir / "simulate.csv", ["consumer_id", "day", "payment", "discomfort", "surplus"], rows)
    files = ["simulate.csv"]
    if baseline_rows:
        _write_csv(
            out_dir / "baseline.csv",
            ["tolerance", "consumer_id", "day", "payment", "discomfort", "surplus"],
            baseline_rows,
        )
        files.append("baseline.csv")
    return files


_RUNNERS = {
    "pareto": run_pareto,
    "benchmarks": run_benchmarks,
    "renewable": run_renewable,
    "storage": run_storage,
    "simulate": run_simulate,
}


def run_experiment(config: ExperimentConfig, command: str, out_dir: str | Path) -> RunSummary:
    """Run one CLI command and write its outputs plus the run manifest."""
    if command not in _RUNNERS:
        raise ConfigError(f"unknown command {command!r}; expected one of {COMMANDS}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    files = _RUNNERS[command](config, out)
    manifest = {
        "command": command,
        "seed": config.seed,
        "config_hash": config_hash(config),
        "config": resolved_dict(config),
        "package_version": __version__,
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "wall_time_s": round(time.perf_counter() - started, 3),
        "outputs": files,
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return RunSummary(out_dir=out, files=files, manifest=manifest_path)
