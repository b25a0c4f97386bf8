"""Monte Carlo simulation of consumers responding to day-ahead prices.

The simulator rolls the thermal model forward with process and observation
noise while the consumer runs a scalar Kalman filter and applies the
certainty-equivalent hourly policy: drive the predicted indoor temperature
to a price-shifted setpoint.  Realized payment, discomfort, and surplus are
reported per day; their sample means validate the closed-form model in
``dahp.demand``.

Randomness comes from counter-based Philox substreams keyed by
``(seed, consumer_id, day)``, so population runs are reproducible and
independent of iteration order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .demand import ConsumerParams, as_prices


@dataclass
class ThermalState:
    """True (unobserved) state of one house at the end of an hour."""

    indoor_temp: float
    outdoor_temp: float
    hour: int  # 1-based hour just completed; 0 before the day starts


@dataclass
class EstimatorState:
    """Consumer's belief: posterior indoor estimate and next-hour forecast."""

    indoor_est: float
    indoor_var: float
    outdoor_pred: float


@dataclass(eq=False)
class DayResult:
    """Realized outcome of one simulated day.

    ``surplus`` is computed as ``-(discomfort + payment)`` so the accounting
    identity holds exactly, not merely to rounding.
    """

    consumption: np.ndarray
    payment: float
    discomfort: float
    surplus: float


def substream(seed: int, *key: int) -> np.random.Generator:
    """Deterministic Philox generator for a (seed, *key) coordinate."""
    if seed < 0 or any(k < 0 for k in key):
        raise ValueError("seed and substream keys must be nonnegative integers")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((int(seed), *map(int, key)))))


def optimal_policy_step(
    est: EstimatorState, prices: np.ndarray, hour: int, params: ConsumerParams
) -> float:
    """Energy to draw in ``hour`` (1-based): move the predicted indoor
    temperature onto the price-shifted target.

    The target sits ``(pi_i - (1 - alpha) * pi_{i+1}) / (2 mu beta)`` away
    from the setpoint, with the price beyond the horizon taken as zero.
    """
    n = params.horizon
    if not 1 <= hour <= n:
        raise ValueError(f"hour must be in 1..{n}, got {hour}")
    pi_next = prices[hour] if hour < n else 0.0
    target = (prices[hour - 1] - (1.0 - params.alpha) * pi_next) / (
        2.0 * params.mu * params.beta
    ) + params.desired_temp[hour - 1]
    drift = (1.0 - params.alpha) * est.indoor_est + params.alpha * est.outdoor_pred
    return (drift - target) / params.beta


def kalman_step(
    est: EstimatorState,
    obs: tuple[float, float],
    params: ConsumerParams,
    applied_power: float,
    next_outdoor_forecast: float | None = None,
) -> EstimatorState:
    """One predict/update cycle of the scalar indoor-temperature filter.

    ``obs`` is the (indoor, outdoor) reading taken after ``applied_power``
    acted for the hour.  The outdoor reading is not filtered: the day-ahead
    forecast is treated as known, so the returned state simply carries
    ``next_outdoor_forecast`` (or keeps the current one).
    """
    alpha, beta = params.alpha, params.beta
    pred_mean = (1.0 - alpha) * est.indoor_est + alpha * est.outdoor_pred - beta * applied_power
    pred_var = (1.0 - alpha) ** 2 * est.indoor_var + params.process_noise_var
    denom = pred_var + params.obs_noise_var
    gain = pred_var / denom if denom > 0.0 else 0.0
    indoor_est = pred_mean + gain * (obs[0] - pred_mean)
    indoor_var = (1.0 - gain) * pred_var
    outdoor = est.outdoor_pred if next_outdoor_forecast is None else float(next_outdoor_forecast)
    return EstimatorState(indoor_est=indoor_est, indoor_var=indoor_var, outdoor_pred=outdoor)


def _draw_day_noise(
    gen: np.random.Generator, n_days: int, params: ConsumerParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Canonical noise layout shared by every rollout flavor.

    Order matters for reproducibility: initial reading noise first, then the
    process-noise matrix, then the observation-noise matrix.
    """
    n = params.horizon
    sv = float(np.sqrt(params.obs_noise_var))
    sw = float(np.sqrt(params.process_noise_var))
    v0 = gen.normal(0.0, sv, size=n_days) if sv > 0 else np.zeros(n_days)
    w = gen.normal(0.0, sw, size=(n_days, n)) if sw > 0 else np.zeros((n_days, n))
    v = gen.normal(0.0, sv, size=(n_days, n)) if sv > 0 else np.zeros((n_days, n))
    return v0, w, v


def _respond_rollout(
    params: ConsumerParams,
    prices: np.ndarray,
    forecast: np.ndarray,
    v0: np.ndarray,
    w: np.ndarray,
    v: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized rollout of the filtering consumer over stacked days.

    Returns (consumption, payment, discomfort) with days on the leading axis.
    """
    alpha, beta, mu = params.alpha, params.beta, params.mu
    t = params.desired_temp
    n = params.horizon
    n_days = v0.shape[0]

    x = np.full(n_days, t[0])          # true indoor temperature
    est = t[0] + v0                    # posterior mean, seeded by one reading
    var = params.obs_noise_var
    consumption = np.empty((n_days, n))
    discomfort = np.zeros(n_days)
    for i in range(1, n + 1):
        pi_next = prices[i] if i < n else 0.0
        target = (prices[i - 1] - (1.0 - alpha) * pi_next) / (2.0 * mu * beta) + t[i - 1]
        power = ((1.0 - alpha) * est + alpha * forecast[i - 1] - target) / beta
        consumption[:, i - 1] = power

        x = x + alpha * (forecast[i - 1] - x) - beta * power + w[:, i - 1]
        discomfort += mu * (x - t[i - 1]) ** 2

        pred_mean = (1.0 - alpha) * est + alpha * forecast[i - 1] - beta * power
        pred_var = (1.0 - alpha) ** 2 * var + params.process_noise_var
        denom = pred_var + params.obs_noise_var
        gain = pred_var / denom if denom > 0.0 else 0.0
        est = pred_mean + gain * (x + v[:, i - 1] - pred_mean)
        var = (1.0 - gain) * pred_var

    payment = consumption @ prices
    return consumption, payment, discomfort


def simulate_day(
    params: ConsumerParams,
    prices: Sequence[float],
    weather: Sequence[float],
    seed: int,
    consumer_id: int = 0,
    day: int = 0,
) -> DayResult:
    """Simulate one consumer-day under the optimal hourly policy."""
    pi = as_prices(prices, params.horizon)
    forecast = np.asarray(weather, dtype=float)
    if forecast.shape != (params.horizon,):
        raise ValueError("weather must match the horizon")
    gen = substream(seed, consumer_id, day)
    v0, w, v = _draw_day_noise(gen, 1, params)
    consumption, payment, discomfort = _respond_rollout(params, pi, forecast, v0, w, v)
    pay, disc = float(payment[0]), float(discomfort[0])
    return DayResult(
        consumption=consumption[0], payment=pay, discomfort=disc, surplus=-(disc + pay)
    )


def simulate_days(
    params: ConsumerParams,
    prices: Sequence[float],
    weather: Sequence[float],
    seed: int,
    n_days: int,
    consumer_id: int = 0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized replicate days for Monte Carlo estimation.

    Returns (consumption, payment, discomfort) stacked over days; surplus is
    ``-(discomfort + payment)`` rowwise when needed.
    """
    pi = as_prices(prices, params.horizon)
    forecast = np.asarray(weather, dtype=float)
    gen = substream(seed, consumer_id)
    v0, w, v = _draw_day_noise(gen, n_days, params)
    return _respond_rollout(params, pi, forecast, v0, w, v)


def _baseline_powers(
    params: ConsumerParams, forecast: np.ndarray, tolerance: float
) -> np.ndarray:
    """Open-loop powers holding the noise-free trajectory at the tolerance
    band edge (above the setpoint when the unit cools, below when it heats)."""
    alpha, beta = params.alpha, params.beta
    offset = tolerance if beta > 0 else -tolerance
    band = params.desired_temp + offset
    n = params.horizon
    powers = np.empty(n)
    x_bar = params.desired_temp[0]
    for i in range(n):
        powers[i] = ((1.0 - alpha) * x_bar + alpha * forecast[i] - band[i]) / beta
        x_bar = band[i]
    return powers


def baseline_thermostat(
    params: ConsumerParams,
    tolerance: float,
    prices: Sequence[float],
    weather: Sequence[float],
    seed: int,
    consumer_id: int = 0,
    day: int = 0,
) -> DayResult:
    """Non-responsive benchmark: compute powers from the expected dynamics
    for a fixed comfort tolerance, then experience the noisy evolution.

    Draws the same noise layout as ``simulate_day``, so results with the
    same ``(seed, consumer_id, day)`` are driven by identical disturbances.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be nonnegative")
    pi = as_prices(prices, params.horizon)
    forecast = np.asarray(weather, dtype=float)
    if forecast.shape != (params.horizon,):
        raise ValueError("weather must match the horizon")
    gen = substream(seed, consumer_id, day)
    _, w, _ = _draw_day_noise(gen, 1, params)
    powers = _baseline_powers(params, forecast, tolerance)

    x = params.desired_temp[0]
    discomfort = 0.0
    for i in range(params.horizon):
        x = x + params.alpha * (forecast[i] - x) - params.beta * powers[i] + w[0, i]
        discomfort += params.mu * (x - params.desired_temp[i]) ** 2
    payment = float(powers @ pi)
    return DayResult(
        consumption=powers, payment=payment, discomfort=float(discomfort),
        surplus=-(float(discomfort) + payment),
    )


def baseline_days(
    params: ConsumerParams,
    tolerance: float,
    prices: Sequence[float],
    weather: Sequence[float],
    seed: int,
    n_days: int,
    consumer_id: int = 0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Replicate-day version of ``baseline_thermostat`` (shared noise layout
    with ``simulate_days``, so the two are comparable seed-for-seed)."""
    pi = as_prices(prices, params.horizon)
    forecast = np.asarray(weather, dtype=float)
    gen = substream(seed, consumer_id)
    _, w, _ = _draw_day_noise(gen, n_days, params)
    powers = _baseline_powers(params, forecast, tolerance)

    x = np.full(n_days, params.desired_temp[0])
    discomfort = np.zeros(n_days)
    for i in range(params.horizon):
        x = x + params.alpha * (forecast[i] - x) - params.beta * powers[i] + w[:, i]
        discomfort += params.mu * (x - params.desired_temp[i]) ** 2
    consumption = np.tile(powers, (n_days, 1))
    payment = np.full(n_days, float(powers @ pi))
    return consumption, payment, discomfort
