"""Shared factories for randomized test instances."""
from __future__ import annotations

import numpy as np

from dahp import (
    AffineDemandModel,
    BatteryParams,
    ConsumerParams,
    WholesaleCost,
    aggregate,
    build_consumer_model,
)
from dahp.timeseries import synthetic_weather, synthetic_wholesale

DEFAULT_WEATHER = synthetic_weather(1)[0].values
DEFAULT_WHOLESALE = synthetic_wholesale(1)[0].values


def random_params(rng: np.random.Generator, horizon: int = 24, noisy: bool = True) -> ConsumerParams:
    return ConsumerParams(
        alpha=rng.uniform(0.2, 0.8),
        beta=rng.uniform(0.05, 0.3),
        mu=rng.uniform(0.2, 2.0),
        desired_temp=rng.uniform(16.0, 24.0) + rng.uniform(-0.5, 0.5, size=horizon),
        process_noise_var=rng.uniform(0.001, 0.05) if noisy else 0.0,
        obs_noise_var=rng.uniform(0.001, 0.05) if noisy else 0.0,
    )


def random_model(
    rng: np.random.Generator, horizon: int = 24, n_consumers: int = 3
) -> tuple[AffineDemandModel, WholesaleCost]:
    weather = DEFAULT_WEATHER[:horizon] if horizon <= 24 else np.resize(DEFAULT_WEATHER, horizon)
    consumers = [
        build_consumer_model(random_params(rng, horizon), weather) for _ in range(n_consumers)
    ]
    model = aggregate(consumers)
    cost = WholesaleCost(mean=np.resize(DEFAULT_WHOLESALE, horizon) * rng.uniform(0.8, 1.2))
    return model, cost


def random_battery(rng: np.random.Generator, lossy: bool = True) -> BatteryParams:
    capacity = rng.uniform(1.0, 10.0)
    return BatteryParams(
        capacity=capacity,
        initial_soc=rng.uniform(0.0, capacity),
        storage_eff=rng.uniform(0.9, 0.999) if lossy else 1.0,
        charge_eff=rng.uniform(0.85, 0.99) if lossy else 1.0,
        discharge_eff=rng.uniform(0.85, 0.99) if lossy else 1.0,
        charge_limit=rng.uniform(0.5, 3.0),
        discharge_limit=rng.uniform(0.5, 3.0),
    )


def one_hour_model(gain: float, intercept: float, cs_constant: float = 0.0) -> AffineDemandModel:
    """Single-hour affine model with hand-set coefficients."""
    return AffineDemandModel(
        gain=np.array([[gain]]),
        intercept_mean=np.array([intercept]),
        intercept_cov=np.zeros((1, 1)),
        cs_constant=cs_constant,
    )


def toy3_params() -> ConsumerParams:
    """The three-hour worked example used across the suite."""
    return ConsumerParams(
        alpha=0.5, beta=0.1, mu=0.5, desired_temp=np.full(3, 20.0),
        process_noise_var=0.0, obs_noise_var=0.0,
    )


def toy3_model() -> AffineDemandModel:
    """Three-hour model with the hand-checked gain matrix and a round
    intercept: weather chosen so the zero-price demand is 60 each hour."""
    params = toy3_params()
    # intercept_i = ((1-a) t + a w_i - t)/beta = 60  =>  w_i = t + 60*beta/a
    weather = np.full(3, 20.0 + 60.0 * 0.1 / 0.5)
    consumer = build_consumer_model(params, weather)
    return aggregate([consumer])
