"""Affine demand-response models for thermostatically controlled loads.

A consumer runs an HVAC unit against hourly retail prices.  Indoor
temperature follows the linear thermal model

    x_i = x_{i-1} + alpha * (a_i - x_{i-1}) - beta * p_i + w_i

where ``a_i`` is the outdoor temperature, ``p_i`` the energy drawn in hour
``i``, ``w_i`` process noise, and observations of the indoor temperature
carry white noise.  The consumer trades discomfort ``mu * (x_i - t_i)^2``
against the energy bill, and the resulting expected best-response demand is
affine in the day-ahead price vector:

    E[demand](prices) = -gain @ prices + intercept_mean

``gain`` is symmetric tridiagonal and positive definite, so one Cholesky
factorization per model serves every downstream linear solve.

Conventions used throughout the package:

* the day starts at the first setpoint, ``x_0 = desired_temp[0]``;
* the outdoor forecast is known for the whole day and enters the model
  deterministically (observation noise on outdoor readings is ignored);
* the consumer's estimator is initialized from a noisy reading of the
  initial indoor temperature, so its starting variance equals
  ``obs_noise_var``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .optim import SpdFactorization, spd_factor, spd_solve

HOURS_PER_DAY = 24


class NegativeDemandWarning(UserWarning):
    """Mean demand went negative for at least one hour (price too high)."""


@dataclass(eq=False)
class ConsumerParams:
    """Physical and preference parameters of one consumer.

    alpha: thermal coupling to outdoor air per hour, in (0, 1).
    beta: temperature change per unit energy (positive = cooling).
    mu: discomfort weight in $ per squared degree.
    desired_temp: hourly setpoint vector; its length sets the horizon.
    process_noise_var / obs_noise_var: variances of the thermal and
        measurement noise (degrees squared).
    """

    alpha: float
    beta: float
    mu: float
    desired_temp: np.ndarray
    process_noise_var: float = 0.0
    obs_noise_var: float = 0.0

    def __post_init__(self):
        self.desired_temp = np.atleast_1d(np.asarray(self.desired_temp, dtype=float))
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie strictly in (0, 1), got {self.alpha}")
        if self.beta == 0.0 or not np.isfinite(self.beta):
            raise ValueError("beta must be nonzero and finite")
        if self.mu <= 0.0:
            raise ValueError("mu must be positive")
        if self.process_noise_var < 0.0 or self.obs_noise_var < 0.0:
            raise ValueError("noise variances must be nonnegative")
        if self.desired_temp.ndim != 1 or self.desired_temp.size < 1:
            raise ValueError("desired_temp must be a nonempty vector")
        if not np.all(np.isfinite(self.desired_temp)):
            raise ValueError("desired_temp must be finite")

    @property
    def horizon(self) -> int:
        return self.desired_temp.size


def as_prices(prices: Sequence[float], horizon: int) -> np.ndarray:
    """Validate a day-ahead price vector: right length, finite entries."""
    pi = np.atleast_1d(np.asarray(prices, dtype=float))
    if pi.shape != (horizon,):
        raise ValueError(f"expected {horizon} hourly prices, got shape {pi.shape}")
    if not np.all(np.isfinite(pi)):
        raise ValueError("prices must be finite")
    return pi


@dataclass(eq=False)
class ConsumerDemandModel:
    """Affine demand model of a single consumer."""

    gain: np.ndarray            # (N, N) price sensitivity, SPD tridiagonal
    intercept_mean: np.ndarray  # (N,) mean demand at zero price
    intercept_cov: np.ndarray   # (N, N) covariance of the demand intercept
    cs_constant: float          # noise-driven constant in expected surplus

    @property
    def horizon(self) -> int:
        return self.intercept_mean.size


@dataclass(eq=False)
class AffineDemandModel:
    """Population demand model: entrywise sum of consumer models."""

    gain: np.ndarray
    intercept_mean: np.ndarray
    intercept_cov: np.ndarray
    cs_constant: float

    @property
    def horizon(self) -> int:
        return self.intercept_mean.size

    @cached_property
    def _factorization(self) -> SpdFactorization:
        # Factored once per model; doubles as the positive-definiteness check.
        return spd_factor(self.gain)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve ``gain @ x = rhs`` against the cached factorization."""
        return spd_solve(self._factorization, rhs)


def _estimator_variance_ladder(params: ConsumerParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Prediction variances, Kalman gains, and posterior variances, hour by hour.

    Index ``i`` of the returned arrays refers to hour ``i+1``; the posterior
    ladder starts at ``obs_noise_var`` (estimator seeded from one noisy
    reading of the known initial temperature).
    """
    n = params.horizon
    decay = (1.0 - params.alpha) ** 2
    pred = np.empty(n)
    gains = np.empty(n)
    post = np.empty(n + 1)
    post[0] = params.obs_noise_var
    for i in range(n):
        pred[i] = decay * post[i] + params.process_noise_var
        denom = pred[i] + params.obs_noise_var
        gains[i] = pred[i] / denom if denom > 0.0 else 0.0
        post[i + 1] = (1.0 - gains[i]) * pred[i]
    return pred, gains, post


def build_consumer_model(params: ConsumerParams, weather_forecast: Sequence[float]) -> ConsumerDemandModel:
    """Build the affine demand model implied by one consumer's parameters
    and the day's outdoor forecast.

    The gain matrix is the closed-form tridiagonal price sensitivity; the
    intercept mean is the demand at zero price (exact setpoint tracking);
    the intercept covariance and surplus constant come from the estimator's
    variance ladder, so they are exact for the linear-Gaussian model rather
    than sampled.
    """
    n = params.horizon
    forecast = np.asarray(weather_forecast, dtype=float)
    if forecast.shape != (n,):
        raise ValueError(f"weather forecast must have {n} hours, got shape {forecast.shape}")
    if not np.all(np.isfinite(forecast)):
        raise ValueError("weather forecast must be finite")

    alpha, beta, mu = params.alpha, params.beta, params.mu
    t = params.desired_temp
    unit = 1.0 / (2.0 * mu * beta * beta)

    gain = np.zeros((n, n))
    gain[0, 0] = unit
    for i in range(1, n):
        gain[i, i] = (1.0 + (1.0 - alpha) ** 2) * unit
        gain[i, i - 1] = gain[i - 1, i] = (alpha - 1.0) * unit

    x0 = t[0]  # day starts on the first setpoint
    intercept = np.empty(n)
    intercept[0] = ((1.0 - alpha) * x0 + alpha * forecast[0] - t[0]) / beta
    for i in range(1, n):
        intercept[i] = ((1.0 - alpha) * t[i - 1] + alpha * forecast[i] - t[i]) / beta

    pred, gains, post = _estimator_variance_ladder(params)
    cs_constant = -mu * float(pred.sum())

    # Demand deviations are (1-alpha)/beta times the estimator's deviation
    # from its target one hour earlier.  Those deviations are uncorrelated
    # across hours except against the initial reading, whose error is
    # anti-correlated with the estimate itself.
    scale = ((1.0 - alpha) / beta) ** 2
    xi_var = np.empty(n)  # deviation variance of the estimate entering hour i+1
    xi_var[0] = params.obs_noise_var
    for m in range(1, n):
        xi_var[m] = gains[m - 1] ** 2 * (pred[m - 1] + params.obs_noise_var)
    cov = np.diag(scale * xi_var)
    gamma = -params.obs_noise_var  # Cov(initial deviation, filter error)
    for m in range(1, n):
        cov[0, m] = cov[m, 0] = scale * gains[m - 1] * (1.0 - alpha) * gamma
        gamma *= (1.0 - gains[m - 1]) * (1.0 - alpha)

    return ConsumerDemandModel(
        gain=gain, intercept_mean=intercept, intercept_cov=cov, cs_constant=cs_constant
    )


def aggregate(models: Sequence[ConsumerDemandModel]) -> AffineDemandModel:
    """Sum consumer models into the population model the retailer prices
    against.  Validates shape agreement and positive definiteness."""
    if len(models) == 0:
        raise ValueError("cannot aggregate an empty population")
    n = models[0].horizon
    for m in models:
        if m.horizon != n or m.gain.shape != (n, n):
            raise ValueError("all consumer models must share one horizon")
    model = AffineDemandModel(
        gain=sum(m.gain for m in models),
        intercept_mean=sum(m.intercept_mean for m in models),
        intercept_cov=sum(m.intercept_cov for m in models),
        cs_constant=float(sum(m.cs_constant for m in models)),
    )
    model._factorization  # noqa: B018 -- eager PD check via Cholesky
    return model


def mean_demand(model: AffineDemandModel | ConsumerDemandModel, prices: Sequence[float]) -> np.ndarray:
    """Expected hourly demand ``-gain @ prices + intercept_mean``.

    Negative entries are legal (prices above the zero-demand level) but
    usually indicate a mis-scaled tariff, so they raise
    ``NegativeDemandWarning`` rather than an error.
    """
    pi = as_prices(prices, model.horizon)
    demand = model.intercept_mean - model.gain @ pi
    if np.any(demand < 0.0):
        warnings.warn(
            "mean demand is negative in at least one hour", NegativeDemandWarning, stacklevel=2
        )
    return demand
