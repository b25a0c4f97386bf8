"""Pricing with an owned renewable resource.

Each hour the retailer first serves demand from a renewable source whose
available output is uniform on ``[0, capacity]``; only the shortfall is
bought at the wholesale price.  Expected profit therefore replaces the
wholesale cost of the full demand with the renewable's marginal cost plus
the expected shortfall cost, where for uniform availability

    E[(d - q)+] = d^2 / (2 K)   for 0 <= d <= K,
                  d - K / 2     for d > K,
                  0             otherwise.

The profit-optimal tariff solves a first-order condition that couples hours
through the demand gain matrix; it is found by a damped fixed point on the
optimal mean demand and one SPD solve back to prices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .demand import AffineDemandModel, as_prices
from .errors import NonConvergenceError
from .optim import fixed_point
from .pricing import WholesaleCost, expected_cs, expected_rp, optimal_price, _check_eta


@dataclass(eq=False)
class RenewableModel:
    """Owned renewable resource: hourly output uniform on [0, capacity].

    ``marginal_cost`` is the per-kWh operating cost; scalar values broadcast
    across hours.
    """

    capacity: float
    marginal_cost: np.ndarray | float = 0.0

    def __post_init__(self):
        self.capacity = float(self.capacity)
        if self.capacity < 0.0 or not np.isfinite(self.capacity):
            raise ValueError("capacity must be finite and nonnegative")
        self.marginal_cost = np.atleast_1d(np.asarray(self.marginal_cost, dtype=float))
        if np.any(self.marginal_cost < 0.0) or not np.all(np.isfinite(self.marginal_cost)):
            raise ValueError("marginal cost must be finite and nonnegative")

    def cost_vector(self, horizon: int) -> np.ndarray:
        if self.marginal_cost.size == 1:
            return np.full(horizon, float(self.marginal_cost[0]))
        if self.marginal_cost.shape != (horizon,):
            raise ValueError("marginal cost must be scalar or match the horizon")
        return self.marginal_cost


@dataclass(eq=False)
class BenefitSplit:
    """Change in expected surplus and profit from adding the renewable."""

    delta_cs: float
    delta_rp: float
    fraction: float  # consumer share delta_cs / (delta_cs + delta_rp)


def uniform_shortfall_expectation(demand: np.ndarray, capacity: float) -> np.ndarray:
    """Hourly ``E[(demand - q)+]`` for output ``q`` uniform on [0, capacity].

    Quadratic in the demand while it sits inside [0, capacity], linear with
    offset ``capacity / 2`` beyond it, zero when demand is nonpositive.
    """
    d = np.asarray(demand, dtype=float)
    if capacity == 0.0:
        return np.maximum(d, 0.0)
    inside = np.clip(d, 0.0, capacity)
    return inside * inside / (2.0 * capacity) + np.maximum(d - capacity, 0.0)


def _check_renewable(model: AffineDemandModel, cost: WholesaleCost, renew: RenewableModel) -> np.ndarray:
    nu = renew.cost_vector(model.horizon)
    if cost.horizon != model.horizon:
        raise ValueError("wholesale cost horizon does not match the model")
    if np.any(cost.mean - nu <= 0.0):
        raise ValueError("renewable marginal cost must stay below the wholesale price")
    return nu


def expected_rp_renewable(
    model: AffineDemandModel,
    prices: Sequence[float],
    cost: WholesaleCost,
    renew: RenewableModel,
) -> float:
    """Expected retail profit when the renewable serves demand first.

    Zero capacity degenerates to the no-renewable profit.
    """
    if renew.capacity == 0.0:
        return expected_rp(model, prices, cost)
    pi = as_prices(prices, model.horizon)
    nu = _check_renewable(model, cost, renew)
    demand = model.intercept_mean - model.gain @ pi
    shortfall = uniform_shortfall_expectation(demand, renew.capacity)
    return float(pi @ demand - nu @ demand - (cost.mean - nu) @ shortfall)


def optimal_price_renewable(
    model: AffineDemandModel, cost: WholesaleCost, renew: RenewableModel, eta: float
) -> np.ndarray:
    """Tariff maximizing renewable-aware profit plus ``eta`` times surplus.

    The first-order condition, written in terms of the induced mean demand
    ``d``, is a fixed point of

        d = (b - G nu - G ((lambda - nu) * F(d))) / (2 - eta)

    with ``F`` the uniform availability cdf clipped to [0, 1].  It is solved
    by damped iteration from the no-renewable optimal demand; when capacity
    does not exceed the lowest optimal demand the iteration fixes
    immediately and the tariff equals the no-renewable one.

    The map's slope scales with ``gain * wholesale / capacity``, so a stiff
    demand model against a small plant can defeat the default damping of
    0.5; on non-convergence the damping is halved (with proportionally more
    iterations) and the solve restarted.  The fixed point itself is unique,
    so the damping schedule never changes the answer, only whether it is
    reached.
    """
    _check_eta(eta)
    if renew.capacity == 0.0:
        return optimal_price(model, cost, eta)
    nu = _check_renewable(model, cost, renew)
    margin = cost.mean - nu
    base = model.intercept_mean - model.gain @ nu
    start = (model.intercept_mean - model.gain @ cost.mean) / (2.0 - eta)

    def foc_map(d: np.ndarray) -> np.ndarray:
        availability = np.clip(d / renew.capacity, 0.0, 1.0)
        return (base - model.gain @ (margin * availability)) / (2.0 - eta)

    damping = 0.5
    for attempt in range(8):
        try:
            demand = fixed_point(
                foc_map, start, damping=damping, tol=5e-11,
                max_iter=max(10_000, int(40.0 / damping)),
            )
            break
        except NonConvergenceError:
            if attempt == 7:
                raise
            damping *= 0.5
    return model.solve(model.intercept_mean - demand)


def benefit_split(
    model: AffineDemandModel, cost: WholesaleCost, renew: RenewableModel, eta: float
) -> BenefitSplit:
    """How the gains from the renewable divide between consumers and the
    retailer at a fixed pricing weight.

    For capacities below the lowest optimal demand the tariff cannot move,
    so the consumer share is zero; as capacity grows the consumer share
    approaches ``1 / (3 - 2 eta)``.
    """
    pi_without = optimal_price(model, cost, eta)
    pi_with = optimal_price_renewable(model, cost, renew, eta)
    delta_cs = expected_cs(model, pi_with) - expected_cs(model, pi_without)
    delta_rp = expected_rp_renewable(model, pi_with, cost, renew) - expected_rp(model, pi_without, cost)
    total = delta_cs + delta_rp
    fraction = delta_cs / total if total > 0.0 else 0.0
    return BenefitSplit(delta_cs=float(delta_cs), delta_rp=float(delta_rp), fraction=float(fraction))
