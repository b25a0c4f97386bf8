"""Consumer-side battery arbitrage and storage-aware retail pricing.

Under net metering the consumer's HVAC problem and battery problem decouple:
the battery simply buys low and sells high against the day-ahead tariff,
independent of the thermal load.  The arbitrage plan solves a small LP

    maximize  -prices @ (charge - discharge)
    s.t.      soc_{i} = storage_eff * (soc_{i-1} + charge_eff * charge_i
                                        - discharge_i / discharge_eff)
              0 <= soc <= capacity,  terminal soc = initial soc,
              rate limits on charge and discharge,

solved by the package's dense simplex.  The retailer, in turn, prices
against the sum of thermal demand and the batteries' net schedule; that
objective is piecewise smooth in the tariff (plans switch at indifference
prices), so the price search is a derivative-free multi-start pattern
search seeded at the storage-free optimum.  The search result is best
effort: no local move of the final step size improves it, which is not a
global optimality claim.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .demand import AffineDemandModel, ConsumerDemandModel, as_prices
from .errors import InfeasibleConstraintError
from .optim import TOLERANCES, LpProblem, pattern_search, simplex_solve
from .pricing import TradeoffPoint, WholesaleCost, expected_cs, expected_rp, optimal_price


@dataclass(frozen=True)
class BatteryParams:
    """Battery parameters; efficiencies are per-hour multiplicative losses."""

    capacity: float           # usable energy, kWh
    initial_soc: float        # state of charge at the day boundary, kWh
    storage_eff: float = 1.0  # fraction retained per hour (kappa)
    charge_eff: float = 1.0   # energy stored per unit charged
    discharge_eff: float = 1.0  # energy delivered per unit drawn from store
    charge_limit: float = np.inf
    discharge_limit: float = np.inf

    def __post_init__(self):
        if self.capacity < 0:
            raise ValueError("capacity must be nonnegative")
        if not 0.0 <= self.initial_soc <= self.capacity:
            raise ValueError("initial soc must lie in [0, capacity]")
        for name in ("storage_eff", "charge_eff", "discharge_eff"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1]")
        if self.charge_limit < 0 or self.discharge_limit < 0:
            raise ValueError("rate limits must be nonnegative")


@dataclass(eq=False)
class ArbitragePlan:
    """Optimal day-ahead battery schedule against a fixed tariff."""

    charge: np.ndarray     # energy bought into the battery per hour
    discharge: np.ndarray  # energy sold back per hour
    soc: np.ndarray        # state of charge after each hour
    profit: float          # -prices @ (charge - discharge), >= 0 when idle is feasible

    @property
    def net_load(self) -> np.ndarray:
        return self.charge - self.discharge


def _idle_plan_feasible(battery: BatteryParams, horizon: int) -> bool:
    """Doing nothing is feasible only when decay cannot strand the terminal
    constraint: lossless storage or an empty battery."""
    drift = abs(battery.storage_eff ** horizon * battery.initial_soc - battery.initial_soc)
    return drift <= TOLERANCES["plan_feasibility"]


def _idle_plan(battery: BatteryParams, horizon: int) -> ArbitragePlan:
    soc = battery.initial_soc * battery.storage_eff ** np.arange(1, horizon + 1)
    zeros = np.zeros(horizon)
    return ArbitragePlan(charge=zeros, discharge=zeros.copy(), soc=soc, profit=0.0)


def arbitrage(prices: Sequence[float], battery: BatteryParams, horizon: int | None = None) -> ArbitragePlan:
    """Solve the battery's price-arbitrage LP for one day.

    Raises ``InfeasibleConstraintError`` when the terminal state of charge
    is unreachable (possible for a leaky battery starting charged, since
    idling then decays below the required terminal level).  Ties at zero
    profit resolve to the idle plan whenever idling is feasible.
    """
    n = len(prices) if horizon is None else horizon
    pi = as_prices(prices, n)
    kappa, tau = battery.storage_eff, battery.charge_eff
    rho = battery.discharge_eff

    # Variables: charge (n), discharge (n), soc (n).
    n_var = 3 * n
    objective = np.concatenate([-pi, pi, np.zeros(n)])
    rows = np.zeros((n + 1, n_var))
    rhs = np.zeros(n + 1)
    for i in range(n):
        rows[i, 2 * n + i] = 1.0
        rows[i, i] = -kappa * tau
        rows[i, n + i] = kappa / rho
        if i == 0:
            rhs[i] = kappa * battery.initial_soc
        else:
            rows[i, 2 * n + i - 1] = -kappa
    rows[n, 3 * n - 1] = 1.0  # terminal soc pinned to the initial one
    rhs[n] = battery.initial_soc

    lower = np.zeros(n_var)
    upper = np.concatenate([
        np.full(n, battery.charge_limit),
        np.full(n, battery.discharge_limit),
        np.full(n, battery.capacity),
    ])
    result = simplex_solve(LpProblem(objective, rows, rhs, lower, upper))
    if result.status != "optimal":
        raise InfeasibleConstraintError(
            f"battery arbitrage LP is {result.status}: the terminal state of "
            "charge cannot be met with these losses and rate limits"
        )
    if abs(result.objective) <= 1e-12 * max(1.0, float(np.abs(pi).max())) and _idle_plan_feasible(battery, n):
        return _idle_plan(battery, n)

    plan = ArbitragePlan(
        charge=result.x[:n],
        discharge=result.x[n:2 * n],
        soc=result.x[2 * n:],
        profit=float(result.objective),
    )
    _validate_plan(plan, battery, pi)
    return plan


def _validate_plan(plan: ArbitragePlan, battery: BatteryParams, pi: np.ndarray) -> None:
    tol = TOLERANCES["plan_feasibility"]
    n = pi.size
    prev = battery.initial_soc
    for i in range(n):
        expected = battery.storage_eff * (
            prev + battery.charge_eff * plan.charge[i] - plan.discharge[i] / battery.discharge_eff
        )
        if abs(plan.soc[i] - expected) > tol:
            raise InfeasibleConstraintError("arbitrage plan violates the storage balance")
        prev = plan.soc[i]
    if abs(plan.soc[-1] - battery.initial_soc) > tol:
        raise InfeasibleConstraintError("arbitrage plan misses the terminal state of charge")
    if np.any(plan.soc < -tol) or np.any(plan.soc > battery.capacity + tol):
        raise InfeasibleConstraintError("arbitrage plan violates capacity bounds")


def consumer_surplus_with_storage(
    model: ConsumerDemandModel | AffineDemandModel,
    prices: Sequence[float],
    battery: BatteryParams,
) -> float:
    """Expected surplus of a consumer who owns a battery.

    Net metering separates the decision problems, so the total is the
    thermal surplus plus the battery's arbitrage profit.
    """
    return expected_cs(model, prices) + arbitrage(prices, battery, model.horizon).profit


def population_net_load(prices: Sequence[float], batteries: Sequence[BatteryParams], horizon: int) -> np.ndarray:
    """Summed optimal net battery load of a population at one tariff.

    Identical battery specs share a single LP solve.
    """
    total = np.zeros(horizon)
    counts: dict[BatteryParams, int] = {}
    for battery in batteries:
        counts[battery] = counts.get(battery, 0) + 1
    for battery, count in counts.items():
        total += count * arbitrage(prices, battery, horizon).net_load
    return total


def retailer_objective_with_storage(
    model: AffineDemandModel,
    cost: WholesaleCost,
    batteries: Sequence[BatteryParams],
    prices: Sequence[float],
    eta: float,
) -> float:
    """Weighted retail objective when consumers operate batteries.

    The batteries add ``(prices - wholesale) @ net_load`` to profit and
    subtract their energy bill ``prices @ net_load`` from consumer surplus.
    """
    pi = as_prices(prices, model.horizon)
    net = population_net_load(pi, batteries, model.horizon)
    rp = expected_rp(model, pi, cost) + float((pi - cost.mean) @ net)
    cs = expected_cs(model, pi) - float(pi @ net)
    return rp + eta * cs


@dataclass(eq=False)
class StoragePricingResult:
    """Outcome of the storage-aware price search."""

    price: np.ndarray
    point: TradeoffPoint   # cs/rp include the batteries' contribution
    objective: float
    n_starts: int
    n_evals: int
    improved: bool         # beat the storage-free seed tariff
    truncated: bool        # at least one start hit the evaluation budget
    trace: list


def optimize_price_with_storage(
    model: AffineDemandModel,
    cost: WholesaleCost,
    batteries: Sequence[BatteryParams],
    eta: float,
    step0: float | None = None,
    step_min: float = 1e-4,
    max_evals: int = 4000,
) -> StoragePricingResult:
    """Search for the tariff maximizing the storage-aware objective.

    Deterministic multi-start compass search seeded at the storage-free
    optimal tariff and two scaled variants.  Returns the best point found
    with convergence metadata; see the module docstring for the best-effort
    caveat.
    """
    seed_price = optimal_price(model, cost, eta)
    if step0 is None:
        step0 = max(0.05 * float(np.abs(seed_price).max()), 1e-3)

    def objective(pi: np.ndarray) -> float:
        return retailer_objective_with_storage(model, cost, batteries, pi, eta)

    starts = [seed_price, 1.05 * seed_price, 0.95 * seed_price]
    best = None
    total_evals = 0
    truncated = False
    for start in starts:
        outcome = pattern_search(objective, start, step0=step0, step_min=step_min, max_evals=max_evals)
        total_evals += outcome.n_evals
        truncated = truncated or outcome.truncated
        if best is None or outcome.value > best.value:
            best = outcome

    pi = best.point
    net = population_net_load(pi, batteries, model.horizon)
    point = TradeoffPoint(
        eta=float(eta),
        price=pi,
        cs=expected_cs(model, pi) - float(pi @ net),
        rp=expected_rp(model, pi, cost) + float((pi - cost.mean) @ net),
    )
    seed_value = objective(seed_price)
    return StoragePricingResult(
        price=pi,
        point=point,
        objective=best.value,
        n_starts=len(starts),
        n_evals=total_evals,
        improved=best.value > seed_value + 1e-12 * max(1.0, abs(seed_value)),
        truncated=truncated,
        trace=best.trace,
    )
