"""Day-ahead hourly pricing for thermostatic demand response.

The package models consumers whose HVAC load responds to hourly retail
prices, derives the population's affine demand curve in closed form, and
builds on it: surplus/profit trade-off pricing, benchmark tariffs,
renewable-aware pricing, consumer battery arbitrage, and a Monte Carlo
simulator that validates the analytics.  See the README for the CLI.
"""

__version__ = "0.1.0"

from .demand import (
    HOURS_PER_DAY,
    AffineDemandModel,
    ConsumerDemandModel,
    ConsumerParams,
    NegativeDemandWarning,
    aggregate,
    build_consumer_model,
    mean_demand,
)
from .errors import (
    ConfigError,
    DahpError,
    DataError,
    IndefiniteMatrixError,
    InfeasibleConstraintError,
    NonConvergenceError,
)
from .pricing import (
    TradeoffPoint,
    WholesaleCost,
    benchmark_prices,
    benchmark_trace,
    constrained_optimal_price,
    expected_cs,
    expected_rp,
    optimal_price,
    pareto_front,
    profit_upper_bound,
    tradeoff_point,
)
from .renewable import (
    BenefitSplit,
    RenewableModel,
    benefit_split,
    expected_rp_renewable,
    optimal_price_renewable,
)
from .renewable import uniform_shortfall_expectation
from .simulate import (
    DayResult,
    EstimatorState,
    ThermalState,
    baseline_days,
    baseline_thermostat,
    kalman_step,
    optimal_policy_step,
    simulate_day,
    simulate_days,
    substream,
)
from .storage import (
    ArbitragePlan,
    BatteryParams,
    StoragePricingResult,
    arbitrage,
    consumer_surplus_with_storage,
    optimize_price_with_storage,
    population_net_load,
    retailer_objective_with_storage,
)

__all__ = [
    "HOURS_PER_DAY",
    "__version__",
    # demand
    "AffineDemandModel",
    "ConsumerDemandModel",
    "ConsumerParams",
    "NegativeDemandWarning",
    "aggregate",
    "build_consumer_model",
    "mean_demand",
    # pricing
    "TradeoffPoint",
    "WholesaleCost",
    "benchmark_prices",
    "benchmark_trace",
    "constrained_optimal_price",
    "expected_cs",
    "expected_rp",
    "optimal_price",
    "pareto_front",
    "profit_upper_bound",
    "tradeoff_point",
    # renewable
    "BenefitSplit",
    "RenewableModel",
    "benefit_split",
    "expected_rp_renewable",
    "optimal_price_renewable",
    "uniform_shortfall_expectation",
    # simulation
    "DayResult",
    "EstimatorState",
    "ThermalState",
    "baseline_days",
    "baseline_thermostat",
    "kalman_step",
    "optimal_policy_step",
    "simulate_day",
    "simulate_days",
    "substream",
    # storage
    "ArbitragePlan",
    "BatteryParams",
    "StoragePricingResult",
    "arbitrage",
    "consumer_surplus_with_storage",
    "optimize_price_with_storage",
    "population_net_load",
    "retailer_objective_with_storage",
    # errors
    "ConfigError",
    "DahpError",
    "DataError",
    "IndefiniteMatrixError",
    "InfeasibleConstraintError",
    "NonConvergenceError",
]
