# Episodes, Monte-Carlo aggregation and analytic bounds
from .episode import EpisodeResult, EpisodeSummary, run_episode, summarize_episode, realized_losses
from .montecarlo import (
    Aggregate, RegretFit, CSV_COLUMNS, monte_carlo, summarize, regret_fit,
    validate_checkpoints, applicable_bounds, aggregate_rows
)
from .bounds import (
    BoundConstants, ThresholdOracle, UPPER_BOUND_THEOREMS, bound_constants, regret_upper_bound,
    offload_count_bound, accept_count_bound, kl_bernoulli, regret_lower_bound,
    offload_lower_bound, static_threshold_oracle, all_bounds
)
from .bench import benchmark, time_policy, bench_instance, BENCH_POLICIES
