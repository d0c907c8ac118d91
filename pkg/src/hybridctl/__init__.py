"""Frequency control toolkit for an islanded hybrid power system.

Simulates a wind/solar/diesel/fuel-cell generation mix with flywheel,
battery and ultracapacitor storage under stochastic resource and load
profiles, closes the loop with PID, fuzzy PID or fuzzy fractional-order
PID controllers, and tunes them with a particle swarm optimizer driven
by uniform or chaotic (logistic, Henon) random sources.
"""

from .controllers import (ControllerBlock, ControllerParams, FuzzyFOPIDParams,
                          FuzzyPIDParams, PIDParams, make_controller,
                          params_from_text, params_from_vector,
                          params_to_text, params_to_vector)
from .fracorder import (LinearStateSpace, ZpkFilter, freq_response,
                        oustaloup_zpk, zpk_to_state_space)
from .fuzzy import FuzzyInference, MembershipFamily, RuleBase, flc, fuzzify
from .plant import (FirstOrderLag, PlantConfig, lag_derivative,
                    plant_derivatives, power_balance)
from .profiles import (NoiseStream, ProfileSampler, ProfileSpec,
                       generate_series, make_load, make_solar, make_wind,
                       profile_step, switching_signal)
from .pso import (HenonState, LogisticState, SwarmConfig, TuneResult,
                  default_bounds, henon_next, logistic_next, make_rng_source,
                  optimize)
from .scenario import (RATE_LIMIT_DEFAULTS, ScenarioConfig, load_scenario,
                       save_scenario)
from .simulation import (NonFiniteStateError, SimResult, bs3_step,
                         compute_metrics, ensemble_metrics,
                         ensemble_objective, make_batch_objective,
                         performance_decrease, run_closed_loop,
                         steady_control_residual, write_series_csv)

__version__ = "0.1.0"
