"""Tour-length approximations, feasibility tests and an exact solver for the
travelling salesman problem with time slots."""
from .approx import (BETA_TABLE, beta_lookup, bhh_length, feasible_distributional,
                     feasible_sampled, induced_time_slots, mits_length, mts_bounds,
                     mts_length, sampling_length, tsptw_upper_bound)
from .dag import build_dag
from .genbench import (BenchmarkInstance, GenConfig, generate_instance, parse_tsptw_instance,
                       relax_time_windows, repulsion_partition)
from .harness import (classify_feasibility, gap_percent, run_experiment, summarize)
from .maxent import (SpatialMoments, f1, f2, solve_spatial_me, spatial_factor_F,
                     wc_mits_length, wc_satisfiability)
from .model import (Instance, Scenario, SlotAssignment, SlotPartition, TimeWindowSet,
                    identical_partition, load_scenario, save_scenario, slot_index_of,
                    validate_partition)
from .solver import SolveResult, brute_force_solve, solve, solve_instance

__version__ = "0.1.0"
