from dynrank.harness.metrics import (check_containment, check_skip_contract, geometric_mean, l1_error,
                                     reference_ranks)
from dynrank.harness.plan import ExperimentPlan, ExperimentRecord
from dynrank.harness.report import summarize, write_csv, write_json
from dynrank.harness.runner import (frontier_tolerance_sweep, iter_experiment, iter_scaling_sweep, run_experiment,
                                    run_single, scaling_sweep)
