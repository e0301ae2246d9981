from mixmatch.sgd.step_schedule import (ScheduleMode, StepSchedule, step_size, parse_schedule_config,
                                       schedule_from_config)
from mixmatch.sgd.sgd_engine import (SgdRun, BatchSgdRun, run_sgd, run_sgd_batch, run_sgd_with_sampler,
                                     mixture_sampler, finite_sampler)
from mixmatch.sgd.concentration_bound import (ConcentrationBound, compute_E, concentration_bound,
                                              default_diameter, theoretical_budget, martingale_constant)
