"""Contract scheduling with untrusted predictions.

Schedules for interruptible execution of contract algorithms, evaluation of
acceleration ratios, prediction-aware schedule families (time predictions
and binary-query predictions), noise models, and a reproducible experiment
harness with a CLI front end.
"""

from .core import (
    ContractSchedule,
    EvalRecord,
    ResourceLimitError,
    RobustnessParams,
    acceleration_ratio,
    cr_br,
    empirical_robustness,
    exponential_robustness,
    largest_completed,
    schedule_prefix,
    worst_case_interruption,
)
from .predict_time import (
    BiddingSequence,
    HThresholds,
    SignedError,
    TimePrediction,
    bidding_to_schedule,
    buffered_ratio_bound,
    buffered_schedule,
    h_thresholds,
    length_cap_ok,
    pareto_schedule,
    schedule_to_bidding,
)
from .predict_query import (
    AnswerBits,
    QueryFamily,
    best_index,
    decode_robust,
    encode_answers,
    ideal_base,
    ideal_family,
    ideal_select,
    partition_sets,
    query_consistency_floor,
    robust_base,
    robust_family,
    worst_case_best_ratio,
)
from .noise import (
    RngStream,
    TimeNoiseModel,
    error_of,
    flip_bits,
    sample_tau,
)
from .experiments import (
    ExperimentConfig,
    ExperimentResult,
    SummaryRow,
    baseline_ratio,
    compare_to_baseline,
    emit_results,
    lower_bound_search,
    read_results,
    run_query_experiment,
    run_time_experiment,
)
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
