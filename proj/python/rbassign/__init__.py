"""Resource block assignment with exact search and multi-agent deep Q-learning."""

from ._core import (
    Algorithm,
    EpsilonSchedule,
    Instance,
    McsTable,
    MetricRow,
    OptResult,
    ParallelResult,
    QosSweep,
    RunOutcome,
    SatisfactionReport,
    ScenarioConfig,
    TabularConfig,
    TabularResult,
    TrainerConfig,
    TrainingResult,
    compute_snr,
    evaluate,
    generate_feasible_instances,
    generate_instance,
    is_feasible,
    link_adaptation,
    load_run_config,
    metrics_csv,
    read_instances,
    reward,
    run_benchmark,
    run_parallel,
    run_tabular,
    run_training,
    solve_brute_force,
    solve_pruned,
    write_instances,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
