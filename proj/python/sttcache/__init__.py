from ._core import (
    ConfigError,
    DeviceParams,
    DomainError,
    Error,
    IoError,
    TraceError,
    WriteFailGrouping,
    WritePermutation,
    bit_flip_pmf,
    delta_at,
    enumerate_valid,
    format_trace,
    generate_trace,
    heat_score,
    max_feasible_min_distance,
    mttf_ns,
    parse_trace,
    read_disturbance_prob,
    retention_failure_prob,
    select_default,
    simulate,
    write_failure_prob,
)

__all__ = [
    "ConfigError",
    "DeviceParams",
    "DomainError",
    "Error",
    "IoError",
    "TraceError",
    "WriteFailGrouping",
    "WritePermutation",
    "bit_flip_pmf",
    "delta_at",
    "enumerate_valid",
    "format_trace",
    "generate_trace",
    "heat_score",
    "max_feasible_min_distance",
    "mttf_ns",
    "parse_trace",
    "read_disturbance_prob",
    "retention_failure_prob",
    "select_default",
    "simulate",
    "write_failure_prob",
]
