"""Multi-agent debate engine with pluggable history compression."""

from debatekit._core import (
    BackendError,
    ProtocolError,
    ShapeError,
    UsageError,
    canonicalize_answer,
    convergence_spread,
    count_tokens,
    enumerate_bottleneck,
    extract_answer,
    fit_growth_exponent,
    grad_check,
    hoeffding_bound,
    majority_success_exact,
    majority_vote,
    plugin_mi,
    predict_costs,
    render_digests,
    round_cost,
    run_mock_benchmark,
    sample_complexity,
    total_cost,
    trace_pipeline_shapes,
    train_toy,
    vision_token_count,
)

__all__ = [
    "BackendError",
    "ProtocolError",
    "ShapeError",
    "UsageError",
    "canonicalize_answer",
    "convergence_spread",
    "count_tokens",
    "enumerate_bottleneck",
    "extract_answer",
    "fit_growth_exponent",
    "grad_check",
    "hoeffding_bound",
    "majority_success_exact",
    "majority_vote",
    "plugin_mi",
    "predict_costs",
    "render_digests",
    "round_cost",
    "run_mock_benchmark",
    "sample_complexity",
    "total_cost",
    "trace_pipeline_shapes",
    "train_toy",
    "vision_token_count",
]
