"""Cost-aware model cascade: margin-based escalation between two models.

Decides per query whether a small model's answer suffices or a large model
must be called, using the small model's first-token probability margin
against a dynamically calibrated quantile threshold. Ships a deterministic
replay simulator, a budget-sweep evaluator, a synthetic dataset generator
and a live HTTP gateway.
"""

from cascadegate._kernel import KERNEL_BACKEND
from cascadegate.costs import (
    BudgetTarget,
    cascade_probability,
    measure_averages,
    routing_probability,
)
from cascadegate.policy import Decision, DynamicThreshold, PolicyConfig, quantile_linear
from cascadegate.records import (
    BudgetCurve,
    CostScheme,
    CurvePoint,
    ReplayRecord,
    RunTrace,
    TokenDistribution,
    validate_record,
)
from cascadegate.replay import load_dataset, run_replay
from cascadegate.uncertainty import committee_agreement, margin_first_token, quality_gap

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "BudgetCurve",
    "BudgetTarget",
    "CostScheme",
    "CurvePoint",
    "Decision",
    "DynamicThreshold",
    "PolicyConfig",
    "ReplayRecord",
    "RunTrace",
    "TokenDistribution",
    "cascade_probability",
    "committee_agreement",
    "load_dataset",
    "margin_first_token",
    "measure_averages",
    "quality_gap",
    "quantile_linear",
    "routing_probability",
    "run_replay",
    "validate_record",
    "__version__",
]
