from .engine import (
    ComparisonReport,
    Layers,
    Replication,
    RunResult,
    attribute_components,
    compare,
    replicate,
    run,
)
from .errors import MeshwaveError
from .policy import PolicyInputs, load_policy_inputs, policy_sweep
from .scenario import Mode, ScenarioConfig, bundled_scenario, load_scenario, validate

__all__ = [
    "ComparisonReport",
    "Layers",
    "MeshwaveError",
    "Mode",
    "PolicyInputs",
    "Replication",
    "RunResult",
    "ScenarioConfig",
    "attribute_components",
    "bundled_scenario",
    "compare",
    "load_policy_inputs",
    "load_scenario",
    "policy_sweep",
    "replicate",
    "run",
    "validate",
]
