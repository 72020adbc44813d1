"""Source-transfer control: decision logic, relay sequencing, and the
tick loop that arbitrates automatic logic against operator overrides."""

from dcmctl.control.types import (
    BatteryPath,
    ControlInputs,
    Decision,
    DecisionReason,
    ExternalRelay,
    LoadSource,
    RelayBank,
    RelayMode,
    Target,
)
from dcmctl.control.logic import compute_active_power, decide_relays
from dcmctl.control.sequencer import (
    SetRelay,
    Wait,
    apply_decision,
    execute_actions,
    plan_transition,
    target_bank,
)
from dcmctl.control.loop import (
    Controller,
    ControlSettings,
    ResolvedInputs,
    derive_decision,
)

__all__ = [
    "BatteryPath",
    "ControlInputs",
    "Controller",
    "ControlSettings",
    "Decision",
    "DecisionReason",
    "ExternalRelay",
    "LoadSource",
    "RelayBank",
    "RelayMode",
    "ResolvedInputs",
    "SetRelay",
    "Target",
    "Wait",
    "apply_decision",
    "compute_active_power",
    "decide_relays",
    "derive_decision",
    "execute_actions",
    "plan_transition",
    "target_bank",
]
