"""Base source-selection rules.

decide_relays is a pure elif chain over the control inputs. Priority,
top to bottom: emergency stop, manual overrides, then the automatic
rules of peak shaving (load at or above threshold goes to battery),
daily windowing (discharge after the boundary slot while charge
remains, charge before it until full), and a low-charge fallback to
grid. Two input regions fall through every branch and hold the
previous relay state: the time slot exactly at the boundary, and state
of charge exactly 20 after the boundary with the load below threshold.
"""

from __future__ import annotations

from typing import Optional

from dcmctl.control.types import (
    ControlInputs,
    Decision,
    DecisionReason,
    RelayMode,
    Target,
)


def compute_active_power(voltage: float, current: float, pf: float) -> float:
    """Single-phase active power V*I*pf in watts."""
    if not 0.0 <= pf <= 1.0:
        raise ValueError(f"power factor {pf} outside [0, 1]")
    if voltage < 0 or current < 0:
        raise ValueError("voltage and current must be non-negative")
    return voltage * current * pf


def decide_relays(inputs: ControlInputs, load_above: Optional[bool] = None) -> Decision:
    """Run the decision chain.

    `load_above` lets a supervisor substitute its debounced view of the
    load-vs-threshold comparison (hysteresis); None means the raw
    comparison load_power >= power_threshold.
    """
    if load_above is None:
        load_above = inputs.load_power >= inputs.power_threshold

    minute = inputs.present_minute
    boundary = inputs.window_boundary
    soc = inputs.soc

    if inputs.em_mode:
        return Decision(Target.EMERGENCY_OFF, DecisionReason.EMERGENCY_STOP)
    elif inputs.relay_mode == RelayMode.FORCE_BATTERY:
        return Decision(Target.BATTERY, DecisionReason.MANUAL_BATTERY)
    elif inputs.relay_mode == RelayMode.FORCE_GRID:
        return Decision(Target.GRID, DecisionReason.MANUAL_GRID)
    elif load_above:
        return Decision(Target.BATTERY, DecisionReason.LOAD_ABOVE_THRESHOLD)
    elif soc > 20 and minute > boundary:
        return Decision(Target.BATTERY, DecisionReason.WINDOW_DISCHARGE)
    elif soc != 100 and minute < boundary:
        return Decision(Target.GRID, DecisionReason.WINDOW_CHARGE, charging=True)
    elif soc == 100 and minute < boundary:
        return Decision(Target.BATTERY, DecisionReason.FULL_AT_CHARGE_WINDOW)
    elif soc < 20:
        return Decision(Target.GRID, DecisionReason.LOW_SOC_CHARGE, charging=True)
    else:
        return Decision(Target.HOLD, DecisionReason.NO_BRANCH)
