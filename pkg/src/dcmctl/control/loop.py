"""Supervisory tick loop.

Each tick the controller folds the latest readings and operator state
into a ResolvedInputs record, and derive_decision maps that record to a
Decision. derive_decision is pure and total over ResolvedInputs, and the
record is what gets journaled, so a logged session can be re-derived
bit-for-bit offline.

Arbitration order inside derive_decision, highest first:

    e-stop latch > manual override > stale readings (grid safe state)
    > grid outage (battery) > minimum dwell > base rules

Staleness and outage are supervisory conditions the base rules know
nothing about; hysteresis on the load comparison and the dwell timer
are the anti-chatter policy. All of it is resolved BEFORE the pure
derivation so that the journal is self-contained.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

from dcmctl.control.logic import decide_relays
from dcmctl.control.sequencer import Action, apply_decision
from dcmctl.control.types import (
    ControlInputs,
    Decision,
    DecisionReason,
    RelayBank,
    RelayMode,
    Target,
)


@dataclass(frozen=True)
class ControlSettings:
    power_threshold: float = 700.0
    window_boundary: int = 6
    hysteresis_w: float = 25.0       # 0 disables, raw >= comparison
    min_dwell_s: float = 5.0         # 0 disables
    poll_period_s: float = 1.0       # readings older than 3 periods are stale
    nominal_voltage: float = 230.0
    outage_voltage_ratio: float = 0.5
    soc_floor_enable: bool = False   # deviation from the base rules when on
    soc_floor: float = 10.0

    def __post_init__(self):
        if self.power_threshold <= 0:
            raise ValueError("power_threshold must be > 0")
        if self.hysteresis_w < 0 or self.min_dwell_s < 0:
            raise ValueError("hysteresis and dwell must be >= 0")
        if self.poll_period_s <= 0:
            raise ValueError("poll_period_s must be > 0")

    @property
    def stale_after_s(self) -> float:
        return 3.0 * self.poll_period_s


@dataclass(frozen=True)
class ResolvedInputs:
    """Everything a decision depends on, fully evaluated."""

    t: float
    soc: Optional[float]
    minute: int
    load_w: Optional[float]
    threshold: float
    boundary: int
    relay_mode: int
    em: bool
    load_above: bool
    stale: bool
    outage: bool
    dwell_hold: bool
    soc_floor: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "t": self.t,
            "soc": self.soc,
            "minute": self.minute,
            "load_w": self.load_w,
            "threshold": self.threshold,
            "boundary": self.boundary,
            "relay_mode": self.relay_mode,
            "em": self.em,
            "load_above": self.load_above,
            "stale": self.stale,
            "outage": self.outage,
            "dwell_hold": self.dwell_hold,
            "soc_floor": self.soc_floor,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ResolvedInputs":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__})


def _base_decision(r: ResolvedInputs) -> Decision:
    inputs = ControlInputs(
        soc=r.soc,
        load_power=r.load_w,
        present_minute=r.minute,
        relay_mode=RelayMode.AUTO,
        em_mode=False,
        power_threshold=r.threshold,
        window_boundary=r.boundary,
    )
    decision = decide_relays(inputs, load_above=r.load_above)
    if (
        decision.target is Target.BATTERY
        and r.soc_floor is not None
        and r.soc < r.soc_floor
    ):
        return Decision(Target.GRID, DecisionReason.SOC_FLOOR, charging=True)
    return decision


def derive_decision(r: ResolvedInputs) -> Decision:
    """Pure map from resolved inputs to a decision."""
    if r.em:
        return Decision(Target.EMERGENCY_OFF, DecisionReason.EMERGENCY_STOP)
    if r.relay_mode == RelayMode.FORCE_BATTERY:
        return Decision(Target.BATTERY, DecisionReason.MANUAL_BATTERY)
    if r.relay_mode == RelayMode.FORCE_GRID:
        return Decision(Target.GRID, DecisionReason.MANUAL_GRID)
    if r.stale:
        return Decision(Target.GRID, DecisionReason.STALE_TELEMETRY)
    if r.outage:
        return Decision(Target.BATTERY, DecisionReason.GRID_OUTAGE)
    if r.dwell_hold:
        return Decision(Target.HOLD, DecisionReason.DWELL_HOLD)
    return _base_decision(r)


@dataclass
class StepRecord:
    t: float
    resolved: ResolvedInputs
    decision: Decision
    actions: List[Action]
    bank_before: RelayBank
    bank_after: RelayBank


@dataclass
class Controller:
    """Holds the operator latches, anti-chatter state, and the relay
    bank's commanded position between ticks."""

    settings: ControlSettings = field(default_factory=ControlSettings)
    relay_mode: RelayMode = RelayMode.AUTO
    em: bool = False
    bank: RelayBank = field(default_factory=RelayBank.de_energized)
    threshold: float = 0.0           # 0 -> take settings default
    _load_above: Optional[bool] = None
    _last_transition_t: Optional[float] = None
    last_decision: Optional[Decision] = None

    def __post_init__(self):
        if self.threshold <= 0:
            self.threshold = self.settings.power_threshold

    # -- operator commands ------------------------------------------------

    def set_mode(self, mode: RelayMode) -> None:
        self.relay_mode = RelayMode(mode)

    def set_estop(self, pressed: bool) -> None:
        self.em = bool(pressed)

    def set_threshold(self, watts: float) -> None:
        if watts <= 0:
            raise ValueError(f"threshold {watts} must be > 0")
        self.threshold = float(watts)

    # -- per-tick logic ----------------------------------------------------

    def _update_load_above(self, load_w: Optional[float]) -> bool:
        if load_w is None:
            return bool(self._load_above)
        h = self.settings.hysteresis_w
        if self._load_above is None:
            self._load_above = load_w >= self.threshold
        elif self._load_above:
            if load_w < self.threshold - h:
                self._load_above = False
        else:
            if load_w >= self.threshold + h:
                self._load_above = True
        return self._load_above

    def resolve(
        self,
        t: float,
        soc: Optional[float],
        minute: int,
        load_w: Optional[float],
        grid_voltage: Optional[float],
        reading_age_s: float = 0.0,
    ) -> ResolvedInputs:
        s = self.settings
        stale = (
            soc is None
            or load_w is None
            or reading_age_s > s.stale_after_s
        )
        outage = (
            not stale
            and grid_voltage is not None
            and grid_voltage < s.outage_voltage_ratio * s.nominal_voltage
        )
        load_above = self._update_load_above(None if stale else load_w)
        floor = s.soc_floor if s.soc_floor_enable else None

        r = ResolvedInputs(
            t=t,
            soc=soc,
            minute=minute,
            load_w=load_w,
            threshold=self.threshold,
            boundary=s.window_boundary,
            relay_mode=int(self.relay_mode),
            em=self.em,
            load_above=load_above,
            stale=stale,
            outage=outage,
            dwell_hold=False,
            soc_floor=floor,
        )
        # dwell gates only the base rules: find out whether they would
        # move the bank, and if so whether the dwell window is still open
        if not (r.em or r.relay_mode != RelayMode.AUTO or stale or outage):
            candidate = _base_decision(r)
            wants_move = (
                candidate.target in (Target.BATTERY, Target.GRID)
                and candidate.target.value != self.bank.mode
            )
            if wants_move and self._dwell_open(t):
                return ResolvedInputs(**{**r.as_dict(), "dwell_hold": True})
        return r

    def _dwell_open(self, t: float) -> bool:
        if self.settings.min_dwell_s <= 0 or self._last_transition_t is None:
            return False
        return (t - self._last_transition_t) < self.settings.min_dwell_s

    def step(
        self,
        t: float,
        soc: Optional[float],
        minute: int,
        load_w: Optional[float],
        grid_voltage: Optional[float],
        reading_age_s: float = 0.0,
    ) -> StepRecord:
        resolved = self.resolve(t, soc, minute, load_w, grid_voltage, reading_age_s)
        decision = derive_decision(resolved)
        before = self.bank
        actions, after = apply_decision(decision, before)
        if actions:
            self._last_transition_t = t
        self.bank = after
        self.last_decision = decision
        return StepRecord(t, resolved, decision, actions, before, after)
