"""Closed-loop scenario execution.

Each tick, in order:

    1. sense      meter readings through the wire codecs (rate-limited
                  by the poll cache) and BMS frames, all against the
                  bank position left by the previous tick
    2. publish    telemetry topics, when a bus is attached
    3. command    drain scheduled and live operator commands
    4. decide     controller step; relay/decision topics on change
    5. snapshot   retained full-state topic
    6. integrate  plant energies over [t, t+tick) with the new bank
    7. record     CSV row and JSONL decision record

Sensing before deciding means a grid outage is visible in the readings
of the first tick after it starts, and the source transfer lands within
that same tick.

The JSONL log carries the fully resolved decision inputs, so replay_log
can re-derive every decision offline and diff both decisions and relay
action sequences against what the live loop recorded.
"""

from __future__ import annotations

import json
import queue
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Tuple

from dcmctl.control.loop import Controller, ControlSettings, ResolvedInputs, derive_decision
from dcmctl.control.sequencer import apply_decision
from dcmctl.control.types import RelayBank, RelayMode
from dcmctl.plant.scenario import Scenario
from dcmctl.plant.sim import Plant
from dcmctl.protocols.cache import PollCache
from dcmctl.protocols.canbus import (
    BmsUpdate,
    decode_bms_frame,
    encode_bms_alarm_frame,
    encode_bms_measurement_frame,
    encode_bms_soc_frame,
)
from dcmctl.telemetry import topics
from dcmctl.telemetry.bus import MessageBus
from dcmctl.telemetry.payloads import (
    CommandError,
    build_battery_payload,
    build_decision_payload,
    build_reading_payload,
    build_relays_payload,
    build_snapshot,
    parse_command,
)

CSV_HEADER = "t,grid_w,load_w,soc,mode"


def _json_line(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class ScenarioRunner:
    def __init__(
        self,
        scenario: Scenario,
        settings: Optional[ControlSettings] = None,
        bus: Optional[MessageBus] = None,
        out_dir: Optional[str] = None,
        commands: Optional[List[Tuple[float, str, dict]]] = None,
        pace: Optional[Callable[[float], None]] = None,
    ):
        self.scenario = scenario
        self.settings = settings or ControlSettings(poll_period_s=scenario.plant.tick)
        self.controller = Controller(settings=self.settings)
        self.plant = Plant(scenario)
        self.bus = bus
        self.out_dir = Path(out_dir) if out_dir else None
        self.pace = pace
        self._now = 0.0
        self._meters = PollCache(
            self._fetch_meters, min_period=1.0, clock=lambda: self._now
        )
        self._scheduled = sorted(commands or [], key=lambda c: c[0])
        self._live: "queue.Queue[Tuple[str, dict]]" = queue.Queue()
        self._last_published_decision = None
        self.transitions = 0
        self.event_counts: dict = {}
        if bus is not None:
            bus.subscribe(topics.CMD_PREFIX + "#", self._on_command)

    # -- sensing ------------------------------------------------------------

    def _fetch_meters(self):
        return self.plant.readings(self._now, self.controller.bank)

    def _sense_bms(self) -> BmsUpdate:
        b = self.plant.battery
        frames = [
            encode_bms_soc_frame(b.soc, b.soh),
            encode_bms_measurement_frame(b.pack_voltage, b.pack_current, b.temperature),
            encode_bms_alarm_frame(b.alarms),
        ]
        update = BmsUpdate()
        for frame in frames:
            update = update.merge(decode_bms_frame(frame))
        return update

    # -- commands -----------------------------------------------------------

    def _on_command(self, topic: str, payload: dict) -> None:
        if topic != topics.CMD_REJECTED:
            self._live.put((topic, payload))

    def _drain_commands(self, t: float) -> None:
        pending: List[Tuple[str, dict]] = []
        while self._scheduled and self._scheduled[0][0] <= t:
            _, topic, payload = self._scheduled.pop(0)
            pending.append((topic, payload))
        while True:
            try:
                pending.append(self._live.get_nowait())
            except queue.Empty:
                break
        for topic, payload in pending:
            try:
                cmd = parse_command(topic, payload, issued_at=t)
            except CommandError as e:
                if self.bus is not None:
                    self.bus.publish(topics.CMD_REJECTED, e.rejection_payload(t))
                continue
            if cmd.kind == "set_mode":
                self.controller.set_mode(RelayMode(int(cmd.value)))
            elif cmd.kind == "estop":
                self.controller.set_estop(True)
            elif cmd.kind == "clear_estop":
                self.controller.set_estop(False)
            elif cmd.kind == "set_threshold":
                try:
                    self.controller.set_threshold(cmd.value)
                except ValueError as e:
                    if self.bus is not None:
                        self.bus.publish(
                            topics.CMD_REJECTED,
                            {"t": t, "topic": topic, "error": str(e), "payload": payload},
                        )

    # -- main loop ----------------------------------------------------------

    def run(self) -> dict:
        scenario = self.scenario
        tick = scenario.plant.tick
        steps = int(round(scenario.duration / tick))
        csv_lines = [CSV_HEADER]
        log_lines = [
            _json_line(
                {
                    "type": "start",
                    "bank": self.controller.bank.as_dict(),
                    "tick": tick,
                    "duration": scenario.duration,
                    "seed": scenario.seed,
                }
            )
        ]

        if self.bus is not None:
            # cold snapshot: no measurements yet, everything de-energized
            self.bus.publish(
                topics.STATE_SNAPSHOT,
                build_snapshot(
                    0.0,
                    self.controller.bank,
                    int(self.controller.relay_mode),
                    self.controller.em,
                    self.controller.threshold,
                ),
                retain=True,
            )
            self.bus.publish(
                topics.STATE_RELAYS,
                build_relays_payload(0.0, self.controller.bank),
                retain=True,
            )

        for k in range(steps):
            t = k * tick
            self._now = t
            grid, load = self._meters.read()
            bms = self._sense_bms()

            if self.bus is not None:
                self.bus.publish(topics.TELEMETRY_GRID, build_reading_payload(grid))
                self.bus.publish(topics.TELEMETRY_LOAD, build_reading_payload(load))
                self.bus.publish(topics.TELEMETRY_BATTERY, build_battery_payload(t, bms))

            self._drain_commands(t)

            rec = self.controller.step(
                t=t,
                soc=bms.soc,
                minute=scenario.hour_of_day(t),
                load_w=load.active_power,
                grid_voltage=grid.voltage,
                reading_age_s=self._meters.age() or 0.0,
            )
            if rec.actions:
                self.transitions += 1
            if self.bus is not None:
                decision_key = (rec.decision.target, rec.decision.reason)
                if rec.actions or decision_key != self._last_published_decision:
                    self.bus.publish(
                        topics.STATE_DECISION, build_decision_payload(t, rec.decision)
                    )
                    self._last_published_decision = decision_key
                if rec.actions:
                    self.bus.publish(
                        topics.STATE_RELAYS,
                        build_relays_payload(t, rec.bank_after),
                        retain=True,
                    )
                self.bus.publish(
                    topics.STATE_SNAPSHOT,
                    build_snapshot(
                        t,
                        rec.bank_after,
                        int(self.controller.relay_mode),
                        self.controller.em,
                        self.controller.threshold,
                        soc=bms.soc,
                        load_w=load.active_power,
                        grid_w=grid.active_power,
                        pf_load=load.power_factor,
                        pf_grid=grid.power_factor,
                        last_reason=rec.decision.reason.value,
                    ),
                    retain=True,
                )

            for event in self.plant.integrate(t, tick, self.controller.bank):
                self.event_counts[event.kind] = self.event_counts.get(event.kind, 0) + 1

            csv_lines.append(
                f"{t:.3f},{grid.active_power:.1f},{load.active_power:.1f},"
                f"{self.plant.battery.soc:.4f},{self.controller.bank.mode}"
            )
            log_lines.append(
                _json_line(
                    {
                        "type": "decision",
                        "t": t,
                        "inputs": rec.resolved.as_dict(),
                        "decision": {
                            "target": rec.decision.target.value,
                            "reason": rec.decision.reason.value,
                            "charging": rec.decision.charging,
                        },
                        "actions": [a.as_dict() for a in rec.actions],
                        "bank_after": rec.bank_after.as_dict(),
                    }
                )
            )
            if self.pace is not None:
                self.pace(tick)

        led = self.plant.ledger
        summary = {
            "ticks": steps,
            "duration_s": scenario.duration,
            "transitions": self.transitions,
            "final_soc": round(self.plant.battery.soc, 4),
            "events": dict(sorted(self.event_counts.items())),
            "energy_wh": {
                "grid_in": round(led.grid_in_wh, 3),
                "store_out": round(led.store_out_wh, 3),
                "store_in": round(led.store_in_wh, 3),
                "load_served": round(led.load_served_wh, 3),
                "load_unserved": round(led.load_unserved_wh, 3),
                "standby": round(led.standby_wh, 3),
                "charger_loss": round(led.charger_loss_wh, 3),
                "inverter_loss": round(led.inverter_loss_wh, 3),
            },
            "balanced": led.balanced(),
            "unserved_intervals": [[round(a, 3), round(b, 3)] for a, b in led.unserved_intervals],
        }
        log_lines.append(_json_line({"type": "summary", **summary}))

        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            csv_path = self.out_dir / "run.csv"
            log_path = self.out_dir / "decisions.jsonl"
            csv_path.write_text("\n".join(csv_lines) + "\n")
            log_path.write_text("\n".join(log_lines) + "\n")
            summary["csv"] = str(csv_path)
            summary["log"] = str(log_path)
        self.csv_text = "\n".join(csv_lines) + "\n"
        self.log_text = "\n".join(log_lines) + "\n"
        return summary


@dataclass
class ReplayResult:
    total: int = 0
    mismatches: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def replay_log(path) -> ReplayResult:
    """Re-derive every decision in a JSONL run log and diff against what
    the live loop recorded: decisions, action sequences, bank states."""
    result = ReplayResult()
    bank: Optional[RelayBank] = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if rec["type"] == "start":
                bank = RelayBank.from_dict(rec["bank"])
                continue
            if rec["type"] != "decision":
                continue
            if bank is None:
                raise ValueError("log has no start record before decisions")
            result.total += 1
            resolved = ResolvedInputs.from_dict(rec["inputs"])
            decision = derive_decision(resolved)
            derived = {
                "target": decision.target.value,
                "reason": decision.reason.value,
                "charging": decision.charging,
            }
            if derived != rec["decision"]:
                result.mismatches.append(
                    {"t": rec["t"], "field": "decision", "logged": rec["decision"], "derived": derived}
                )
            actions, bank = apply_decision(decision, bank)
            if [a.as_dict() for a in actions] != rec["actions"]:
                result.mismatches.append(
                    {"t": rec["t"], "field": "actions", "logged": rec["actions"]}
                )
            if bank.as_dict() != rec["bank_after"]:
                result.mismatches.append(
                    {"t": rec["t"], "field": "bank", "logged": rec["bank_after"], "derived": bank.as_dict()}
                )
                bank = RelayBank.from_dict(rec["bank_after"])
    return result


def wall_clock_pace(tick: float) -> None:
    time.sleep(tick)
