"""Command line entry points.

    dcmctl simulate  --scenario s.json [--out DIR] [--tick T] [--seed N]
    dcmctl daemon    --scenario s.json [--port P] [--static DIR]
    dcmctl arbitrage [--json]
    dcmctl replay    LOG.jsonl
    dcmctl framedump HEX | ID#HEX
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import threading
import time

from dcmctl.config import ConfigError, load_config
from dcmctl.plant.scenario import Scenario, load_scenario
from dcmctl.protocols.canbus import BmsFrame, decode_bms_frame
from dcmctl.protocols.errors import CodecError
from dcmctl.protocols.modbus import decode_pzem_response
from dcmctl.runner import ScenarioRunner, replay_log, wall_clock_pace
from dcmctl.tariff.arbitrage import reference_day, simulate_arbitrage
from dcmctl.telemetry.bus import MessageBus


def _load_scenario_for(args, config) -> Scenario:
    path = getattr(args, "scenario", None) or config.scenario_path
    if not path:
        raise SystemExit("no scenario: pass --scenario or set scenario.path in the config")
    scenario = load_scenario(path)
    overrides = {}
    if getattr(args, "tick", None):
        overrides["plant"] = dataclasses.replace(scenario.plant, tick=args.tick)
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if overrides:
        scenario = dataclasses.replace(scenario, **overrides)
    return scenario


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    scenario = _load_scenario_for(args, config)
    settings = dataclasses.replace(config.control, poll_period_s=scenario.plant.tick)
    runner = ScenarioRunner(scenario, settings=settings, out_dir=args.out)
    summary = runner.run()
    print(json.dumps(summary, indent=2))
    return 0


def cmd_daemon(args) -> int:
    try:
        import uvicorn
    except ImportError:
        raise SystemExit("daemon mode needs uvicorn installed")
    from dcmctl.telemetry.bridge import create_app

    config = load_config(args.config)
    scenario = _load_scenario_for(args, config)
    settings = dataclasses.replace(config.control, poll_period_s=scenario.plant.tick)
    bus = MessageBus()
    app = create_app(bus, static_dir=args.static)

    host = args.host or config.broker.host
    port = args.port or config.broker.websocket_port
    server = uvicorn.Server(
        uvicorn.Config(app, host=host, port=port, log_level="warning")
    )
    web = threading.Thread(target=server.run, daemon=True)
    web.start()
    deadline = time.monotonic() + 10.0
    while not server.started and time.monotonic() < deadline:
        time.sleep(0.05)
    if not server.started:
        raise SystemExit(f"bridge failed to bind {host}:{port}")
    print(f"bridge listening on ws://{host}:{port}/ws", flush=True)

    runner = ScenarioRunner(
        scenario, settings=settings, bus=bus, out_dir=args.out, pace=wall_clock_pace
    )
    try:
        summary = runner.run()
        print(json.dumps(summary, indent=2), flush=True)
        if args.linger:
            print("scenario finished; bridge stays up (Ctrl+C to exit)", flush=True)
            while True:
                time.sleep(1.0)
    except KeyboardInterrupt:
        pass
    finally:
        server.should_exit = True
        web.join(timeout=5.0)
    return 0


def cmd_arbitrage(args) -> int:
    day = reference_day()
    t0 = time.perf_counter()
    result = simulate_arbitrage(
        day["profile"], day["tariff"], day["battery"], day["plant"],
        start_hour=day["start_hour"],
    )
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    if args.json:
        print(json.dumps({**result.as_dict(), "runtime_ms": runtime_ms}, indent=2))
        return 0
    m = result.metrics
    print("time-of-use arbitrage, 24 h reference day")
    print(f"  discharged during peak:   {result.discharged_peak_kwh:7.4f} kWh")
    print(f"  recharged off-peak:       {result.charged_offpeak_kwh:7.4f} kWh")
    print(f"  end of day charge:        {result.end_soc:7.4f} %")
    print(f"  peak demand:              {m['peak_before_kw']:.3f} -> {m['peak_after_kw']:.3f} kW")
    print(f"  peak reduction:           {m['peak_reduction_w']:.1f} W")
    print(f"  variance ratio:           {m['variance_ratio']:.4f}")
    print(f"  load factor:              {m['load_factor_before']:.4f} -> {m['load_factor_after']:.4f}")
    print(f"  demand charge:            {m['demand_charge_before']:.2f} -> {m['demand_charge_after']:.2f}")
    print(f"  energy cost:              {m['energy_cost_before']:.4f} -> {m['energy_cost_after']:.4f}")
    print(f"  solver wall time:         {runtime_ms:.1f} ms")
    for w in result.warnings:
        print(f"  warning: {w}")
    return 0


def cmd_replay(args) -> int:
    result = replay_log(args.log)
    if result.ok:
        print(f"replay ok: {result.total} decisions re-derived, 0 mismatches")
        return 0
    print(f"replay FAILED: {len(result.mismatches)} mismatches in {result.total} decisions")
    for m in result.mismatches[:20]:
        print(" ", json.dumps(m, sort_keys=True))
    return 1


def cmd_framedump(args) -> int:
    text = args.frame.strip()
    if "#" in text:
        ident, _, payload = text.partition("#")
        try:
            frame = BmsFrame(int(ident, 16), bytes.fromhex(payload))
            update = decode_bms_frame(frame)
        except (ValueError, CodecError) as e:
            print(f"bad CAN frame: {e}")
            return 1
        if update is None:
            print(f"CAN id 0x{int(ident, 16):03X}: not a known battery frame")
            return 1
        print(f"CAN id 0x{frame.can_id:03X} ({len(frame.payload)} bytes)")
        for name, value in dataclasses.asdict(update).items():
            if value is not None:
                print(f"  {name}: {sorted(value) if isinstance(value, (set, frozenset)) else value}")
        return 0

    try:
        raw = bytes.fromhex(text)
    except ValueError as e:
        print(f"bad hex: {e}")
        return 1
    if len(raw) == 8 and len(raw) > 1 and raw[1] == 0x04:
        from dcmctl.protocols.crc import check_crc

        ok = check_crc(raw)
        start = int.from_bytes(raw[2:4], "big")
        count = int.from_bytes(raw[4:6], "big")
        print(f"meter read request: address={raw[0]} registers {start}..{start + count - 1}"
              f" crc={'ok' if ok else 'BAD'}")
        return 0 if ok else 1
    try:
        sample = decode_pzem_response(raw)
    except CodecError as e:
        print(f"bad meter frame: {e}")
        return 1
    print("meter response:")
    print(f"  voltage:      {sample.voltage:.1f} V")
    print(f"  current:      {sample.current:.3f} A")
    print(f"  power:        {sample.power:.1f} W")
    print(f"  energy:       {sample.energy:.0f} Wh")
    print(f"  frequency:    {sample.frequency:.1f} Hz")
    print(f"  power factor: {sample.power_factor:.2f}")
    print(f"  alarm:        {'set' if sample.alarm else 'clear'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcmctl", description="demand charge management controller"
    )
    parser.add_argument("--config", help="key-value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario fast and print the summary")
    sim.add_argument("--scenario", help="scenario JSON path")
    sim.add_argument("--out", help="directory for run.csv and decisions.jsonl")
    sim.add_argument("--tick", type=float, help="override the tick period")
    sim.add_argument("--seed", type=int, help="override the scenario seed")
    sim.set_defaults(func=cmd_simulate)

    daemon = sub.add_parser("daemon", help="run paced with the websocket bridge up")
    daemon.add_argument("--scenario", help="scenario JSON path")
    daemon.add_argument("--out", help="directory for run.csv and decisions.jsonl")
    daemon.add_argument("--tick", type=float, help="override the tick period")
    daemon.add_argument("--seed", type=int, help="override the scenario seed")
    daemon.add_argument("--host", help="bridge bind host")
    daemon.add_argument("--port", type=int, help="bridge port")
    daemon.add_argument("--static", help="directory of dashboard files to serve at /")
    daemon.add_argument(
        "--linger", action="store_true",
        help="keep the bridge up after the scenario ends",
    )
    daemon.set_defaults(func=cmd_daemon)

    arb = sub.add_parser("arbitrage", help="reference-day tariff arbitrage report")
    arb.add_argument("--json", action="store_true", help="machine-readable output")
    arb.set_defaults(func=cmd_arbitrage)

    rep = sub.add_parser("replay", help="re-derive decisions from a run log and diff")
    rep.add_argument("log", help="decisions.jsonl from a previous run")
    rep.set_defaults(func=cmd_replay)

    dump = sub.add_parser("framedump", help="decode a raw frame (hex, or CAN id#hex)")
    dump.add_argument("frame", help="e.g. 01040000000a700d or 355#3c006400")
    dump.set_defaults(func=cmd_framedump)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
