// Topic names and payload shapes served by the daemon's /ws bridge.
// Frames both ways are {"topic": string, "payload": object}; the bridge
// replays retained state (snapshot, relays) on connect, then streams live.
// Clients may only publish under dcm/cmd/.

export const TELEMETRY_GRID = "dcm/telemetry/grid";
export const TELEMETRY_LOAD = "dcm/telemetry/load";
export const TELEMETRY_BATTERY = "dcm/telemetry/battery";
export const STATE_RELAYS = "dcm/state/relays";
export const STATE_DECISION = "dcm/state/decision";
export const STATE_SNAPSHOT = "dcm/state/snapshot";
export const CMD_MODE = "dcm/cmd/mode";
export const CMD_ESTOP = "dcm/cmd/estop";
export const CMD_THRESHOLD = "dcm/cmd/threshold";
export const CMD_REJECTED = "dcm/cmd/rejected";

export interface Frame {
  topic: string;
  payload: unknown;
}

// dcm/telemetry/grid and dcm/telemetry/load
export interface ElectricalReading {
  t: number;
  v: number;
  i: number;
  p: number;
  pf: number;
  f: number;
  e: number;
}

// dcm/telemetry/battery
export interface BatteryTelemetry {
  t: number;
  soc: number;
  soh: number;
  v: number;
  i: number;
  temp: number;
  alarms: string[];
}

export interface RelayPositions {
  relay4_load_source: "grid_nc" | "inverter_no";
  relay5_ups_source: "grid_nc" | "inverter_no";
  relay6_battery_path: "charge" | "discharge";
  external_dc_relay: "open" | "closed";
}

// dcm/state/relays (retained): the four positions plus t and a
// one-word summary of which side feeds the loads
export interface RelayStatePayload extends RelayPositions {
  t: number;
  mode: "battery" | "grid";
}

// dcm/state/snapshot (retained, every tick); measurement fields are
// null until the first telemetry lands on the controller side
export interface Snapshot {
  t: number;
  soc: number | null;
  load_w: number | null;
  grid_w: number | null;
  pf_load: number | null;
  pf_grid: number | null;
  mode: 0 | 1 | 2;
  em: boolean;
  threshold_w: number;
  relays: RelayPositions;
  last_reason: string | null;
}

export interface DecisionPayload {
  t: number;
  target: string;
  reason: string;
  charging: boolean;
}

export interface RejectedPayload {
  t: number;
  topic: string;
  error: string;
}

const num = (x: unknown): x is number => typeof x === "number" && Number.isFinite(x);
const obj = (x: unknown): x is Record<string, unknown> =>
  typeof x === "object" && x !== null && !Array.isArray(x);

export function isReading(p: unknown): p is ElectricalReading {
  return obj(p) && num(p.t) && num(p.p) && num(p.pf) && num(p.v) && num(p.i);
}

export function isBattery(p: unknown): p is BatteryTelemetry {
  return obj(p) && num(p.t) && num(p.soc) && num(p.v) && Array.isArray(p.alarms);
}

export function isRelays(p: unknown): p is RelayPositions {
  return (
    obj(p) &&
    typeof p.relay4_load_source === "string" &&
    typeof p.relay6_battery_path === "string" &&
    typeof p.external_dc_relay === "string"
  );
}

export function isSnapshot(p: unknown): p is Snapshot {
  return (
    obj(p) &&
    num(p.t) &&
    typeof p.em === "boolean" &&
    (p.mode === 0 || p.mode === 1 || p.mode === 2) &&
    num(p.threshold_w) &&
    isRelays(p.relays)
  );
}

export function isDecision(p: unknown): p is DecisionPayload {
  return obj(p) && num(p.t) && typeof p.target === "string" && typeof p.reason === "string";
}

export function isRejection(p: unknown): p is RejectedPayload {
  return obj(p) && typeof p.topic === "string" && typeof p.error === "string";
}
