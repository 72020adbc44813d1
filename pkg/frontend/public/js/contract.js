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
const num = (x) => typeof x === "number" && Number.isFinite(x);
const obj = (x) => typeof x === "object" && x !== null && !Array.isArray(x);
export function isReading(p) {
    return obj(p) && num(p.t) && num(p.p) && num(p.pf) && num(p.v) && num(p.i);
}
export function isBattery(p) {
    return obj(p) && num(p.t) && num(p.soc) && num(p.v) && Array.isArray(p.alarms);
}
export function isRelays(p) {
    return (obj(p) &&
        typeof p.relay4_load_source === "string" &&
        typeof p.relay6_battery_path === "string" &&
        typeof p.external_dc_relay === "string");
}
export function isSnapshot(p) {
    return (obj(p) &&
        num(p.t) &&
        typeof p.em === "boolean" &&
        (p.mode === 0 || p.mode === 1 || p.mode === 2) &&
        num(p.threshold_w) &&
        isRelays(p.relays));
}
export function isDecision(p) {
    return obj(p) && num(p.t) && typeof p.target === "string" && typeof p.reason === "string";
}
export function isRejection(p) {
    return obj(p) && typeof p.topic === "string" && typeof p.error === "string";
}
