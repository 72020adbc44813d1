// Pure UI state. Every mutation goes through the reducers here so the
// rendered page is a function of one object; the DOM layer and the
// tests share exactly the same logic.
//
// history is a ring of per-second rows merged by timestamp: the daemon
// publishes grid, load, and battery frames for the same tick, and one
// chart row holds all three. 900 rows = 15 minutes at 1 Hz.
import { CMD_ESTOP, CMD_MODE, CMD_REJECTED, CMD_THRESHOLD, STATE_DECISION, STATE_RELAYS, STATE_SNAPSHOT, TELEMETRY_BATTERY, TELEMETRY_GRID, TELEMETRY_LOAD, isBattery, isDecision, isReading, isRejection, isRelays, isSnapshot, } from "./contract.js";
export const HISTORY_LIMIT = 900; // 15 min at 1 s cadence
export const PENDING_TIMEOUT_MS = 5000;
export function initialState(historyLimit = HISTORY_LIMIT) {
    return {
        connection: "offline",
        snapshot: null,
        relays: null,
        battery: null,
        lastDecision: null,
        history: [],
        historyLimit,
        pending: null,
        errorCount: 0,
        lastRejection: null,
        notice: null,
        estopArmedUntilMs: null,
    };
}
function appendRow(state, t, patch) {
    let history = state.history;
    const last = history[history.length - 1];
    if (last && t === last.t) {
        history = [...history.slice(0, -1), { ...last, ...patch }];
    }
    else if (last && t < last.t) {
        // time went backwards: the daemon restarted, old rows are a lie
        history = [{ t, grid_w: null, load_w: null, soc: null, ...patch }];
    }
    else {
        history = [...history, { t, grid_w: null, load_w: null, soc: null, ...patch }];
        if (history.length > state.historyLimit) {
            history = history.slice(history.length - state.historyLimit);
        }
    }
    return { ...state, history };
}
function rejected(state) {
    return { ...state, errorCount: state.errorCount + 1 };
}
// Does this snapshot show the controller in the state the pending
// command asked for? That is the acknowledgment.
function acknowledges(pending, snap) {
    const c = pending.command;
    switch (c.kind) {
        case "mode":
            return snap.mode === c.mode;
        case "estop":
            return snap.em === c.pressed;
        case "threshold":
            return snap.threshold_w === c.watts;
    }
}
export function reduceMessage(state, topic, payload) {
    switch (topic) {
        case STATE_SNAPSHOT: {
            if (!isSnapshot(payload))
                return rejected(state);
            let next = { ...state, snapshot: payload };
            if (state.pending && acknowledges(state.pending, payload)) {
                next = { ...next, pending: null, notice: null };
            }
            return next;
        }
        case STATE_RELAYS: {
            if (!isRelays(payload))
                return rejected(state);
            return { ...state, relays: payload };
        }
        case STATE_DECISION: {
            if (!isDecision(payload))
                return rejected(state);
            return { ...state, lastDecision: payload };
        }
        case TELEMETRY_GRID: {
            if (!isReading(payload))
                return rejected(state);
            return appendRow(state, payload.t, { grid_w: payload.p });
        }
        case TELEMETRY_LOAD: {
            if (!isReading(payload))
                return rejected(state);
            return appendRow(state, payload.t, { load_w: payload.p });
        }
        case TELEMETRY_BATTERY: {
            if (!isBattery(payload))
                return rejected(state);
            const next = appendRow(state, payload.t, { soc: payload.soc });
            return { ...next, battery: payload };
        }
        case CMD_REJECTED: {
            if (!isRejection(payload))
                return rejected(state);
            let next = { ...state, lastRejection: payload.error };
            if (state.pending && state.pending.topic === payload.topic) {
                next = { ...next, pending: null };
            }
            return next;
        }
        default:
            // some other client's commands, future topics: not ours to judge
            return state;
    }
}
export function reduceFrame(state, frame) {
    return reduceMessage(state, frame.topic, frame.payload);
}
// Transport-level garbage (unparseable frame, frame without a topic)
export function noteError(state) {
    return rejected(state);
}
export function reduceConnection(state, status) {
    if (status === state.connection)
        return state;
    // a connection drop orphans any in-flight command
    const pending = status === "connected" ? state.pending : null;
    return { ...state, connection: status, pending };
}
// Drop the pending latch once it has outlived the ack window; also
// lets an armed e-stop confirm lapse.
export function expirePending(state, nowMs) {
    let next = state;
    if (next.estopArmedUntilMs !== null && nowMs >= next.estopArmedUntilMs) {
        next = { ...next, estopArmedUntilMs: null };
    }
    if (!next.pending)
        return next;
    if (nowMs - next.pending.sentAtMs < PENDING_TIMEOUT_MS)
        return next;
    return { ...next, pending: null, notice: "command timed out waiting for the controller" };
}
export const ESTOP_ARM_WINDOW_MS = 3000;
export function armEstop(state, nowMs) {
    return { ...state, estopArmedUntilMs: nowMs + ESTOP_ARM_WINDOW_MS };
}
export function disarmEstop(state) {
    if (state.estopArmedUntilMs === null)
        return state;
    return { ...state, estopArmedUntilMs: null };
}
// The single gate every operator gesture goes through. Refusals leave
// a visible notice and never produce a frame, so a button wired to
// this cannot double-send or fire while offline.
export function beginCommand(state, command, nowMs) {
    if (state.connection !== "connected") {
        return { state: { ...state, notice: "not connected: command not sent" }, frame: null };
    }
    if (state.pending) {
        return { state: { ...state, notice: "previous command still pending" }, frame: null };
    }
    let topic;
    let payload;
    switch (command.kind) {
        case "mode":
            topic = CMD_MODE;
            payload = { mode: command.mode };
            break;
        case "estop":
            topic = CMD_ESTOP;
            payload = { pressed: command.pressed };
            break;
        case "threshold":
            if (!(command.watts > 0)) {
                return { state: { ...state, notice: "threshold must be positive" }, frame: null };
            }
            topic = CMD_THRESHOLD;
            payload = { watts: command.watts };
            break;
    }
    return {
        state: {
            ...state,
            pending: { command, topic, sentAtMs: nowMs },
            notice: null,
            lastRejection: null,
        },
        frame: { topic, payload },
    };
}
// Banner text is derived, never stored: render purity. A just-sent
// e-stop shows the banner immediately, before the controller confirms.
export function banner(state) {
    if (state.snapshot?.em)
        return "EMERGENCY STOP ACTIVE: all relays de-energized";
    if (state.pending?.command.kind === "estop" && state.pending.command.pressed) {
        return "EMERGENCY STOP sent, waiting for the controller";
    }
    if (state.connection === "offline")
        return "offline: no connection to the controller";
    if (state.connection === "reconnecting")
        return "connection lost, reconnecting";
    return null;
}
export const MODE_NAMES = {
    0: "Auto",
    1: "Force Battery",
    2: "Force Grid",
};
