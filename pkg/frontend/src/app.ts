// Dashboard entry point. One page, three panels: battery monitoring,
// power sensing, relay control. All DOM writes happen in render(),
// which reads nothing but the UiState it is handed.

import { BridgeClient } from "./client.js";
import { drawGauge, drawStripChart } from "./charts.js";
import {
  MODE_NAMES,
  UiCommand,
  UiState,
  armEstop,
  banner,
  beginCommand,
  disarmEstop,
  expirePending,
  initialState,
  noteError,
  reduceConnection,
  reduceFrame,
} from "./state.js";

const $ = <T extends HTMLElement = HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let state: UiState = initialState();

const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
const client = new BridgeClient(wsUrl, {
  onFrame: (frame) => dispatch((s) => reduceFrame(s, frame)),
  onStatus: (status) => dispatch((s) => reduceConnection(s, status)),
  onGarbage: () => dispatch(noteError),
});

function dispatch(fn: (s: UiState) => UiState): void {
  const next = fn(state);
  if (next !== state) {
    state = next;
    render(state);
  }
}

function sendCommand(command: UiCommand): void {
  dispatch((s) => {
    const result = beginCommand(s, command, Date.now());
    if (result.frame) {
      if (!client.send(result.frame)) {
        // socket died between the status event and the click
        return { ...s, notice: "send failed, not connected" };
      }
    }
    return result.state;
  });
}

function fmt(x: number | null | undefined, digits = 1, unit = ""): string {
  if (x === null || x === undefined) return "--";
  return `${x.toFixed(digits)}${unit}`;
}

function render(s: UiState): void {
  // banner + connection pill
  const bannerEl = $("banner");
  const text = banner(s);
  bannerEl.textContent = text ?? "";
  bannerEl.className = text
    ? s.snapshot?.em || s.pending?.command.kind === "estop"
      ? "banner banner-em"
      : "banner banner-warn"
    : "banner banner-hidden";

  const pill = $("conn-pill");
  pill.textContent = s.connection;
  pill.className = `pill pill-${s.connection}`;

  // battery panel
  const snap = s.snapshot;
  $("soc-big").textContent = fmt(snap?.soc, 1, "%");
  $("batt-v").textContent = fmt(s.battery?.v, 2, " V");
  $("batt-i").textContent = fmt(s.battery?.i, 1, " A");
  $("batt-temp").textContent = fmt(s.battery?.temp, 1, " C");
  $("batt-soh").textContent = fmt(s.battery?.soh, 0, "%");
  $("batt-alarms").textContent =
    s.battery && s.battery.alarms.length ? s.battery.alarms.join(", ") : "none";

  // power panel
  $("grid-w").textContent = fmt(snap?.grid_w, 1, " W");
  $("load-w").textContent = fmt(snap?.load_w, 1, " W");
  $("threshold-now").textContent = fmt(snap?.threshold_w, 0, " W");
  drawGauge(
    $("pf-grid") as HTMLCanvasElement,
    snap?.pf_grid ?? null,
    "grid PF",
    "#e0a43c",
    "#6b7280",
  );
  drawGauge(
    $("pf-load") as HTMLCanvasElement,
    snap?.pf_load ?? null,
    "load PF",
    "#4cc38a",
    "#6b7280",
  );
  drawStripChart($("strip") as HTMLCanvasElement, s.history, {
    grid: "#e0a43c",
    load: "#4cc38a",
    soc: "#629cf8",
    axis: "#9ca3af",
    gridline: "#2b3242",
  });

  // relay panel
  const relays = snap?.relays ?? s.relays;
  $("relay4").textContent = relays?.relay4_load_source ?? "--";
  $("relay5").textContent = relays?.relay5_ups_source ?? "--";
  $("relay6").textContent = relays?.relay6_battery_path ?? "--";
  $("relay-ext").textContent = relays?.external_dc_relay ?? "--";
  $("feed-word").textContent = s.relays?.mode ?? "--";
  $("decision-reason").textContent = s.lastDecision
    ? `${s.lastDecision.target} (${s.lastDecision.reason})`
    : (snap?.last_reason ?? "--");
  $("mode-word").textContent = snap ? (MODE_NAMES[snap.mode] ?? "?") : "--";

  // controls
  const busy = s.pending !== null || s.connection !== "connected";
  for (const [id, mode] of [["btn-auto", 0], ["btn-batt", 1], ["btn-grid", 2]] as const) {
    const b = $(id) as HTMLButtonElement;
    b.disabled = busy;
    b.classList.toggle("active-mode", snap?.mode === mode);
  }
  ($("btn-threshold") as HTMLButtonElement).disabled = busy;

  const estopBtn = $("btn-estop") as HTMLButtonElement;
  const armed = s.estopArmedUntilMs !== null;
  estopBtn.textContent = armed ? "CONFIRM E-STOP" : "EMERGENCY STOP";
  estopBtn.classList.toggle("armed", armed);
  estopBtn.disabled = busy || snap?.em === true;
  ($("btn-clear-estop") as HTMLButtonElement).disabled = busy || snap?.em !== true;

  $("pending").textContent = s.pending ? `waiting: ${s.pending.topic}` : "";
  $("notice").textContent = s.notice ?? "";
  $("rejection").textContent = s.lastRejection ? `rejected: ${s.lastRejection}` : "";
  const badge = $("err-badge");
  badge.textContent = String(s.errorCount);
  badge.className = s.errorCount > 0 ? "badge badge-bad" : "badge";
}

function wire(): void {
  $("btn-auto").onclick = () => sendCommand({ kind: "mode", mode: 0 });
  $("btn-batt").onclick = () => sendCommand({ kind: "mode", mode: 1 });
  $("btn-grid").onclick = () => sendCommand({ kind: "mode", mode: 2 });

  $("btn-threshold").onclick = () => {
    const input = $("threshold-input") as HTMLInputElement;
    sendCommand({ kind: "threshold", watts: Number(input.value) });
  };

  $("btn-estop").onclick = () => {
    if (state.estopArmedUntilMs !== null) {
      dispatch(disarmEstop);
      sendCommand({ kind: "estop", pressed: true });
    } else {
      dispatch((s) => armEstop(s, Date.now()));
    }
  };
  $("btn-clear-estop").onclick = () => sendCommand({ kind: "estop", pressed: false });

  // half-second housekeeping: pending timeout, e-stop arm lapse
  setInterval(() => dispatch((s) => expirePending(s, Date.now())), 500);

  client.start();
  render(state);
}

wire();
