// Tiny canvas charts, no chart library. Two widgets:
//  - rolling strip chart: grid W + load W on the left axis, SoC % on a
//    fixed 0-100 right axis, shared time window
//  - power factor arc gauge

import { HistoryRow } from "./state.js";

export interface StripColors {
  grid: string;
  load: string;
  soc: string;
  axis: string;
  gridline: string;
}

const PAD_L = 46;
const PAD_R = 40;
const PAD_T = 10;
const PAD_B = 20;

function px(canvas: HTMLCanvasElement): { w: number; h: number } {
  return { w: canvas.width, h: canvas.height };
}

export function drawStripChart(
  canvas: HTMLCanvasElement,
  rows: HistoryRow[],
  colors: StripColors,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { w, h } = px(canvas);
  ctx.clearRect(0, 0, w, h);
  const plotW = w - PAD_L - PAD_R;
  const plotH = h - PAD_T - PAD_B;
  if (rows.length < 2 || plotW <= 0 || plotH <= 0) {
    ctx.fillStyle = colors.axis;
    ctx.font = "12px sans-serif";
    ctx.fillText("waiting for telemetry", PAD_L, h / 2);
    return;
  }

  const t0 = rows[0]!.t;
  const t1 = rows[rows.length - 1]!.t;
  const span = Math.max(t1 - t0, 1);
  let pMax = 100;
  for (const r of rows) {
    if (r.grid_w !== null && r.grid_w > pMax) pMax = r.grid_w;
    if (r.load_w !== null && r.load_w > pMax) pMax = r.load_w;
  }
  pMax *= 1.1;

  const x = (t: number) => PAD_L + ((t - t0) / span) * plotW;
  const yPow = (p: number) => PAD_T + plotH - (p / pMax) * plotH;
  const ySoc = (s: number) => PAD_T + plotH - (s / 100) * plotH;

  // horizontal gridlines at quarter marks
  ctx.strokeStyle = colors.gridline;
  ctx.lineWidth = 1;
  for (let q = 0; q <= 4; q++) {
    const y = PAD_T + (plotH * q) / 4;
    ctx.beginPath();
    ctx.moveTo(PAD_L, y);
    ctx.lineTo(w - PAD_R, y);
    ctx.stroke();
  }

  const trace = (
    pick: (r: HistoryRow) => number | null,
    yOf: (v: number) => number,
    color: string,
  ) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let pen = false;
    for (const r of rows) {
      const v = pick(r);
      if (v === null) {
        pen = false; // gap in the series, lift the pen
        continue;
      }
      const xx = x(r.t);
      const yy = yOf(v);
      if (pen) ctx.lineTo(xx, yy);
      else ctx.moveTo(xx, yy);
      pen = true;
    }
    ctx.stroke();
  };

  trace((r) => r.grid_w, yPow, colors.grid);
  trace((r) => r.load_w, yPow, colors.load);
  trace((r) => r.soc, ySoc, colors.soc);

  // axis labels
  ctx.fillStyle = colors.axis;
  ctx.font = "10px sans-serif";
  ctx.textAlign = "right";
  for (let q = 0; q <= 4; q++) {
    const y = PAD_T + (plotH * q) / 4 + 3;
    ctx.fillText(`${Math.round((pMax * (4 - q)) / 4)}`, PAD_L - 4, y);
  }
  ctx.textAlign = "left";
  for (let q = 0; q <= 4; q++) {
    const y = PAD_T + (plotH * q) / 4 + 3;
    ctx.fillText(`${Math.round((100 * (4 - q)) / 4)}%`, w - PAD_R + 4, y);
  }
  ctx.textAlign = "center";
  const mins = span / 60;
  ctx.fillText(`${mins.toFixed(mins < 2 ? 1 : 0)} min window`, PAD_L + plotW / 2, h - 5);
  ctx.textAlign = "start";
}

export function drawGauge(
  canvas: HTMLCanvasElement,
  value: number | null,
  label: string,
  color: string,
  axis: string,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { w, h } = px(canvas);
  ctx.clearRect(0, 0, w, h);
  const cx = w / 2;
  const cy = h - 12;
  const r = Math.min(w / 2 - 8, h - 26);

  ctx.lineWidth = 8;
  ctx.lineCap = "round";
  ctx.strokeStyle = axis;
  ctx.beginPath();
  ctx.arc(cx, cy, r, Math.PI, 2 * Math.PI);
  ctx.stroke();

  if (value !== null) {
    const frac = Math.max(0, Math.min(1, value));
    ctx.strokeStyle = color;
    ctx.beginPath();
    ctx.arc(cx, cy, r, Math.PI, Math.PI * (1 + frac));
    ctx.stroke();
  }

  ctx.fillStyle = axis;
  ctx.font = "bold 16px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(value === null ? "--" : value.toFixed(2), cx, cy - r / 3);
  ctx.font = "10px sans-serif";
  ctx.fillText(label, cx, cy - 2);
  ctx.textAlign = "start";
}
