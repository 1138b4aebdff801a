// Rolling force-trace chart (last 10 s of the six wrench channels).

import type { ForceSample } from "./viewstate.js";

const CHANNEL_COLORS = ["#d33", "#393", "#36c", "#d93", "#9c3", "#96c"];
const CHANNEL_NAMES = ["Fx", "Fy", "Fz", "Mx", "My", "Mz"];

export function drawForceChart(
  ctx: CanvasRenderingContext2D,
  history: ForceSample[],
  widthPx: number,
  heightPx: number,
  windowS = 10,
  rangeN = 20,
): void {
  ctx.clearRect(0, 0, widthPx, heightPx);
  ctx.fillStyle = "#111";
  ctx.fillRect(0, 0, widthPx, heightPx);
  ctx.strokeStyle = "#444";
  ctx.beginPath();
  ctx.moveTo(0, heightPx / 2);
  ctx.lineTo(widthPx, heightPx / 2);
  ctx.stroke();
  if (history.length < 2) return;

  const tEnd = history[history.length - 1].t;
  const toX = (t: number) => widthPx * (1 - (tEnd - t) / windowS);
  const toY = (f: number) => heightPx / 2 - (f / rangeN) * (heightPx / 2);

  for (let ch = 0; ch < 6; ch++) {
    ctx.strokeStyle = CHANNEL_COLORS[ch];
    ctx.beginPath();
    let started = false;
    for (const sample of history) {
      const x = toX(sample.t);
      if (x < 0) continue;
      const y = toY(sample.wrench[ch] ?? 0);
      if (started) ctx.lineTo(x, y);
      else {
        ctx.moveTo(x, y);
        started = true;
      }
    }
    ctx.stroke();
  }
  ctx.font = "11px monospace";
  for (let ch = 0; ch < 6; ch++) {
    ctx.fillStyle = CHANNEL_COLORS[ch];
    ctx.fillText(CHANNEL_NAMES[ch], 6 + ch * 34, 14);
  }
}
