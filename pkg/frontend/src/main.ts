// Page wiring: one WebSocket, two scene canvases, the force chart, the
// command buttons, and the teaching timer.

import { encode, decode, type ClientMessage, type Pose7 } from "./protocol.js";
import { applyServerMessage, initialView, type ViewState } from "./viewstate.js";
import { DragCommander, type ViewMapping, type Workspace } from "./unproject.js";
import { drawForceChart } from "./chart.js";
import { drawTopView, drawSideView, type SceneGeometry } from "./scene2d.js";

const view: ViewState = initialView();

const topCanvas = document.getElementById("top-view") as HTMLCanvasElement;
const sideCanvas = document.getElementById("side-view") as HTMLCanvasElement;
const chartCanvas = document.getElementById("force-chart") as HTMLCanvasElement;

const TOP_MAP: ViewMapping = {
  plane: "xy",
  scale: 1200,
  originPx: { x: topCanvas.width / 2, y: topCanvas.height / 2 },
  flip: { x: 1, y: 1 },
};
const SIDE_MAP: ViewMapping = {
  plane: "xz",
  scale: 1200,
  // z grows downward into the material, matching screen y
  originPx: { x: sideCanvas.width / 2, y: sideCanvas.height * 0.55 },
  flip: { x: 1, y: 1 },
};

let workspace: Workspace = { min: [-0.5, -0.5, -0.5], max: [0.5, 0.5, 0.05] };
let geometry: SceneGeometry = {
  holeRadius: 0.0155,
  pegRadius: 0.015,
  chamferWidth: 0.0012,
  holeDepth: 0.02,
  holeCenter: [0, 0, 0],
};
const commander = new DragCommander(workspace);

const ws = new WebSocket(`ws://${location.host}/ws`);
ws.onopen = () => {
  view.connected = true;
  send({ type: "hello" });
};
ws.onclose = () => {
  view.connected = false;
};
ws.onmessage = (ev: MessageEvent<string>) => {
  const msg = decode(ev.data);
  if (msg === null) return;
  if (msg.type === "state" && view.phase !== "Following") {
    commander.syncPose(msg.object_pose);
  }
  applyServerMessage(view, msg);
  render();
};

function send(msg: ClientMessage): void {
  if (ws.readyState === WebSocket.OPEN) ws.send(encode(msg));
}

fetch("/config")
  .then((r) => r.json())
  .then((cfg) => {
    const scene = cfg.scene;
    geometry = {
      holeRadius: scene.hole_radius,
      pegRadius: scene.peg_radius,
      chamferWidth: scene.chamfer_width,
      holeDepth: scene.hole_depth,
      holeCenter: [scene.hole_pose[0], scene.hole_pose[1], scene.hole_pose[2]],
    };
    workspace = { min: cfg.box.q_min.slice(0, 3), max: cfg.box.q_max.slice(0, 3) };
  })
  .catch(() => undefined);

function bindButton(id: string, make: () => ClientMessage): void {
  const el = document.getElementById(id);
  if (el) el.addEventListener("click", () => send(make()));
}

bindButton("btn-dgp", () => ({ type: "capture_dgp" }));
bindButton("btn-dvsp", () => ({ type: "capture_dvsp" }));
bindButton("btn-follow", () => ({ type: "start_follow" }));
bindButton("btn-finish", () => ({ type: "finish_teaching" }));
bindButton("btn-train", () => ({ type: "start_training", seed: 7 }));
bindButton("btn-exec", () => ({
  type: "start_execution",
  method: "rrrl",
  group: "uncertainty",
  trials: 20,
}));
bindButton("btn-abort", () => ({ type: "abort" }));

function hookDrag(canvas: HTMLCanvasElement, map: ViewMapping): void {
  let down = false;
  canvas.addEventListener("pointerdown", (ev) => {
    down = true;
    canvas.setPointerCapture(ev.pointerId);
  });
  canvas.addEventListener("pointerup", () => {
    down = false;
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (!down) return;
    const rect = canvas.getBoundingClientRect();
    const result = commander.drag(map, ev.clientX - rect.left, ev.clientY - rect.top, view.phase);
    if (result.message) send(result.message);
    const flag = document.getElementById("clamp-flag");
    if (flag) flag.textContent = result.clamped ? "clamped to workspace" : "";
  });
}

hookDrag(topCanvas, TOP_MAP);
hookDrag(sideCanvas, SIDE_MAP);

function setText(id: string, text: string): void {
  const el = document.getElementById(id);
  if (el) el.textContent = text;
}

function render(): void {
  setText("phase-badge", view.phase);
  setText("alpha-badge", view.alpha ? "learned arm" : "fixed arm");
  setText("conn-badge", view.connected ? "connected" : "offline");
  setText("timer", view.phase === "Following" ? `${view.t.toFixed(1)} s` : "");
  setText("max-force", `${view.maxForce.toFixed(1)} N`);
  if (view.dfp) {
    setText("dfp-panel", view.dfp.map((v) => v.toFixed(4)).join(", "));
    setText("duration", view.teachDuration !== null ? `${view.teachDuration.toFixed(1)} s` : "");
  }
  if (view.trainEpisode !== null) {
    setText(
      "train-progress",
      `episode ${view.trainEpisode}, success ${(100 * (view.trainSuccessRate ?? 0)).toFixed(0)} %`,
    );
  }
  if (view.policyPath) setText("policy-path", view.policyPath);
  if (view.execReport) setText("exec-report", view.execReport);
  const toasts = document.getElementById("toasts");
  if (toasts) toasts.textContent = view.toasts.slice(-3).join("\n");

  const topCtx = topCanvas.getContext("2d");
  if (topCtx) {
    drawTopView(topCtx, TOP_MAP, geometry, view.objectPose as Pose7, view.pegPose as Pose7,
                topCanvas.width, topCanvas.height);
  }
  const sideCtx = sideCanvas.getContext("2d");
  if (sideCtx) {
    drawSideView(sideCtx, SIDE_MAP, geometry, view.objectPose as Pose7, view.pegPose as Pose7,
                 view.eePose as Pose7, sideCanvas.width, sideCanvas.height);
  }
  const chartCtx = chartCanvas.getContext("2d");
  if (chartCtx) {
    drawForceChart(chartCtx, view.forceHistory, chartCanvas.width, chartCanvas.height);
  }
}

render();
