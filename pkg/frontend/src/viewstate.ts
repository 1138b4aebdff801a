// Server-authoritative view model: the page renders exactly what the bridge
// broadcast, never client-side physics. Replaying the same message stream
// reproduces the identical view.

import type { Pose7, ServerMessage, StateMessage } from "./protocol.js";

export const FORCE_WINDOW_S = 10;

export interface ForceSample {
  t: number;
  wrench: number[];
}

export interface ViewState {
  connected: boolean;
  phase: string;
  alpha: number;
  t: number;
  eePose: Pose7;
  pegPose: Pose7;
  objectPose: Pose7;
  maxForce: number;
  forceHistory: ForceSample[];
  lastAck: number;
  dfp: Pose7 | null;
  teachDuration: number | null;
  trainEpisode: number | null;
  trainSuccessRate: number | null;
  policyPath: string | null;
  execReport: string | null;
  toasts: string[];
  unknownTags: string[];
}

const IDENTITY: Pose7 = [0, 0, 0, 1, 0, 0, 0];

export function initialView(): ViewState {
  return {
    connected: false,
    phase: "Idle",
    alpha: 0,
    t: 0,
    eePose: IDENTITY,
    pegPose: IDENTITY,
    objectPose: IDENTITY,
    maxForce: 0,
    forceHistory: [],
    lastAck: 0,
    dfp: null,
    teachDuration: null,
    trainEpisode: null,
    trainSuccessRate: null,
    policyPath: null,
    execReport: null,
    toasts: [],
    unknownTags: [],
  };
}

function appendForce(view: ViewState, sample: ForceSample): void {
  view.forceHistory.push(sample);
  const cutoff = sample.t - FORCE_WINDOW_S;
  while (view.forceHistory.length > 0 && view.forceHistory[0].t < cutoff) {
    view.forceHistory.shift();
  }
}

function applyState(view: ViewState, msg: StateMessage): void {
  view.phase = msg.phase;
  view.alpha = msg.alpha;
  view.t = msg.t;
  view.eePose = msg.ee_pose;
  view.pegPose = msg.peg_pose;
  view.objectPose = msg.object_pose;
  view.maxForce = msg.max_force;
  appendForce(view, { t: msg.t, wrench: msg.wrench });
}

/** Fold one server message into the view (mutates and returns it). */
export function applyServerMessage(view: ViewState, msg: ServerMessage): ViewState {
  switch (msg.type) {
    case "state":
      applyState(view, msg);
      break;
    case "progress":
      view.trainEpisode = msg.episode;
      view.trainSuccessRate = msg.success_rate;
      break;
    case "teach_done":
      view.phase = "Finished";
      view.dfp = msg.dfp;
      view.teachDuration = msg.duration;
      break;
    case "train_done":
      view.policyPath = msg.policy_path;
      break;
    case "exec_done":
      view.execReport =
        `${msg.report.method}/${msg.report.group}: ` +
        `${msg.report.successes}/${msg.report.trials} ` +
        `(max |F| ${msg.report.max_force_overall.toFixed(1)} N)`;
      break;
    case "error":
      view.toasts.push(`${msg.code}: ${msg.detail}`);
      break;
    case "ack":
      // out-of-order or duplicate acks are ignored (idempotent)
      if (msg.seq > view.lastAck) view.lastAck = msg.seq;
      break;
    default: {
      const tag = (msg as { type?: string }).type ?? "<untagged>";
      view.unknownTags.push(tag);
      break;
    }
  }
  return view;
}
