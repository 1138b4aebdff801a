// Bridge wire protocol: compact JSON text frames over one WebSocket.

export type Pose7 = [number, number, number, number, number, number, number];

export interface StateMessage {
  type: "state";
  t: number;
  ee_pose: Pose7;
  peg_pose: Pose7;
  object_pose: Pose7;
  wrench: number[];
  phase: string;
  alpha: number;
  max_force: number;
}

export interface ProgressMessage {
  type: "progress";
  episode: number;
  return: number;
  success_rate: number;
}

export interface TeachDoneMessage {
  type: "teach_done";
  dfp: Pose7;
  duration: number;
}

export interface TrainDoneMessage {
  type: "train_done";
  policy_path: string;
}

export interface ExecDoneMessage {
  type: "exec_done";
  report: {
    method: string;
    group: string;
    successes: number;
    trials: number;
    max_force_overall: number;
  };
}

export interface ErrorMessage {
  type: "error";
  code: string;
  detail: string;
}

export interface AckMessage {
  type: "ack";
  seq: number;
}

export type ServerMessage =
  | StateMessage
  | ProgressMessage
  | TeachDoneMessage
  | TrainDoneMessage
  | ExecDoneMessage
  | ErrorMessage
  | AckMessage;

export interface DragObjectMessage {
  type: "drag_object";
  pose: Pose7;
}

export type ClientMessage =
  | { type: "hello" }
  | { type: "capture_dgp" }
  | { type: "capture_dvsp" }
  | { type: "start_follow" }
  | DragObjectMessage
  | { type: "finish_teaching" }
  | { type: "start_training"; seed: number; episodes?: number }
  | { type: "start_execution"; method: string; group: string; trials: number }
  | { type: "abort" };

/** Canonical encoding: sorted keys, no whitespace (matches the bridge). */
export function encode(msg: ClientMessage): string {
  const obj = msg as Record<string, unknown>;
  const keys = Object.keys(obj).sort();
  const parts = keys.map((k) => `${JSON.stringify(k)}:${JSON.stringify(obj[k])}`);
  return `{${parts.join(",")}}`;
}

export function decode(raw: string): ServerMessage | null {
  try {
    const msg = JSON.parse(raw);
    if (msg && typeof msg.type === "string") return msg as ServerMessage;
  } catch {
    /* fall through */
  }
  return null;
}
