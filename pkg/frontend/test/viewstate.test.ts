import { describe, expect, it } from "vitest";

import type { Pose7, ServerMessage } from "../src/protocol.js";
import { encode, decode } from "../src/protocol.js";
import { applyServerMessage, initialView, FORCE_WINDOW_S } from "../src/viewstate.js";

const POSE: Pose7 = [0.1, 0.2, 0.3, 1, 0, 0, 0];

function stateMsg(t: number, wrench: number[] = [0, 0, 0, 0, 0, 0]): ServerMessage {
  return {
    type: "state",
    t,
    ee_pose: POSE,
    peg_pose: POSE,
    object_pose: POSE,
    wrench,
    phase: "Following",
    alpha: 1,
    max_force: 2.5,
  };
}

describe("applyServerMessage", () => {
  it("appends state wrenches to the force history", () => {
    const view = initialView();
    applyServerMessage(view, stateMsg(0.1));
    expect(view.forceHistory).toHaveLength(1);
    expect(view.forceHistory[0].wrench).toEqual([0, 0, 0, 0, 0, 0]);
    expect(view.phase).toBe("Following");
    expect(view.alpha).toBe(1);
  });

  it("keeps the force window bounded to the last 10 seconds", () => {
    const view = initialView();
    for (let i = 0; i < 600; i++) {
      applyServerMessage(view, stateMsg(i * 0.05, [i, 0, 0, 0, 0, 0]));
    }
    const tEnd = view.forceHistory[view.forceHistory.length - 1].t;
    expect(view.forceHistory[0].t).toBeGreaterThanOrEqual(tEnd - FORCE_WINDOW_S);
    expect(view.forceHistory.length).toBeLessThanOrEqual(201);
  });

  it("fills the final-pose panel on teach_done", () => {
    const view = initialView();
    applyServerMessage(view, { type: "teach_done", dfp: POSE, duration: 21.5 });
    expect(view.phase).toBe("Finished");
    expect(view.dfp).toHaveLength(7);
    expect(view.teachDuration).toBe(21.5);
  });

  it("ignores out-of-order acks", () => {
    const view = initialView();
    applyServerMessage(view, { type: "ack", seq: 5 });
    applyServerMessage(view, { type: "ack", seq: 3 });
    expect(view.lastAck).toBe(5);
  });

  it("surfaces errors as toasts and logs unknown tags without changing state", () => {
    const view = initialView();
    const before = JSON.stringify({ ...view, toasts: [], unknownTags: [] });
    applyServerMessage(view, { type: "error", code: "wrong_phase", detail: "nope" });
    expect(view.toasts).toEqual(["wrong_phase: nope"]);
    applyServerMessage(view, { type: "mystery" } as unknown as ServerMessage);
    expect(view.unknownTags).toEqual(["mystery"]);
    const after = JSON.stringify({ ...view, toasts: [], unknownTags: [] });
    expect(after).toBe(before);
  });

  it("replaying the same stream reproduces the identical view", () => {
    const stream: ServerMessage[] = [
      stateMsg(0.1, [1, 2, 3, 0, 0, 0]),
      { type: "ack", seq: 1 },
      stateMsg(0.2, [2, 2, 3, 0, 0, 0]),
      { type: "teach_done", dfp: POSE, duration: 9 },
    ];
    const a = stream.reduce(applyServerMessage, initialView());
    const b = stream.reduce(applyServerMessage, initialView());
    expect(JSON.stringify(a)).toBe(JSON.stringify(b));
  });
});

describe("protocol encoding", () => {
  it("is canonical: sorted keys, no whitespace", () => {
    expect(encode({ type: "drag_object", pose: [1, 2, 3, 1, 0, 0, 0] })).toBe(
      '{"pose":[1,2,3,1,0,0,0],"type":"drag_object"}',
    );
    expect(encode({ type: "hello" })).toBe('{"type":"hello"}');
  });

  it("decodes tagged frames and rejects junk", () => {
    expect(decode('{"type":"ack","seq":4}')).toEqual({ type: "ack", seq: 4 });
    expect(decode("not json")).toBeNull();
    expect(decode('{"no": "tag"}')).toBeNull();
  });
});
