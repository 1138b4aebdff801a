// Replays a recorded pointer-event script through the real drag logic and
// prints the resulting drag_object messages as JSON lines, one per emitted
// command, each prefixed with its event time.
//
// Usage: node dist/tools/pointer_to_drag.js < pointer_script.json
//
// Script format:
// {
//   "workspace": {"min": [..3], "max": [..3]},
//   "views": {"top": ViewMapping, "side": ViewMapping},
//   "start_pose": [..7],
//   "events": [{"t": s, "view": "top"|"side", "x": px, "y": px}]
// }

import { readFileSync } from "node:fs";
import { DragCommander, type ViewMapping, type Workspace } from "../src/unproject.js";
import type { Pose7 } from "../src/protocol.js";

interface PointerEventRow {
  t: number;
  view: "top" | "side";
  x: number;
  y: number;
}

interface PointerScript {
  workspace: Workspace;
  views: { top: ViewMapping; side: ViewMapping };
  start_pose: Pose7;
  events: PointerEventRow[];
}

const script: PointerScript = JSON.parse(readFileSync(0, "utf-8"));

let clockNow = 0;
const commander = new DragCommander(script.workspace, () => clockNow);
commander.syncPose(script.start_pose);

const out: string[] = [];
for (const ev of script.events) {
  clockNow = ev.t;
  const map = script.views[ev.view];
  const result = commander.drag(map, ev.x, ev.y, "Following");
  if (result.message) {
    out.push(JSON.stringify({ t: ev.t, message: result.message }));
  }
}
process.stdout.write(out.join("\n") + "\n");
