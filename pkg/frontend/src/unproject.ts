// Pointer-to-world unprojection for the two orthographic views, and the
// rate-limited drag commander that turns pointer events into drag_object
// messages.

import type { DragObjectMessage, Pose7 } from "./protocol.js";

export interface ViewMapping {
  /** which world axes this view's (px, py) map to: "xy" (top) or "xz" (side) */
  plane: "xy" | "xz";
  /** pixels per meter */
  scale: number;
  /** pixel coordinates of the world origin in this view */
  originPx: { x: number; y: number };
  /** +1 or -1 per screen axis (screen y usually grows downward) */
  flip: { x: number; y: number };
}

export interface Workspace {
  min: [number, number, number];
  max: [number, number, number];
}

export interface WorldPoint {
  u: number; // first world axis of the plane
  v: number; // second world axis of the plane
}

export function pointerToWorld(map: ViewMapping, px: number, py: number): WorldPoint {
  return {
    u: ((px - map.originPx.x) * map.flip.x) / map.scale,
    v: ((py - map.originPx.y) * map.flip.y) / map.scale,
  };
}

export function worldToPointer(map: ViewMapping, u: number, v: number): { x: number; y: number } {
  return {
    x: map.originPx.x + u * map.scale * map.flip.x,
    y: map.originPx.y + v * map.scale * map.flip.y,
  };
}

export const DRAG_RATE_LIMIT_HZ = 30;

export interface DragResult {
  message: DragObjectMessage | null;
  clamped: boolean;
}

/**
 * Turns pointer positions into drag_object commands.
 *
 * Holds the full object pose and merges in the axes of whichever view the
 * pointer moved in; emits at most DRAG_RATE_LIMIT_HZ messages per second,
 * clamps to the workspace, and stays silent outside the Following/Idle
 * phases.
 */
export class DragCommander {
  private lastEmit = -Infinity;
  private pose: Pose7 = [0, 0, 0, 1, 0, 0, 0];

  constructor(
    private readonly workspace: Workspace,
    private readonly now: () => number = () => performance.now() / 1000,
  ) {}

  syncPose(pose: Pose7): void {
    this.pose = [...pose] as Pose7;
  }

  get currentPose(): Pose7 {
    return [...this.pose] as Pose7;
  }

  drag(map: ViewMapping, px: number, py: number, phase: string): DragResult {
    if (phase !== "Following" && phase !== "Idle") {
      return { message: null, clamped: false };
    }
    const w = pointerToWorld(map, px, py);
    const target: Pose7 = [...this.pose] as Pose7;
    if (map.plane === "xy") {
      target[0] = w.u;
      target[1] = w.v;
    } else {
      target[0] = w.u;
      target[2] = w.v;
    }
    let clamped = false;
    for (let i = 0; i < 3; i++) {
      const lo = this.workspace.min[i];
      const hi = this.workspace.max[i];
      if (target[i] < lo) {
        target[i] = lo;
        clamped = true;
      } else if (target[i] > hi) {
        target[i] = hi;
        clamped = true;
      }
    }
    this.pose = target;
    const t = this.now();
    if (t - this.lastEmit < 1 / DRAG_RATE_LIMIT_HZ) {
      return { message: null, clamped };
    }
    this.lastEmit = t;
    return { message: { type: "drag_object", pose: [...target] as Pose7 }, clamped };
  }
}
