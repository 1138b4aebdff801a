// Two orthographic scene views: top (x-y) and side (x-z). The planar
// insertion scene needs no 3D; the pair disambiguates height.

import type { Pose7 } from "./protocol.js";
import { worldToPointer, type ViewMapping } from "./unproject.js";

export interface SceneGeometry {
  holeRadius: number;
  pegRadius: number;
  chamferWidth: number;
  holeDepth: number;
  holeCenter: [number, number, number];
}

function circle(ctx: CanvasRenderingContext2D, x: number, y: number, r: number): void {
  ctx.beginPath();
  ctx.arc(x, y, r, 0, 2 * Math.PI);
}

export function drawTopView(
  ctx: CanvasRenderingContext2D,
  map: ViewMapping,
  geo: SceneGeometry,
  objectPose: Pose7,
  pegPose: Pose7,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#1a2230";
  ctx.fillRect(0, 0, width, height);

  const hole = worldToPointer(map, geo.holeCenter[0], geo.holeCenter[1]);
  ctx.strokeStyle = "#8af";
  circle(ctx, hole.x, hole.y, (geo.holeRadius + geo.chamferWidth) * map.scale);
  ctx.stroke();
  ctx.strokeStyle = "#adf";
  circle(ctx, hole.x, hole.y, geo.holeRadius * map.scale);
  ctx.stroke();

  const obj = worldToPointer(map, objectPose[0], objectPose[1]);
  ctx.fillStyle = "rgba(240,180,60,0.35)";
  ctx.strokeStyle = "#fb4";
  circle(ctx, obj.x, obj.y, geo.pegRadius * map.scale);
  ctx.fill();
  ctx.stroke();

  const peg = worldToPointer(map, pegPose[0], pegPose[1]);
  ctx.strokeStyle = "#6e6";
  circle(ctx, peg.x, peg.y, geo.pegRadius * map.scale * 0.9);
  ctx.stroke();
}

export function drawSideView(
  ctx: CanvasRenderingContext2D,
  map: ViewMapping,
  geo: SceneGeometry,
  objectPose: Pose7,
  pegPose: Pose7,
  eePose: Pose7,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#1a2230";
  ctx.fillRect(0, 0, width, height);

  // plate cross-section: surface at z = hole z, bore opening around the axis
  const surf = worldToPointer(map, geo.holeCenter[0], geo.holeCenter[2]).y;
  const left = worldToPointer(map, geo.holeCenter[0] - geo.holeRadius, 0).x;
  const right = worldToPointer(map, geo.holeCenter[0] + geo.holeRadius, 0).x;
  const bottom = worldToPointer(map, 0, geo.holeCenter[2] + geo.holeDepth).y;
  ctx.fillStyle = "#30405a";
  ctx.fillRect(0, surf, left, height - surf);
  ctx.fillRect(right, surf, width - right, height - surf);
  ctx.fillRect(left, bottom, right - left, height - bottom);

  // peg as a rectangle standing on its tip point
  const peg = worldToPointer(map, pegPose[0], pegPose[2]);
  const w = geo.pegRadius * map.scale;
  ctx.fillStyle = "rgba(120,220,120,0.5)";
  ctx.fillRect(peg.x - w, peg.y - 3 * w, 2 * w, 3 * w);

  const obj = worldToPointer(map, objectPose[0], objectPose[2]);
  ctx.strokeStyle = "#fb4";
  ctx.strokeRect(obj.x - w, obj.y - 3 * w, 2 * w, 3 * w);

  const ee = worldToPointer(map, eePose[0], eePose[2]);
  ctx.fillStyle = "#8af";
  ctx.fillRect(ee.x - 4, ee.y - 4, 8, 8);
}
