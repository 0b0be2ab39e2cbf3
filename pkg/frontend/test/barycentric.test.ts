import { describe, expect, it } from "vitest";

import { project, triangleInBox } from "../src/barycentric.js";

describe("barycentric projection", () => {
  const tri = triangleInBox(40, 40, 560, 360);

  it("maps one-hot corners onto the vertices", () => {
    expect(project(tri, 1, 0, 0)).toEqual(tri.v1);
    expect(project(tri, 0, 1, 0)).toEqual(tri.v2);
    expect(project(tri, 0, 0, 1)).toEqual(tri.v3);
  });

  it("maps the uniform point to the centroid", () => {
    const p = project(tri, 1 / 3, 1 / 3, 1 / 3);
    expect(p.x).toBeCloseTo((tri.v1.x + tri.v2.x + tri.v3.x) / 3, 9);
    expect(p.y).toBeCloseTo((tri.v1.y + tri.v2.y + tri.v3.y) / 3, 9);
  });

  it("builds an equilateral triangle", () => {
    const side = (a: { x: number; y: number }, b: { x: number; y: number }) =>
      Math.hypot(a.x - b.x, a.y - b.y);
    const s12 = side(tri.v1, tri.v2);
    const s23 = side(tri.v2, tri.v3);
    const s31 = side(tri.v3, tri.v1);
    expect(s12).toBeCloseTo(s23, 9);
    expect(s23).toBeCloseTo(s31, 9);
  });
});
