/**
 * Standard 2-simplex projection: a probability triple maps to the
 * convex combination of an equilateral triangle's vertices, so the
 * one-hot corners land exactly on the vertices.
 */

export interface Point {
  x: number;
  y: number;
}

export interface Triangle {
  /** Vertex receiving all mass of component 1 (bottom left). */
  v1: Point;
  /** Vertex for component 2 (bottom right). */
  v2: Point;
  /** Vertex for component 3 (apex). */
  v3: Point;
}

/** Equilateral triangle inscribed in a pixel box, apex up. */
export function triangleInBox(
  left: number,
  top: number,
  width: number,
  height: number,
): Triangle {
  const side = Math.min(width, height / (Math.sqrt(3) / 2));
  const triHeight = (Math.sqrt(3) / 2) * side;
  const cx = left + width / 2;
  const bottom = top + (height + triHeight) / 2;
  return {
    v1: { x: cx - side / 2, y: bottom },
    v2: { x: cx + side / 2, y: bottom },
    v3: { x: cx, y: bottom - triHeight },
  };
}

/** Map (p1, p2, p3), summing to ~1, onto the triangle's plane. */
export function project(tri: Triangle, p1: number, p2: number, p3: number): Point {
  return {
    x: p1 * tri.v1.x + p2 * tri.v2.x + p3 * tri.v3.x,
    y: p1 * tri.v1.y + p2 * tri.v2.y + p3 * tri.v3.y,
  };
}
