// Barycentric geometry for the triangle knob, mirroring the server's
// area-coordinate mapping so weights can be displayed before the response
// arrives.

export type Point = [number, number];
export type Triangle = [Point, Point, Point];

function signedArea(a: Point, b: Point, c: Point): number {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

export function areaCoordinates(p: Point, tri: Triangle): [number, number, number] {
  const [v1, v2, v3] = tri;
  const total = signedArea(v1, v2, v3);
  if (total === 0) throw new Error('degenerate triangle');
  return [
    signedArea(p, v2, v3) / total,
    signedArea(v1, p, v3) / total,
    signedArea(v1, v2, p) / total,
  ];
}

export function fromAreaCoordinates(w: [number, number, number], tri: Triangle): Point {
  return [
    w[0] * tri[0][0] + w[1] * tri[1][0] + w[2] * tri[2][0],
    w[0] * tri[0][1] + w[1] * tri[1][1] + w[2] * tri[2][1],
  ];
}

// Linear pixel <-> domain mapping for a view axis.
export class Scale {
  constructor(
    public domainMin: number,
    public domainMax: number,
    public pixelMin: number,
    public pixelMax: number,
  ) {}

  toPixel(v: number): number {
    const t = (v - this.domainMin) / (this.domainMax - this.domainMin);
    return this.pixelMin + t * (this.pixelMax - this.pixelMin);
  }

  toDomain(px: number): number {
    const t = (px - this.pixelMin) / (this.pixelMax - this.pixelMin);
    return this.domainMin + t * (this.domainMax - this.domainMin);
  }
}
