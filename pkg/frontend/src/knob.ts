// Three-instance morphing knob: a gray control dot dragged over (or beyond)
// a fixed triangle. Its barycentric weights size one circle per vertex —
// solid with radius ∝ w for positive weights, dashed and inverted ("bowl")
// for negative ones. Releasing the dot auditions /demo/morph with the
// current per-attribute weighting pattern; stale releases are abandoned via
// latest-wins scheduling.

import { ApiClient, PatternMask } from './api';
import { AuditionScheduler } from './audition';
import { areaCoordinates, Point, Scale, Triangle } from './geometry';
import { context2d, localX, localY } from './painter';

// unit triangle in domain space; only its shape matters for the weights
export const TRIANGLE: Triangle = [
  [0, 0],
  [1, 0],
  [0.5, Math.sqrt(3) / 2],
];

export type AttributeKey = 'tx' | 'fx' | 'sl' | 'fo' | 'ap';
export const ATTRIBUTES: AttributeKey[] = ['tx', 'fx', 'sl', 'fo', 'ap'];

export interface SphereModel {
  vertex: number;
  w: number;
  radius: number; // pixels, ∝ |w|
  bowl: boolean; // negative weight: dashed inverted rendering
}

export interface KnobModel {
  point: Point; // domain coordinates
  weights: [number, number, number];
  spheres: SphereModel[];
  pattern: PatternMask;
  loaded: boolean;
}

const SPHERE_MAX_RADIUS = 18;

export class TriangleKnob {
  model: KnobModel = {
    point: [0.5, Math.sqrt(3) / 6], // centroid
    weights: [1 / 3, 1 / 3, 1 / 3],
    spheres: [],
    pattern: {},
    loaded: false,
  };
  audition = new AuditionScheduler<{ audio: ArrayBuffer; weights: [number, number, number] }>();
  onAudio: (wav: ArrayBuffer) => void = () => {};
  toast: (message: string) => void = () => {};
  seed = 0;
  private dragging = false;
  private xScale: Scale;
  private yScale: Scale;

  constructor(public canvas: HTMLCanvasElement, private api: ApiClient) {
    // leave margin so out-of-triangle (negative-weight) positions are reachable
    const m = 60;
    this.xScale = new Scale(-0.5, 1.5, m, canvas.width - m);
    this.yScale = new Scale(-0.5, Math.sqrt(3) / 2 + 0.5, canvas.height - m, m);
    canvas.addEventListener('mousedown', () => (this.dragging = true));
    canvas.addEventListener('mousemove', (ev) => this.onMouseMove(ev));
    canvas.addEventListener('mouseup', (ev) => void this.onMouseUp(ev));
    this.recompute();
  }

  async load(objects: string[]): Promise<string[]> {
    const { labels } = await this.api.demoLoad(objects);
    this.model.loaded = true;
    return labels;
  }

  setPattern(attr: AttributeKey, knobApplies: boolean): void {
    // pure view/weighting state: never touches anchors or the session
    this.model.pattern = { ...this.model.pattern, [attr]: knobApplies };
  }

  moveTo(point: Point): void {
    this.model.point = point;
    this.recompute();
  }

  private recompute(): void {
    const w = areaCoordinates(this.model.point, TRIANGLE);
    this.model.weights = w;
    const wMax = Math.max(...w.map(Math.abs), 1e-9);
    this.model.spheres = w.map((wi, vertex) => ({
      vertex,
      w: wi,
      radius: (Math.abs(wi) / wMax) * SPHERE_MAX_RADIUS,
      bowl: wi < 0,
    }));
    this.paint();
  }

  /** Release the knob: one latest-wins audition request at this position. */
  async release(): Promise<ArrayBuffer | null> {
    if (!this.model.loaded) return null;
    try {
      const result = await this.audition.request((signal) =>
        this.api.demoMorph(this.model.point, TRIANGLE, this.model.pattern, this.seed, signal),
      );
      if (!result) return null;
      this.onAudio(result.audio);
      return result.audio;
    } catch (err) {
      this.toast(err instanceof Error ? err.message : String(err));
      return null;
    }
  }

  private onMouseMove(ev: MouseEvent): void {
    if (!this.dragging) return;
    this.moveTo([
      this.xScale.toDomain(localX(this.canvas, ev)),
      this.yScale.toDomain(localY(this.canvas, ev)),
    ]);
  }

  private async onMouseUp(ev: MouseEvent): Promise<void> {
    if (!this.dragging) return;
    this.dragging = false;
    this.moveTo([
      this.xScale.toDomain(localX(this.canvas, ev)),
      this.yScale.toDomain(localY(this.canvas, ev)),
    ]);
    await this.release();
  }

  private paint(): void {
    const ctx = context2d(this.canvas);
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    const px = (p: Point): [number, number] => [this.xScale.toPixel(p[0]), this.yScale.toPixel(p[1])];
    ctx.strokeStyle = '#555';
    ctx.beginPath();
    const [ax, ay] = px(TRIANGLE[0]);
    ctx.moveTo(ax, ay);
    for (const v of [TRIANGLE[1], TRIANGLE[2], TRIANGLE[0]]) {
      const [x, y] = px(v);
      ctx.lineTo(x, y);
    }
    ctx.stroke();
    for (const s of this.model.spheres) {
      const [x, y] = px(TRIANGLE[s.vertex]);
      ctx.strokeStyle = ['#c0392b', '#27ae60', '#2980b9'][s.vertex];
      ctx.setLineDash(s.bowl ? [4, 3] : []);
      ctx.beginPath();
      ctx.arc(x, y, Math.max(s.radius, 1), 0, 2 * Math.PI);
      ctx.stroke();
      ctx.setLineDash([]);
    }
    const [kx, ky] = px(this.model.point);
    ctx.fillStyle = 'rgba(128,128,128,0.6)';
    ctx.beginPath();
    ctx.arc(kx, ky, 8, 0, 2 * Math.PI);
    ctx.fill();
  }
}
