// Waveform panel: min/max envelope with vertical temporal-anchor lines.
// Clicking places a temporal anchor; dragging a line within the snap radius
// adjusts it (canonical panel moves the canonical time, the other panel the
// instance time). All edits go through the controller; the lines re-render
// from the server response.

import { WaveformData } from './api';
import { EditorController, Snapshot } from './editor';
import { Scale } from './geometry';
import { context2d, localX } from './painter';

export const SNAP_PX = 8;

export interface AnchorLine {
  index: number;
  x: number;
  t: number;
}

export interface WaveformModel {
  data: WaveformData | null;
  lines: AnchorLine[];
  dragIndex: number | null;
  dragX: number | null;
}

export class WaveformView {
  model: WaveformModel = { data: null, lines: [], dragIndex: null, dragX: null };
  private snapshot: Snapshot | null = null;

  constructor(
    public canvas: HTMLCanvasElement,
    private controller: EditorController,
    public axis: 'canonical' | 'nonlinear',
  ) {
    controller.register(this);
    canvas.addEventListener('mousedown', (ev) => this.onMouseDown(ev));
    canvas.addEventListener('mousemove', (ev) => this.onMouseMove(ev));
    canvas.addEventListener('mouseup', (ev) => void this.onMouseUp(ev));
  }

  setData(data: WaveformData): void {
    this.model.data = data;
    if (this.snapshot) this.render(this.snapshot);
  }

  private duration(snapshot: Snapshot): number {
    const a = snapshot.state.anchors;
    if (a) return this.axis === 'canonical' ? a.duration_canonical : a.duration_instance;
    return this.model.data?.duration ?? 1;
  }

  private timeScale(snapshot: Snapshot): Scale {
    return new Scale(0, this.duration(snapshot), 0, this.canvas.width);
  }

  render(snapshot: Snapshot): void {
    this.snapshot = snapshot;
    const scale = this.timeScale(snapshot);
    const columns = snapshot.state.anchors?.columns ?? [];
    this.model.lines = columns.map((c, index) => {
      const t = this.axis === 'canonical' ? c.t_canonical : c.t_instance;
      return { index, x: scale.toPixel(t), t };
    });
    this.paint();
  }

  private paint(): void {
    const ctx = context2d(this.canvas);
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    const data = this.model.data;
    if (data) {
      ctx.fillStyle = '#4a6fa5';
      const n = data.min.length;
      const mid = height / 2;
      for (let i = 0; i < n; i++) {
        const x = (i / n) * width;
        const y0 = mid - data.max[i] * mid;
        const y1 = mid - data.min[i] * mid;
        ctx.fillRect(x, y0, Math.max(width / n, 1), Math.max(y1 - y0, 1));
      }
    }
    for (const line of this.model.lines) {
      ctx.strokeStyle = line.index === this.model.dragIndex ? '#e3b505' : '#c0392b';
      ctx.beginPath();
      const x = line.index === this.model.dragIndex && this.model.dragX !== null
        ? this.model.dragX
        : line.x;
      ctx.moveTo(x, 0);
      ctx.lineTo(x, height);
      ctx.stroke();
    }
  }

  hitLine(x: number): AnchorLine | null {
    let best: AnchorLine | null = null;
    for (const line of this.model.lines) {
      if (Math.abs(line.x - x) <= SNAP_PX && (!best || Math.abs(line.x - x) < Math.abs(best.x - x))) {
        best = line;
      }
    }
    return best;
  }

  private onMouseDown(ev: MouseEvent): void {
    const hit = this.hitLine(localX(this.canvas, ev));
    if (hit) {
      this.model.dragIndex = hit.index;
      this.model.dragX = hit.x;
    }
  }

  private onMouseMove(ev: MouseEvent): void {
    if (this.model.dragIndex !== null) {
      this.model.dragX = localX(this.canvas, ev);
      this.paint();
    }
  }

  async onMouseUp(ev: MouseEvent): Promise<void> {
    if (!this.snapshot) return;
    const x = localX(this.canvas, ev);
    const scale = this.timeScale(this.snapshot);
    const index = this.model.dragIndex;
    this.model.dragIndex = null;
    this.model.dragX = null;
    if (index !== null) {
      const t = scale.toDomain(x);
      if (this.axis === 'canonical') {
        await this.controller.moveTemporal(index, { t_canonical: t });
      } else {
        await this.controller.moveTemporal(index, { t_instance: t });
      }
      return;
    }
    // plain click: place a temporal anchor at the canonical-axis time
    const a = this.snapshot.state.anchors;
    if (!a) return;
    let t = scale.toDomain(x);
    if (this.axis === 'nonlinear') {
      t = (t / a.duration_instance) * a.duration_canonical;
    }
    await this.controller.placeTemporal(t);
  }
}
