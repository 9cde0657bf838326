// Distance plot: per-frame spectral distance between the canonical instance
// and the warped one. The vertical scale auto-fits the session maximum seen
// so far, so successive alignment steps stay comparable.

import { EditorController, Snapshot } from './editor';
import { context2d } from './painter';

export interface DistanceModel {
  times: number[];
  values: number[];
  mean: number | null;
  yMax: number;
}

export class DistancePlot {
  model: DistanceModel = { times: [], values: [], mean: null, yMax: 1e-6 };

  constructor(public canvas: HTMLCanvasElement, controller: EditorController) {
    controller.register(this);
  }

  render(snapshot: Snapshot): void {
    const d = snapshot.distance;
    if (!d) {
      this.model = { times: [], values: [], mean: null, yMax: this.model.yMax };
    } else {
      this.model.times = d.frame_times;
      this.model.values = d.per_frame;
      this.model.mean = d.mean;
      this.model.yMax = Math.max(this.model.yMax, ...d.per_frame);
    }
    this.paint();
  }

  private paint(): void {
    const ctx = context2d(this.canvas);
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    const { times, values, yMax } = this.model;
    if (!times.length) return;
    const tMax = times[times.length - 1] || 1;
    ctx.strokeStyle = '#8e44ad';
    ctx.beginPath();
    times.forEach((t, i) => {
      const x = (t / tMax) * width;
      const y = height - (values[i] / yMax) * height;
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
    if (this.model.mean !== null) {
      ctx.strokeStyle = '#bbb';
      const y = height - (this.model.mean / yMax) * height;
      ctx.beginPath();
      ctx.moveTo(0, y);
      ctx.lineTo(width, y);
      ctx.stroke();
    }
  }
}
