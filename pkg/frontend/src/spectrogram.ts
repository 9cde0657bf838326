// Spectrogram panel: dB tile plus the anchor overlay — vertical temporal
// lines and frequency-anchor circles. Clicking within the snap radius of a
// line places a frequency anchor on it (briefly highlighted); dragging a
// circle moves it; clicks far from any line are no-ops.

import { SpectrogramTile } from './api';
import { EditorController, Snapshot } from './editor';
import { Scale } from './geometry';
import { context2d, localX, localY } from './painter';
import { SNAP_PX, AnchorLine } from './waveform';

export interface AnchorCircle {
  column: number;
  pair: number;
  x: number;
  y: number;
  f: number;
}

export interface SpectrogramModel {
  tile: SpectrogramTile | null;
  lines: AnchorLine[];
  circles: AnchorCircle[];
  highlight: { column: number; pair: number } | null;
  drag: { column: number; pair: number } | null;
  dragY: number | null;
}

export class SpectrogramView {
  model: SpectrogramModel = {
    tile: null,
    lines: [],
    circles: [],
    highlight: null,
    drag: null,
    dragY: null,
  };
  fMax: number;
  private snapshot: Snapshot | null = null;

  constructor(
    public canvas: HTMLCanvasElement,
    private controller: EditorController,
    public axis: 'canonical' | 'nonlinear',
    fMax = 2000,
  ) {
    this.fMax = fMax;
    controller.register(this);
    canvas.addEventListener('mousedown', (ev) => this.onMouseDown(ev));
    canvas.addEventListener('mousemove', (ev) => this.onMouseMove(ev));
    canvas.addEventListener('mouseup', (ev) => void this.onMouseUp(ev));
  }

  setTile(tile: SpectrogramTile): void {
    this.model.tile = tile;
    if (this.snapshot) this.render(this.snapshot);
  }

  private scales(snapshot: Snapshot): { time: Scale; freq: Scale } {
    const a = snapshot.state.anchors;
    const duration = a
      ? this.axis === 'canonical'
        ? a.duration_canonical
        : a.duration_instance
      : 1;
    return {
      time: new Scale(0, duration, 0, this.canvas.width),
      // frequency axis points up: 0 Hz at the bottom edge
      freq: new Scale(0, this.fMax, this.canvas.height, 0),
    };
  }

  render(snapshot: Snapshot): void {
    this.snapshot = snapshot;
    const { time, freq } = this.scales(snapshot);
    const columns = snapshot.state.anchors?.columns ?? [];
    this.model.lines = columns.map((c, index) => {
      const t = this.axis === 'canonical' ? c.t_canonical : c.t_instance;
      return { index, x: time.toPixel(t), t };
    });
    this.model.circles = [];
    columns.forEach((c, column) => {
      c.freq_anchors.forEach(([fc, fi], pair) => {
        const f = this.axis === 'canonical' ? fc : fi;
        this.model.circles.push({
          column,
          pair,
          x: this.model.lines[column].x,
          y: freq.toPixel(f),
          f,
        });
      });
    });
    this.paint();
  }

  private paint(): void {
    const ctx = context2d(this.canvas);
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    const tile = this.model.tile;
    if (tile && tile.db.length) {
      let lo = Infinity;
      let hi = -Infinity;
      for (const row of tile.db) {
        for (const v of row) {
          if (v < lo) lo = v;
          if (v > hi) hi = v;
        }
      }
      const span = Math.max(hi - lo, 1e-6);
      const nt = tile.db.length;
      const nf = tile.db[0].length;
      const fTop = tile.freqs[tile.freqs.length - 1];
      const rows = Math.round((Math.min(this.fMax, fTop) / fTop) * nf);
      for (let i = 0; i < nt; i++) {
        for (let j = 0; j < rows; j++) {
          const v = (tile.db[i][j] - lo) / span;
          const shade = Math.round(255 * (1 - v));
          ctx.fillStyle = `rgb(${shade},${shade},${shade})`;
          ctx.fillRect(
            (i / nt) * width,
            height - ((j + 1) / rows) * height,
            Math.ceil(width / nt),
            Math.ceil(height / rows),
          );
        }
      }
    }
    for (const line of this.model.lines) {
      ctx.strokeStyle = '#c0392b';
      ctx.beginPath();
      ctx.moveTo(line.x, 0);
      ctx.lineTo(line.x, height);
      ctx.stroke();
    }
    for (const c of this.model.circles) {
      const dragged =
        this.model.drag && this.model.drag.column === c.column && this.model.drag.pair === c.pair;
      const y = dragged && this.model.dragY !== null ? this.model.dragY : c.y;
      const hot =
        this.model.highlight &&
        this.model.highlight.column === c.column &&
        this.model.highlight.pair === c.pair;
      ctx.strokeStyle = hot ? '#e3b505' : '#27ae60';
      ctx.beginPath();
      ctx.arc(c.x, y, hot ? 10 : 5, 0, 2 * Math.PI);
      ctx.stroke();
    }
  }

  hitCircle(x: number, y: number): AnchorCircle | null {
    for (const c of this.model.circles) {
      if (Math.hypot(c.x - x, c.y - y) <= SNAP_PX) return c;
    }
    return null;
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
    const hit = this.hitCircle(localX(this.canvas, ev), localY(this.canvas, ev));
    if (hit) {
      this.model.drag = { column: hit.column, pair: hit.pair };
      this.model.dragY = hit.y;
    }
  }

  private onMouseMove(ev: MouseEvent): void {
    if (this.model.drag) {
      this.model.dragY = localY(this.canvas, ev);
      this.paint();
    }
  }

  async onMouseUp(ev: MouseEvent): Promise<void> {
    if (!this.snapshot) return;
    const x = localX(this.canvas, ev);
    const y = localY(this.canvas, ev);
    const { freq } = this.scales(this.snapshot);
    const drag = this.model.drag;
    this.model.drag = null;
    this.model.dragY = null;
    if (drag) {
      const f = freq.toDomain(y);
      const where = this.axis === 'canonical' ? { f_canonical: f } : { f_instance: f };
      await this.controller.moveFrequency(drag.column, drag.pair, where);
      return;
    }
    const line = this.hitLine(x);
    if (!line) return; // far from any temporal line: no-op by the snap rule
    const f = freq.toDomain(y);
    const before = this.snapshot.state.anchors?.columns[line.index]?.freq_anchors.length ?? 0;
    const ok = await this.controller.placeFrequency(line.index, f, f);
    if (ok && this.snapshot) {
      // highlight the pair that landed at this frequency
      const pairs = this.snapshot.state.anchors?.columns[line.index]?.freq_anchors ?? [];
      if (pairs.length > before) {
        let pair = 0;
        for (let j = 0; j < pairs.length; j++) {
          const fj = this.axis === 'canonical' ? pairs[j][0] : pairs[j][1];
          if (Math.abs(fj - f) < Math.abs((this.axis === 'canonical' ? pairs[pair][0] : pairs[pair][1]) - f)) {
            pair = j;
          }
        }
        this.model.highlight = { column: line.index, pair };
        this.paint();
        setTimeout(() => {
          this.model.highlight = null;
          this.paint();
        }, 600);
      }
    }
  }
}
