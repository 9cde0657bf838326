// Controller for the morphing-object preparation GUI. Holds the latest
// server snapshot (session state + distance trajectory); views render from
// that snapshot only, so the server stays the single source of truth. A 409
// from the server reverts the view by re-rendering the unchanged snapshot.

import { ApiClient, ApiError, DistanceJson, EditResponse, SessionState } from './api';
import { AuditionScheduler } from './audition';

export interface Snapshot {
  state: SessionState;
  distance: DistanceJson | null;
}

export interface View {
  render(snapshot: Snapshot): void;
}

export class EditorController {
  snapshot: Snapshot | null = null;
  audition = new AuditionScheduler<ArrayBuffer>();
  onAudio: (wav: ArrayBuffer) => void = () => {};
  toast: (message: string) => void = () => {};
  private views: View[] = [];

  constructor(public api: ApiClient, public sid: string) {}

  register(view: View): void {
    this.views.push(view);
    if (this.snapshot) view.render(this.snapshot);
  }

  private render(): void {
    if (!this.snapshot) return;
    for (const view of this.views) view.render(this.snapshot);
  }

  async refresh(): Promise<void> {
    const state = await this.api.getSession(this.sid);
    const distance =
      state.canonical_loaded && state.nonlinear_loaded
        ? await this.api.distance(this.sid)
        : null;
    this.snapshot = { state, distance };
    this.render();
  }

  /** Apply a mutation; on a 409 conflict the view snaps back to the last
   *  accepted snapshot and the reason is surfaced as a toast. */
  private async mutate(run: () => Promise<EditResponse>): Promise<boolean> {
    try {
      this.snapshot = await run();
      this.render();
      return true;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.toast(err.message);
        this.render(); // snap back: re-render the unchanged snapshot
        return false;
      }
      throw err;
    }
  }

  placeTemporal(t: number): Promise<boolean> {
    return this.mutate(() => this.api.patchAnchors(this.sid, { op: 'place_temporal', t }));
  }

  moveTemporal(index: number, where: { t_canonical?: number; t_instance?: number }): Promise<boolean> {
    return this.mutate(() =>
      this.api.patchAnchors(this.sid, { op: 'move_temporal', index, ...where }),
    );
  }

  placeFrequency(column: number, f: number, fCanonical?: number): Promise<boolean> {
    return this.mutate(() =>
      this.api.patchAnchors(this.sid, { op: 'place_frequency', column, f, f_canonical: fCanonical }),
    );
  }

  moveFrequency(
    column: number,
    pair: number,
    where: { f_canonical?: number; f_instance?: number },
  ): Promise<boolean> {
    return this.mutate(() =>
      this.api.patchAnchors(this.sid, { op: 'move_frequency', column, pair, ...where }),
    );
  }

  undo(): Promise<boolean> {
    return this.mutate(() => this.api.undo(this.sid));
  }

  clear(): Promise<boolean> {
    return this.mutate(() => this.api.clear(this.sid));
  }

  /** Slider release: latest-wins, stale responses are dropped unplayed. */
  async auditionMorph(rate: number): Promise<ArrayBuffer | null> {
    const wav = await this.audition.request((signal) =>
      this.api.morph(this.sid, rate, 0, signal),
    );
    if (wav) this.onAudio(wav);
    return wav;
  }

  /** PLAY Cx / PLAY NLx: direct synthesis of one axis, no morph request. */
  async playAxis(axis: 'canonical' | 'nonlinear'): Promise<void> {
    this.onAudio(await this.api.synthesize(this.sid, axis));
  }
}
