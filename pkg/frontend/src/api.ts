// Typed client for the voicemorph editing service. The server is the single
// source of truth: every mutating call returns the refreshed session state
// plus the distance trajectory, and views re-render from those alone.

export type Axis = 'canonical' | 'nonlinear' | 'warped';

export interface ColumnJson {
  t_canonical: number;
  t_instance: number;
  freq_anchors: [number, number][]; // [f_canonical, f_instance]
}

export interface AnchorsJson {
  duration_canonical: number;
  duration_instance: number;
  nyquist: number;
  columns: ColumnJson[];
}

export interface SessionState {
  canonical_loaded: boolean;
  nonlinear_loaded: boolean;
  canonical_label: string | null;
  nonlinear_label: string | null;
  anchors: AnchorsJson | null;
  undo_depth: number;
  view: { f_limit: number; display_mode: string };
}

export interface DistanceJson {
  frame_times: number[];
  per_frame: number[];
  mean: number;
}

export interface EditResponse {
  state: SessionState;
  distance: DistanceJson | null;
}

export interface SpectrogramTile {
  times: number[];
  freqs: number[];
  db: number[][];
}

export interface WaveformData {
  sample_rate: number;
  duration: number;
  min: number[];
  max: number[];
}

export type AnchorPatch =
  | { op: 'place_temporal'; t: number }
  | { op: 'move_temporal'; index: number; t_canonical?: number; t_instance?: number }
  | { op: 'place_frequency'; column: number; f: number; f_canonical?: number }
  | { op: 'move_frequency'; column: number; pair: number; f_canonical?: number; f_instance?: number };

export type PatternMask = Partial<Record<'tx' | 'fx' | 'sl' | 'fo' | 'ap', boolean>>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function raiseFor(res: Response): Promise<void> {
  if (res.ok) return;
  let message = `${res.status} ${res.statusText}`;
  try {
    const body = await res.json();
    if (body && typeof body.error === 'string') message = body.error;
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(res.status, message);
}

export class ApiClient {
  constructor(private base: string = '') {}

  private url(path: string, query?: Record<string, string | number | undefined>): string {
    const params = new URLSearchParams();
    for (const [k, v] of Object.entries(query ?? {})) {
      if (v !== undefined) params.set(k, String(v));
    }
    const qs = params.toString();
    return this.base + path + (qs ? `?${qs}` : '');
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.base + path, init);
    await raiseFor(res);
    return (await res.json()) as T;
  }

  async createSession(): Promise<string> {
    const body = await this.json<{ session_id: string }>('/sessions', { method: 'POST' });
    return body.session_id;
  }

  getSession(sid: string): Promise<SessionState> {
    return this.json(`/sessions/${sid}`);
  }

  async loadInstance(
    sid: string,
    axis: 'canonical' | 'nonlinear',
    label: string,
    body: ArrayBuffer | Uint8Array,
  ): Promise<EditResponse> {
    const res = await fetch(this.url(`/sessions/${sid}/instance`, { axis, label }), {
      method: 'POST',
      headers: { 'content-type': 'application/octet-stream' },
      body: body as BodyInit,
    });
    await raiseFor(res);
    return (await res.json()) as EditResponse;
  }

  async spectrogram(sid: string, axis: Axis, fmax?: number): Promise<SpectrogramTile> {
    const res = await fetch(this.url(`/sessions/${sid}/spectrogram`, { axis, fmax }));
    await raiseFor(res);
    return (await res.json()) as SpectrogramTile;
  }

  async waveform(sid: string, axis: 'canonical' | 'nonlinear', points = 1024): Promise<WaveformData> {
    const res = await fetch(this.url(`/sessions/${sid}/waveform`, { axis, points }));
    await raiseFor(res);
    return (await res.json()) as WaveformData;
  }

  async distance(sid: string, fmax?: number): Promise<DistanceJson> {
    const res = await fetch(this.url(`/sessions/${sid}/distance`, { fmax }));
    await raiseFor(res);
    return (await res.json()) as DistanceJson;
  }

  putAnchors(sid: string, anchors: AnchorsJson): Promise<EditResponse> {
    return this.json(`/sessions/${sid}/anchors`, {
      method: 'PUT',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(anchors),
    });
  }

  patchAnchors(sid: string, patch: AnchorPatch): Promise<EditResponse> {
    return this.json(`/sessions/${sid}/anchors`, {
      method: 'PATCH',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(patch),
    });
  }

  undo(sid: string): Promise<EditResponse> {
    return this.json(`/sessions/${sid}/undo`, { method: 'POST' });
  }

  clear(sid: string): Promise<EditResponse> {
    return this.json(`/sessions/${sid}/clear`, { method: 'POST' });
  }

  async synthesize(sid: string, axis: 'canonical' | 'nonlinear', seed = 0): Promise<ArrayBuffer> {
    const res = await fetch(this.url(`/sessions/${sid}/synthesize`, { axis, seed }), {
      method: 'POST',
    });
    await raiseFor(res);
    return res.arrayBuffer();
  }

  async morph(sid: string, rate: number, seed = 0, signal?: AbortSignal): Promise<ArrayBuffer> {
    const res = await fetch(`${this.base}/sessions/${sid}/morph`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ rate, seed }),
      signal,
    });
    await raiseFor(res);
    return res.arrayBuffer();
  }

  async saveObject(sid: string): Promise<ArrayBuffer> {
    const res = await fetch(`${this.base}/sessions/${sid}/save-object`, { method: 'POST' });
    await raiseFor(res);
    return res.arrayBuffer();
  }

  async saveEdit(sid: string): Promise<ArrayBuffer> {
    const res = await fetch(`${this.base}/sessions/${sid}/save-edit`, { method: 'POST' });
    await raiseFor(res);
    return res.arrayBuffer();
  }

  restoreEdit(sid: string, body: ArrayBuffer | Uint8Array): Promise<EditResponse> {
    return this.json(`/sessions/${sid}/restore-edit`, {
      method: 'POST',
      headers: { 'content-type': 'application/octet-stream' },
      body: body as BodyInit,
    });
  }

  demoLoad(objects: string[]): Promise<{ labels: string[] }> {
    return this.json('/demo/load', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ objects }),
    });
  }

  async demoMorph(
    point: [number, number],
    triangle: [number, number][],
    pattern?: PatternMask,
    seed = 0,
    signal?: AbortSignal,
  ): Promise<{ audio: ArrayBuffer; weights: [number, number, number] }> {
    const res = await fetch(`${this.base}/demo/morph`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ point, triangle, pattern, seed }),
      signal,
    });
    await raiseFor(res);
    const header = res.headers.get('x-weights') ?? '';
    const weights = header.split(',').map(Number) as [number, number, number];
    return { audio: await res.arrayBuffer(), weights };
  }
}
