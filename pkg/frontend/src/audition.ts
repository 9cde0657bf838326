// Latest-wins scheduling for audition (play-on-release) requests: a new
// release aborts any in-flight request, so rapid mouse-up storms never queue
// stale audio. At most the first and the last of a burst complete.

export type AuditionRun<T> = (signal: AbortSignal) => Promise<T>;

export class AuditionScheduler<T = ArrayBuffer> {
  private controller: AbortController | null = null;
  private seq = 0;
  completed = 0;

  /** Resolves with the result, or null if superseded by a later request. */
  async request(run: AuditionRun<T>): Promise<T | null> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const id = ++this.seq;
    try {
      const result = await run(controller.signal);
      if (id !== this.seq) return null; // a newer request took over
      this.completed += 1;
      return result;
    } catch (err) {
      if (controller.signal.aborted) return null;
      throw err;
    } finally {
      if (this.controller === controller) this.controller = null;
    }
  }

  get inFlight(): boolean {
    return this.controller !== null;
  }
}
