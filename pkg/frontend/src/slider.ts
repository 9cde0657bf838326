// Morph-rate slider: drags update the readout only; releasing the slider
// auditions the morph at that rate. Auditions go through the controller's
// latest-wins scheduler, so rapid releases never queue stale audio.

import { EditorController } from './editor';

export class MorphSlider {
  constructor(
    public input: HTMLInputElement,
    private controller: EditorController,
    private readout?: HTMLElement,
  ) {
    input.min = input.min || '-0.5';
    input.max = input.max || '1.5';
    input.step = input.step || '0.01';
    input.addEventListener('input', () => this.updateReadout());
    const onRelease = () => void this.release();
    input.addEventListener('change', onRelease);
    input.addEventListener('pointerup', onRelease);
    this.updateReadout();
  }

  get rate(): number {
    return Number(this.input.value);
  }

  private updateReadout(): void {
    if (this.readout) this.readout.textContent = this.rate.toFixed(2);
  }

  release(): Promise<ArrayBuffer | null> {
    return this.controller.auditionMorph(this.rate);
  }
}
