// Application entry point: wires the preparation GUI (overlay views, anchor
// editing, distance plot, morph slider) and the three-instance knob to the
// editing service behind the dev-server proxy.

import { ApiClient } from './api';
import { EditorController } from './editor';
import { WaveformView } from './waveform';
import { SpectrogramView } from './spectrogram';
import { DistancePlot } from './distance';
import { MorphSlider } from './slider';
import { ATTRIBUTES, TriangleKnob } from './knob';

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function playWav(wav: ArrayBuffer): void {
  const url = URL.createObjectURL(new Blob([wav], { type: 'audio/wav' }));
  const audio = new Audio(url);
  audio.addEventListener('ended', () => URL.revokeObjectURL(url));
  void audio.play();
}

function toast(message: string): void {
  const node = el<HTMLDivElement>('toast');
  node.textContent = message;
  node.classList.add('visible');
  setTimeout(() => node.classList.remove('visible'), 2500);
}

async function boot(): Promise<void> {
  const api = new ApiClient();
  const sid = await api.createSession();
  const controller = new EditorController(api, sid);
  controller.onAudio = playWav;
  controller.toast = toast;

  const waveC = new WaveformView(el('wave-canonical'), controller, 'canonical');
  const waveN = new WaveformView(el('wave-nonlinear'), controller, 'nonlinear');
  const specC = new SpectrogramView(el('spec-canonical'), controller, 'canonical');
  const specN = new SpectrogramView(el('spec-nonlinear'), controller, 'nonlinear');
  new DistancePlot(el('distance'), controller);
  new MorphSlider(el<HTMLInputElement>('rate'), controller, el('rate-readout'));

  async function refreshViews(): Promise<void> {
    await controller.refresh();
    const state = controller.snapshot?.state;
    if (state?.canonical_loaded) {
      waveC.setData(await api.waveform(sid, 'canonical'));
      specC.setTile(await api.spectrogram(sid, 'canonical'));
    }
    if (state?.nonlinear_loaded) {
      waveN.setData(await api.waveform(sid, 'nonlinear'));
      specN.setTile(await api.spectrogram(sid, 'nonlinear'));
    }
  }

  for (const axis of ['canonical', 'nonlinear'] as const) {
    el<HTMLInputElement>(`file-${axis}`).addEventListener('change', async (ev) => {
      const file = (ev.target as HTMLInputElement).files?.[0];
      if (!file) return;
      await api.loadInstance(sid, axis, file.name, await file.arrayBuffer());
      await refreshViews();
    });
  }

  el('undo').addEventListener('click', () => void controller.undo());
  el('clear').addEventListener('click', () => void controller.clear());
  el('play-cx').addEventListener('click', () => void controller.playAxis('canonical'));
  el('play-nlx').addEventListener('click', () => void controller.playAxis('nonlinear'));
  el('save-object').addEventListener('click', async () => {
    const bytes = await api.saveObject(sid);
    const url = URL.createObjectURL(new Blob([bytes]));
    const a = Object.assign(document.createElement('a'), { href: url, download: 'session.morb' });
    a.click();
    URL.revokeObjectURL(url);
  });

  const knob = new TriangleKnob(el('knob'), api);
  knob.onAudio = playWav;
  knob.toast = toast;
  const patterns = el<HTMLDivElement>('patterns');
  for (const attr of ATTRIBUTES) {
    const label = document.createElement('label');
    const box = document.createElement('input');
    box.type = 'checkbox';
    box.checked = true;
    box.addEventListener('change', () => knob.setPattern(attr, box.checked));
    label.append(box, ` ${attr}`);
    patterns.append(label);
  }
}

void boot();
