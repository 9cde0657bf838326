// Thin canvas access shared by the views. jsdom has no 2D context; views
// build their render models unconditionally and skip pixel work when the
// context is unavailable, which keeps hit-testing fully testable headless.

export function context2d(canvas: HTMLCanvasElement): CanvasRenderingContext2D | null {
  try {
    return canvas.getContext('2d');
  } catch {
    return null;
  }
}

export function localX(canvas: HTMLCanvasElement, ev: MouseEvent): number {
  return ev.clientX - canvas.getBoundingClientRect().left;
}

export function localY(canvas: HTMLCanvasElement, ev: MouseEvent): number {
  return ev.clientY - canvas.getBoundingClientRect().top;
}
