/** Rendering frames-per-second over a sliding one-second window. */

export class FpsMeter {
  private stamps: number[] = [];

  /** Call once per drawn frame with a millisecond timestamp. */
  tick(nowMs: number): void {
    this.stamps.push(nowMs);
    const cutoff = nowMs - 1000;
    while (this.stamps.length > 0 && this.stamps[0] < cutoff) {
      this.stamps.shift();
    }
  }

  fps(): number {
    if (this.stamps.length < 2) {
      return 0;
    }
    const span = this.stamps[this.stamps.length - 1] - this.stamps[0];
    return span <= 0 ? 0 : ((this.stamps.length - 1) * 1000) / span;
  }

  clear(): void {
    this.stamps = [];
  }
}
