/** Latest-wins frame slot plus the topology_version-keyed spring index cache.
 *
 * Frames can arrive faster than the render loop draws; only the newest one is
 * kept, so the queue never grows. spring_index_pairs is only sent when the
 * topology changes, so the last seen pairs are cached against their version.
 */

import { FrameMessage } from "./protocol.js";

export class FrameStore {
  private latest: FrameMessage | null = null;
  private pairs: [number, number][] = [];
  private pairsVersion = -1;

  push(frame: FrameMessage): void {
    if (frame.spring_index_pairs !== undefined) {
      this.pairs = frame.spring_index_pairs;
      this.pairsVersion = frame.topology_version;
    }
    this.latest = frame;
  }

  /** Newest frame, or null before the first one arrives. */
  current(): FrameMessage | null {
    return this.latest;
  }

  /** Spring endpoint index pairs matching the current frame's topology.
   * Empty until a frame carrying pairs for that version has arrived. */
  springPairs(): [number, number][] {
    if (this.latest === null || this.latest.topology_version !== this.pairsVersion) {
      return [];
    }
    return this.pairs;
  }

  vertexCount(): number {
    return this.latest === null ? 0 : this.latest.positions.length / 3;
  }

  clear(): void {
    this.latest = null;
    this.pairs = [];
    this.pairsVersion = -1;
  }
}
