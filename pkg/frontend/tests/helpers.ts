import { FrameMessage } from "../src/protocol.js";
import { ServiceSocket, SocketHooks } from "../src/socket.js";

export class FakeWebSocket {
  readyState = 0;
  sent: string[] = [];
  onopen: ((ev: unknown) => void) | null = null;
  onclose: ((ev: unknown) => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.readyState = 3;
    this.onclose?.({});
  }

  open(): void {
    this.readyState = 1;
    this.onopen?.({});
  }

  receive(msg: object): void {
    this.onmessage?.({ data: JSON.stringify(msg) });
  }

  sentMessages(): Record<string, unknown>[] {
    return this.sent.map((s) => JSON.parse(s));
  }
}

export function openSocket(
  hooks: Partial<SocketHooks> = {},
): { socket: ServiceSocket; ws: FakeWebSocket } {
  const ws = new FakeWebSocket();
  const full: SocketHooks = {
    onOpen: hooks.onOpen ?? (() => {}),
    onClose: hooks.onClose ?? (() => {}),
    onMessage: hooks.onMessage ?? (() => {}),
  };
  const socket = new ServiceSocket("ws://test", "controller", full, () => ws, () => {});
  socket.connect();
  ws.open();
  return { socket, ws };
}

export function makeFrame(overrides: Partial<FrameMessage> = {}): FrameMessage {
  return {
    type: "frame",
    step_index: 0,
    time: 0,
    positions: [0, 0, 0],
    topology_version: 0,
    diverged: false,
    stats: null,
    energy: { kinetic: 0, spring_potential: 0, gravitational: 0, total: 0 },
    ...overrides,
  };
}

/** Flat xyz triplets for n particles spread on a unit circle in the xy plane. */
export function circlePositions(n: number): number[] {
  const out: number[] = [];
  for (let i = 0; i < n; i++) {
    const a = (2 * Math.PI * i) / n;
    out.push(Math.cos(a), Math.sin(a), 0);
  }
  return out;
}
