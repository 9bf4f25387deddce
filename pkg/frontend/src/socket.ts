/** Reconnecting WebSocket client for the simulation service.
 *
 * Owns the outgoing seq counter, sends the hello handshake on every (re)open,
 * and hands parsed server messages to a single listener. Reconnects with
 * exponential backoff, capped at 30 s.
 */

import { OutgoingCommand, Role, ServerMessage, parseServerMessage } from "./protocol.js";

export interface SocketHooks {
  onOpen(): void;
  onClose(): void;
  onMessage(msg: ServerMessage): void;
}

interface WebSocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  onopen: ((ev: unknown) => void) | null;
  onclose: ((ev: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
}

export type SocketFactory = (url: string) => WebSocketLike;

const OPEN = 1;

export class ServiceSocket {
  private ws: WebSocketLike | null = null;
  private seq = 0;
  private attempts = 0;
  private closed = false;

  constructor(
    private url: string,
    private roleRequest: Role,
    private hooks: SocketHooks,
    private factory: SocketFactory = (u) => new WebSocket(u) as unknown as WebSocketLike,
    private schedule: (fn: () => void, ms: number) => void = (fn, ms) => {
      setTimeout(fn, ms);
    },
  ) {}

  connect(): void {
    this.closed = false;
    const ws = this.factory(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.attempts = 0;
      ws.send(
        JSON.stringify({ type: "hello", seq: this.nextSeq(), role_request: this.roleRequest }),
      );
      this.hooks.onOpen();
    };
    ws.onmessage = (ev) => {
      this.hooks.onMessage(parseServerMessage(ev.data));
    };
    ws.onclose = () => {
      this.hooks.onClose();
      if (!this.closed) {
        const delay = Math.min(1000 * 2 ** this.attempts, 30000);
        this.attempts += 1;
        this.schedule(() => this.connect(), delay);
      }
    };
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }

  nextSeq(): number {
    this.seq += 1;
    return this.seq;
  }

  /** Send a command; returns its seq, or null if the socket is not open. */
  send(msg: OutgoingCommand): number | null {
    if (this.ws === null || this.ws.readyState !== OPEN) {
      return null;
    }
    const seq = this.nextSeq();
    this.ws.send(JSON.stringify({ ...msg, seq }));
    return seq;
  }
}
