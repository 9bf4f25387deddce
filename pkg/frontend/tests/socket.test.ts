import { describe, expect, it } from "vitest";

import { ServerMessage } from "../src/protocol.js";
import { ServiceSocket } from "../src/socket.js";
import { FakeWebSocket } from "./helpers.js";

describe("ServiceSocket", () => {
  it("sends the hello handshake on open with the requested role", () => {
    const ws = new FakeWebSocket();
    const socket = new ServiceSocket(
      "ws://test",
      "controller",
      { onOpen: () => {}, onClose: () => {}, onMessage: () => {} },
      () => ws,
      () => {},
    );
    socket.connect();
    ws.open();
    const hello = ws.sentMessages()[0];
    expect(hello).toMatchObject({ type: "hello", role_request: "controller" });
  });

  it("delivers parsed server messages to the listener", () => {
    const seen: ServerMessage[] = [];
    const ws = new FakeWebSocket();
    const socket = new ServiceSocket(
      "ws://test",
      "viewer",
      { onOpen: () => {}, onClose: () => {}, onMessage: (m) => seen.push(m) },
      () => ws,
      () => {},
    );
    socket.connect();
    ws.open();
    ws.receive({ type: "welcome", seq: 1, session_id: "s2", role: "viewer", scene: "octa" });
    expect(seen[0].type).toBe("welcome");
  });

  it("seq numbers strictly increase across sends", () => {
    const ws = new FakeWebSocket();
    const socket = new ServiceSocket(
      "ws://test",
      "controller",
      { onOpen: () => {}, onClose: () => {}, onMessage: () => {} },
      () => ws,
      () => {},
    );
    socket.connect();
    ws.open();
    socket.send({ type: "pause" });
    socket.send({ type: "resume" });
    const seqs = ws.sentMessages().map((m) => m.seq as number);
    expect(seqs).toEqual([...seqs].sort((a, b) => a - b));
    expect(new Set(seqs).size).toBe(seqs.length);
  });

  it("send returns null while disconnected and schedules a reconnect", () => {
    const sockets: FakeWebSocket[] = [];
    const scheduled: (() => void)[] = [];
    const socket = new ServiceSocket(
      "ws://test",
      "controller",
      { onOpen: () => {}, onClose: () => {}, onMessage: () => {} },
      () => {
        const ws = new FakeWebSocket();
        sockets.push(ws);
        return ws;
      },
      (fn) => scheduled.push(fn),
    );
    socket.connect();
    sockets[0].open();
    sockets[0].close(); // server went away
    expect(socket.send({ type: "pause" })).toBeNull();
    expect(scheduled).toHaveLength(1);
    scheduled[0]();
    sockets[1].open();
    expect(sockets).toHaveLength(2);
    expect(socket.send({ type: "pause" })).not.toBeNull();
  });

  it("close on purpose does not reconnect", () => {
    const scheduled: (() => void)[] = [];
    const ws = new FakeWebSocket();
    const socket = new ServiceSocket(
      "ws://test",
      "controller",
      { onOpen: () => {}, onClose: () => {}, onMessage: () => {} },
      () => ws,
      (fn) => scheduled.push(fn),
    );
    socket.connect();
    ws.open();
    socket.close();
    expect(scheduled).toHaveLength(0);
  });
});
