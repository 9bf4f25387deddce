/** Wire protocol types for the simulation service (JSON over WebSocket).
 *
 * Every client message carries {type, seq}; server responses echo seq.
 * These shapes mirror the server's wire contract and nothing else; the UI
 * never reaches into simulation internals.
 */

export type Role = "controller" | "viewer";

export interface HelloMessage {
  type: "hello";
  seq: number;
  role_request: Role;
}

export interface SetParamMessage {
  type: "set_param";
  seq: number;
  field: string;
  value: number | boolean | { x: number; y: number; z: number };
}

export interface SetIntegratorMessage {
  type: "set_integrator";
  seq: number;
  kind: "euler_explicit" | "euler_semi_implicit" | "midpoint" | "rk4";
}

export interface SetLodMessage {
  type: "set_lod";
  seq: number;
  level: number;
}

export interface SimpleCommand {
  type: "pause" | "resume" | "reset" | "record_stop";
  seq: number;
}

export interface DragForceMessage {
  type: "drag_force";
  seq: number;
  particle_id: number;
  target: { x: number; y: number; z: number };
  active: boolean;
}

export interface RecordStartMessage {
  type: "record_start";
  seq: number;
  interval_steps: number;
}

export type ClientMessage =
  | HelloMessage
  | SetParamMessage
  | SetIntegratorMessage
  | SetLodMessage
  | SimpleCommand
  | DragForceMessage
  | RecordStartMessage;

export interface WelcomeMessage {
  type: "welcome";
  seq: number | null;
  session_id: string;
  role: Role;
  scene: string;
}

export interface AckMessage {
  type: "ack";
  seq: number;
  effective_step: number;
  [extra: string]: unknown;
}

export interface WarningMessage {
  type: "warning";
  seq: number | null;
  message: string;
}

export interface ErrorMessage {
  type: "error";
  seq: number | null;
  message: string;
}

export interface EnergyJson {
  kinetic: number;
  spring_potential: number;
  gravitational: number;
  total: number;
}

export interface StatsJson {
  mean_step_ms: number;
  p95_step_ms: number;
  steps_per_second: number;
  force_evaluations: number;
  memory_bytes: number;
}

export interface FrameMessage {
  type: "frame";
  step_index: number;
  time: number;
  /** Flat xyz triplets, one per particle. */
  positions: number[];
  topology_version: number;
  diverged: boolean;
  stats: StatsJson | null;
  energy: EnergyJson;
  /** Present only when topology_version changed since the last frame sent. */
  spring_index_pairs?: [number, number][];
}

type DistributiveOmit<T, K extends PropertyKey> = T extends unknown ? Omit<T, K> : never;

/** A client message before the socket assigns its seq. */
export type OutgoingCommand = DistributiveOmit<ClientMessage, "seq">;

export type ServerMessage =
  | WelcomeMessage
  | AckMessage
  | WarningMessage
  | ErrorMessage
  | FrameMessage;

export function parseServerMessage(raw: string): ServerMessage {
  const msg = JSON.parse(raw);
  if (typeof msg !== "object" || msg === null || typeof msg.type !== "string") {
    throw new Error("malformed server message");
  }
  return msg as ServerMessage;
}
