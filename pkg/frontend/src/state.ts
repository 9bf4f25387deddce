/** Panel state: everything the control panel shows.
 *
 * The params mirror is updated only when the server acks an edit; a pending
 * edit keyed by seq is held aside until its ack, warning, or error arrives.
 * The UI never shows optimistic values.
 */

import {
  AckMessage,
  ErrorMessage,
  FrameMessage,
  Role,
  ServerMessage,
  StatsJson,
  WarningMessage,
  WelcomeMessage,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface ParamsMirror {
  [field: string]: number | boolean | string | { x: number; y: number; z: number };
}

interface PendingEdit {
  apply: (panel: PanelState) => void;
}

export class PanelState {
  status: ConnectionStatus = "connecting";
  role: Role | null = null;
  scene = "";
  params: ParamsMirror = {};
  integrator = "";
  lod: number | null = null;
  recording = false;
  lastWarning = "";
  lastError = "";
  lastAckStep: number | null = null;
  simStats: StatsJson | null = null;
  diverged = false;

  private pending = new Map<number, PendingEdit>();

  /** Register an edit awaiting server confirmation. */
  stageParamEdit(seq: number, field: string, value: ParamsMirror[string]): void {
    this.pending.set(seq, {
      apply: (panel) => {
        panel.params[field] = value;
      },
    });
  }

  stageIntegratorEdit(seq: number, kind: string): void {
    this.pending.set(seq, {
      apply: (panel) => {
        panel.integrator = kind;
      },
    });
  }

  stageLodEdit(seq: number, level: number): void {
    this.pending.set(seq, {
      apply: (panel) => {
        panel.lod = level;
      },
    });
  }

  stageRecordingEdit(seq: number, recording: boolean): void {
    this.pending.set(seq, {
      apply: (panel) => {
        panel.recording = recording;
      },
    });
  }

  pendingCount(): number {
    return this.pending.size;
  }

  onOpen(): void {
    this.status = "connected";
  }

  onClose(): void {
    this.status = "disconnected";
    this.role = null;
    this.simStats = null;
    this.pending.clear();
  }

  apply(msg: ServerMessage): void {
    switch (msg.type) {
      case "welcome":
        this.applyWelcome(msg);
        break;
      case "ack":
        this.applyAck(msg);
        break;
      case "warning":
        this.applyWarning(msg);
        break;
      case "error":
        this.applyError(msg);
        break;
      case "frame":
        this.applyFrame(msg);
        break;
    }
  }

  private applyWelcome(msg: WelcomeMessage): void {
    this.status = "connected";
    this.role = msg.role;
    this.scene = msg.scene;
  }

  private applyAck(msg: AckMessage): void {
    this.lastAckStep = msg.effective_step;
    const edit = this.pending.get(msg.seq);
    if (edit !== undefined) {
      this.pending.delete(msg.seq);
      edit.apply(this);
    }
  }

  private applyWarning(msg: WarningMessage): void {
    this.lastWarning = msg.message;
    if (msg.seq !== null) {
      this.pending.delete(msg.seq);
    }
  }

  private applyError(msg: ErrorMessage): void {
    this.lastError = msg.message;
    if (msg.seq !== null) {
      this.pending.delete(msg.seq);
    }
  }

  private applyFrame(msg: FrameMessage): void {
    this.simStats = msg.stats;
    this.diverged = msg.diverged;
  }
}
