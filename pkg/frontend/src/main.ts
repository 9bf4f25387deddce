/** Browser entry point: wires the socket, panel, renderer, and pointer
 * interaction together. All simulation state shown here is derived from
 * server frames and acks; nothing is mutated locally.
 */

import { OrbitCamera } from "./camera.js";
import { PanelController } from "./controller.js";
import { FpsMeter } from "./fps.js";
import { FrameStore } from "./frames.js";
import { CanvasSurface, drawScene } from "./renderer.js";
import { ServiceSocket } from "./socket.js";
import { PanelState } from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function start(): void {
  const canvas = el<HTMLCanvasElement>("scene");
  const ctx = canvas.getContext("2d");
  if (ctx === null) {
    throw new Error("2d canvas context unavailable");
  }
  const surface = new CanvasSurface(ctx);
  const camera = new OrbitCamera(canvas.width, canvas.height);
  const frames = new FrameStore();
  const state = new PanelState();
  const fps = new FpsMeter();

  const params = new URLSearchParams(location.search);
  const url = params.get("server") ?? `ws://${location.hostname || "127.0.0.1"}:8765`;
  const role = params.get("role") === "viewer" ? "viewer" : "controller";

  const socket = new ServiceSocket(url, role, {
    onOpen: () => state.onOpen(),
    onClose: () => {
      state.onClose();
      frames.clear();
      fps.clear();
    },
    onMessage: (msg) => {
      state.apply(msg);
      if (msg.type === "frame") {
        frames.push(msg);
      }
      if (msg.type === "warning" || msg.type === "error") {
        showToast(msg.message, msg.type);
      }
    },
  });
  const controller = new PanelController(socket, state, frames, camera);
  socket.connect();

  wireWidgets(controller);
  wirePointer(canvas, camera, controller);

  const draw = () => {
    drawScene(frames, camera, surface);
    fps.tick(performance.now());
    updatePanel(state, frames, fps);
    requestAnimationFrame(draw);
  };
  requestAnimationFrame(draw);
}

function wireWidgets(controller: PanelController): void {
  const bindSlider = (id: string, field: string) => {
    const input = el<HTMLInputElement>(id);
    input.addEventListener("change", () => controller.editParam(field, Number(input.value)));
  };
  bindSlider("stiffness", "stiffness_scale");
  bindSlider("damping", "damping_scale");
  bindSlider("dt", "dt");
  bindSlider("restitution", "restitution");
  bindSlider("drag-coeff", "drag_coeff");

  const integrator = el<HTMLSelectElement>("integrator");
  integrator.addEventListener("change", () => {
    controller.chooseIntegrator(integrator.value as Parameters<PanelController["chooseIntegrator"]>[0]);
  });

  const lod = el<HTMLInputElement>("lod");
  lod.addEventListener("change", () => controller.setLod(Number(lod.value)));

  el<HTMLButtonElement>("pause").addEventListener("click", () => controller.pause());
  el<HTMLButtonElement>("resume").addEventListener("click", () => controller.resume());
  el<HTMLButtonElement>("reset").addEventListener("click", () => controller.reset());
  el<HTMLButtonElement>("record").addEventListener("click", () => controller.startRecording(10));
  el<HTMLButtonElement>("record-stop").addEventListener("click", () => controller.stopRecording());
}

function wirePointer(
  canvas: HTMLCanvasElement,
  camera: OrbitCamera,
  controller: PanelController,
): void {
  let orbiting = false;
  let lastX = 0;
  let lastY = 0;
  canvas.addEventListener("pointerdown", (ev) => {
    const r = canvas.getBoundingClientRect();
    const sx = ev.clientX - r.left;
    const sy = ev.clientY - r.top;
    if (!controller.pointerDown(sx, sy)) {
      orbiting = true;
    }
    lastX = sx;
    lastY = sy;
    canvas.setPointerCapture(ev.pointerId);
  });
  canvas.addEventListener("pointermove", (ev) => {
    const r = canvas.getBoundingClientRect();
    const sx = ev.clientX - r.left;
    const sy = ev.clientY - r.top;
    if (controller.dragging()) {
      controller.pointerMove(sx, sy);
    } else if (orbiting) {
      camera.rotate((sx - lastX) * 0.01, (sy - lastY) * 0.01);
    }
    lastX = sx;
    lastY = sy;
  });
  canvas.addEventListener("pointerup", (ev) => {
    const r = canvas.getBoundingClientRect();
    controller.pointerUp(ev.clientX - r.left, ev.clientY - r.top);
    orbiting = false;
  });
  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    camera.zoom(ev.deltaY > 0 ? 1.1 : 1 / 1.1);
  });
}

function updatePanel(state: PanelState, frames: FrameStore, fps: FpsMeter): void {
  el("status").textContent = state.status;
  el("role").textContent = state.role ?? "-";
  el("scene-name").textContent = state.scene || "-";
  el("recording-dot").className = state.recording ? "rec on" : "rec";
  el("fps").textContent = state.status === "connected" ? fps.fps().toFixed(0) : "-";

  const frame = frames.current();
  if (frame !== null && state.status === "connected") {
    el("step").textContent = String(frame.step_index);
    el("sim-time").textContent = frame.time.toFixed(3);
    el("energy").textContent = frame.energy.total.toFixed(4);
    el("vertices").textContent = String(frames.vertexCount());
    if (frame.stats !== null) {
      el("sps").textContent = frame.stats.steps_per_second.toFixed(0);
    }
  } else {
    for (const id of ["step", "sim-time", "energy", "vertices", "sps"]) {
      el(id).textContent = "-";
    }
  }

  for (const [id, field] of [
    ["stiffness-val", "stiffness_scale"],
    ["damping-val", "damping_scale"],
    ["dt-val", "dt"],
    ["restitution-val", "restitution"],
    ["drag-coeff-val", "drag_coeff"],
  ] as const) {
    const v = state.params[field];
    el(id).textContent = v === undefined ? "-" : String(v);
  }
  el("integrator-val").textContent = state.integrator || "-";
  el("lod-val").textContent = state.lod === null ? "-" : String(state.lod);
}

let toastTimer: number | undefined;

function showToast(message: string, kind: "warning" | "error"): void {
  const toast = el("toast");
  toast.textContent = message;
  toast.className = `toast show ${kind}`;
  clearTimeout(toastTimer);
  toastTimer = window.setTimeout(() => {
    toast.className = "toast";
  }, 4000);
}

start();
