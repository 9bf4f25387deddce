"""Live steering and streaming of a running simulation.

One asyncio event loop owns the scene. Control messages are applied only
between steps (stepping is synchronous and never yields mid-step), logged with
their effective step index, and acknowledged with it. Frames are broadcast at
a fixed rate, decoupled from stepping, latest-wins.

Wire protocol (WebSocket, JSON text frames): every client message carries
{type, seq, ...payload}; the server response echoes seq. The first message
must be {"type": "hello", "role_request": "controller"|"viewer"}.
"""

from __future__ import annotations

import asyncio
import copy
import itertools
import json
import time
from dataclasses import dataclass, field
from enum import Enum

from . import statepack
from .dynamics import Simulation, StepCounters
from .model import ParamError, SoftBody, Vec3, set_param, validate
from .stats import EmptyWindowError, PerfTracker, compute_energy
from .topology import Scene, set_lod
from .model import Attachment, AttachmentMode

DRAG_STIFFNESS = 50.0  # N/m, mouse-drag pull


class Role(str, Enum):
    controller = "controller"
    viewer = "viewer"


@dataclass
class Session:
    id: str
    role: Role


MUTATING_TYPES = {
    "set_param",
    "set_integrator",
    "set_lod",
    "pause",
    "resume",
    "reset",
    "dump",
    "record_start",
    "record_stop",
    "load_snapshot",
    "attach",
    "detach",
    "drag_force",
}


def _spring_index_pairs(body: SoftBody) -> list[list[int]]:
    order = {p.id: i for i, p in enumerate(body.particles)}
    return [[order[s.a], order[s.b]] for s in sorted(body.springs, key=lambda s: s.id)]


class SimService:
    """Protocol core: sessions, command handling, stepping, frame building.

    Transport-agnostic; the WebSocket adapter below is one client of it."""

    def __init__(self, scene: Scene, frame_rate: float = 30.0, realtime: bool = True):
        self.scene_name = scene.name
        self._initial_body = copy.deepcopy(scene.body)
        self._initial_params = copy.deepcopy(scene.params)
        self.sim = Simulation(
            body=copy.deepcopy(scene.body),
            params=copy.deepcopy(scene.params),
            counters=StepCounters(),
        )
        self.sim.drag_stiffness = DRAG_STIFFNESS
        self.frame_rate = frame_rate
        self.realtime = realtime
        self.paused = False
        self.topology_version = 0
        self.perf = PerfTracker()
        self.recorder: statepack.Recorder | None = None
        self.command_log: list[tuple[int, dict]] = []
        self.state_changed = asyncio.Event() if _has_loop() else None
        self._sessions: dict[str, Session] = {}
        self._ids = itertools.count(1)

    # -- sessions ---------------------------------------------------------

    def register(self, role_request: str) -> Session:
        """First controller request wins; everyone else is a viewer."""
        role = Role.viewer
        if role_request == Role.controller.value and not any(
            s.role == Role.controller for s in self._sessions.values()
        ):
            role = Role.controller
        session = Session(id=f"s{next(self._ids)}", role=role)
        self._sessions[session.id] = session
        return session

    def unregister(self, session_id: str) -> None:
        self._sessions.pop(session_id, None)

    # -- control ----------------------------------------------------------

    def handle_control(self, session: Session, msg: dict) -> dict:
        seq = msg.get("seq")
        mtype = msg.get("type")
        if mtype not in MUTATING_TYPES:
            return {"type": "error", "seq": seq, "message": f"unknown message type: {mtype}"}
        if session.role != Role.controller:
            return {
                "type": "warning",
                "seq": seq,
                "message": "insufficient permissions: viewer sessions cannot modify the simulation",
            }
        try:
            extra = self._apply(msg)
        except ParamError as exc:
            return {"type": "error", "seq": seq, "message": str(exc)}
        except (ValueError, KeyError, OSError, statepack.SnapshotError,
                statepack.RecordingError) as exc:
            return {"type": "error", "seq": seq, "message": str(exc)}
        self.command_log.append((self.sim.step_index, _loggable(msg)))
        self._notify()
        ack = {"type": "ack", "seq": seq, "effective_step": self.sim.step_index}
        ack.update(extra)
        return ack

    def _apply(self, msg: dict) -> dict:
        mtype = msg["type"]
        sim = self.sim
        if mtype == "set_param":
            sim.params = set_param(sim.params, msg["field"], msg["value"])
        elif mtype == "set_integrator":
            sim.params = set_param(sim.params, "integrator", msg["kind"])
        elif mtype == "set_lod":
            sim.body = set_lod(sim.body, int(msg["level"]))
            self.topology_version += 1
        elif mtype == "pause":
            self.paused = True
        elif mtype == "resume":
            self.paused = False
        elif mtype == "reset":
            self.sim = Simulation(
                body=copy.deepcopy(self._initial_body),
                params=copy.deepcopy(self._initial_params),
                counters=StepCounters(),
            )
            self.sim.drag_stiffness = DRAG_STIFFNESS
            self.topology_version += 1
        elif mtype == "dump":
            snap = statepack.take_snapshot(sim)
            path = statepack.dump(snap, msg.get("path") or "snapshot.json")
            return {"path": path}
        elif mtype == "record_start":
            if self.recorder is not None:
                raise statepack.RecordingError("recording already active")
            self.recorder = statepack.Recorder(
                self.scene_name, int(msg["interval_steps"])
            )
            self.recorder.observe(sim)
        elif mtype == "record_stop":
            if self.recorder is None:
                raise statepack.RecordingError("no recording active")
            rec = self.recorder.recording
            self.recorder = None
            path = msg.get("path")
            if path:
                statepack.save_recording(rec, path)
            return {"snapshots": len(rec.snapshots), "path": path}
        elif mtype == "load_snapshot":
            snap = statepack.load(msg["path"])
            self.sim = statepack.restore(snap)
            self.sim.drag_stiffness = DRAG_STIFFNESS
            self.topology_version += 1
        elif mtype == "attach":
            pid = int(msg["particle_id"])
            if pid not in {p.id for p in sim.body.particles}:
                raise ValueError(f"no particle {pid}")
            sim.body.attachments = [
                a for a in sim.body.attachments if a.particle_id != pid
            ]
            sim.body.attachments.append(
                Attachment(
                    particle_id=pid,
                    anchor=Vec3.from_json(msg["anchor"]),
                    mode=AttachmentMode(msg.get("mode", "hard_pin")),
                    stiffness=float(msg.get("stiffness", 0.0)),
                    damping=float(msg.get("damping", 0.0)),
                )
            )
        elif mtype == "detach":
            pid = int(msg["particle_id"])
            sim.body.attachments = [
                a for a in sim.body.attachments if a.particle_id != pid
            ]
        elif mtype == "drag_force":
            pid = int(msg["particle_id"])
            if pid not in {p.id for p in sim.body.particles}:
                raise ValueError(f"no particle {pid}")
            if msg.get("active", True):
                sim.drag_targets[pid] = Vec3.from_json(msg["target"])
            else:
                sim.drag_targets.pop(pid, None)
        else:  # pragma: no cover
            raise ValueError(f"unhandled message type {mtype}")
        return {}

    def _notify(self) -> None:
        if self.state_changed is not None:
            self.state_changed.set()

    # -- stepping and frames ----------------------------------------------

    def step_once(self) -> None:
        if self.paused or self.sim.counters.diverged:
            return
        t0 = time.perf_counter()
        self.sim.step()
        self.perf.sample_step(time.perf_counter() - t0)
        if self.recorder is not None:
            self.recorder.observe(self.sim)

    def build_frame(self) -> dict:
        sim = self.sim
        positions: list[float] = []
        for p in sim.body.particles:
            positions.extend((p.position.x, p.position.y, p.position.z))
        try:
            stats = self.perf.report(
                200, sim.body, sim.counters.force_evaluations
            ).to_json()
        except EmptyWindowError:
            stats = None
        return {
            "type": "frame",
            "step_index": sim.step_index,
            "time": sim.time,
            "positions": positions,
            "topology_version": self.topology_version,
            "diverged": sim.counters.diverged,
            "stats": stats,
            "energy": compute_energy(sim.body, sim.params).to_json(),
        }

    def frame_with_topology(self) -> dict:
        frame = self.build_frame()
        frame["spring_index_pairs"] = _spring_index_pairs(self.sim.body)
        return frame

    async def stepping_loop(self) -> None:
        """Advance the simulation; real-time pacing (sim seconds per wall
        second) when realtime, otherwise as fast as the loop allows."""
        tick = 0.005
        while True:
            if not self.paused and not self.sim.counters.diverged:
                if self.realtime:
                    batch = max(1, int(tick / self.sim.params.dt))
                else:
                    batch = 50
                for _ in range(batch):
                    self.step_once()
            await asyncio.sleep(tick)


def _has_loop() -> bool:
    try:
        asyncio.get_running_loop()
        return True
    except RuntimeError:
        return False


def _loggable(msg: dict) -> dict:
    return {k: v for k, v in msg.items() if k != "seq"}


def replay_schedule(
    scene: Scene, log: list[tuple[int, dict]], total_steps: int
) -> Simulation:
    """Re-run a logged command schedule deterministically: each logged command
    is applied at its recorded effective step index, before the step that
    follows it. Reproduces the live trajectory bit-exactly."""
    svc = SimService(scene, realtime=False)
    controller = svc.register(Role.controller.value)
    # pause/resume and file I/O commands do not affect the trajectory in
    # step-index space; skip them so a paused live session replays cleanly
    skip = {"pause", "resume", "dump", "record_start", "record_stop"}
    pending = sorted(
        (e for e in log if e[1].get("type") not in skip), key=lambda e: e[0]
    )
    idx = 0
    while True:
        while idx < len(pending) and pending[idx][0] <= svc.sim.step_index:
            resp = svc.handle_control(controller, dict(pending[idx][1], seq=idx))
            if resp["type"] == "error":
                raise RuntimeError(f"replay failed at step {pending[idx][0]}: {resp}")
            idx += 1
        if svc.sim.step_index >= total_steps:
            break
        svc.step_once()
    return svc.sim


# -- WebSocket adapter -----------------------------------------------------


async def _client_sender(svc: SimService, ws, conn_state: dict) -> None:
    """Push frames at the configured rate; re-send topology pairs whenever the
    topology version moves. Latest-wins: frames are built on demand, so a slow
    consumer only lowers its own rate."""
    period = 1.0 / svc.frame_rate
    while True:
        if conn_state["topology_version"] != svc.topology_version:
            frame = svc.frame_with_topology()
            conn_state["topology_version"] = svc.topology_version
        else:
            frame = svc.build_frame()
        await ws.send(json.dumps(frame))
        await asyncio.sleep(period)


async def _handle_connection(svc: SimService, ws) -> None:
    import websockets

    try:
        raw = await ws.recv()
        hello = json.loads(raw)
    except (json.JSONDecodeError, websockets.ConnectionClosed):
        await ws.close()
        return
    if hello.get("type") != "hello":
        await ws.send(json.dumps({"type": "error", "seq": hello.get("seq"),
                                  "message": "expected hello handshake"}))
        await ws.close()
        return
    session = svc.register(hello.get("role_request", "viewer"))
    await ws.send(
        json.dumps(
            {
                "type": "welcome",
                "seq": hello.get("seq"),
                "session_id": session.id,
                "role": session.role.value,
                "scene": svc.scene_name,
            }
        )
    )
    conn_state = {"topology_version": -1}
    sender = asyncio.create_task(_client_sender(svc, ws, conn_state))
    try:
        async for raw in ws:
            try:
                msg = json.loads(raw)
            except json.JSONDecodeError:
                await ws.send(json.dumps({"type": "error", "seq": None,
                                          "message": "malformed JSON"}))
                continue
            await ws.send(json.dumps(svc.handle_control(session, msg)))
    except websockets.ConnectionClosed:
        pass
    finally:
        sender.cancel()
        svc.unregister(session.id)


async def serve(
    scene: Scene,
    host: str = "127.0.0.1",
    port: int = 8765,
    frame_rate: float = 30.0,
    realtime: bool = True,
    ready: asyncio.Event | None = None,
):
    """Run the simulation service until cancelled."""
    import websockets

    violations = validate(scene.body)
    if violations:
        raise ValueError("; ".join(str(v) for v in violations))
    svc = SimService(scene, frame_rate=frame_rate, realtime=realtime)
    stepper = asyncio.create_task(svc.stepping_loop())
    async with websockets.serve(lambda ws: _handle_connection(svc, ws), host, port):
        if ready is not None:
            ready.set()
        try:
            await asyncio.Future()
        finally:
            stepper.cancel()
