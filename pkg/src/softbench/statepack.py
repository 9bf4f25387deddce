"""State dump, reload, recording, replay, and CSV export.

Floats survive JSON round-trips bit-exactly (shortest round-trip decimal),
so dump -> load -> restore -> step reproduces an uninterrupted run.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

from .dynamics import Simulation, StepCounters
from .model import (
    Attachment,
    AttachmentMode,
    Dimensionality,
    Particle,
    SimParams,
    SoftBody,
    Spring,
    SpringKind,
    Vec3,
    ZERO,
)

SCHEMA_VERSION = 1


class SnapshotError(Exception):
    pass


class SchemaVersionError(SnapshotError):
    def __init__(self, found: int, expected: int):
        self.found = found
        self.expected = expected
        super().__init__(f"snapshot schema_version {found}, this build reads {expected}")


class RecordingError(Exception):
    pass


@dataclass
class Snapshot:
    """Complete, self-contained dump of a simulation at one instant."""

    schema_version: int
    time: float
    step_index: int
    params: SimParams
    particles: list[dict]
    springs: list[dict]
    attachments: list[dict]
    counters: StepCounters

    def to_json(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "time": self.time,
            "step_index": self.step_index,
            "params": self.params.to_json(),
            "particles": self.particles,
            "springs": self.springs,
            "attachments": self.attachments,
            "counters": self.counters.to_json(),
        }

    @staticmethod
    def from_json(d: dict) -> "Snapshot":
        version = int(d.get("schema_version", -1))
        if version != SCHEMA_VERSION:
            raise SchemaVersionError(version, SCHEMA_VERSION)
        return Snapshot(
            schema_version=version,
            time=float(d["time"]),
            step_index=int(d["step_index"]),
            params=SimParams.from_json(d["params"]),
            particles=list(d["particles"]),
            springs=list(d["springs"]),
            attachments=list(d["attachments"]),
            counters=StepCounters.from_json(d["counters"]),
        )


def _attachment_to_json(a: Attachment) -> dict:
    d = {"particle_id": a.particle_id, "anchor": a.anchor.to_json(), "mode": a.mode.value}
    if a.mode == AttachmentMode.elastic:
        d["stiffness"] = a.stiffness
        d["damping"] = a.damping
    return d


def take_snapshot(sim: Simulation) -> Snapshot:
    """Capture the full state, including per-particle force breakdowns and
    per-spring extension/axial force."""
    body, params = sim.body, sim.params
    breakdowns = sim.breakdowns()
    particles = [
        {
            "id": p.id,
            "mass": p.mass,
            "position": p.position.to_json(),
            "velocity": p.velocity.to_json(),
            "pinned": p.pinned,
            "force_breakdown": bd.to_json(),
        }
        for p, bd in zip(body.particles, breakdowns)
    ]
    index = {p.id: p for p in body.particles}
    springs = []
    for s in sorted(body.springs, key=lambda s: s.id):
        pa, pb = index[s.a], index[s.b]
        length = (pb.position - pa.position).norm()
        ext = length - s.rest_length
        springs.append(
            {
                "id": s.id,
                "a": s.a,
                "b": s.b,
                "rest_length": s.rest_length,
                "current_length": length,
                "extension": ext,
                "axial_force_magnitude": abs(params.stiffness_scale * s.stiffness * ext),
                "stiffness": s.stiffness,
                "damping": s.damping,
                "kind": s.kind.value,
            }
        )
    return Snapshot(
        schema_version=SCHEMA_VERSION,
        time=sim.time,
        step_index=sim.step_index,
        params=params,
        particles=particles,
        springs=springs,
        attachments=[_attachment_to_json(a) for a in body.attachments],
        counters=StepCounters(
            steps=sim.counters.steps,
            force_evaluations=sim.counters.force_evaluations,
            diverged=sim.counters.diverged,
        ),
    )


def dump(snapshot: Snapshot, path: str) -> str:
    """Write the snapshot as JSON; returns the path actually written.

    If the requested path is unwritable, falls back to the platform temporary
    directory (minimal guarantee: the dump always lands somewhere)."""
    payload = json.dumps(snapshot.to_json(), indent=1)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(payload)
        return path
    except OSError:
        fd, alt = tempfile.mkstemp(prefix="softbench-dump-", suffix=".json")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        return alt


def load(path: str) -> Snapshot:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SnapshotError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    return Snapshot.from_json(d)


def restore(snapshot: Snapshot) -> Simulation:
    """Rebuild a steppable Simulation from a snapshot.

    Faces and dimensionality are not part of the dump (they do not affect
    dynamics); the restored body carries no faces."""
    particles = [
        Particle(
            id=int(p["id"]),
            mass=float(p["mass"]),
            position=Vec3.from_json(p["position"]),
            velocity=Vec3.from_json(p["velocity"]),
            pinned=bool(p["pinned"]),
        )
        for p in snapshot.particles
    ]
    springs = [
        Spring(
            id=int(s["id"]),
            a=int(s["a"]),
            b=int(s["b"]),
            rest_length=float(s["rest_length"]),
            stiffness=float(s["stiffness"]),
            damping=float(s.get("damping", 0.0)),
            kind=SpringKind(s.get("kind", "structural")),
        )
        for s in snapshot.springs
    ]
    attachments = [
        Attachment(
            particle_id=int(a["particle_id"]),
            anchor=Vec3.from_json(a["anchor"]),
            mode=AttachmentMode(a["mode"]),
            stiffness=float(a.get("stiffness", 0.0)),
            damping=float(a.get("damping", 0.0)),
        )
        for a in snapshot.attachments
    ]
    body = SoftBody(
        particles=particles,
        springs=springs,
        faces=[],
        dimensionality=Dimensionality.one,
        attachments=attachments,
    )
    sim = Simulation(
        body=body,
        params=snapshot.params,
        counters=StepCounters(
            steps=snapshot.counters.steps,
            force_evaluations=snapshot.counters.force_evaluations,
            diverged=snapshot.counters.diverged,
        ),
        time=snapshot.time,
        step_index=snapshot.step_index,
    )
    for p in snapshot.particles:
        coll = Vec3.from_json(p["force_breakdown"]["collision"])
        if coll != ZERO:
            sim.collision_forces[int(p["id"])] = coll
    return sim


@dataclass
class Recording:
    scene_name: str
    interval_steps: int
    snapshots: list[Snapshot] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "scene_name": self.scene_name,
            "interval_steps": self.interval_steps,
            "snapshots": [s.to_json() for s in self.snapshots],
        }

    @staticmethod
    def from_json(d: dict) -> "Recording":
        return Recording(
            scene_name=str(d["scene_name"]),
            interval_steps=int(d["interval_steps"]),
            snapshots=[Snapshot.from_json(s) for s in d["snapshots"]],
        )


def save_recording(rec: Recording, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(rec.to_json(), fh, indent=1)


def load_recording(path: str) -> Recording:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SnapshotError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    return Recording.from_json(d)


class Recorder:
    """Captures a snapshot every interval_steps steps, starting immediately."""

    def __init__(self, scene_name: str, interval_steps: int):
        if interval_steps < 1:
            raise RecordingError("interval_steps must be >= 1")
        self.recording = Recording(scene_name=scene_name, interval_steps=interval_steps)
        self._next_capture: int | None = None

    def observe(self, sim: Simulation) -> None:
        """Call after every step (and once at start)."""
        if self._next_capture is None:
            self._next_capture = sim.step_index
        if sim.step_index >= self._next_capture:
            self.recording.snapshots.append(take_snapshot(sim))
            self._next_capture = sim.step_index + self.recording.interval_steps


def replay(recording: Recording):
    """Yield snapshots in order without integration (pure playback)."""
    if not recording.snapshots:
        raise RecordingError("recording is empty")
    yield from recording.snapshots


PARTICLE_CSV_COLUMNS = [
    "step_index", "time", "particle_id", "mass",
    "px", "py", "pz", "vx", "vy", "vz",
    "f_spring_x", "f_spring_y", "f_spring_z",
    "f_gravity_x", "f_gravity_y", "f_gravity_z",
    "f_drag_x", "f_drag_y", "f_drag_z",
    "f_collision_x", "f_collision_y", "f_collision_z",
    "f_attach_x", "f_attach_y", "f_attach_z",
    "f_total_x", "f_total_y", "f_total_z",
]
SPRING_CSV_COLUMNS = [
    "step_index", "time", "spring_id", "a", "b",
    "rest_length", "current_length", "extension", "axial_force",
]


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _particle_rows(snap: Snapshot):
    for p in sorted(snap.particles, key=lambda p: p["id"]):
        bd = p["force_breakdown"]
        row = [snap.step_index, snap.time, p["id"], p["mass"]]
        row += [p["position"][k] for k in "xyz"]
        row += [p["velocity"][k] for k in "xyz"]
        for part in ("spring", "gravity", "drag", "collision", "attachment", "total"):
            row += [bd[part][k] for k in "xyz"]
        yield row


def _spring_rows(snap: Snapshot):
    for s in snap.springs:
        yield [
            snap.step_index, snap.time, s["id"], s["a"], s["b"],
            s["rest_length"], s["current_length"], s["extension"],
            s["axial_force_magnitude"],
        ]


def export_csv(source: Snapshot | Recording, path: str) -> tuple[str, str]:
    """Write particle and spring tables; `path` names the particle table, the
    spring table goes next to it with a `_springs` suffix. Returns both paths."""
    snaps = source.snapshots if isinstance(source, Recording) else [source]
    root, ext = os.path.splitext(path)
    springs_path = f"{root}_springs{ext or '.csv'}"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(PARTICLE_CSV_COLUMNS) + "\n")
        for snap in snaps:
            for row in _particle_rows(snap):
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    with open(springs_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(SPRING_CSV_COLUMNS) + "\n")
        for snap in snaps:
            for row in _spring_rows(snap):
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path, springs_path
