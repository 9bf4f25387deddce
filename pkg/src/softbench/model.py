"""Domain types for elastic bodies, simulation parameters, and force accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum


@dataclass(frozen=True)
class Vec3:
    """3-component vector. SI units throughout (m, m/s, N)."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def scale(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)

    def to_json(self) -> dict:
        return {"x": self.x, "y": self.y, "z": self.z}

    @staticmethod
    def from_json(d: dict) -> "Vec3":
        return Vec3(float(d["x"]), float(d["y"]), float(d["z"]))


ZERO = Vec3(0.0, 0.0, 0.0)


class SpringKind(str, Enum):
    structural = "structural"
    radial = "radial"
    internal = "internal"


class Dimensionality(str, Enum):
    one = "one"
    two = "two"
    three = "three"


class IntegratorKind(str, Enum):
    euler_explicit = "euler_explicit"
    euler_semi_implicit = "euler_semi_implicit"
    midpoint = "midpoint"
    rk4 = "rk4"

    @property
    def force_evals_per_step(self) -> int:
        return {
            IntegratorKind.euler_explicit: 1,
            IntegratorKind.euler_semi_implicit: 1,
            IntegratorKind.midpoint: 2,
            IntegratorKind.rk4: 4,
        }[self]


@dataclass
class Particle:
    id: int
    mass: float
    position: Vec3
    velocity: Vec3
    pinned: bool = False


@dataclass
class Spring:
    id: int
    a: int
    b: int
    rest_length: float
    stiffness: float
    damping: float
    kind: SpringKind = SpringKind.structural


@dataclass
class Face:
    v0: int
    v1: int
    v2: int


class AttachmentMode(str, Enum):
    hard_pin = "hard_pin"
    elastic = "elastic"


@dataclass
class Attachment:
    """Ties a soft-body particle to a world-space hardbody anchor point."""

    particle_id: int
    anchor: Vec3
    mode: AttachmentMode = AttachmentMode.hard_pin
    stiffness: float = 0.0  # elastic mode only
    damping: float = 0.0


@dataclass
class SoftBody:
    particles: list[Particle] = field(default_factory=list)
    springs: list[Spring] = field(default_factory=list)
    faces: list[Face] = field(default_factory=list)
    dimensionality: Dimensionality = Dimensionality.one
    lod: int = 0
    attachments: list[Attachment] = field(default_factory=list)

    def particle_by_id(self, pid: int) -> Particle:
        return self._index()[pid]

    def _index(self) -> dict[int, Particle]:
        return {p.id: p for p in self.particles}

    def total_mass(self) -> float:
        return sum(p.mass for p in self.particles)

    def centroid(self) -> Vec3:
        n = len(self.particles)
        acc = ZERO
        for p in self.particles:
            acc = acc + p.position
        return acc.scale(1.0 / n) if n else ZERO

    def centroid_velocity(self) -> Vec3:
        n = len(self.particles)
        acc = ZERO
        for p in self.particles:
            acc = acc + p.velocity
        return acc.scale(1.0 / n) if n else ZERO


@dataclass
class SimParams:
    dt: float = 0.01
    gravity: Vec3 = field(default_factory=lambda: Vec3(0.0, -9.81, 0.0))
    drag_coeff: float = 0.0
    stiffness_scale: float = 1.0
    damping_scale: float = 1.0
    floor_enabled: bool = False
    floor_y: float = 0.0
    restitution: float = 0.5
    integrator: IntegratorKind = IntegratorKind.euler_semi_implicit

    def to_json(self) -> dict:
        return {
            "dt": self.dt,
            "gravity": self.gravity.to_json(),
            "drag_coeff": self.drag_coeff,
            "stiffness_scale": self.stiffness_scale,
            "damping_scale": self.damping_scale,
            "floor_enabled": self.floor_enabled,
            "floor_y": self.floor_y,
            "restitution": self.restitution,
            "integrator": self.integrator.value,
        }

    @staticmethod
    def from_json(d: dict) -> "SimParams":
        p = SimParams()
        return set_params_from_dict(p, d)


class ParamError(ValueError):
    """Rejected parameter update: unknown field or invariant violation."""


_PARAM_CHECKS = {
    "dt": lambda v: v > 0 or "dt must be > 0",
    "drag_coeff": lambda v: v >= 0 or "drag_coeff must be >= 0",
    "stiffness_scale": lambda v: v > 0 or "stiffness_scale must be > 0",
    "damping_scale": lambda v: v > 0 or "damping_scale must be > 0",
    "restitution": lambda v: 0 <= v <= 1 or "restitution must be in [0,1]",
    "floor_y": lambda v: math.isfinite(v) or "floor_y must be finite",
}


def set_param(params: SimParams, name: str, value) -> SimParams:
    """Return updated params; raises ParamError on unknown field or bad value.

    Never mutates the input."""
    if name not in SimParams.__dataclass_fields__:
        raise ParamError(f"unknown parameter: {name}")
    if name == "integrator":
        try:
            value = IntegratorKind(value)
        except ValueError:
            raise ParamError(f"unknown integrator: {value}") from None
    elif name == "gravity":
        if isinstance(value, dict):
            value = Vec3.from_json(value)
        if not isinstance(value, Vec3):
            raise ParamError("gravity must be a Vec3")
        if not value.is_finite():
            raise ParamError("gravity must be finite")
    elif name == "floor_enabled":
        value = bool(value)
    else:
        value = float(value)
        check = _PARAM_CHECKS.get(name)
        if check is not None:
            verdict = check(value)
            if verdict is not True:
                raise ParamError(verdict)
    return replace(params, **{name: value})


def set_params_from_dict(params: SimParams, d: dict) -> SimParams:
    for k, v in d.items():
        params = set_param(params, k, v)
    return params


@dataclass
class ForceBreakdown:
    """Per-particle force decomposition; total is the componentwise sum."""

    spring: Vec3 = ZERO
    gravity: Vec3 = ZERO
    drag: Vec3 = ZERO
    collision: Vec3 = ZERO
    attachment: Vec3 = ZERO

    @property
    def total(self) -> Vec3:
        return self.spring + self.gravity + self.drag + self.collision + self.attachment

    def to_json(self) -> dict:
        return {
            "spring": self.spring.to_json(),
            "gravity": self.gravity.to_json(),
            "drag": self.drag.to_json(),
            "collision": self.collision.to_json(),
            "attachment": self.attachment.to_json(),
            "total": self.total.to_json(),
        }

    @staticmethod
    def from_json(d: dict) -> "ForceBreakdown":
        return ForceBreakdown(
            spring=Vec3.from_json(d["spring"]),
            gravity=Vec3.from_json(d["gravity"]),
            drag=Vec3.from_json(d["drag"]),
            collision=Vec3.from_json(d["collision"]),
            attachment=Vec3.from_json(d["attachment"]),
        )


@dataclass
class Violation:
    subject: str  # e.g. "particle 3", "spring 7", "body"
    reason: str

    def __str__(self) -> str:
        return f"{self.subject}: {self.reason}"


def validate(body: SoftBody) -> list[Violation]:
    """Check every invariant; returns all violations (empty list = valid)."""
    out: list[Violation] = []
    ids = set()
    for p in body.particles:
        if p.id in ids:
            out.append(Violation(f"particle {p.id}", "duplicate id"))
        ids.add(p.id)
        if not p.mass > 0:
            out.append(Violation(f"particle {p.id}", "non-positive mass"))
        if not (p.position.is_finite() and p.velocity.is_finite()):
            out.append(Violation(f"particle {p.id}", "non-finite state"))

    seen_pairs = set()
    for s in body.springs:
        if s.a == s.b:
            out.append(Violation(f"spring {s.id}", "degenerate spring (a == b)"))
        for end in (s.a, s.b):
            if end not in ids:
                out.append(Violation(f"spring {s.id}", f"dangling endpoint {end}"))
        if not s.rest_length > 0:
            out.append(Violation(f"spring {s.id}", "non-positive rest_length"))
        if s.stiffness < 0:
            out.append(Violation(f"spring {s.id}", "negative stiffness"))
        if s.damping < 0:
            out.append(Violation(f"spring {s.id}", "negative damping"))
        pair = (min(s.a, s.b), max(s.a, s.b))
        if pair in seen_pairs:
            out.append(Violation(f"spring {s.id}", f"duplicate spring pair {pair}"))
        seen_pairs.add(pair)

    for i, f in enumerate(body.faces):
        verts = (f.v0, f.v1, f.v2)
        if len(set(verts)) != 3:
            out.append(Violation(f"face {i}", "repeated vertex"))
        for v in verts:
            if v not in ids:
                out.append(Violation(f"face {i}", f"dangling vertex {v}"))

    for a in body.attachments:
        if a.particle_id not in ids:
            out.append(Violation("attachment", f"dangling particle_id {a.particle_id}"))
        if a.mode == AttachmentMode.elastic and not a.stiffness > 0:
            out.append(Violation("attachment", "elastic attachment needs stiffness > 0"))

    if body.dimensionality == Dimensionality.three:
        # Closed-surface check over the surface graph only: internal springs and
        # particles not referenced by any face (e.g. a core hub) are excluded.
        surface_ids = {v for f in body.faces for v in (f.v0, f.v1, f.v2)}
        v = sum(1 for p in body.particles if p.id in surface_ids)
        e = sum(1 for s in body.springs if s.kind != SpringKind.internal)
        fc = len(body.faces)
        if v - e + fc != 2:
            out.append(
                Violation("body", f"mesh not closed: V-E+F = {v - e + fc}, expected 2")
            )
    return out
