"""Force accumulation, runtime-switchable time integration, floor collision.

Everything here is deterministic: fixed accumulation order, fixed dt, no
wall-clock dependence. The same body + params + command schedule always
produces bit-identical trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    AttachmentMode,
    ForceBreakdown,
    IntegratorKind,
    Particle,
    SimParams,
    SoftBody,
    Vec3,
    ZERO,
)

DEGENERATE_EPS = 1e-12


class DivergedError(RuntimeError):
    """Stepping was attempted on a diverged (NaN/Inf) state."""


@dataclass
class StepCounters:
    steps: int = 0
    force_evaluations: int = 0
    diverged: bool = False

    def to_json(self) -> dict:
        return {
            "steps": self.steps,
            "force_evaluations": self.force_evaluations,
            "diverged": self.diverged,
        }

    @staticmethod
    def from_json(d: dict) -> "StepCounters":
        return StepCounters(
            steps=int(d["steps"]),
            force_evaluations=int(d["force_evaluations"]),
            diverged=bool(d["diverged"]),
        )


def _is_fixed(p: Particle, hard_pins: dict[int, Vec3]) -> bool:
    return p.pinned or p.id in hard_pins


def accumulate_forces(
    body: SoftBody,
    params: SimParams,
    positions: list[Vec3] | None = None,
    velocities: list[Vec3] | None = None,
    drag_pulls: dict[int, Vec3] | None = None,
    drag_stiffness: float = 0.0,
    warnings: list[str] | None = None,
) -> list[ForceBreakdown]:
    """Per-particle force breakdown at the given (or current) state.

    Accumulation order is fixed: gravity, drag, springs in ascending id,
    attachments in ascending particle id. Collision is positional (see
    resolve_floor) and always zero here. Degenerate springs (coincident
    endpoints) contribute zero force and append a warning.
    """
    n = len(body.particles)
    if positions is None:
        positions = [p.position for p in body.particles]
    if velocities is None:
        velocities = [p.velocity for p in body.particles]
    index = {p.id: i for i, p in enumerate(body.particles)}

    out = [ForceBreakdown() for _ in range(n)]
    for i, p in enumerate(body.particles):
        out[i].gravity = params.gravity.scale(p.mass)
        out[i].drag = velocities[i].scale(-params.drag_coeff)

    for s in sorted(body.springs, key=lambda s: s.id):
        ia, ib = index[s.a], index[s.b]
        delta = positions[ib] - positions[ia]
        length = delta.norm()
        if length < DEGENERATE_EPS:
            if warnings is not None:
                warnings.append(f"degenerate spring {s.id}: coincident endpoints")
            continue
        axis = delta.scale(1.0 / length)
        rel_v = (velocities[ib] - velocities[ia]).dot(axis)
        magnitude = (
            params.stiffness_scale * s.stiffness * (length - s.rest_length)
            + params.damping_scale * s.damping * rel_v
        )
        f = axis.scale(magnitude)
        out[ia].spring = out[ia].spring + f
        out[ib].spring = out[ib].spring - f

    for a in sorted(body.attachments, key=lambda a: a.particle_id):
        if a.mode != AttachmentMode.elastic:
            continue  # hard_pin is a positional constraint, not a force
        i = index[a.particle_id]
        delta = a.anchor - positions[i]
        length = delta.norm()
        if length < DEGENERATE_EPS:
            # at the anchor: only damping along nothing; treat as pure velocity damping
            out[i].attachment = out[i].attachment + velocities[i].scale(-a.damping)
            continue
        axis = delta.scale(1.0 / length)
        rel_v = (ZERO - velocities[i]).dot(axis)
        magnitude = a.stiffness * length + a.damping * rel_v
        out[i].attachment = out[i].attachment + axis.scale(magnitude)

    if drag_pulls:
        for pid in sorted(drag_pulls):
            i = index.get(pid)
            if i is None:
                continue
            pull = (drag_pulls[pid] - positions[i]).scale(drag_stiffness)
            out[i].attachment = out[i].attachment + pull
    return out


@dataclass
class Simulation:
    """Owns one steppable body + params + counters triple.

    Parameter edits and integrator switches must happen between steps (the
    service enforces this by draining its command queue at step boundaries).
    """

    body: SoftBody
    params: SimParams
    counters: StepCounters = field(default_factory=StepCounters)
    time: float = 0.0
    step_index: int = 0
    # impulse/dt applied by the floor on the most recent step, by particle id;
    # reported as the collision component of the next snapshot
    collision_forces: dict[int, Vec3] = field(default_factory=dict)
    # active UI drag pulls: particle id -> world target
    drag_targets: dict[int, Vec3] = field(default_factory=dict)
    drag_stiffness: float = 50.0
    warnings: list[str] = field(default_factory=list)

    def _hard_pins(self) -> dict[int, Vec3]:
        return {
            a.particle_id: a.anchor
            for a in self.body.attachments
            if a.mode == AttachmentMode.hard_pin
        }

    def _accelerations(
        self, positions: list[Vec3], velocities: list[Vec3], hard_pins: dict[int, Vec3]
    ) -> list[Vec3]:
        self.counters.force_evaluations += 1
        breakdowns = accumulate_forces(
            self.body,
            self.params,
            positions,
            velocities,
            self.drag_targets,
            self.drag_stiffness,
            self.warnings,
        )
        acc = []
        for p, bd in zip(self.body.particles, breakdowns):
            if _is_fixed(p, hard_pins):
                acc.append(ZERO)
            else:
                acc.append(bd.total.scale(1.0 / p.mass))
        return acc

    def breakdowns(self) -> list[ForceBreakdown]:
        """Force breakdown at the current state, with the last step's floor
        impulse filled into the collision component."""
        out = accumulate_forces(
            self.body,
            self.params,
            drag_pulls=self.drag_targets,
            drag_stiffness=self.drag_stiffness,
        )
        for bd, p in zip(out, self.body.particles):
            bd.collision = self.collision_forces.get(p.id, ZERO)
        return out

    def step(self) -> None:
        """Advance exactly params.dt with the active integrator, then resolve
        the floor, re-clamp pinned particles, and update counters."""
        if self.counters.diverged:
            raise DivergedError("simulation has diverged; reset or reload to continue")
        dt = self.params.dt
        hard_pins = self._hard_pins()
        x0 = [p.position for p in self.body.particles]
        v0 = [p.velocity for p in self.body.particles]
        kind = self.params.integrator

        if kind == IntegratorKind.euler_explicit:
            a0 = self._accelerations(x0, v0, hard_pins)
            x1 = [x + v.scale(dt) for x, v in zip(x0, v0)]
            v1 = [v + a.scale(dt) for v, a in zip(v0, a0)]
        elif kind == IntegratorKind.euler_semi_implicit:
            a0 = self._accelerations(x0, v0, hard_pins)
            v1 = [v + a.scale(dt) for v, a in zip(v0, a0)]
            x1 = [x + v.scale(dt) for x, v in zip(x0, v1)]
        elif kind == IntegratorKind.midpoint:
            a0 = self._accelerations(x0, v0, hard_pins)
            xh = [x + v.scale(dt / 2.0) for x, v in zip(x0, v0)]
            vh = [v + a.scale(dt / 2.0) for v, a in zip(v0, a0)]
            ah = self._accelerations(xh, vh, hard_pins)
            x1 = [x + v.scale(dt) for x, v in zip(x0, vh)]
            v1 = [v + a.scale(dt) for v, a in zip(v0, ah)]
        elif kind == IntegratorKind.rk4:
            a1 = self._accelerations(x0, v0, hard_pins)
            kx1, kv1 = v0, a1
            x2 = [x + k.scale(dt / 2.0) for x, k in zip(x0, kx1)]
            v2 = [v + k.scale(dt / 2.0) for v, k in zip(v0, kv1)]
            a2 = self._accelerations(x2, v2, hard_pins)
            kx2, kv2 = v2, a2
            x3 = [x + k.scale(dt / 2.0) for x, k in zip(x0, kx2)]
            v3 = [v + k.scale(dt / 2.0) for v, k in zip(v0, kv2)]
            a3 = self._accelerations(x3, v3, hard_pins)
            kx3, kv3 = v3, a3
            x4 = [x + k.scale(dt) for x, k in zip(x0, kx3)]
            v4 = [v + k.scale(dt) for v, k in zip(v0, kv3)]
            a4 = self._accelerations(x4, v4, hard_pins)
            kx4, kv4 = v4, a4
            x1 = [
                x + (k1 + (k2 + k3).scale(2.0) + k4).scale(dt / 6.0)
                for x, k1, k2, k3, k4 in zip(x0, kx1, kx2, kx3, kx4)
            ]
            v1 = [
                v + (k1 + (k2 + k3).scale(2.0) + k4).scale(dt / 6.0)
                for v, k1, k2, k3, k4 in zip(v0, kv1, kv2, kv3, kv4)
            ]
        else:  # pragma: no cover
            raise ValueError(f"unknown integrator: {kind}")

        self.collision_forces = {}
        diverged = False
        for i, p in enumerate(self.body.particles):
            if _is_fixed(p, hard_pins):
                anchor = hard_pins.get(p.id)
                if anchor is not None:
                    p.position = anchor
                p.velocity = ZERO
                continue
            pos, vel = x1[i], v1[i]
            if self.params.floor_enabled and pos.y < self.params.floor_y:
                new_vy = -self.params.restitution * vel.y if vel.y < 0 else vel.y
                impulse_y = p.mass * (new_vy - vel.y)
                pos = Vec3(pos.x, self.params.floor_y, pos.z)
                vel = Vec3(vel.x, new_vy, vel.z)
                if impulse_y != 0.0:
                    self.collision_forces[p.id] = Vec3(0.0, impulse_y / dt, 0.0)
            p.position = pos
            p.velocity = vel
            if not (pos.is_finite() and vel.is_finite()):
                diverged = True

        self.counters.steps += 1
        self.step_index += 1
        self.time += dt
        if diverged:
            self.counters.diverged = True

    def run(self, steps: int) -> None:
        for _ in range(steps):
            if self.counters.diverged:
                break
            self.step()
