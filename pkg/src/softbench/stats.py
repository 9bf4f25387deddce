"""Energy diagnostics and real-time performance metrics."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .model import SimParams, SoftBody

# Nominal record sizes for the analytic memory estimate (bytes per particle,
# spring, face). Deterministic, portable, not a heap measurement.
P_BYTES = 80
S_BYTES = 48
F_BYTES = 12


@dataclass
class EnergyReport:
    kinetic: float
    spring_potential: float
    gravitational: float

    @property
    def total(self) -> float:
        return self.kinetic + self.spring_potential + self.gravitational

    def to_json(self) -> dict:
        return {
            "kinetic": self.kinetic,
            "spring_potential": self.spring_potential,
            "gravitational": self.gravitational,
            "total": self.total,
        }


@dataclass
class PerformanceReport:
    window_steps: int
    steps_per_second: float
    mean_step_time: float
    p95_step_time: float
    force_evaluations: int
    memory_estimate_bytes: int

    def to_json(self) -> dict:
        return {
            "window_steps": self.window_steps,
            "steps_per_second": self.steps_per_second,
            "mean_step_time": self.mean_step_time,
            "p95_step_time": self.p95_step_time,
            "force_evaluations": self.force_evaluations,
            "memory_estimate_bytes": self.memory_estimate_bytes,
        }


def compute_energy(body: SoftBody, params: SimParams) -> EnergyReport:
    """Kinetic + spring potential + gravitational (datum at the origin)."""
    kinetic = 0.0
    gravitational = 0.0
    g = params.gravity
    for p in body.particles:
        v2 = p.velocity.dot(p.velocity)
        kinetic += 0.5 * p.mass * v2
        gravitational += p.mass * (-g.dot(p.position))
    index = {p.id: p for p in body.particles}
    spring_potential = 0.0
    for s in body.springs:
        length = (index[s.b].position - index[s.a].position).norm()
        ext = length - s.rest_length
        spring_potential += 0.5 * params.stiffness_scale * s.stiffness * ext * ext
    return EnergyReport(kinetic, spring_potential, gravitational)


def memory_estimate(body: SoftBody) -> int:
    return (
        len(body.particles) * P_BYTES
        + len(body.springs) * S_BYTES
        + len(body.faces) * F_BYTES
    )


class EmptyWindowError(ValueError):
    pass


class PerfTracker:
    """Accumulates per-step wall durations; reports over a trailing window.

    Timing values are excluded from determinism guarantees."""

    def __init__(self, max_samples: int = 10_000):
        self._samples: deque[float] = deque(maxlen=max_samples)

    def sample_step(self, wall_duration: float) -> None:
        self._samples.append(wall_duration)

    def __len__(self) -> int:
        return len(self._samples)

    def report(
        self, window: int, body: SoftBody, force_evaluations: int
    ) -> PerformanceReport:
        samples = list(self._samples)[-window:] if window > 0 else []
        if not samples:
            raise EmptyWindowError("no step samples in window")
        wall = sum(samples)
        ordered = sorted(samples)
        p95 = ordered[min(len(ordered) - 1, math.ceil(0.95 * len(ordered)) - 1)]
        return PerformanceReport(
            window_steps=len(samples),
            steps_per_second=len(samples) / wall if wall > 0 else float("inf"),
            mean_step_time=wall / len(samples),
            p95_step_time=p95,
            force_evaluations=force_evaluations,
            memory_estimate_bytes=memory_estimate(body),
        )
