"""Comparative benchmarking of integrators: accuracy vs cost vs stability."""

from __future__ import annotations

import copy
import math
import time
from dataclasses import dataclass
from typing import Callable, Sequence

from .dynamics import Simulation, StepCounters
from .model import IntegratorKind, Vec3
from .stats import compute_energy, memory_estimate
from .topology import Scene

# a run counts as unstable once relative energy drift exceeds this
STABILITY_DRIFT_LIMIT = 10.0


class OracleError(RuntimeError):
    pass


class BracketError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass


@dataclass
class BenchRow:
    scenario: str
    integrator: IntegratorKind
    dt: float
    horizon: float
    global_error: float
    wall_time: float
    force_evaluations: int
    energy_drift: float
    stable: bool
    memory_estimate_bytes: int


def _fresh_sim(scene: Scene, integrator: IntegratorKind, dt: float) -> Simulation:
    body = copy.deepcopy(scene.body)
    params = copy.deepcopy(scene.params)
    params.integrator = integrator
    params.dt = dt
    return Simulation(body=body, params=params, counters=StepCounters())


def _positions(sim: Simulation) -> list[Vec3]:
    return [p.position for p in sim.body.particles]


def _energy_drift(e0: float, e1: float) -> float:
    if not math.isfinite(e1):
        return math.inf
    if e0 == 0.0:
        return abs(e1)
    return abs(e1 - e0) / abs(e0)


def _steps_for(horizon: float, dt: float) -> int:
    return int(math.floor(horizon / dt + 1e-9))


def make_rk4_oracle(scene: Scene, dt_base: float) -> Callable[[float], list[Vec3]]:
    """Reference trajectory: rk4 at roughly dt_base, with dt adjusted so the
    requested time is hit exactly."""

    def oracle(t_end: float) -> list[Vec3]:
        n = max(1, round(t_end / dt_base))
        sim = _fresh_sim(scene, IntegratorKind.rk4, t_end / n)
        sim.run(n)
        if sim.counters.diverged:
            raise OracleError(f"oracle diverged on scenario {scene.name!r}")
        return _positions(sim)

    return oracle


def run_comparison(
    scene: Scene,
    integrators: Sequence[IntegratorKind],
    dts: Sequence[float],
    horizon: float,
    oracle: Callable[[float], list[Vec3]] | None = None,
) -> list[BenchRow]:
    """One BenchRow per (integrator, dt), measured against an rk4 oracle at
    min(dts)/100 (or a supplied analytic oracle mapping time -> positions).
    Step counts round down; each row's error is taken at its own end time.
    Everything except wall_time is deterministic."""
    if not dts or any(dt <= 0 for dt in dts):
        raise ValueError("dts must be non-empty and positive")
    if oracle is None:
        oracle = make_rk4_oracle(scene, min(dts) / 100.0)
    ref_cache: dict[float, list[Vec3]] = {}

    rows = []
    for integrator in sorted(integrators, key=lambda k: k.value):
        for dt in sorted(dts):
            steps = _steps_for(horizon, dt)
            t_end = steps * dt
            if t_end not in ref_cache:
                ref_cache[t_end] = oracle(t_end)
            ref = ref_cache[t_end]
            sim = _fresh_sim(scene, integrator, dt)
            e0 = compute_energy(sim.body, sim.params).total
            t0 = time.perf_counter()
            sim.run(steps)
            wall = time.perf_counter() - t0
            e1 = compute_energy(sim.body, sim.params).total
            drift = _energy_drift(e0, e1)
            diverged = sim.counters.diverged
            if diverged:
                error = math.inf
            else:
                error = max(
                    (p - r).norm() for p, r in zip(_positions(sim), ref)
                )
            rows.append(
                BenchRow(
                    scenario=scene.name,
                    integrator=integrator,
                    dt=dt,
                    horizon=horizon,
                    global_error=error,
                    wall_time=wall,
                    force_evaluations=sim.counters.force_evaluations,
                    energy_drift=drift,
                    stable=not diverged and drift <= STABILITY_DRIFT_LIMIT,
                    memory_estimate_bytes=memory_estimate(sim.body),
                )
            )
    return rows


def convergence_order(rows: Sequence[BenchRow]) -> float:
    """Least-squares slope of log(global_error) vs log(dt) for one integrator."""
    usable = [r for r in rows if r.stable and math.isfinite(r.global_error) and r.global_error > 0]
    if len(usable) < 3 or len({r.dt for r in usable}) < 3:
        raise InsufficientDataError("need >= 3 non-diverged rows with distinct dts")
    xs = [math.log(r.dt) for r in usable]
    ys = [math.log(r.global_error) for r in usable]
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    var = sum((x - mx) ** 2 for x in xs)
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return cov / var


def is_stable(scene: Scene, integrator: IntegratorKind, dt: float, horizon: float) -> bool:
    sim = _fresh_sim(scene, integrator, dt)
    e0 = compute_energy(sim.body, sim.params).total
    sim.run(_steps_for(horizon, dt))
    if sim.counters.diverged:
        return False
    e1 = compute_energy(sim.body, sim.params).total
    return _energy_drift(e0, e1) <= STABILITY_DRIFT_LIMIT


def stability_scan(
    integrator: IntegratorKind,
    scene: Scene,
    dt_range: tuple[float, float],
    horizon: float = 2.0,
) -> float:
    """Bisect the stable/unstable boundary to 2 significant digits; returns the
    largest dt observed stable."""
    lo, hi = dt_range
    if not (0 < lo < hi):
        raise ValueError("need 0 < lo < hi")
    lo_stable = is_stable(scene, integrator, lo, horizon)
    hi_stable = is_stable(scene, integrator, hi, horizon)
    if lo_stable == hi_stable:
        which = "stable" if lo_stable else "unstable"
        raise BracketError(f"both bracket ends are {which}: [{lo}, {hi}]")
    while (hi - lo) > 0.005 * lo:
        mid = math.sqrt(lo * hi)
        if is_stable(scene, integrator, mid, horizon):
            lo = mid
        else:
            hi = mid
    return lo


BENCH_CSV_COLUMNS = [
    "scenario", "integrator", "dt", "horizon", "global_error", "wall_time",
    "force_evaluations", "energy_drift", "stable", "memory_estimate_bytes",
]


def export_bench_csv(rows: Sequence[BenchRow], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(BENCH_CSV_COLUMNS) + "\n")
        for r in rows:
            fh.write(
                ",".join(
                    [
                        r.scenario,
                        r.integrator.value,
                        f"{r.dt:.17g}",
                        f"{r.horizon:.17g}",
                        f"{r.global_error:.17g}",
                        f"{r.wall_time:.17g}",
                        str(r.force_evaluations),
                        f"{r.energy_drift:.17g}",
                        "true" if r.stable else "false",
                        str(r.memory_estimate_bytes),
                    ]
                )
                + "\n"
            )
