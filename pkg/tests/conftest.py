import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from softbench import SimParams, Vec3, build_chain
from softbench.topology import Scene


def oscillator_scene(
    k: float = 2.0,
    m: float = 1.0,
    rest: float = 1.0,
    stretch: float = 0.2,
    dt: float = 1e-3,
    spring_damping: float = 0.0,
) -> Scene:
    """Undamped (by default) two-particle oscillator, symmetric about the
    origin, stretched by `stretch` at t=0. Angular frequency of the symmetric
    mode is omega = sqrt(2 k / m)."""
    body = build_chain(2, spacing=rest, mass=m, stiffness=k, damping=spring_damping)
    half = (rest + stretch) / 2.0
    body.particles[0].position = Vec3(-half, 0.0, 0.0)
    body.particles[1].position = Vec3(half, 0.0, 0.0)
    params = SimParams(dt=dt, gravity=Vec3(0.0, 0.0, 0.0))
    return Scene(body=body, params=params, name="oscillator")


def oscillator_analytic(
    t: float,
    k: float = 2.0,
    m: float = 1.0,
    rest: float = 1.0,
    stretch: float = 0.2,
) -> list[Vec3]:
    """Closed-form positions of the symmetric mode at time t."""
    omega = math.sqrt(2.0 * k / m)
    half = rest / 2.0 + (stretch / 2.0) * math.cos(omega * t)
    return [Vec3(-half, 0.0, 0.0), Vec3(half, 0.0, 0.0)]


def damped_pinned_scene(omega: float = 100.0, dt: float = 1e-3) -> Scene:
    """Critically damped spring with one pinned end: both eigenvalues at
    -omega, so explicit Euler is stable exactly up to dt = 2/omega."""
    m = 1.0
    k = omega * omega * m
    kd = 2.0 * m * omega
    body = build_chain(2, spacing=1.0, mass=m, stiffness=k, damping=kd)
    body.particles[0].pinned = True
    body.particles[1].position = Vec3(1.1, 0.0, 0.0)
    params = SimParams(dt=dt, gravity=Vec3(0.0, 0.0, 0.0))
    return Scene(body=body, params=params, name="damped-pinned")


DATA_DIR = Path(__file__).parent / "data"
