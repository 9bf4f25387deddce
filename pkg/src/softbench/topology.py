"""Builders for 1-D/2-D/3-D elastic bodies, level-of-detail subdivision, scene import."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .model import (
    Attachment,
    AttachmentMode,
    Dimensionality,
    Face,
    Particle,
    SimParams,
    SoftBody,
    Spring,
    SpringKind,
    Vec3,
    set_params_from_dict,
    validate,
)

MAX_LOD = 5


class SceneError(Exception):
    """Scene file could not be parsed or validated."""


class SceneParseError(SceneError):
    pass


class SceneValidationError(SceneError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


@dataclass
class Scene:
    body: SoftBody
    params: SimParams = field(default_factory=SimParams)
    name: str = "scene"


def build_chain(
    n: int, spacing: float, mass: float, stiffness: float, damping: float
) -> SoftBody:
    """n particles along +x, n-1 structural springs at rest."""
    if n < 2:
        raise ValueError(f"chain needs n >= 2, got {n}")
    if spacing <= 0 or mass <= 0:
        raise ValueError("spacing and mass must be > 0")
    particles = [
        Particle(id=i, mass=mass, position=Vec3(i * spacing, 0.0, 0.0), velocity=Vec3())
        for i in range(n)
    ]
    springs = [
        Spring(id=i, a=i, b=i + 1, rest_length=spacing, stiffness=stiffness, damping=damping)
        for i in range(n - 1)
    ]
    return SoftBody(particles=particles, springs=springs, dimensionality=Dimensionality.one)


def build_ring(
    n: int,
    radius: float,
    with_hub: bool,
    mass: float,
    stiffness: float,
    damping: float,
) -> SoftBody:
    """n particles on a circle in the xy-plane, circumferential springs; optional
    center hub with radial springs. All springs start at rest."""
    if n < 3:
        raise ValueError(f"ring needs n >= 3, got {n}")
    if radius <= 0 or mass <= 0:
        raise ValueError("radius and mass must be > 0")
    particles = []
    for i in range(n):
        theta = 2.0 * math.pi * i / n
        particles.append(
            Particle(
                id=i,
                mass=mass,
                position=Vec3(radius * math.cos(theta), radius * math.sin(theta), 0.0),
                velocity=Vec3(),
            )
        )
    side = 2.0 * radius * math.sin(math.pi / n)
    springs = [
        Spring(
            id=i,
            a=i,
            b=(i + 1) % n,
            rest_length=side,
            stiffness=stiffness,
            damping=damping,
        )
        for i in range(n)
    ]
    if with_hub:
        hub_id = n
        particles.append(Particle(id=hub_id, mass=mass, position=Vec3(), velocity=Vec3()))
        for i in range(n):
            springs.append(
                Spring(
                    id=n + i,
                    a=hub_id,
                    b=i,
                    rest_length=radius,
                    stiffness=stiffness,
                    damping=damping,
                    kind=SpringKind.radial,
                )
            )
    return SoftBody(particles=particles, springs=springs, dimensionality=Dimensionality.two)


# Base octahedron: 6 vertices on the unit sphere, 8 triangular faces.
_OCTA_VERTS = [
    (1.0, 0.0, 0.0),
    (-1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (0.0, -1.0, 0.0),
    (0.0, 0.0, 1.0),
    (0.0, 0.0, -1.0),
]
_OCTA_FACES = [
    (0, 2, 4),
    (2, 1, 4),
    (1, 3, 4),
    (3, 0, 4),
    (2, 0, 5),
    (1, 2, 5),
    (3, 1, 5),
    (0, 3, 5),
]


def _subdivide(verts, faces):
    """One round of edge-midpoint triangle subdivision with sphere projection."""
    verts = list(verts)
    midpoint_cache: dict[tuple[int, int], int] = {}

    def midpoint(i, j):
        key = (min(i, j), max(i, j))
        if key in midpoint_cache:
            return midpoint_cache[key]
        ax, ay, az = verts[i]
        bx, by, bz = verts[j]
        mx, my, mz = (ax + bx) / 2.0, (ay + by) / 2.0, (az + bz) / 2.0
        norm = math.sqrt(mx * mx + my * my + mz * mz)
        verts.append((mx / norm, my / norm, mz / norm))
        midpoint_cache[key] = len(verts) - 1
        return midpoint_cache[key]

    out_faces = []
    for (a, b, c) in faces:
        ab = midpoint(a, b)
        bc = midpoint(b, c)
        ca = midpoint(c, a)
        out_faces.extend([(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)])
    return verts, out_faces


def _edges_of(faces):
    edges = set()
    for (a, b, c) in faces:
        for u, v in ((a, b), (b, c), (c, a)):
            edges.add((min(u, v), max(u, v)))
    return sorted(edges)


def build_octahedron(
    lod: int,
    radius: float,
    mass_total: float,
    stiffness: float,
    damping: float,
    with_core: bool = False,
) -> SoftBody:
    """Regular octahedron subdivided `lod` times, vertices on the sphere of the
    given radius. Vertices become particles, edges structural springs, triangles
    faces. `with_core` adds a centroid particle with internal springs to every
    vertex for shape retention."""
    if not 0 <= lod <= MAX_LOD:
        raise ValueError(f"lod must be in [0, {MAX_LOD}], got {lod}")
    if radius <= 0 or mass_total <= 0:
        raise ValueError("radius and mass_total must be > 0")
    verts, faces = _OCTA_VERTS, _OCTA_FACES
    for _ in range(lod):
        verts, faces = _subdivide(verts, faces)
    n_surface = len(verts)
    n_total = n_surface + (1 if with_core else 0)
    mass = mass_total / n_total
    particles = [
        Particle(
            id=i,
            mass=mass,
            position=Vec3(vx * radius, vy * radius, vz * radius),
            velocity=Vec3(),
        )
        for i, (vx, vy, vz) in enumerate(verts)
    ]
    springs = []
    for sid, (a, b) in enumerate(_edges_of(faces)):
        pa, pb = particles[a].position, particles[b].position
        springs.append(
            Spring(
                id=sid,
                a=a,
                b=b,
                rest_length=(pb - pa).norm(),
                stiffness=stiffness,
                damping=damping,
            )
        )
    if with_core:
        core_id = n_surface
        particles.append(Particle(id=core_id, mass=mass, position=Vec3(), velocity=Vec3()))
        base = len(springs)
        for i in range(n_surface):
            springs.append(
                Spring(
                    id=base + i,
                    a=core_id,
                    b=i,
                    rest_length=radius,
                    stiffness=stiffness,
                    damping=damping,
                    kind=SpringKind.internal,
                )
            )
    body = SoftBody(
        particles=particles,
        springs=springs,
        faces=[Face(*f) for f in faces],
        dimensionality=Dimensionality.three,
        lod=lod,
    )
    return body


def set_lod(body: SoftBody, new_lod: int) -> SoftBody:
    """Rebuild a 3-D body at a new subdivision level, preserving centroid,
    mean radius, centroid velocity, and total mass. Deformation detail is
    discarded (the rest shape is re-sampled)."""
    if body.dimensionality != Dimensionality.three:
        raise ValueError("set_lod requires a 3-D body")
    if not 0 <= new_lod <= MAX_LOD:
        raise ValueError(f"lod must be in [0, {MAX_LOD}], got {new_lod}")
    centroid = body.centroid()
    vel = body.centroid_velocity()
    mean_r = sum((p.position - centroid).norm() for p in body.particles) / len(body.particles)
    ref = body.springs[0] if body.springs else None
    stiffness = ref.stiffness if ref else 0.0
    damping = ref.damping if ref else 0.0
    rebuilt = build_octahedron(new_lod, mean_r, body.total_mass(), stiffness, damping)
    for p in rebuilt.particles:
        p.position = p.position + centroid
        p.velocity = vel
    rebuilt.attachments = []
    return rebuilt


_BUILDERS = {"chain", "ring", "octahedron"}


def _build_from_spec(d: dict) -> SoftBody:
    topo = d["topology"]
    if topo == "chain":
        return build_chain(
            n=int(d["n"]),
            spacing=float(d.get("spacing", 1.0)),
            mass=float(d.get("mass", 1.0)),
            stiffness=float(d.get("stiffness", 100.0)),
            damping=float(d.get("damping", 0.0)),
        )
    if topo == "ring":
        return build_ring(
            n=int(d["n"]),
            radius=float(d.get("radius", 1.0)),
            with_hub=bool(d.get("with_hub", False)),
            mass=float(d.get("mass", 1.0)),
            stiffness=float(d.get("stiffness", 100.0)),
            damping=float(d.get("damping", 0.0)),
        )
    if topo == "octahedron":
        return build_octahedron(
            lod=int(d.get("lod", 0)),
            radius=float(d.get("radius", 1.0)),
            mass_total=float(d.get("mass_total", 1.0)),
            stiffness=float(d.get("stiffness", 100.0)),
            damping=float(d.get("damping", 0.0)),
            with_core=bool(d.get("with_core", False)),
        )
    raise SceneParseError(f"unknown topology: {topo!r}")


def _body_from_explicit(d: dict) -> SoftBody:
    try:
        particles = [
            Particle(
                id=int(p.get("id", i)),
                mass=float(p["mass"]),
                position=Vec3.from_json(p["position"]),
                velocity=Vec3.from_json(p.get("velocity", {"x": 0, "y": 0, "z": 0})),
                pinned=bool(p.get("pinned", False)),
            )
            for i, p in enumerate(d["particles"])
        ]
        springs = [
            Spring(
                id=int(s.get("id", i)),
                a=int(s["a"]),
                b=int(s["b"]),
                rest_length=float(s["rest_length"]),
                stiffness=float(s["stiffness"]),
                damping=float(s.get("damping", 0.0)),
                kind=SpringKind(s.get("kind", "structural")),
            )
            for i, s in enumerate(d["springs"])
        ]
        faces = [Face(int(f[0]), int(f[1]), int(f[2])) for f in d.get("faces", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneParseError(f"malformed body: {exc}") from exc
    dim = Dimensionality(d.get("dimensionality", "three" if faces else "one"))
    return SoftBody(particles=particles, springs=springs, faces=faces, dimensionality=dim)


def scene_from_dict(d: dict, name: str = "scene") -> Scene:
    if "topology" in d:
        body = _build_from_spec(d)
    elif "particles" in d:
        body = _body_from_explicit(d)
    else:
        raise SceneParseError("scene needs either 'topology' or explicit 'particles'")

    for a in d.get("attachments", []):
        try:
            body.attachments.append(
                Attachment(
                    particle_id=int(a["particle_id"]),
                    anchor=Vec3.from_json(a["anchor"]),
                    mode=AttachmentMode(a.get("mode", "hard_pin")),
                    stiffness=float(a.get("stiffness", 0.0)),
                    damping=float(a.get("damping", 0.0)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SceneParseError(f"malformed attachment: {exc}") from exc
    for pid in d.get("pinned", []):
        body.particle_by_id(int(pid)).pinned = True

    params = SimParams()
    if "params" in d:
        try:
            params = set_params_from_dict(params, d["params"])
        except ValueError as exc:
            raise SceneParseError(f"bad params: {exc}") from exc

    violations = validate(body)
    if violations:
        raise SceneValidationError(violations)
    return Scene(body=body, params=params, name=d.get("name", name))


def import_scene(path: str) -> Scene:
    """Load a scene JSON file; raises OSError, SceneParseError, or
    SceneValidationError."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneParseError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(d, dict):
        raise SceneParseError("scene file must contain a JSON object")
    return scene_from_dict(d, name=path)
