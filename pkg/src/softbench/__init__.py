"""Soft-body simulation workbench: deterministic mass-spring dynamics,
integrator benchmarking, state dump/replay, live steering, and AHP
cost-value prioritization."""

from .model import (
    Attachment,
    AttachmentMode,
    Dimensionality,
    Face,
    ForceBreakdown,
    IntegratorKind,
    Particle,
    SimParams,
    SoftBody,
    Spring,
    SpringKind,
    Vec3,
    set_param,
    validate,
)
from .dynamics import Simulation, StepCounters
from .topology import (
    Scene,
    build_chain,
    build_octahedron,
    build_ring,
    import_scene,
    set_lod,
)

__all__ = [
    "Attachment",
    "AttachmentMode",
    "Dimensionality",
    "Face",
    "ForceBreakdown",
    "IntegratorKind",
    "Particle",
    "Scene",
    "SimParams",
    "Simulation",
    "SoftBody",
    "Spring",
    "SpringKind",
    "StepCounters",
    "Vec3",
    "build_chain",
    "build_octahedron",
    "build_ring",
    "import_scene",
    "set_lod",
    "set_param",
    "validate",
]

__version__ = "0.1.0"
