"""Headless command-line entry points for every capability.

Exit codes: 0 success, 1 runtime error, 2 usage error, 3 validation/parse
error. stdout carries data and summaries, stderr diagnostics.
"""

from __future__ import annotations

import argparse
import asyncio
import math
import sys

from . import ahp as ahp_mod
from . import bench as bench_mod
from . import statepack
from .dynamics import Simulation, StepCounters
from .model import IntegratorKind, ParamError, set_param
from .service import serve as serve_async
from .stats import compute_energy
from .topology import SceneParseError, SceneValidationError, import_scene

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3


def _load_scene(path: str):
    try:
        return import_scene(path)
    except OSError as exc:
        print(f"cannot read scene: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_RUNTIME)
    except (SceneParseError, SceneValidationError) as exc:
        print(f"invalid scene {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def cmd_run(args) -> int:
    scene = _load_scene(args.scene)
    params = scene.params
    try:
        if args.integrator:
            params = set_param(params, "integrator", args.integrator)
        if args.dt is not None:
            params = set_param(params, "dt", args.dt)
    except ParamError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION
    steps = args.steps if args.steps is not None else int(math.floor(args.seconds / params.dt))

    sim = Simulation(body=scene.body, params=params, counters=StepCounters())
    recorder = None
    if args.record:
        recorder = statepack.Recorder(scene.name, args.interval)
        recorder.observe(sim)
    for _ in range(steps):
        if sim.counters.diverged:
            break
        sim.step()
        if recorder is not None:
            recorder.observe(sim)

    snap = statepack.take_snapshot(sim)
    if args.dump:
        written = statepack.dump(snap, args.dump)
        if written != args.dump:
            print(f"dump path unwritable; wrote {written}", file=sys.stderr)
    if args.record:
        statepack.save_recording(recorder.recording, args.record)
    if args.csv:
        statepack.export_csv(
            recorder.recording if recorder is not None else snap, args.csv
        )
    energy = compute_energy(sim.body, sim.params)
    print(
        f"steps={sim.counters.steps} time={sim.time:.6g} "
        f"energy={energy.total:.6g} diverged={sim.counters.diverged}"
    )
    return EXIT_RUNTIME if sim.counters.diverged else EXIT_OK


def cmd_bench(args) -> int:
    scene = _load_scene(args.scene)
    if not args.dts:
        print("--dts needs at least one value", file=sys.stderr)
        return EXIT_USAGE
    if not args.integrators:
        print("--integrators needs at least one name", file=sys.stderr)
        return EXIT_USAGE
    try:
        integrators = [IntegratorKind(k) for k in args.integrators]
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    try:
        rows = bench_mod.run_comparison(scene, integrators, args.dts, args.horizon)
    except bench_mod.OracleError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_RUNTIME
    if args.report:
        bench_mod.export_bench_csv(rows, args.report)
    for r in rows:
        print(
            f"{r.integrator.value:>20s} dt={r.dt:<9g} error={r.global_error:.3e} "
            f"evals={r.force_evaluations} drift={r.energy_drift:.3e} stable={r.stable}"
        )
    return EXIT_OK


def cmd_serve(args) -> int:
    scene = _load_scene(args.scene)
    try:
        asyncio.run(
            serve_async(
                scene, host=args.host, port=args.port, frame_rate=args.frame_rate
            )
        )
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        rec = statepack.load_recording(args.recording)
    except OSError as exc:
        print(f"cannot read recording: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except statepack.SnapshotError as exc:
        print(f"invalid recording: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if not rec.snapshots:
        print("recording is empty", file=sys.stderr)
        return EXIT_VALIDATION
    if args.csv:
        statepack.export_csv(rec, args.csv)
    last = rec.snapshots[-1]
    print(
        f"replayed {len(rec.snapshots)} snapshots of {rec.scene_name!r}, "
        f"last step_index={last.step_index}"
    )
    if args.resume:
        sim = statepack.restore(last)
        sim.run(args.resume)
        snap = statepack.take_snapshot(sim)
        if args.dump:
            statepack.dump(snap, args.dump)
        energy = compute_energy(sim.body, sim.params)
        print(
            f"resumed {args.resume} steps: step_index={sim.step_index} "
            f"energy={energy.total:.6g} diverged={sim.counters.diverged}"
        )
        return EXIT_RUNTIME if sim.counters.diverged else EXIT_OK
    return EXIT_OK


def cmd_ahp(args) -> int:
    try:
        value_m = ahp_mod.parse_matrix(args.value)
        cost_m = ahp_mod.parse_matrix(args.cost)
    except OSError as exc:
        print(f"cannot read matrix: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ahp_mod.MatrixError as exc:
        print(f"invalid matrix: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if value_m.n != cost_m.n:
        print(
            f"matrix sizes differ: value {value_m.n}x{value_m.n}, "
            f"cost {cost_m.n}x{cost_m.n}",
            file=sys.stderr,
        )
        return EXIT_VALIDATION
    value_w = ahp_mod.priority_vector(value_m)
    cost_w = ahp_mod.priority_vector(cost_m)
    points = ahp_mod.cost_value_points(value_w, cost_w, value_m.labels)
    cr_v = ahp_mod.consistency_ratio(value_m)
    cr_c = ahp_mod.consistency_ratio(cost_m)
    report = ahp_mod.report_csv(points, cr_v, cr_c)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report)
    print(report, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="softbench",
        description="Soft-body simulation workbench: run, benchmark, serve, "
        "replay, and AHP prioritization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a scene headlessly")
    p.add_argument("scene")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--steps", type=int)
    g.add_argument("--seconds", type=float)
    p.add_argument("--integrator", choices=[k.value for k in IntegratorKind])
    p.add_argument("--dt", type=float)
    p.add_argument("--dump")
    p.add_argument("--record")
    p.add_argument("--interval", type=int, default=1)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="compare integrators on a scene")
    p.add_argument("scene")
    p.add_argument("--integrators", nargs="+", required=True)
    p.add_argument("--dts", nargs="+", type=float, required=True)
    p.add_argument("--horizon", type=float, default=2.0)
    p.add_argument("--report")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="serve a scene for live steering")
    p.add_argument("scene")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--frame-rate", type=float, default=30.0)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("replay", help="play back a recording; optionally resume")
    p.add_argument("recording")
    p.add_argument("--csv")
    p.add_argument("--continue", dest="resume", type=int, default=0)
    p.add_argument("--dump")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("ahp", help="cost-value prioritization from pairwise matrices")
    p.add_argument("--value", required=True)
    p.add_argument("--cost", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ahp)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        raise
    except Exception as exc:  # runtime failure, not usage/validation
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
