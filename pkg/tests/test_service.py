import asyncio
import json

import pytest
import websockets

from softbench import Vec3, build_octahedron
from softbench.model import SimParams
from softbench.service import Role, SimService, replay_schedule, serve
from softbench.topology import Scene


def octa_scene(name="octa"):
    body = build_octahedron(1, 1.0, 1.0, 200.0, 1.0)
    params = SimParams(dt=0.002, gravity=Vec3(0, -9.81, 0), floor_enabled=True,
                       floor_y=-2.0, restitution=0.4)
    return Scene(body=body, params=params, name=name)


def positions(sim):
    return [(p.position, p.velocity) for p in sim.body.particles]


# -- protocol core ---------------------------------------------------------


def test_single_controller_rule():
    svc = SimService(octa_scene(), realtime=False)
    a = svc.register("controller")
    b = svc.register("controller")
    c = svc.register("viewer")
    assert a.role == Role.controller
    assert b.role == Role.viewer
    assert c.role == Role.viewer
    svc.unregister(a.id)
    d = svc.register("controller")
    assert d.role == Role.controller


def test_viewer_mutation_warned_state_untouched():
    svc = SimService(octa_scene(), realtime=False)
    svc.register("controller")
    viewer = svc.register("viewer")
    before = svc.sim.params.dt
    resp = svc.handle_control(viewer, {"type": "set_param", "seq": 1,
                                       "field": "dt", "value": 0.005})
    assert resp["type"] == "warning"
    assert "permission" in resp["message"]
    assert resp["seq"] == 1
    assert svc.sim.params.dt == before
    assert svc.command_log == []


def test_controller_set_integrator_ack_and_continuity():
    svc = SimService(octa_scene(), realtime=False)
    ctrl = svc.register("controller")
    for _ in range(10):
        svc.step_once()
    state = positions(svc.sim)
    resp = svc.handle_control(ctrl, {"type": "set_integrator", "seq": 2, "kind": "rk4"})
    assert resp["type"] == "ack"
    assert resp["effective_step"] == 10
    assert positions(svc.sim) == state  # bit-identical across the switch
    assert svc.sim.params.integrator.value == "rk4"


def test_set_param_invariant_violation_is_error():
    svc = SimService(octa_scene(), realtime=False)
    ctrl = svc.register("controller")
    before = svc.sim.params.restitution
    resp = svc.handle_control(ctrl, {"type": "set_param", "seq": 3,
                                     "field": "restitution", "value": 1.5})
    assert resp["type"] == "error"
    assert svc.sim.params.restitution == before


def test_unknown_message_type_is_error():
    svc = SimService(octa_scene(), realtime=False)
    ctrl = svc.register("controller")
    resp = svc.handle_control(ctrl, {"type": "warp_drive", "seq": 4})
    assert resp["type"] == "error"


def test_reset_reproduces_fresh_scene():
    scene = octa_scene()
    svc = SimService(scene, realtime=False)
    ctrl = svc.register("controller")
    svc.handle_control(ctrl, {"type": "set_param", "seq": 1, "field": "dt", "value": 0.004})
    for _ in range(20):
        svc.step_once()
    svc.handle_control(ctrl, {"type": "reset", "seq": 2})
    for _ in range(30):
        svc.step_once()

    fresh = SimService(octa_scene(), realtime=False)
    for _ in range(30):
        fresh.step_once()
    assert positions(svc.sim) == positions(fresh.sim)
    assert svc.sim.params.dt == fresh.sim.params.dt


def test_set_lod_changes_topology_version_and_counts():
    svc = SimService(octa_scene(), realtime=False)
    ctrl = svc.register("controller")
    v0 = svc.topology_version
    resp = svc.handle_control(ctrl, {"type": "set_lod", "seq": 1, "level": 2})
    assert resp["type"] == "ack"
    assert svc.topology_version == v0 + 1
    frame = svc.build_frame()
    assert len(frame["positions"]) == 66 * 3


def test_drag_force_applies_and_clears():
    svc = SimService(octa_scene(), realtime=False)
    ctrl = svc.register("controller")
    p0 = svc.sim.body.particles[0]
    target = p0.position + Vec3(0.1, 0, 0)
    svc.handle_control(ctrl, {"type": "drag_force", "seq": 1, "particle_id": p0.id,
                              "target": target.to_json(), "active": True})
    bd = svc.sim.breakdowns()[0]
    assert bd.attachment.norm() == pytest.approx(5.0, rel=1e-9)  # 50 N/m * 0.1 m
    svc.handle_control(ctrl, {"type": "drag_force", "seq": 2, "particle_id": p0.id,
                              "target": target.to_json(), "active": False})
    assert svc.sim.breakdowns()[0].attachment.norm() == 0.0


def test_drag_force_at_particle_position_zero():
    svc = SimService(octa_scene(), realtime=False)
    ctrl = svc.register("controller")
    p0 = svc.sim.body.particles[0]
    svc.handle_control(ctrl, {"type": "drag_force", "seq": 1, "particle_id": p0.id,
                              "target": p0.position.to_json(), "active": True})
    assert svc.sim.breakdowns()[0].attachment.norm() == 0.0


def test_drag_force_invalid_particle():
    svc = SimService(octa_scene(), realtime=False)
    ctrl = svc.register("controller")
    resp = svc.handle_control(ctrl, {"type": "drag_force", "seq": 1,
                                     "particle_id": 999,
                                     "target": {"x": 0, "y": 0, "z": 0}})
    assert resp["type"] == "error"


def test_record_start_twice_errors():
    svc = SimService(octa_scene(), realtime=False)
    ctrl = svc.register("controller")
    assert svc.handle_control(ctrl, {"type": "record_start", "seq": 1,
                                     "interval_steps": 5})["type"] == "ack"
    resp = svc.handle_control(ctrl, {"type": "record_start", "seq": 2,
                                     "interval_steps": 5})
    assert resp["type"] == "error"
    assert svc.recorder is not None  # original recording intact


def test_dump_and_load_snapshot_roundtrip(tmp_path):
    svc = SimService(octa_scene(), realtime=False)
    ctrl = svc.register("controller")
    for _ in range(25):
        svc.step_once()
    path = str(tmp_path / "live.json")
    resp = svc.handle_control(ctrl, {"type": "dump", "seq": 1, "path": path})
    assert resp["type"] == "ack"
    assert resp["path"] == path
    state = positions(svc.sim)
    for _ in range(10):
        svc.step_once()
    resp = svc.handle_control(ctrl, {"type": "load_snapshot", "seq": 2, "path": path})
    assert resp["type"] == "ack"
    assert positions(svc.sim) == state


def test_pause_stops_stepping():
    svc = SimService(octa_scene(), realtime=False)
    ctrl = svc.register("controller")
    svc.handle_control(ctrl, {"type": "pause", "seq": 1})
    svc.step_once()
    assert svc.sim.step_index == 0
    svc.handle_control(ctrl, {"type": "resume", "seq": 2})
    svc.step_once()
    assert svc.sim.step_index == 1


def test_frame_contents():
    svc = SimService(octa_scene(), realtime=False)
    for _ in range(3):
        svc.step_once()
    frame = svc.frame_with_topology()
    assert frame["type"] == "frame"
    assert frame["step_index"] == 3
    assert len(frame["positions"]) == 18 * 3
    assert len(frame["spring_index_pairs"]) == 48
    assert frame["diverged"] is False
    assert frame["energy"]["total"] == pytest.approx(
        frame["energy"]["kinetic"]
        + frame["energy"]["spring_potential"]
        + frame["energy"]["gravitational"]
    )


def test_replay_schedule_bit_exact():
    scene = octa_scene()
    svc = SimService(scene, realtime=False)
    ctrl = svc.register("controller")
    for _ in range(15):
        svc.step_once()
    svc.handle_control(ctrl, {"type": "set_integrator", "seq": 1, "kind": "rk4"})
    for _ in range(10):
        svc.step_once()
    svc.handle_control(ctrl, {"type": "set_param", "seq": 2,
                              "field": "stiffness_scale", "value": 1.5})
    p0 = svc.sim.body.particles[0]
    svc.handle_control(ctrl, {"type": "drag_force", "seq": 3, "particle_id": p0.id,
                              "target": {"x": 0.0, "y": 2.0, "z": 0.0}, "active": True})
    for _ in range(25):
        svc.step_once()
    total = svc.sim.step_index

    redone = replay_schedule(octa_scene(), svc.command_log, total)
    assert positions(redone) == positions(svc.sim)
    assert redone.counters.force_evaluations == svc.sim.counters.force_evaluations


# -- websocket loopback ----------------------------------------------------


async def _recv_type(ws, wanted, limit=200):
    for _ in range(limit):
        msg = json.loads(await ws.recv())
        if msg["type"] in wanted:
            return msg
    raise AssertionError(f"no message of type {wanted} within {limit} frames")


def test_websocket_roundtrip():
    asyncio.run(_websocket_roundtrip())


async def _websocket_roundtrip():
    ready = asyncio.Event()
    port = 8931
    task = asyncio.create_task(
        serve(octa_scene(), port=port, frame_rate=60.0, realtime=False, ready=ready)
    )
    await asyncio.wait_for(ready.wait(), 5)
    uri = f"ws://127.0.0.1:{port}"
    try:
        async with websockets.connect(uri) as ctrl, websockets.connect(uri) as view:
            await ctrl.send(json.dumps({"type": "hello", "seq": 0,
                                        "role_request": "controller"}))
            welcome = await _recv_type(ctrl, {"welcome"})
            assert welcome["role"] == "controller"

            await view.send(json.dumps({"type": "hello", "seq": 0,
                                        "role_request": "controller"}))
            welcome2 = await _recv_type(view, {"welcome"})
            assert welcome2["role"] == "viewer"  # single-controller invariant

            # frames arrive, topology pairs included on first frame
            frame = await _recv_type(ctrl, {"frame"})
            assert len(frame["positions"]) == 18 * 3
            first_frames = frame if "spring_index_pairs" in frame else await _recv_type(
                ctrl, {"frame"})

            # viewer mutation -> warning, dt unchanged
            await view.send(json.dumps({"type": "set_param", "seq": 7,
                                        "field": "dt", "value": 0.009}))
            warn = await _recv_type(view, {"warning"})
            assert warn["seq"] == 7

            # controller switches integrator -> ack with effective step
            await ctrl.send(json.dumps({"type": "set_integrator", "seq": 8,
                                        "kind": "midpoint"}))
            ack = await _recv_type(ctrl, {"ack"})
            assert ack["seq"] == 8
            assert isinstance(ack["effective_step"], int)

            # step indices strictly increase across frames
            f1 = await _recv_type(ctrl, {"frame"})
            f2 = await _recv_type(ctrl, {"frame"})
            assert f2["step_index"] >= f1["step_index"]

            # lod change bumps topology_version and vertex count
            await ctrl.send(json.dumps({"type": "set_lod", "seq": 9, "level": 2}))
            await _recv_type(ctrl, {"ack"})
            for _ in range(100):
                f = await _recv_type(ctrl, {"frame"})
                if f["topology_version"] > frame["topology_version"]:
                    break
            assert len(f["positions"]) == 66 * 3
    finally:
        task.cancel()
        try:
            await task
        except asyncio.CancelledError:
            pass
