import copy
import csv
import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from conftest import oscillator_scene
from softbench import (
    IntegratorKind,
    SimParams,
    Simulation,
    Vec3,
    build_chain,
    build_octahedron,
    build_ring,
)
from softbench.statepack import (
    Recorder,
    Recording,
    RecordingError,
    SchemaVersionError,
    dump,
    export_csv,
    load,
    load_recording,
    replay,
    restore,
    save_recording,
    take_snapshot,
)


def drop_sim(body=None, integrator=IntegratorKind.euler_semi_implicit, dt=0.002):
    if body is None:
        body = build_octahedron(1, 1.0, 1.0, 200.0, 1.0)
    params = SimParams(
        dt=dt,
        gravity=Vec3(0, -9.81, 0),
        floor_enabled=True,
        floor_y=-1.5,
        restitution=0.4,
        integrator=integrator,
    )
    return Simulation(body=copy.deepcopy(body), params=params)


def state_vector(sim):
    return [(p.id, p.position, p.velocity) for p in sim.body.particles]


def test_snapshot_rest_chain_zero_breakdown():
    body = build_chain(2, 1.0, 1.0, 10.0, 0.0)
    sim = Simulation(body=body, params=SimParams(gravity=Vec3(0, 0, 0)))
    snap = take_snapshot(sim)
    for p in snap.particles:
        for part in ("spring", "gravity", "drag", "collision", "attachment", "total"):
            assert p["force_breakdown"][part] == {"x": 0.0, "y": 0.0, "z": 0.0}


def test_snapshot_breakdown_sum_invariant():
    sim = drop_sim()
    sim.run(50)
    snap = take_snapshot(sim)
    for p in snap.particles:
        bd = p["force_breakdown"]
        for axis in "xyz":
            total = sum(bd[part][axis] for part in
                        ("spring", "gravity", "drag", "collision", "attachment"))
            scale = max(1.0, abs(bd["total"][axis]))
            assert abs(total - bd["total"][axis]) <= 1e-12 * scale


def test_snapshot_axial_force_hooke():
    body = build_chain(2, 1.0, 1.0, 10.0, 0.0)
    body.particles[1].position = Vec3(1.5, 0, 0)
    sim = Simulation(body=body, params=SimParams(gravity=Vec3(0, 0, 0)))
    snap = take_snapshot(sim)
    s = snap.springs[0]
    assert s["extension"] == pytest.approx(0.5, rel=1e-12)
    assert s["axial_force_magnitude"] == pytest.approx(5.0, rel=1e-12)
    assert s["current_length"] == pytest.approx(1.5, rel=1e-12)


def test_dump_load_roundtrip_bit_exact(tmp_path):
    sim = drop_sim()
    sim.run(37)
    snap = take_snapshot(sim)
    path = str(tmp_path / "snap.json")
    assert dump(snap, path) == path
    back = load(path)
    assert back.to_json() == snap.to_json()


def test_dump_unwritable_falls_back_to_tempdir():
    sim = drop_sim()
    snap = take_snapshot(sim)
    written = dump(snap, "/no/such/dir/snap.json")
    assert written != "/no/such/dir/snap.json"
    assert load(written).to_json() == snap.to_json()


def test_schema_version_mismatch(tmp_path):
    sim = drop_sim()
    snap = take_snapshot(sim)
    d = snap.to_json()
    d["schema_version"] += 1
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d))
    with pytest.raises(SchemaVersionError) as exc:
        load(str(path))
    assert exc.value.found == 2
    assert exc.value.expected == 1


TOPOLOGIES = {
    "chain8": lambda: build_chain(8, 0.25, 0.2, 400.0, 2.0),
    "ring12hub": lambda: build_ring(12, 1.0, True, 0.2, 300.0, 1.0),
    "octa1": lambda: build_octahedron(1, 1.0, 1.0, 200.0, 1.0),
}


@pytest.mark.parametrize("integrator", list(IntegratorKind))
@pytest.mark.parametrize("topo", sorted(TOPOLOGIES))
def test_resume_equivalence_bit_exact(tmp_path, integrator, topo):
    build = TOPOLOGIES[topo]
    uninterrupted = drop_sim(build(), integrator)
    uninterrupted.run(200)

    first = drop_sim(build(), integrator)
    first.run(100)
    path = str(tmp_path / "mid.json")
    dump(take_snapshot(first), path)
    resumed = restore(load(path))
    resumed.run(100)

    assert state_vector(resumed) == state_vector(uninterrupted)
    assert resumed.counters.steps == uninterrupted.counters.steps
    assert resumed.counters.force_evaluations == uninterrupted.counters.force_evaluations
    assert resumed.time == uninterrupted.time


def test_export_csv_single_snapshot(tmp_path):
    body = build_chain(2, 1.0, 1.0, 10.0, 0.0)
    sim = Simulation(body=body, params=SimParams(gravity=Vec3(0, 0, 0)))
    path = str(tmp_path / "out.csv")
    ppath, spath = export_csv(take_snapshot(sim), path)
    rows = list(csv.DictReader(open(ppath)))
    assert len(rows) == 2
    srows = list(csv.DictReader(open(spath)))
    assert len(srows) == 1


def test_export_csv_recording_rows_and_fidelity(tmp_path):
    sim = drop_sim(build_chain(3, 0.5, 0.3, 100.0, 1.0))
    rec = Recorder("t", 10)
    rec.observe(sim)
    for _ in range(50):
        sim.step()
        rec.observe(sim)
    recording = rec.recording
    assert len(recording.snapshots) == 6  # steps 0,10,...,50
    path = str(tmp_path / "rec.csv")
    ppath, _ = export_csv(recording, path)
    rows = list(csv.DictReader(open(ppath)))
    assert len(rows) == 6 * 3
    # ordering and 17-digit round-trip fidelity of the sum invariant
    keys = [(int(r["step_index"]), int(r["particle_id"])) for r in rows]
    assert keys == sorted(keys)
    for r in rows:
        for axis in "xyz":
            parts = sum(
                float(r[f"f_{part}_{axis}"])
                for part in ("spring", "gravity", "drag", "collision", "attach")
            )
            total = float(r[f"f_total_{axis}"])
            assert abs(parts - total) <= 1e-12 * max(1.0, abs(total))


def test_csv_values_roundtrip_exact(tmp_path):
    sim = drop_sim()
    sim.run(13)
    snap = take_snapshot(sim)
    ppath, _ = export_csv(snap, str(tmp_path / "x.csv"))
    rows = list(csv.DictReader(open(ppath)))
    by_id = {p["id"]: p for p in snap.particles}
    for r in rows:
        p = by_id[int(r["particle_id"])]
        assert float(r["px"]) == p["position"]["x"]
        assert float(r["vy"]) == p["velocity"]["y"]


def test_recorder_interval_counting():
    sim = drop_sim(build_chain(2, 1.0, 1.0, 10.0, 0.0))
    rec = Recorder("t", 7)
    rec.observe(sim)
    for _ in range(21):
        sim.step()
        rec.observe(sim)
    idx = [s.step_index for s in rec.recording.snapshots]
    assert idx == [0, 7, 14, 21]


def test_recorder_rejects_bad_interval():
    with pytest.raises(RecordingError):
        Recorder("t", 0)


def test_replay_yields_in_order_and_is_pure():
    sim = drop_sim(build_chain(2, 1.0, 1.0, 10.0, 0.0))
    rec = Recorder("t", 5)
    rec.observe(sim)
    for _ in range(20):
        sim.step()
        rec.observe(sim)
    snaps = list(replay(rec.recording))
    assert [s.step_index for s in snaps] == [0, 5, 10, 15, 20]


def test_replay_empty_recording_errors():
    with pytest.raises(RecordingError):
        list(replay(Recording("t", 1, [])))


def test_replay_then_resume_equals_uninterrupted():
    uninterrupted = drop_sim(build_chain(4, 0.5, 0.5, 150.0, 1.0))
    uninterrupted.run(60)

    live = drop_sim(build_chain(4, 0.5, 0.5, 150.0, 1.0))
    rec = Recorder("t", 10)
    rec.observe(live)
    for _ in range(40):
        live.step()
        rec.observe(live)
    last = list(replay(rec.recording))[-1]
    resumed = restore(last)
    resumed.run(20)
    assert state_vector(resumed) == state_vector(uninterrupted)


def test_recording_file_roundtrip(tmp_path):
    sim = drop_sim(build_chain(2, 1.0, 1.0, 10.0, 0.0))
    rec = Recorder("t", 3)
    rec.observe(sim)
    for _ in range(9):
        sim.step()
        rec.observe(sim)
    path = str(tmp_path / "rec.json")
    save_recording(rec.recording, path)
    back = load_recording(path)
    assert back.to_json() == rec.recording.to_json()


finite = st.floats(
    min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False
)


@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_roundtrip_property_random_bodies(data, tmp_path_factory):
    n = data.draw(st.integers(min_value=2, max_value=6))
    body = build_chain(n, 0.5, 1.0, 50.0, 0.5)
    for p in body.particles:
        p.position = Vec3(data.draw(finite), data.draw(finite), data.draw(finite))
        p.velocity = Vec3(data.draw(finite), data.draw(finite), data.draw(finite))
    sim = Simulation(body=body, params=SimParams())
    snap = take_snapshot(sim)
    path = str(tmp_path_factory.mktemp("rt") / "s.json")
    dump(snap, path)
    assert load(path).to_json() == snap.to_json()
