import random

import pytest

from farmtwin.config import BlightPatch, FieldConfig, ScenarioConfig, default_config
from farmtwin.engine import Simulation, generate_farm, observe_inspection, observe_survey, run, scan_order
from farmtwin.farm import INSPECTED, PENDING, SURVEYED, Tile
from farmtwin.fleet import INSPECTION, SURVEY, BatteryModel, DroneState
from farmtwin.planner import DISPATCHED, NO_TRIGGER, check_record


def small_config(rows=1, cols=2, patches=(), **kw):
    base = dict(
        rows=rows,
        cols=cols,
        field=FieldConfig(base_ndvi=0.6, jitter_sigma=0.0, patches=tuple(patches)),
        survey_noise_sigma=0.0,
        fleet=(DroneState(0, SURVEY, (0.0, 0.0)), DroneState(1, INSPECTION, (0.5, 0.5))),
        duration=100.0,
        seed=1,
    )
    base.update(kw)
    return ScenarioConfig(**base).validate()


def test_noiseless_farm():
    tiles = generate_farm(small_config(1, 1))
    assert all(p == 0.6 for p in tiles[0].pixels)


def test_patch_shifts_every_pixel():
    cfg = small_config(2, 2, [BlightPatch((1.0, 1.0), 5.0, 0.5)])
    for t in generate_farm(cfg):
        assert t.pixels == pytest.approx([0.1] * 16, abs=1e-12)


def test_farm_deterministic():
    cfg = default_config(6, 6, seed=9)
    assert [t.pixels for t in generate_farm(cfg)] == [t.pixels for t in generate_farm(cfg)]
    other = default_config(6, 6, seed=10)
    assert [t.pixels for t in generate_farm(cfg)] != [t.pixels for t in generate_farm(other)]


def test_pixels_clamped():
    cfg = small_config(1, 1, [BlightPatch((0.5, 0.5), 1.0, 1.9)])
    assert all(p == -1.0 for p in generate_farm(cfg)[0].pixels)


def test_scan_order_boustrophedon():
    assert scan_order(3, 3) == [0, 1, 2, 5, 4, 3, 6, 7, 8]


class FixedRng:
    def __init__(self, value):
        self.value = value

    def gauss(self, mu, sigma):
        return mu + self.value


def test_observe_survey():
    tile = Tile(0, 0, 0, [0.2, 0.4])
    assert observe_survey(tile, random.Random(3), 0.0) == pytest.approx(0.3, abs=1e-15)
    a = observe_survey(tile, random.Random(5), 0.1)
    assert a == observe_survey(tile, random.Random(5), 0.1)
    assert observe_survey(Tile(0, 0, 0, [0.99]), FixedRng(0.5), 0.1) == 1.0


def test_observe_inspection():
    tile = Tile(0, 0, 0, [0.1, 0.3], status=PENDING)
    assert observe_inspection(tile) == pytest.approx(0.2)
    tile.status = INSPECTED
    with pytest.raises(ValueError):
        observe_inspection(tile)


def test_healthy_farm_never_dispatches():
    led = run(small_config(2, 2))
    kinds = [e.kind for e in led.events]
    assert kinds.count("survey_image") == 4
    assert [r.outcome for r in led.decisions] == [NO_TRIGGER] * 4
    assert "dispatch" not in kinds


def test_single_trigger_trace():
    # tile 1 (center (1.5, 0.5)) fully inside the patch: mean 0.1, confidence 0.375 < 0.5
    cfg = small_config(1, 2, [BlightPatch((1.5, 0.5), 0.6, 0.5)])
    sim = Simulation(cfg)
    led = sim.run()
    trace = [(e.time, e.kind) for e in led.events]
    # survey t=1 tile 0, t=2 tile 1; drone 1 flies 1 unit at speed 2 and inspects for 5
    assert trace == [
        (1.0, "survey_image"),
        (1.0, "decision"),
        (2.0, "survey_image"),
        (2.0, "decision"),
        (2.0, "dispatch"),
        (7.5, "task_completed"),
        (7.5, "model_updated"),
    ]
    rec = led.decisions[1]
    assert rec.outcome == DISPATCHED and rec.selected_drone_id == 1
    assert rec.candidate(1).delta_t == 5.5 and rec.candidate(1).predicted_battery == 97.0
    assert sim.fleet[1].battery == 97.0
    assert sim.tiles[1].status == INSPECTED and sim.tiles[0].status == SURVEYED
    assert sim.now == 7.5


def test_same_seed_same_bytes():
    cfg = default_config(8, 8, seed=3, duration=120.0)
    assert run(cfg).dumps() == run(cfg).dumps()


def test_idle_drain_strands_drone():
    cfg = small_config(1, 20, battery_model=BatteryModel(1.0, 0.5, 10.0), duration=30.0)
    led = run(cfg)
    stranded = [e for e in led.events if e.kind == "drone_stranded"]
    assert len(stranded) == 1 and stranded[0].time == pytest.approx(10.0)
    assert stranded[0].payload == {"drone_id": 1, "abandoned_tiles": []}


def test_stranded_task_is_requeued():
    cfg = small_config(1, 2, [BlightPatch((1.5, 0.5), 0.6, 0.5)])
    sim = Simulation(cfg)
    while not any(e.kind == "dispatch" for e in sim.ledger.events):
        sim.step()
    sim._stranded({"drone_id": 1, "abandoned_tiles": [1]})
    assert list(sim.pending) == [1]
    assert sim.tiles[1].status == PENDING
    assert sim.ledger.events[-1].kind == "tile_requeued"


def check_run(sim: Simulation, led):
    times = [e.time for e in led.events]
    assert times == sorted(times)
    assert [e.seq for e in led.events] == list(range(len(led.events)))
    decision_events = {e.payload["decision_id"]: e for e in led.events if e.kind == "decision"}
    for rec, snap in zip(led.decisions, led.snapshots):
        check_record(rec)
        assert decision_events[rec.decision_id].time == rec.sim_time == snap.sim_time
        assert snap.decision_id == rec.decision_id
        live = {d.drone_id for d in snap.drones if d.kind == INSPECTION and not d.stranded and d.queued_task is None}
        if rec.outcome != NO_TRIGGER:
            assert {c.drone_id for c in rec.candidates} == live
    kinds = [e.kind for e in led.events]
    assert kinds.count("survey_image") <= sim.config.rows * sim.config.cols
    assert kinds.count("dispatch") == sum(r.outcome == DISPATCHED for r in led.decisions)
    inspected = [e.payload["tile_id"] for e in led.events if e.kind == "model_updated"]
    assert len(inspected) == len(set(inspected))
    # every dispatch is completed unless the drone stranded or time ran out
    open_jobs = set()
    for e in led.events:
        if e.kind == "dispatch":
            open_jobs.add((e.payload["drone_id"], e.payload["tile_id"]))
        elif e.kind == "task_completed":
            open_jobs.remove((e.payload["drone_id"], e.payload["tile_id"]))
        elif e.kind == "drone_stranded":
            open_jobs -= {(e.payload["drone_id"], t) for t in e.payload["abandoned_tiles"]}
    if open_jobs:
        assert sim.now >= sim.config.duration
        for drone_id, tile_id in open_jobs:
            d = sim.fleet[drone_id]
            assert tile_id in {t.tile_id for t in (d.current_task, d.queued_task) if t}


@pytest.mark.parametrize("seed", range(12))
def test_random_scenarios_keep_invariants(seed):
    rng = random.Random(seed)
    rows, cols = rng.randint(3, 9), rng.randint(3, 9)
    fleet = [DroneState(0, SURVEY, (0.0, 0.0))] + [
        DroneState(i, INSPECTION, (rng.uniform(0, cols), rng.uniform(0, rows)), speed=rng.uniform(0.5, 3),
                   battery=rng.uniform(10, 100))
        for i in range(1, rng.randint(2, 5))
    ]
    patches = tuple(
        BlightPatch((rng.uniform(0, cols), rng.uniform(0, rows)), rng.uniform(0.5, 3), rng.uniform(0.3, 1.0))
        for _ in range(rng.randint(1, 3))
    )
    cfg = default_config(
        rows,
        cols,
        seed=seed,
        fleet=tuple(fleet),
        field=FieldConfig(patches=patches),
        duration=rng.uniform(20, 150),
        battery_model=BatteryModel(rng.uniform(0.5, 3), rng.uniform(0.2, 1), rng.choice([0.0, 0.0, 0.2])),
    )
    sim = Simulation(cfg)
    led = sim.run()
    check_run(sim, led)
