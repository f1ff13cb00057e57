"""Hand-built planning situations used in tests, docs and the CLI demo.

``scenario_1``: the fastest drone is rejected because its predicted battery
would fall below T_b, so a slower drone is sent.

``scenario_2``: a busy drone next to the tile beats a ready drone far away
and gets the tile queued behind its current job.
"""
from __future__ import annotations

from dataclasses import dataclass

from farmtwin.config import default_config
from farmtwin.farm import SURVEYED, FuzzyParams, Thresholds, Tile, status_counts
from farmtwin.fleet import INSPECTING, INSPECTION, SURVEY, BatteryModel, DroneState, Task
from farmtwin.ledger import Ledger, StatusSnapshot
from farmtwin.planner import DecisionRecord, plan

GRID_COLS = 20


@dataclass(frozen=True)
class Situation:
    tile: Tile
    fleet: tuple[DroneState, ...]
    thresholds: Thresholds
    t_insp: float
    battery_model: BatteryModel
    sim_time: float = 10.0

    def plan(self, decision_id: int = 1) -> DecisionRecord:
        return plan(
            self.tile,
            list(self.fleet),
            self.thresholds,
            self.t_insp,
            self.battery_model,
            self.sim_time,
            decision_id,
        )

    def snapshot(self, decision_id: int = 1) -> StatusSnapshot:
        return StatusSnapshot(decision_id, self.sim_time, self.fleet, status_counts([self.tile]))

    def ledger(self) -> Ledger:
        cfg = default_config(
            fleet=self.fleet, thresholds=self.thresholds, t_insp=self.t_insp, battery_model=self.battery_model
        )
        ledger = Ledger(scenario_config=cfg.to_dict())
        record = self.plan(1)
        ledger.append_event(self.sim_time, "survey_image", {
            "tile_id": self.tile.tile_id,
            "observed_mean": self.tile.observed_mean,
            "confidence": self.tile.confidence,
        })
        ledger.append_decision(record, self.snapshot(1))
        ledger.append_event(self.sim_time, "decision", {
            "decision_id": 1,
            "tile_id": self.tile.tile_id,
            "outcome": record.outcome,
            "selected_drone_id": record.selected_drone_id,
        })
        return ledger


def _ambiguous_tile(row: int, col: int) -> Tile:
    tile = Tile(row * GRID_COLS + col, row, col, [0.1] * 16, status=SURVEYED)
    tile.observe(0.1, FuzzyParams())
    return tile


def scenario_1() -> Situation:
    # tile (5, 5), center (5.5, 5.5); defaults: v=2, fly 1.0, inspect 0.5, t_insp 5
    # drone 2: 2 units away -> dt = 1 + 5 = 6, battery 21.5 - 1 - 2.5 = 18
    # drone 1: 8 units away -> dt = 4 + 5 = 9, battery 51.5 - 4 - 2.5 = 45
    fleet = (
        DroneState(0, SURVEY, (5.5, 5.5)),
        DroneState(1, INSPECTION, (5.5, 13.5), battery=51.5),
        DroneState(2, INSPECTION, (7.5, 5.5), battery=21.5),
    )
    return Situation(_ambiguous_tile(5, 5), fleet, Thresholds(0.5, 20.0), 5.0, BatteryModel())


def scenario_2() -> Situation:
    # tile (2, 2), center (2.5, 2.5); t_insp 4
    # drone 3 inspecting tile (2, 4) with 2 left: dt = 2 + 1 + 4 = 7, battery 80 - 1 - 1 - 2 = 76
    # drone 4 ready 14 units away: dt = 7 + 4 = 11, battery 90 - 7 - 2 = 81
    busy = Task(tile_id=2 * GRID_COLS + 4, target=(4.5, 2.5), flight_remaining=0.0, inspect_remaining=2.0)
    fleet = (
        DroneState(0, SURVEY, (2.5, 2.5)),
        DroneState(3, INSPECTION, (4.5, 2.5), battery=80.0, status=INSPECTING, current_task=busy),
        DroneState(4, INSPECTION, (16.5, 2.5), battery=90.0),
    )
    return Situation(_ambiguous_tile(2, 2), fleet, Thresholds(0.5, 20.0), 4.0, BatteryModel())


SCENARIOS = {"scenario-1": scenario_1, "scenario-2": scenario_2}
