"""Greedy what-if dispatch planner for low-confidence tiles."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from farmtwin.farm import Thresholds, Tile, needs_inspection
from farmtwin.fleet import (
    INSPECTION,
    BatteryModel,
    CandidateOption,
    DroneState,
    simulate_assignment,
)

DISPATCHED = "dispatched"
NO_FEASIBLE_DRONE = "no_feasible_drone"
NO_TRIGGER = "no_trigger"
OUTCOMES = (DISPATCHED, NO_FEASIBLE_DRONE, NO_TRIGGER)


class PlanningError(ValueError):
    pass


@dataclass(frozen=True)
class Trigger:
    tile_id: int
    observed_mean: float
    confidence: float
    t_alpha: float

    def to_dict(self) -> dict:
        return {
            "tile_id": self.tile_id,
            "observed_mean": self.observed_mean,
            "confidence": self.confidence,
            "t_alpha": self.t_alpha,
        }


@dataclass(frozen=True)
class DecisionRecord:
    decision_id: int
    sim_time: float
    trigger: Trigger
    candidates: tuple[CandidateOption, ...]
    selected_drone_id: Optional[int]
    outcome: str
    thresholds_snapshot: Thresholds

    def candidate(self, drone_id: int) -> CandidateOption:
        for c in self.candidates:
            if c.drone_id == drone_id:
                return c
        raise KeyError(drone_id)

    @property
    def selected(self) -> Optional[CandidateOption]:
        if self.selected_drone_id is None:
            return None
        return self.candidate(self.selected_drone_id)

    def to_dict(self) -> dict:
        d = {
            "decision_id": self.decision_id,
            "sim_time": self.sim_time,
            "trigger": self.trigger.to_dict(),
            "candidates": [c.to_dict() for c in self.candidates],
        }
        if self.selected_drone_id is not None:
            d["selected_drone_id"] = self.selected_drone_id
        d["outcome"] = self.outcome
        d["thresholds_snapshot"] = self.thresholds_snapshot.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionRecord":
        return cls(
            decision_id=d["decision_id"],
            sim_time=d["sim_time"],
            trigger=Trigger(**d["trigger"]),
            candidates=tuple(CandidateOption.from_dict(c) for c in d["candidates"]),
            selected_drone_id=d.get("selected_drone_id"),
            outcome=d["outcome"],
            thresholds_snapshot=Thresholds(**d["thresholds_snapshot"]),
        )


def rank(candidates: Iterable[CandidateOption]) -> list[CandidateOption]:
    """Feasible candidates, fastest first; equal times go to the lower drone id."""
    return sorted((c for c in candidates if c.feasible), key=lambda c: (c.delta_t, c.drone_id))


def eligible(drone: DroneState) -> bool:
    return drone.kind == INSPECTION and not drone.stranded and drone.queued_task is None


def plan(
    tile: Tile,
    fleet: Sequence[DroneState],
    thresholds: Thresholds,
    t_insp: float,
    battery_model: BatteryModel,
    sim_time: float,
    decision_id: int = 1,
) -> DecisionRecord:
    """Run one planning round for a freshly observed tile.

    Every eligible inspection drone is simulated and kept in the record,
    feasible or not. The caller is responsible for applying the dispatch.
    """
    if tile.observed_mean is None or tile.confidence is None:
        raise PlanningError(f"tile {tile.tile_id} has no observation")
    trigger = Trigger(tile.tile_id, tile.observed_mean, tile.confidence, thresholds.t_alpha)

    def record(candidates, selected, outcome):
        return DecisionRecord(decision_id, sim_time, trigger, tuple(candidates), selected, outcome, thresholds)

    if not needs_inspection(tile.confidence, thresholds):
        return record((), None, NO_TRIGGER)

    candidates = [
        simulate_assignment(d, tile, t_insp, battery_model, thresholds)
        for d in sorted(fleet, key=lambda d: d.drone_id)
        if eligible(d)
    ]
    ranked = rank(candidates)
    if not ranked:
        return record(candidates, None, NO_FEASIBLE_DRONE)
    return record(candidates, ranked[0].drone_id, DISPATCHED)


def check_record(record: DecisionRecord) -> None:
    """Raise AssertionError if ``record`` breaks a DecisionRecord invariant."""
    feasible = [c for c in record.candidates if c.feasible]
    for c in record.candidates:
        assert c.delta_t == c.t_rem + c.t_disp + c.t_insp, c
        assert c.feasible == (c.predicted_battery > record.thresholds_snapshot.t_b), c
        assert c.feasible == (c.rejection_reason is None), c
    ids = [c.drone_id for c in record.candidates]
    assert len(ids) == len(set(ids)), "duplicate candidate"
    if record.outcome == DISPATCHED:
        best = min(feasible, key=lambda c: (c.delta_t, c.drone_id))
        assert record.selected_drone_id == best.drone_id, record
    elif record.outcome == NO_FEASIBLE_DRONE:
        assert not feasible and record.selected_drone_id is None, record
    elif record.outcome == NO_TRIGGER:
        assert record.trigger.confidence >= record.trigger.t_alpha, record
        assert not record.candidates and record.selected_drone_id is None, record
    else:
        raise AssertionError(f"unknown outcome {record.outcome!r}")
