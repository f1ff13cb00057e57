"""Append-only record of a simulation run, stored as one JSON document.

Layout (keys in this order)::

    {"schema_version": "1",
     "scenario_config": {...},
     "events":    [{"time", "seq", "kind", "payload"}],
     "decisions": [{"decision_id", "sim_time", "trigger", "candidates",
                    "selected_drone_id"?, "outcome", "thresholds_snapshot"}],
     "snapshots": [{"decision_id", "sim_time", "drones", "tile_counts"}]}

Floats are written with Python's shortest round-trip repr.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from farmtwin.fleet import DroneState
from farmtwin.planner import DecisionRecord

SCHEMA_VERSION = "1"

EVENT_KINDS = (
    "survey_image",
    "decision",
    "dispatch",
    "task_completed",
    "model_updated",
    "drone_stranded",
    "tile_queued",
    "tile_requeued",
)


class LedgerError(ValueError):
    pass


class LedgerFormatError(LedgerError):
    pass


class SchemaVersionError(LedgerError):
    pass


class DecisionNotFound(LookupError):
    pass


@dataclass(frozen=True)
class Event:
    time: float
    seq: int
    kind: str
    payload: dict

    def to_dict(self) -> dict:
        return {"time": self.time, "seq": self.seq, "kind": self.kind, "payload": self.payload}


@dataclass(frozen=True)
class StatusSnapshot:
    """Fleet and farm state captured right before a planning round."""

    decision_id: int
    sim_time: float
    drones: tuple[DroneState, ...]
    tile_counts: dict

    def drone(self, drone_id: int) -> DroneState:
        for d in self.drones:
            if d.drone_id == drone_id:
                return d
        raise KeyError(drone_id)

    def to_dict(self) -> dict:
        return {
            "decision_id": self.decision_id,
            "sim_time": self.sim_time,
            "drones": [d.to_dict() for d in self.drones],
            "tile_counts": dict(self.tile_counts),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StatusSnapshot":
        return cls(
            decision_id=d["decision_id"],
            sim_time=d["sim_time"],
            drones=tuple(DroneState.from_dict(x) for x in d["drones"]),
            tile_counts=dict(d["tile_counts"]),
        )


def encode(obj: Any) -> str:
    """Canonical JSON text used for files and for prompt runtime sections."""
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False)


@dataclass
class Ledger:
    scenario_config: dict = field(default_factory=dict)
    events: list[Event] = field(default_factory=list)
    decisions: list[DecisionRecord] = field(default_factory=list)
    snapshots: list[StatusSnapshot] = field(default_factory=list)

    @property
    def last_decision_id(self) -> int:
        return self.decisions[-1].decision_id if self.decisions else 0

    def append_event(self, time: float, kind: str, payload: dict) -> Event:
        if kind not in EVENT_KINDS:
            raise LedgerError(f"unknown event kind {kind!r}")
        if self.events and time < self.events[-1].time:
            raise LedgerError(f"event time {time} earlier than {self.events[-1].time}")
        ev = Event(time, len(self.events), kind, payload)
        self.events.append(ev)
        return ev

    def append_decision(self, record: DecisionRecord, snapshot: StatusSnapshot) -> "Ledger":
        expected = self.last_decision_id + 1
        if record.decision_id != expected:
            raise LedgerError(f"decision id {record.decision_id} out of sequence (expected {expected})")
        if snapshot.decision_id != record.decision_id:
            raise LedgerError("snapshot belongs to a different decision")
        self.decisions.append(record)
        self.snapshots.append(snapshot)
        return self

    def get_decision(self, decision_id: int) -> tuple[DecisionRecord, StatusSnapshot]:
        # ids are contiguous from 1
        idx = decision_id - 1
        if not isinstance(decision_id, int) or idx < 0 or idx >= len(self.decisions):
            raise DecisionNotFound(f"decision not found: {decision_id}")
        return self.decisions[idx], self.snapshots[idx]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "scenario_config": self.scenario_config,
            "events": [e.to_dict() for e in self.events],
            "decisions": [r.to_dict() for r in self.decisions],
            "snapshots": [s.to_dict() for s in self.snapshots],
        }

    def dumps(self) -> str:
        return encode(self.to_dict()) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Ledger":
        if not isinstance(d, dict) or "schema_version" not in d:
            raise LedgerFormatError("not a ledger document")
        if d["schema_version"] != SCHEMA_VERSION:
            raise SchemaVersionError(f"unsupported schema_version {d['schema_version']!r}")
        try:
            ledger = cls(scenario_config=d["scenario_config"])
            ledger.events = [Event(e["time"], e["seq"], e["kind"], e["payload"]) for e in d["events"]]
            for r, s in zip(d["decisions"], d["snapshots"], strict=True):
                ledger.append_decision(DecisionRecord.from_dict(r), StatusSnapshot.from_dict(s))
        except LedgerError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise LedgerFormatError(f"malformed ledger: {exc}") from exc
        return ledger

    @classmethod
    def loads(cls, text: str) -> "Ledger":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise LedgerFormatError(f"malformed JSON: {exc}") from exc
        return cls.from_dict(data)


def save(ledger: Ledger, path) -> None:
    Path(path).write_text(ledger.dumps(), encoding="utf-8")


def load(path) -> Ledger:
    return Ledger.loads(Path(path).read_text(encoding="utf-8"))
