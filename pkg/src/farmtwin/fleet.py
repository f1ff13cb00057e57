"""Drone state, battery accounting and the what-if assignment simulation."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Union

from farmtwin.farm import Thresholds, Tile

SURVEY = "survey"
INSPECTION = "inspection"

READY = "ready"
FLYING = "flying"
INSPECTING = "inspecting"

BATTERY_BELOW_THRESHOLD = "battery_below_threshold"

# residual time below which a flight or inspection counts as finished
EPS = 1e-9

Point = tuple[float, float]


class FleetError(ValueError):
    pass


@dataclass(frozen=True)
class BatteryModel:
    """Linear drain rates, percent of capacity per time unit."""

    fly_drain: float = 1.0
    inspect_drain: float = 0.5
    idle_drain: float = 0.0

    def __post_init__(self):
        for name in ("fly_drain", "inspect_drain", "idle_drain"):
            if getattr(self, name) < 0:
                raise FleetError(f"{name} must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "fly_drain": self.fly_drain,
            "inspect_drain": self.inspect_drain,
            "idle_drain": self.idle_drain,
        }


@dataclass(frozen=True)
class Task:
    """One inspection job: fly to ``target`` then inspect tile ``tile_id``."""

    tile_id: int
    target: Point
    flight_remaining: float
    inspect_remaining: float

    @property
    def remaining(self) -> float:
        return self.flight_remaining + self.inspect_remaining

    def to_dict(self) -> dict:
        return {
            "tile_id": self.tile_id,
            "target": list(self.target),
            "remaining_time": self.remaining,
            "flight_remaining": self.flight_remaining,
            "inspect_remaining": self.inspect_remaining,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Task":
        return cls(
            tile_id=d["tile_id"],
            target=tuple(d["target"]),
            flight_remaining=d["flight_remaining"],
            inspect_remaining=d["inspect_remaining"],
        )


@dataclass(frozen=True)
class DroneState:
    drone_id: int
    kind: str
    position: Point
    speed: float = 2.0
    battery: float = 100.0
    status: str = READY
    current_task: Optional[Task] = None
    queued_task: Optional[Task] = None

    def __post_init__(self):
        if self.kind not in (SURVEY, INSPECTION):
            raise FleetError(f"drone {self.drone_id}: unknown kind {self.kind!r}")
        if not self.speed > 0:
            raise FleetError(f"drone {self.drone_id}: speed must be > 0")
        if not 0.0 <= self.battery <= 100.0:
            raise FleetError(f"drone {self.drone_id}: battery out of [0,100]")
        if (self.status == READY) != (self.current_task is None):
            raise FleetError(f"drone {self.drone_id}: status {self.status} inconsistent with current task")
        if self.queued_task is not None and self.current_task is None:
            raise FleetError(f"drone {self.drone_id}: queued task without a current task")
        object.__setattr__(self, "position", tuple(float(c) for c in self.position))

    @property
    def stranded(self) -> bool:
        return self.battery <= 0.0

    @property
    def busy(self) -> bool:
        return self.current_task is not None

    def to_dict(self) -> dict:
        return {
            "drone_id": self.drone_id,
            "kind": self.kind,
            "position": list(self.position),
            "speed": self.speed,
            "battery": self.battery,
            "status": self.status,
            "current_task": self.current_task.to_dict() if self.current_task else None,
            "queued_task": self.queued_task.to_dict() if self.queued_task else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DroneState":
        allowed = {"drone_id", "kind", "position", "speed", "battery", "status", "current_task", "queued_task"}
        unknown = set(d) - allowed
        if unknown:
            raise FleetError(f"unknown drone keys: {sorted(unknown)}")
        kw = dict(d)
        kw["position"] = tuple(d["position"])
        for key in ("current_task", "queued_task"):
            if kw.get(key) is not None:
                kw[key] = Task.from_dict(kw[key])
        return cls(**kw)


@dataclass(frozen=True)
class CandidateOption:
    """What-if result of sending one drone to the triggering tile."""

    drone_id: int
    t_rem: float
    t_disp: float
    t_insp: float
    delta_t: float
    predicted_battery: float
    feasible: bool
    rejection_reason: Optional[str] = None

    def to_dict(self) -> dict:
        d = {
            "drone_id": self.drone_id,
            "t_rem": self.t_rem,
            "t_disp": self.t_disp,
            "t_insp": self.t_insp,
            "delta_t": self.delta_t,
            "predicted_battery": self.predicted_battery,
            "feasible": self.feasible,
        }
        if self.rejection_reason is not None:
            d["rejection_reason"] = self.rejection_reason
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CandidateOption":
        return cls(**d)


def travel_time(start: Point, end: Point, speed: float) -> float:
    if not speed > 0:
        raise FleetError("speed must be > 0")
    return math.dist(start, end) / speed


def projected_position(drone: DroneState) -> Point:
    """Where the drone will be once its current task is done."""
    if drone.current_task is None:
        return drone.position
    return drone.current_task.target


def simulate_assignment(
    drone: DroneState,
    target: Union[Tile, Point],
    t_insp: float,
    battery_model: BatteryModel,
    thresholds: Thresholds,
) -> CandidateOption:
    """Predict time and battery for ``drone`` finishing its job, then inspecting ``target``.

    Pure: nothing is mutated. ``target`` is a tile (its center is used) or a point.
    """
    if drone.kind != INSPECTION:
        raise FleetError(f"drone {drone.drone_id} is a {drone.kind} drone")
    point = target.center if isinstance(target, Tile) else tuple(target)
    task = drone.current_task
    fly_rem = task.flight_remaining if task else 0.0
    insp_rem = task.inspect_remaining if task else 0.0
    t_rem = fly_rem + insp_rem
    t_disp = travel_time(projected_position(drone), point, drone.speed)
    delta_t = t_rem + t_disp + t_insp
    predicted = (
        drone.battery
        - battery_model.inspect_drain * insp_rem
        - battery_model.fly_drain * fly_rem
        - battery_model.fly_drain * t_disp
        - battery_model.inspect_drain * t_insp
    )
    predicted = max(0.0, predicted)
    feasible = predicted > thresholds.t_b
    return CandidateOption(
        drone_id=drone.drone_id,
        t_rem=t_rem,
        t_disp=t_disp,
        t_insp=t_insp,
        delta_t=delta_t,
        predicted_battery=predicted,
        feasible=feasible,
        rejection_reason=None if feasible else BATTERY_BELOW_THRESHOLD,
    )


def apply_dispatch(drone: DroneState, target: Tile, t_insp: float) -> DroneState:
    """Hand ``target`` to ``drone``: start now if ready, else queue behind the current task."""
    if drone.kind != INSPECTION:
        raise FleetError(f"drone {drone.drone_id} is a {drone.kind} drone")
    if drone.queued_task is not None:
        raise FleetError(f"drone {drone.drone_id} already has a queued task")
    start = projected_position(drone)
    task = Task(
        tile_id=target.tile_id,
        target=target.center,
        flight_remaining=travel_time(start, target.center, drone.speed),
        inspect_remaining=t_insp,
    )
    if drone.current_task is None:
        status = FLYING if task.flight_remaining > 0 else INSPECTING
        return replace(drone, status=status, current_task=task)
    return replace(drone, queued_task=task)


class DroneEvent(NamedTuple):
    time: float
    kind: str
    payload: dict


def next_transition(drone: DroneState, battery_model: BatteryModel) -> float:
    """Time until the drone's next state change (inf if none)."""
    if drone.stranded:
        return math.inf
    task = drone.current_task
    if task is None:
        rate = battery_model.idle_drain
        return drone.battery / rate if rate > 0 else math.inf
    if task.flight_remaining > 0:
        step, rate = task.flight_remaining, battery_model.fly_drain
    else:
        step, rate = task.inspect_remaining, battery_model.inspect_drain
    if rate > 0:
        step = min(step, drone.battery / rate)
    return step


def _strand(drone: DroneState, at: float) -> tuple[DroneState, DroneEvent]:
    abandoned = [t.tile_id for t in (drone.current_task, drone.queued_task) if t is not None]
    stranded = replace(drone, battery=0.0, status=READY, current_task=None, queued_task=None)
    ev = DroneEvent(at, "drone_stranded", {"drone_id": drone.drone_id, "abandoned_tiles": abandoned})
    return stranded, ev


def tick(
    drone: DroneState, dt: float, battery_model: BatteryModel, now: float = 0.0
) -> tuple[DroneState, list[DroneEvent]]:
    """Advance one drone by ``dt`` time units, returning the new state and emitted events."""
    if not dt > 0:
        raise FleetError("dt must be > 0")
    events: list[DroneEvent] = []
    elapsed = 0.0
    d = drone
    while not d.stranded and dt - elapsed > EPS:
        left = dt - elapsed
        task = d.current_task
        if task is None:
            drain = battery_model.idle_drain * left
            if drain > 0 and d.battery - drain <= EPS:
                d, ev = _strand(d, now + elapsed + d.battery / battery_model.idle_drain)
                events.append(ev)
            else:
                d = replace(d, battery=d.battery - drain)
            break

        flying = task.flight_remaining > 0
        rate = battery_model.fly_drain if flying else battery_model.inspect_drain
        phase_left = task.flight_remaining if flying else task.inspect_remaining
        step = min(left, phase_left)
        if rate > 0 and d.battery - rate * step <= EPS and d.battery / rate < phase_left - EPS:
            # runs dry before this phase completes
            at = now + elapsed + d.battery / rate
            d, ev = _strand(d, at)
            events.append(ev)
            break
        battery = d.battery - rate * step
        if battery <= EPS:
            battery = 0.0
        elapsed += step
        done = phase_left - step <= EPS

        if flying:
            if done:
                position = task.target
                task = replace(task, flight_remaining=0.0)
                d = replace(d, position=position, battery=battery, status=INSPECTING, current_task=task)
            else:
                frac = step / phase_left
                x0, y0 = d.position
                x1, y1 = task.target
                position = (x0 + (x1 - x0) * frac, y0 + (y1 - y0) * frac)
                task = replace(task, flight_remaining=phase_left - step)
                d = replace(d, position=position, battery=battery, current_task=task)
        elif not done:
            d = replace(d, battery=battery, current_task=replace(task, inspect_remaining=phase_left - step))
        else:
            events.append(
                DroneEvent(now + elapsed, "task_completed", {"drone_id": d.drone_id, "tile_id": task.tile_id})
            )
            nxt = d.queued_task
            if nxt is None:
                d = replace(d, battery=battery, status=READY, current_task=None)
            else:
                status = FLYING if nxt.flight_remaining > 0 else INSPECTING
                d = replace(d, battery=battery, status=status, current_task=nxt, queued_task=None)
        if d.battery <= 0.0:
            d, ev = _strand(d, now + elapsed)
            events.append(ev)
    return d, events

