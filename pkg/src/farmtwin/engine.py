"""Discrete-event simulation of the sense / assess / plan / dispatch / update loop.

Randomness comes from one ``random.Random(seed)`` stream (Mersenne Twister,
``gauss`` for normal draws). Field pixels are drawn first, tile by tile in
row-major order, then survey noise in scan order.
"""
from __future__ import annotations

import logging
import math
import random
from collections import deque
from dataclasses import replace
from typing import Optional

from farmtwin.config import ScenarioConfig
from farmtwin.farm import (
    INSPECTED,
    INSPECTING,
    PENDING,
    SURVEYED,
    Tile,
    mean_ndvi,
    needs_inspection,
    status_counts,
)
from farmtwin.fleet import INSPECTION, DroneState, apply_dispatch, next_transition, tick
from farmtwin.ledger import Ledger, StatusSnapshot
from farmtwin.planner import DISPATCHED, NO_FEASIBLE_DRONE, NO_TRIGGER, DecisionRecord, plan

log = logging.getLogger(__name__)


def _clamp(v: float) -> float:
    return min(1.0, max(-1.0, v))


def _pixel_offsets(n: int) -> list[tuple[float, float]]:
    side = math.isqrt(n - 1) + 1
    return [((k % side + 0.5) / side, (k // side + 0.5) / side) for k in range(n)]


def generate_farm(config: ScenarioConfig, rng: Optional[random.Random] = None) -> list[Tile]:
    """Ground-truth tiles: base NDVI plus per-pixel jitter, lowered inside blight patches."""
    config.validate()
    if rng is None:
        rng = random.Random(config.seed)
    fld = config.field
    offsets = _pixel_offsets(config.pixels_per_tile)
    tiles = []
    for row in range(config.rows):
        for col in range(config.cols):
            pixels = []
            for dx, dy in offsets:
                v = fld.base_ndvi + rng.gauss(0.0, fld.jitter_sigma)
                x, y = col + dx, row + dy
                for patch in fld.patches:
                    if math.dist((x, y), patch.center) <= patch.radius:
                        v -= patch.severity
                pixels.append(_clamp(v))
            tiles.append(Tile(row * config.cols + col, row, col, pixels))
    return tiles


def scan_order(rows: int, cols: int) -> list[int]:
    """Boustrophedon row-major tile ids."""
    order = []
    for r in range(rows):
        cs = range(cols) if r % 2 == 0 else range(cols - 1, -1, -1)
        order.extend(r * cols + c for c in cs)
    return order


def observe_survey(tile: Tile, rng: random.Random, sigma: float) -> float:
    return _clamp(tile.true_mean + rng.gauss(0.0, sigma))


def observe_inspection(tile: Tile) -> float:
    if tile.status not in (PENDING, INSPECTING):
        raise ValueError(f"tile {tile.tile_id} is {tile.status}, not awaiting inspection")
    return mean_ndvi(tile.pixels)


class Simulation:
    """One run of a scenario. ``run()`` returns the ledger; state stays inspectable."""

    def __init__(self, config: ScenarioConfig):
        self.config = config.validate()
        self.rng = random.Random(config.seed)
        self.tiles = generate_farm(config, self.rng)
        self.fleet: dict[int, DroneState] = {d.drone_id: d for d in config.fleet}
        self.survey_id = next(d.drone_id for d in config.fleet if d.kind != INSPECTION)
        self.order = scan_order(config.rows, config.cols)
        self.scanned = 0
        self.pending: deque[int] = deque()
        self.ledger = Ledger(scenario_config=config.to_dict())
        self.now = 0.0

    # -- bookkeeping -------------------------------------------------------

    def _event(self, kind: str, payload: dict) -> None:
        self.ledger.append_event(self.now, kind, payload)

    def _snapshot(self, decision_id: int) -> StatusSnapshot:
        drones = tuple(self.fleet[i] for i in sorted(self.fleet))
        return StatusSnapshot(decision_id, self.now, drones, status_counts(self.tiles))

    def _terminal(self) -> bool:
        return all(t.status in (SURVEYED, INSPECTED) for t in self.tiles)

    def _sync_tile_status(self) -> None:
        for d in self.fleet.values():
            task = d.current_task
            if task is not None and task.flight_remaining == 0:
                tile = self.tiles[task.tile_id]
                if tile.status == PENDING:
                    tile.move_to(INSPECTING)

    # -- planning ----------------------------------------------------------

    def _plan(self, tile: Tile) -> Optional[DecisionRecord]:
        cfg = self.config
        decision_id = self.ledger.last_decision_id + 1
        snapshot = self._snapshot(decision_id)
        record = plan(
            tile,
            list(self.fleet.values()),
            cfg.thresholds,
            cfg.t_insp,
            cfg.battery_model,
            self.now,
            decision_id,
        )
        if record.outcome == NO_TRIGGER and not cfg.record_no_trigger:
            return record
        self.ledger.append_decision(record, snapshot)
        self._event(
            "decision",
            {
                "decision_id": record.decision_id,
                "tile_id": tile.tile_id,
                "outcome": record.outcome,
                "selected_drone_id": record.selected_drone_id,
            },
        )
        if record.outcome == DISPATCHED:
            drone = self.fleet[record.selected_drone_id]
            queued = drone.busy
            self.fleet[drone.drone_id] = apply_dispatch(drone, tile, cfg.t_insp)
            self._event(
                "dispatch",
                {
                    "decision_id": record.decision_id,
                    "drone_id": drone.drone_id,
                    "tile_id": tile.tile_id,
                    "queued": queued,
                },
            )
            self._sync_tile_status()
        return record

    def _survey_next(self) -> None:
        cfg = self.config
        tile = self.tiles[self.order[self.scanned]]
        self.scanned += 1
        value = observe_survey(tile, self.rng, cfg.survey_noise_sigma)
        alpha = tile.observe(value, cfg.fuzzy)
        tile.move_to(SURVEYED)
        survey = self.fleet[self.survey_id]
        self.fleet[self.survey_id] = replace(survey, position=tile.center)
        self._event(
            "survey_image",
            {"tile_id": tile.tile_id, "observed_mean": value, "confidence": alpha},
        )
        if needs_inspection(alpha, cfg.thresholds):
            tile.move_to(PENDING)
        record = self._plan(tile)
        if record.outcome == NO_FEASIBLE_DRONE:
            self.pending.append(tile.tile_id)
            self._event("tile_queued", {"tile_id": tile.tile_id, "decision_id": record.decision_id})

    def _replan_pending(self) -> None:
        for tile_id in list(self.pending):
            record = self._plan(self.tiles[tile_id])
            if record.outcome == DISPATCHED:
                self.pending.remove(tile_id)

    # -- drone events ------------------------------------------------------

    def _task_completed(self, drone_id: int, tile_id: int) -> None:
        tile = self.tiles[tile_id]
        self._event("task_completed", {"drone_id": drone_id, "tile_id": tile_id})
        if tile.status == PENDING:
            tile.move_to(INSPECTING)
        value = observe_inspection(tile)
        alpha = tile.observe(value, self.config.fuzzy)
        tile.move_to(INSPECTED)
        self._event("model_updated", {"tile_id": tile_id, "observed_mean": value, "confidence": alpha})

    def _stranded(self, payload: dict) -> None:
        self._event("drone_stranded", payload)
        for tile_id in payload["abandoned_tiles"]:
            tile = self.tiles[tile_id]
            if tile.status == INSPECTING:
                tile.move_to(PENDING)
            if tile_id not in self.pending:
                self.pending.append(tile_id)
            self._event("tile_requeued", {"tile_id": tile_id, "drone_id": payload["drone_id"]})

    def step(self) -> None:
        cfg = self.config
        n_tiles = len(self.tiles)
        next_survey = (self.scanned + 1) * cfg.survey_period if self.scanned < n_tiles else math.inf
        horizon = min(next_survey, cfg.duration)
        for d in self.fleet.values():
            if d.kind == INSPECTION:
                horizon = min(horizon, self.now + next_transition(d, cfg.battery_model))
        dt = horizon - self.now
        drone_events = []
        if dt > 0:
            for drone_id in sorted(self.fleet):
                d = self.fleet[drone_id]
                if d.kind != INSPECTION:
                    continue
                self.fleet[drone_id], evs = tick(d, dt, cfg.battery_model, self.now)
                drone_events.extend(evs)
        self.now = horizon

        completed = False
        for ev in drone_events:
            if ev.kind == "task_completed":
                self._task_completed(ev.payload["drone_id"], ev.payload["tile_id"])
                completed = True
            else:
                self._stranded(ev.payload)
        self._sync_tile_status()
        if completed:
            self._replan_pending()
        if horizon >= next_survey and self.scanned < n_tiles:
            self.now = next_survey
            self._survey_next()

    def run(self) -> Ledger:
        while self.now < self.config.duration and not self._terminal():
            self.step()
        log.info(
            "run finished at t=%s: %d events, %d decisions, %d pending",
            self.now,
            len(self.ledger.events),
            len(self.ledger.decisions),
            len(self.pending),
        )
        return self.ledger


def run(config: ScenarioConfig) -> Ledger:
    return Simulation(config).run()
