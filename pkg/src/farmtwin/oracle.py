"""Brute-force reference for the planner, written without the fleet helpers.

Only primitive arithmetic is shared with the production path so that
disagreement points at a real bug rather than a shared one.
"""
from __future__ import annotations

from typing import Optional, Sequence

from farmtwin.farm import Thresholds, Tile
from farmtwin.fleet import BatteryModel, DroneState


def oracle_plan(
    tile: Tile,
    fleet: Sequence[DroneState],
    thresholds: Thresholds,
    t_insp: float,
    battery_model: BatteryModel,
    sim_time: float = 0.0,
) -> Optional[int]:
    if tile.observed_mean is None or tile.confidence is None:
        raise ValueError(f"tile {tile.tile_id} has no observation")
    if tile.confidence >= thresholds.t_alpha:
        return None
    tx = tile.col + 0.5
    ty = tile.row + 0.5
    best = None
    for d in fleet:
        if d.kind != "inspection" or d.battery <= 0 or d.queued_task is not None:
            continue
        if d.current_task is None:
            sx, sy = d.position
            fly_left = 0.0
            insp_left = 0.0
        else:
            sx, sy = d.current_task.target
            fly_left = d.current_task.flight_remaining
            insp_left = d.current_task.inspect_remaining
        dist = ((tx - sx) ** 2 + (ty - sy) ** 2) ** 0.5
        hop = dist / d.speed
        total = fly_left + insp_left + hop + t_insp
        energy = battery_model.fly_drain * (fly_left + hop) + battery_model.inspect_drain * (insp_left + t_insp)
        left = d.battery - energy
        if left < 0:
            left = 0.0
        if not left > thresholds.t_b:
            continue
        key = (total, d.drone_id)
        if best is None or key < best:
            best = key
    return None if best is None else best[1]
