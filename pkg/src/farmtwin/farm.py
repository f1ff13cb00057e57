"""Farm grid, NDVI aggregation and fuzzy health confidence."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

UNSCANNED = "unscanned"
SURVEYED = "surveyed"
PENDING = "pending_inspection"
INSPECTING = "inspecting"
INSPECTED = "inspected"
TILE_STATUSES = (UNSCANNED, SURVEYED, PENDING, INSPECTING, INSPECTED)

# allowed status moves; surveyed is terminal when the tile is confident
_TRANSITIONS = {
    UNSCANNED: {SURVEYED},
    SURVEYED: {PENDING},
    PENDING: {INSPECTING},
    INSPECTING: {INSPECTED, PENDING},
    INSPECTED: set(),
}


class FuzzyParamsError(ValueError):
    pass


class DomainError(ValueError):
    pass


def _check_ndvi(x: float, what: str = "x") -> None:
    if not (-1.0 <= x <= 1.0) or math.isnan(x):
        raise DomainError(f"{what}={x!r} outside [-1,1]")


@dataclass(frozen=True)
class FuzzyParams:
    """Ramp boundaries of the Good (a1, b1) and Bad (a2, b2) memberships."""

    a1: float = -0.2
    b1: float = 0.4
    a2: float = -0.6
    b2: float = 0.2

    def to_dict(self) -> dict:
        return {"a1": self.a1, "b1": self.b1, "a2": self.a2, "b2": self.b2}


def validate_fuzzy_params(p: FuzzyParams) -> FuzzyParams:
    for name in ("a1", "b1", "a2", "b2"):
        v = getattr(p, name)
        if not (-1.0 <= v <= 1.0) or math.isnan(v):
            raise FuzzyParamsError(f"{name} out of [-1,1]: {v!r}")
    if not p.a1 < p.b1:
        raise FuzzyParamsError("a1 < b1 required")
    if not p.a2 < p.b2:
        raise FuzzyParamsError("a2 < b2 required")
    return p


@dataclass(frozen=True)
class Thresholds:
    t_alpha: float = 0.5
    t_b: float = 20.0

    def __post_init__(self):
        if not 0.0 <= self.t_alpha <= 1.0:
            raise ValueError(f"t_alpha out of [0,1]: {self.t_alpha!r}")
        if not 0.0 <= self.t_b <= 100.0:
            raise ValueError(f"t_b out of [0,100]: {self.t_b!r}")

    def to_dict(self) -> dict:
        return {"t_alpha": self.t_alpha, "t_b": self.t_b}


def mu_good(x: float, p: FuzzyParams) -> float:
    """Degree to which NDVI ``x`` reads as healthy crop (rising ramp a1 -> b1)."""
    _check_ndvi(x)
    if x < p.a1:
        return 0.0
    if x > p.b1:
        return 1.0
    return (x - p.a1) / (p.b1 - p.a1)


def mu_bad(x: float, p: FuzzyParams) -> float:
    """Degree to which NDVI ``x`` reads as unhealthy crop (falling ramp a2 -> b2)."""
    _check_ndvi(x)
    if x < p.a2:
        return 1.0
    if x > p.b2:
        return 0.0
    return (p.b2 - x) / (p.b2 - p.a2)


def mean_ndvi(pixels: Sequence[float]) -> float:
    if len(pixels) == 0:
        raise ValueError("mean_ndvi of empty pixel list")
    for v in pixels:
        _check_ndvi(v, "pixel")
    # fsum keeps k copies of x exactly at x
    m = math.fsum(pixels) / len(pixels)
    return min(1.0, max(-1.0, m))


def confidence(v_bar: float, p: FuzzyParams) -> float:
    """Confidence that a tile is clearly Good or clearly Bad; 0 means ambiguous."""
    return abs(mu_good(v_bar, p) - mu_bad(v_bar, p))


def needs_inspection(alpha: float, thresholds: Thresholds) -> bool:
    return alpha < thresholds.t_alpha


@dataclass
class Tile:
    tile_id: int
    row: int
    col: int
    pixels: list[float]
    observed_mean: Optional[float] = None
    confidence: Optional[float] = None
    status: str = UNSCANNED

    def __post_init__(self):
        if not self.pixels:
            raise ValueError(f"tile {self.tile_id} has no pixels")
        for v in self.pixels:
            _check_ndvi(v, "pixel")

    @property
    def center(self) -> tuple[float, float]:
        return (self.col + 0.5, self.row + 0.5)

    @property
    def true_mean(self) -> float:
        return mean_ndvi(self.pixels)

    def move_to(self, status: str) -> None:
        if status not in _TRANSITIONS[self.status]:
            raise ValueError(f"tile {self.tile_id}: illegal transition {self.status} -> {status}")
        self.status = status

    def observe(self, value: float, p: FuzzyParams) -> float:
        self.observed_mean = value
        self.confidence = confidence(value, p)
        return self.confidence

    def summary(self) -> dict:
        return {
            "tile_id": self.tile_id,
            "row": self.row,
            "col": self.col,
            "observed_mean": self.observed_mean,
            "confidence": self.confidence,
            "status": self.status,
        }


def status_counts(tiles: Sequence[Tile]) -> dict[str, int]:
    counts = {s: 0 for s in TILE_STATUSES}
    for t in tiles:
        counts[t.status] += 1
    return counts
