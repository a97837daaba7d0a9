"""Scene geometry: rectangular room, axis-aligned obstacles, perimeter antennas.

The room occupies [0, width] x [0, length]. Perimeter arclength is measured
counterclockwise from the (0, 0) corner: bottom wall, right wall, top wall,
left wall.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DegenerateLayoutError(ValueError):
    """Raised when the free area is too small to sample a terminal position."""


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class RectObstacle:
    min_corner: Point2D
    max_corner: Point2D

    def __post_init__(self):
        if not (self.min_corner.x < self.max_corner.x and self.min_corner.y < self.max_corner.y):
            raise ValueError("obstacle corners must satisfy min < max on both axes")

    @property
    def area(self) -> float:
        return (self.max_corner.x - self.min_corner.x) * (self.max_corner.y - self.min_corner.y)

    def contains_interior(self, x: float, y: float) -> bool:
        """True iff (x, y) lies strictly inside the rectangle."""
        return (self.min_corner.x < x < self.max_corner.x
                and self.min_corner.y < y < self.max_corner.y)

    def overlaps(self, other: "RectObstacle") -> bool:
        """True iff the two open rectangles share interior points."""
        return (self.min_corner.x < other.max_corner.x and other.min_corner.x < self.max_corner.x
                and self.min_corner.y < other.max_corner.y and other.min_corner.y < self.max_corner.y)


@dataclass(frozen=True)
class RoomLayout:
    width: float
    length: float
    obstacles: tuple[RectObstacle, ...] = ()

    def __post_init__(self):
        if not (self.width > 0 and self.length > 0):
            raise ValueError("room dimensions must be positive")
        for obs in self.obstacles:
            inside = (0 < obs.min_corner.x and obs.max_corner.x < self.width
                      and 0 < obs.min_corner.y and obs.max_corner.y < self.length)
            if not inside:
                raise ValueError(f"obstacle {obs} must lie strictly inside the room")
        for i, a in enumerate(self.obstacles):
            for b in self.obstacles[i + 1:]:
                if a.overlaps(b):
                    raise ValueError(f"obstacles {a} and {b} overlap")

    @property
    def perimeter(self) -> float:
        return 2.0 * (self.width + self.length)

    @property
    def area(self) -> float:
        return self.width * self.length

    @property
    def free_area(self) -> float:
        return self.area - sum(o.area for o in self.obstacles)

    def corner_arclengths(self) -> tuple[float, float, float]:
        """Arclengths of the three corners after (0, 0): (W,0), (W,L), (0,L)."""
        return (self.width, self.width + self.length, 2.0 * self.width + self.length)

    def contains_interior(self, x: float, y: float) -> bool:
        return 0 < x < self.width and 0 < y < self.length

    def in_free_space(self, x: float, y: float) -> bool:
        """Strictly inside the room and strictly outside every obstacle (boundary excluded)."""
        if not self.contains_interior(x, y):
            return False
        for obs in self.obstacles:
            if (obs.min_corner.x <= x <= obs.max_corner.x
                    and obs.min_corner.y <= y <= obs.max_corner.y):
                return False
        return True

    def point_on_perimeter(self, s: float) -> Point2D:
        """Boundary point at counterclockwise arclength s (taken mod perimeter)."""
        w, l, p = self.width, self.length, self.perimeter
        s = s % p
        if s <= w:
            return Point2D(s, 0.0)
        if s <= w + l:
            return Point2D(w, s - w)
        if s <= 2.0 * w + l:
            return Point2D(2.0 * w + l - s, l)
        return Point2D(0.0, p - s)


@dataclass(frozen=True)
class AntennaArray:
    positions: tuple[Point2D, ...]
    perimeter_offsets: tuple[float, ...]

    def __post_init__(self):
        if len(self.positions) != len(self.perimeter_offsets):
            raise ValueError("positions and perimeter_offsets must have equal length")

    @property
    def m_antennas(self) -> int:
        return len(self.positions)

    def position_array(self) -> np.ndarray:
        """(M, 2) float array of antenna coordinates."""
        return np.array([(a.x, a.y) for a in self.positions], dtype=float)


def place_antennas(layout: RoomLayout, m_antennas: int) -> AntennaArray:
    """Distribute m_antennas uniformly along the room walls.

    Antenna m sits at arclength (m + 0.5) * P / M counterclockwise from the
    (0, 0) corner. The half-cell offset keeps antennas off the corners for
    every M.
    """
    if m_antennas < 4:
        raise ValueError(f"need at least 4 antennas, got {m_antennas}")
    p = layout.perimeter
    offsets = tuple((m + 0.5) * p / m_antennas for m in range(m_antennas))
    positions = tuple(layout.point_on_perimeter(s) for s in offsets)
    return AntennaArray(positions=positions, perimeter_offsets=offsets)


def distance(a: Point2D, b: Point2D) -> float:
    """Euclidean distance between two points."""
    return math.hypot(a.x - b.x, a.y - b.y)


def _segment_crosses_interior(ax: float, ay: float, bx: float, by: float,
                              obs: RectObstacle) -> bool:
    """True iff the segment a-b passes through the open interior of obs.

    Slab clipping with strict inequalities: a segment that only touches an
    edge or corner (grazing contact) does not count as crossing.
    """
    t0, t1 = 0.0, 1.0
    for lo, hi, start, delta in (
        (obs.min_corner.x, obs.max_corner.x, ax, bx - ax),
        (obs.min_corner.y, obs.max_corner.y, ay, by - ay),
    ):
        if delta == 0.0:
            if not (lo < start < hi):
                return False
        else:
            ta = (lo - start) / delta
            tb = (hi - start) / delta
            if ta > tb:
                ta, tb = tb, ta
            t0 = max(t0, ta)
            t1 = min(t1, tb)
    return t0 < t1


def ground_truth_los(mt: Point2D, antenna: Point2D, layout: RoomLayout) -> int:
    """1 iff the open segment mt-antenna avoids the interior of every obstacle."""
    for obs in layout.obstacles:
        if (obs.min_corner.x <= mt.x <= obs.max_corner.x
                and obs.min_corner.y <= mt.y <= obs.max_corner.y):
            raise ValueError(f"terminal position {mt} lies inside an obstacle")
    for obs in layout.obstacles:
        if _segment_crosses_interior(mt.x, mt.y, antenna.x, antenna.y, obs):
            return 0
    return 1


def antenna_distances(mt: Point2D, array: AntennaArray) -> np.ndarray:
    """Euclidean distance from mt to every antenna, as a length-M vector."""
    pos = array.position_array()
    return np.hypot(pos[:, 0] - mt.x, pos[:, 1] - mt.y)


def los_bits(mt: Point2D, array: AntennaArray, layout: RoomLayout) -> np.ndarray:
    """Ground-truth LoS state for every antenna, vectorized over the array.

    Same strict-interior slab test as ground_truth_los, applied elementwise.
    """
    for obs in layout.obstacles:
        if (obs.min_corner.x <= mt.x <= obs.max_corner.x
                and obs.min_corner.y <= mt.y <= obs.max_corner.y):
            raise ValueError(f"terminal position {mt} lies inside an obstacle")
    pos = array.position_array()
    blocked = np.zeros(array.m_antennas, dtype=bool)
    for obs in layout.obstacles:
        t0 = np.zeros(array.m_antennas)
        t1 = np.ones(array.m_antennas)
        feasible = np.ones(array.m_antennas, dtype=bool)
        for lo, hi, start, ends in (
            (obs.min_corner.x, obs.max_corner.x, mt.x, pos[:, 0]),
            (obs.min_corner.y, obs.max_corner.y, mt.y, pos[:, 1]),
        ):
            delta = ends - start
            zero = delta == 0.0
            feasible &= ~zero | (lo < start) & (start < hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                ta = np.where(zero, -np.inf, (lo - start) / delta)
                tb = np.where(zero, np.inf, (hi - start) / delta)
            swap = ta > tb
            ta_s = np.where(swap, tb, ta)
            tb_s = np.where(swap, ta, tb)
            t0 = np.maximum(t0, ta_s)
            t1 = np.minimum(t1, tb_s)
        blocked |= feasible & (t0 < t1)
    return (~blocked).astype(np.int8)


def sample_mt_location(layout: RoomLayout, rng: np.random.Generator,
                       max_attempts: int = 10_000) -> Point2D:
    """Point uniform over the free area, by rejection sampling.

    Raises DegenerateLayoutError when max_attempts rejections occur, which
    for the default budget means the obstacles cover essentially the whole
    room.
    """
    for _ in range(max_attempts):
        x = rng.uniform(0.0, layout.width)
        y = rng.uniform(0.0, layout.length)
        if layout.in_free_space(x, y):
            return Point2D(x, y)
    raise DegenerateLayoutError(
        f"no free-space sample found in {max_attempts} attempts; "
        "obstacles cover too much of the room")
