"""Occupancy grid, fan-region carving and map scoring.

At a terminal position the room partitions into one fan region per antenna:
the polygon with apex at the terminal whose base runs along the perimeter
between the arclength midpoints flanking that antenna (room corners are
inserted as extra vertices where the base crosses them). A region is carved
as explored free space when its antenna's link is LoS. Cells transition
Unexplored -> Explored only; the map is scored by the overlap between the
unexplored region and the true obstacle footprint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import AntennaArray, Point2D, RoomLayout

# Raster values emitted by render_grid.
RENDER_UNEXPLORED = 128
RENDER_EXPLORED = 255
RENDER_TABLE = 64
RENDER_ANTENNA_NLOS = 0
RENDER_ANTENNA_LOS = 224


@dataclass(frozen=True)
class FanRegion:
    apex: Point2D
    boundary_chain: tuple[Point2D, ...]

    def polygon(self) -> np.ndarray:
        """(n, 2) vertex array: apex followed by the perimeter chain."""
        verts = [(self.apex.x, self.apex.y)]
        verts.extend((q.x, q.y) for q in self.boundary_chain)
        return np.array(verts, dtype=float)


@dataclass
class OccupancyGrid:
    cell_size: float
    nx: int
    ny: int
    cells: np.ndarray = field(repr=False)  # bool (ny, nx); True = Explored

    def x_centers(self) -> np.ndarray:
        return (np.arange(self.nx) + 0.5) * self.cell_size

    def y_centers(self) -> np.ndarray:
        return (np.arange(self.ny) + 0.5) * self.cell_size

    def in_room_mask(self, layout: RoomLayout) -> np.ndarray:
        """Cells whose center falls inside the room (excludes overhang padding)."""
        return ((self.x_centers() < layout.width)[None, :]
                & (self.y_centers() < layout.length)[:, None])

    def unexplored_area(self, layout: RoomLayout) -> float:
        """Unexplored in-room area in square meters."""
        mask = ~self.cells & self.in_room_mask(layout)
        return float(mask.sum()) * self.cell_size ** 2

    def copy(self) -> "OccupancyGrid":
        return OccupancyGrid(cell_size=self.cell_size, nx=self.nx, ny=self.ny,
                             cells=self.cells.copy())


@dataclass(frozen=True)
class MapMetrics:
    iou: float                # percent
    unexplored_area: float    # m^2
    intersection_area: float  # m^2
    union_area: float         # m^2


def init_grid(layout: RoomLayout, cell_size: float) -> OccupancyGrid:
    """Fresh all-Unexplored grid covering the room (last row/column may overhang)."""
    if cell_size <= 0:
        raise ValueError("cell_size must be positive")
    nx = int(np.ceil(layout.width / cell_size - 1e-9))
    ny = int(np.ceil(layout.length / cell_size - 1e-9))
    return OccupancyGrid(cell_size=cell_size, nx=nx, ny=ny,
                         cells=np.zeros((ny, nx), dtype=bool))


def _region_arclength_bounds(array: AntennaArray, perimeter: float):
    """Per-antenna arclength interval [low_m, high_m) of its fan-region base.

    Bounds are the midpoints between consecutive antenna offsets; low_0 wraps
    through the perimeter origin and may be slightly negative. Adjacent regions
    share the identical floating-point midpoint, so the intervals tile
    [low_0, low_0 + P) exactly.
    """
    s = np.asarray(array.perimeter_offsets, dtype=float)
    mids = 0.5 * (s[:-1] + s[1:])
    low0 = 0.5 * (s[0] + (s[-1] - perimeter))
    lows = np.concatenate(([low0], mids))
    highs = np.concatenate((mids, [low0 + perimeter]))
    return lows, highs


def fan_regions(mt: Point2D, array: AntennaArray, layout: RoomLayout) -> list[FanRegion]:
    """One fan region per antenna, tiling the room around the terminal position."""
    if not layout.contains_interior(mt.x, mt.y):
        raise ValueError(f"terminal position {mt} must lie strictly inside the room")
    p = layout.perimeter
    lows, highs = _region_arclength_bounds(array, p)
    # Corner arclengths, repeated one period up and down so that intervals
    # reaching below 0 or beyond P still pick them up.
    base_corners = np.array((0.0,) + layout.corner_arclengths())
    corner_candidates = np.concatenate((base_corners - p, base_corners, base_corners + p))
    regions = []
    for low, high in zip(lows, highs):
        inner = corner_candidates[(corner_candidates > low) & (corner_candidates < high)]
        chain = [layout.point_on_perimeter(low)]
        chain.extend(layout.point_on_perimeter(c) for c in np.sort(inner))
        chain.append(layout.point_on_perimeter(high))
        regions.append(FanRegion(apex=mt, boundary_chain=tuple(chain)))
    return regions


def polygon_area(vertices: np.ndarray) -> float:
    """Unsigned shoelace area of a closed polygon given as an (n, 2) array."""
    x = vertices[:, 0]
    y = vertices[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def region_area(region: FanRegion) -> float:
    return polygon_area(region.polygon())


def carve(grid: OccupancyGrid, region: FanRegion) -> OccupancyGrid:
    """Mark every cell whose center lies strictly inside the region as Explored.

    Even-odd crossing test restricted to the polygon's bounding box, with
    centers that fall exactly on an edge excluded (they stay Unexplored, so
    carving is idempotent and adjacent regions never claim a shared-edge cell).
    """
    verts = region.polygon()
    cs = grid.cell_size
    ix0 = max(0, int(np.floor(verts[:, 0].min() / cs - 0.5)) - 1)
    ix1 = min(grid.nx - 1, int(np.ceil(verts[:, 0].max() / cs - 0.5)) + 1)
    iy0 = max(0, int(np.floor(verts[:, 1].min() / cs - 0.5)) - 1)
    iy1 = min(grid.ny - 1, int(np.ceil(verts[:, 1].max() / cs - 0.5)) + 1)
    if ix0 > ix1 or iy0 > iy1:
        return grid
    xc = (np.arange(ix0, ix1 + 1) + 0.5) * cs
    yc = (np.arange(iy0, iy1 + 1) + 0.5) * cs
    xc2 = xc[None, :]
    yc2 = yc[:, None]

    inside = np.zeros((yc.size, xc.size), dtype=bool)
    on_edge = np.zeros_like(inside)
    n = verts.shape[0]
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        if y1 != y2:
            crosses = (y1 > yc2) != (y2 > yc2)
            x_int = x1 + (yc2 - y1) * (x2 - x1) / (y2 - y1)
            inside ^= crosses & (xc2 < x_int)
        ex, ey = x2 - x1, y2 - y1
        len_sq = ex * ex + ey * ey
        if len_sq == 0.0:
            on_edge |= (xc2 == x1) & (yc2 == y1)
            continue
        cross = (xc2 - x1) * ey - (yc2 - y1) * ex
        along = (xc2 - x1) * ex + (yc2 - y1) * ey
        on_edge |= (cross == 0.0) & (along >= 0.0) & (along <= len_sq)

    grid.cells[iy0:iy1 + 1, ix0:ix1 + 1] |= inside & ~on_edge
    return grid


def update_with_location(grid: OccupancyGrid, mt: Point2D, array: AntennaArray,
                         layout: RoomLayout, b_hat: np.ndarray) -> OccupancyGrid:
    """Carve the fan region of every LoS-flagged antenna in one vectorized pass.

    Each cell center is classified by the perimeter arclength where the ray
    from the terminal through it exits the room; that arclength falls in
    exactly one antenna's base interval, which is the same strict-interior
    membership carve() computes polygon by polygon. Centers landing exactly
    on a region boundary (or on the terminal itself) stay Unexplored.
    """
    b_hat = np.asarray(b_hat)
    if b_hat.shape != (array.m_antennas,):
        raise ValueError(f"b_hat must have length {array.m_antennas}, got {b_hat.shape}")
    if not layout.contains_interior(mt.x, mt.y):
        raise ValueError(f"terminal position {mt} must lie strictly inside the room")
    los = b_hat.astype(bool)
    if not los.any():
        return grid

    w, l, p = layout.width, layout.length, layout.perimeter
    ax, ay = mt.x, mt.y
    vx = grid.x_centers() - ax           # (nx,)
    vy = grid.y_centers() - ay           # (ny,)
    with np.errstate(divide="ignore"):
        tx = np.where(vx > 0, (w - ax) / vx, np.where(vx < 0, -ax / vx, np.inf))
        ty = np.where(vy > 0, (l - ay) / vy, np.where(vy < 0, -ay / vy, np.inf))
    t = np.minimum(tx[None, :], ty[:, None])
    apex_cell = (vx == 0)[None, :] & (vy == 0)[:, None]
    t = np.where(np.isfinite(t), t, 0.0)  # apex cell only; masked out below

    exit_x = np.clip(ax + t * vx[None, :], 0.0, w)
    exit_y = np.clip(ay + t * vy[:, None], 0.0, l)
    s_vertical = np.where(vx[None, :] > 0, w + exit_y, 2.0 * w + l + (l - exit_y))
    s_horizontal = np.where(vy[:, None] > 0, w + l + (w - exit_x), exit_x)
    s = np.where(tx[None, :] <= ty[:, None], s_vertical, s_horizontal)

    lows, _ = _region_arclength_bounds(array, p)
    low0 = lows[0]
    inner_bounds = lows[1:]
    s_shift = np.where(s >= low0, s, s + p)
    region_idx = np.searchsorted(inner_bounds, s_shift, side="right")
    all_bounds = np.concatenate((lows, [low0 + p]))
    probe = np.clip(np.searchsorted(all_bounds, s_shift, side="left"),
                    0, all_bounds.size - 1)
    on_boundary = all_bounds[probe] == s_shift

    in_room = (grid.x_centers() < w)[None, :] & (grid.y_centers() < l)[:, None]
    grid.cells |= los[region_idx] & ~on_boundary & ~apex_cell & in_room
    return grid


def _obstacle_cell_mask(grid: OccupancyGrid, layout: RoomLayout) -> np.ndarray:
    """Cells whose center lies strictly inside any obstacle."""
    xc2 = grid.x_centers()[None, :]
    yc2 = grid.y_centers()[:, None]
    mask = np.zeros((grid.ny, grid.nx), dtype=bool)
    for obs in layout.obstacles:
        mask |= ((xc2 > obs.min_corner.x) & (xc2 < obs.max_corner.x)
                 & (yc2 > obs.min_corner.y) & (yc2 < obs.max_corner.y))
    return mask


def compute_iou(grid: OccupancyGrid, layout: RoomLayout) -> MapMetrics:
    """Overlap score between the unexplored region and the obstacle footprint.

    Both regions are rasterized on the shared grid by cell-center membership;
    areas are cell counts scaled to square meters. An empty union (no
    obstacles and a fully explored map) scores 100 by convention.
    """
    in_room = grid.in_room_mask(layout)
    unexplored = ~grid.cells & in_room
    table = _obstacle_cell_mask(grid, layout) & in_room
    inter = int((unexplored & table).sum())
    union = int((unexplored | table).sum())
    iou = 100.0 if union == 0 else 100.0 * inter / union
    cell_area = grid.cell_size ** 2
    return MapMetrics(iou=iou,
                      unexplored_area=float(unexplored.sum()) * cell_area,
                      intersection_area=inter * cell_area,
                      union_area=union * cell_area)


def render_grid(grid: OccupancyGrid, layout: RoomLayout,
                array: AntennaArray | None = None,
                b_hat: np.ndarray | None = None) -> np.ndarray:
    """Deterministic uint8 raster of the map state, shape (ny, nx).

    Row 0 corresponds to the y = 0 edge. Explored and unexplored cells, the
    obstacle footprint, and antenna markers (split by LoS state when b_hat is
    given) each receive a distinct gray value.
    """
    img = np.where(grid.cells, RENDER_EXPLORED, RENDER_UNEXPLORED).astype(np.uint8)
    img[_obstacle_cell_mask(grid, layout)] = RENDER_TABLE
    if array is not None:
        cs = grid.cell_size
        for m, ant in enumerate(array.positions):
            ix = min(grid.nx - 1, max(0, int(ant.x / cs)))
            iy = min(grid.ny - 1, max(0, int(ant.y / cs)))
            if b_hat is not None and b_hat[m]:
                img[iy, ix] = RENDER_ANTENNA_LOS
            else:
                img[iy, ix] = RENDER_ANTENNA_NLOS
    return img
