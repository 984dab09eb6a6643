"""Segments on a rectangular grid: bounding rectangles, grid-point incidence
and exact visited-tile counts.

Tiles are the open rectangles ``(k*a, (k+1)*a) x (m*b, (m+1)*b)``. A segment
visits a tile when it meets the tile's open interior, so a segment lying on a
grid line visits nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Relative tolerance used to snap near-integers before floor/ceil and for the
# grid-point incidence predicate.
SNAP_RTOL = 1e-12


class DomainError(ValueError):
    """Raised when an argument is outside the domain of an operation."""


def snap(x: float, rtol: float = SNAP_RTOL) -> float:
    """Return the nearest integer if ``x`` is within ``rtol`` of it, else ``x``."""
    r = round(x)
    if abs(x - r) <= rtol * max(1.0, abs(x)):
        return float(r)
    return x


def sfloor(x: float) -> int:
    return math.floor(snap(x))


def sceil(x: float) -> int:
    return math.ceil(snap(x))


@dataclass(frozen=True)
class GridSpec:
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        for name in ("a", "b"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"tile {name} must be a positive finite number, got {v!r}")

    def swapped(self) -> GridSpec:
        return GridSpec(self.b, self.a)


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f"point coordinates must be finite, got ({self.x!r}, {self.y!r})")


@dataclass(frozen=True)
class Segment:
    p1: Point
    p2: Point

    @classmethod
    def from_coords(cls, x1, y1, x2, y2) -> Segment:
        return cls(Point(float(x1), float(y1)), Point(float(x2), float(y2)))

    @property
    def length(self) -> float:
        return math.hypot(self.p2.x - self.p1.x, self.p2.y - self.p1.y)

    @property
    def orientation(self) -> float:
        """Angle of ``p2 - p1`` counterclockwise from the +x axis, in [0, 2*pi)."""
        if self.length == 0:
            raise DomainError("orientation is undefined for a zero-length segment")
        return math.atan2(self.p2.y - self.p1.y, self.p2.x - self.p1.x) % (2 * math.pi)

    def swapped(self) -> Segment:
        """Mirror about the line y = x."""
        return Segment(Point(self.p1.y, self.p1.x), Point(self.p2.y, self.p2.x))

    def translated(self, dx: float, dy: float) -> Segment:
        return Segment(Point(self.p1.x + dx, self.p1.y + dy), Point(self.p2.x + dx, self.p2.y + dy))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p1.x, self.p1.y, self.p2.x, self.p2.y)


@dataclass(frozen=True, order=True)
class PairIJ:
    i: int
    j: int

    def __post_init__(self):
        if self.i < 0 or self.j < 0:
            raise DomainError(f"pair components must be nonnegative, got ({self.i}, {self.j})")

    @property
    def tiles(self) -> int:
        return self.i + self.j - 1

    def swapped(self) -> PairIJ:
        return PairIJ(self.j, self.i)


@dataclass(frozen=True)
class BoundingRect:
    lower_left: Point
    dims: PairIJ
    # Column and row index of the lower-left corner, i.e. lower_left / (a, b).
    col: int = 0
    row: int = 0


def discrete_bounding_rect(seg: Segment, grid: GridSpec) -> BoundingRect:
    """Smallest rectangle formed by grid lines that contains ``seg``."""
    a, b = grid.a, grid.b
    x_lo, x_hi = sorted((seg.p1.x, seg.p2.x))
    y_lo, y_hi = sorted((seg.p1.y, seg.p2.y))
    left, right = sfloor(x_lo / a), sceil(x_hi / a)
    bottom, top = sfloor(y_lo / b), sceil(y_hi / b)
    return BoundingRect(
        lower_left=Point(left * a, bottom * b),
        dims=PairIJ(right - left, top - bottom),
        col=left,
        row=bottom,
    )


def _hits_point(seg: Segment, px: float, py: float) -> bool:
    x1, y1, x2, y2 = seg.as_tuple()
    dx, dy = x2 - x1, y2 - y1
    length = math.hypot(dx, dy)
    if length == 0:
        return x1 == px and y1 == py
    # distance from (px, py) to the supporting line, and projection parameter
    dist = abs(dx * (py - y1) - dy * (px - x1)) / length
    t = (dx * (px - x1) + dy * (py - y1)) / (length * length)
    return dist <= SNAP_RTOL * length and -SNAP_RTOL <= t <= 1 + SNAP_RTOL


def interior_grid_points_hit(seg: Segment, grid: GridSpec) -> list[tuple[int, int]]:
    """Grid points ``(k, m)`` strictly inside the bounding rectangle that lie on ``seg``."""
    rect = discrete_bounding_rect(seg, grid)
    i, j = rect.dims.i, rect.dims.j
    if i < 2 or j < 2:
        return []
    a, b = grid.a, grid.b
    x1, y1, x2, y2 = seg.as_tuple()
    hits = []
    # A line that is not vertical meets each interior vertical grid line once;
    # the only candidate on that line is the nearest grid point.
    for k in range(rect.col + 1, rect.col + i):
        y = y1 + (k * a - x1) * (y2 - y1) / (x2 - x1)
        m = round(y / b)
        if rect.row < m < rect.row + j and _hits_point(seg, k * a, m * b):
            hits.append((k, m))
    return hits


def passes_through_interior_grid_point(seg: Segment, grid: GridSpec, exact: bool = False) -> bool:
    if exact:
        return bool(exact_interior_hits(seg, grid))
    return bool(interior_grid_points_hit(seg, grid))


def _integerize(*vals: float) -> list[int]:
    # Floats are dyadic rationals; scale all to integers over one power of two.
    ratios = [float(v).as_integer_ratio() for v in vals]
    den = max(d for _, d in ratios)
    return [n * (den // d) for n, d in ratios]


def exact_dims(seg: Segment, grid: GridSpec) -> tuple[PairIJ, int, int]:
    """Bounding-rectangle dims and lower-left (column, row), without rounding tolerance."""
    x1, y1, x2, y2, a, b = _integerize(*seg.as_tuple(), grid.a, grid.b)
    x_lo, x_hi = sorted((x1, x2))
    y_lo, y_hi = sorted((y1, y2))
    col, row = x_lo // a, y_lo // b
    return PairIJ(-(-x_hi // a) - col, -(-y_hi // b) - row), col, row


def exact_interior_hits(seg: Segment, grid: GridSpec) -> list[tuple[int, int]]:
    """Interior grid points lying exactly on ``seg``, in exact rational arithmetic."""
    dims, col, row = exact_dims(seg, grid)
    if dims.i < 2 or dims.j < 2:
        return []
    x1, y1, x2, y2, a, b = _integerize(*seg.as_tuple(), grid.a, grid.b)
    if x2 < x1:
        x1, y1, x2, y2 = x2, y2, x1, y1
    dx, dy = x2 - x1, y2 - y1
    hits = []
    for k in range(col + 1, col + dims.i):
        # y * dx at x = k * a
        num = y1 * dx + (k * a - x1) * dy
        m, rem = divmod(num, b * dx)
        if rem == 0 and row < m < row + dims.j:
            hits.append((k, m))
    return hits


def _line_params(c1: float, c2: float, spacing: float) -> list[float]:
    """Parameters t in (0, 1) where the coordinate moving from c1 to c2 crosses a grid line."""
    if c1 == c2:
        return []
    lo, hi = sorted((c1 / spacing, c2 / spacing))
    lo, hi = snap(lo), snap(hi)
    ks = range(math.floor(lo) + 1, math.ceil(hi))
    return [(k * spacing - c1) / (c2 - c1) for k in ks]


def visited_tiles(seg: Segment, grid: GridSpec) -> set[tuple[int, int]]:
    """Set of ``(column, row)`` indices of tiles whose interior meets ``seg``.

    The segment is split at every grid-line crossing; each open piece lies in
    a single tile or on a grid line, which its midpoint decides.
    """
    a, b = grid.a, grid.b
    x1, y1, x2, y2 = seg.as_tuple()
    ts = [0.0, 1.0]
    ts += _line_params(x1, x2, a)
    ts += _line_params(y1, y2, b)
    ts.sort()

    tiles = set()
    pieces = list(zip(ts[:-1], ts[1:]))
    if seg.length == 0:
        pieces = [(0.0, 0.0)]
    for t0, t1 in pieces:
        if t1 < t0:
            continue
        tm = 0.5 * (t0 + t1)
        u = (x1 + tm * (x2 - x1)) / a
        v = (y1 + tm * (y2 - y1)) / b
        su, sv = snap(u), snap(v)
        if su == round(su) or sv == round(sv):
            # on a grid line; only tile interiors count
            continue
        tiles.add((math.floor(u), math.floor(v)))
    return tiles


def count_visited_tiles(seg: Segment, grid: GridSpec, exact: bool = False) -> int:
    """Number of tiles whose interior meets ``seg``.

    With ``exact`` the count is ``i + j - 1`` minus the interior grid points
    hit, all decided in exact arithmetic on the float inputs. This resolves
    segments passing closer to a grid point than the snapping tolerance.
    """
    if exact:
        dims = exact_dims(seg, grid)[0]
        if dims.i < 1 or dims.j < 1:
            return 0
        return dims.i + dims.j - 1 - len(exact_interior_hits(seg, grid))
    return len(visited_tiles(seg, grid))


def crossing_count(seg: Segment, grid: GridSpec) -> tuple[int, int]:
    """Transversal crossings ``(h, v)`` of horizontal and vertical grid lines.

    Endpoints lying on a line and segments collinear with a line contribute no
    crossing.
    """
    x1, y1, x2, y2 = seg.as_tuple()
    h = len(_line_params(y1, y2, grid.b))
    v = len(_line_params(x1, x2, grid.a))
    return h, v


def pair_length_bounds(pair: PairIJ, grid: GridSpec) -> tuple[float, float]:
    """Open lower and closed upper bound on the length of a segment whose
    bounding rectangle has dimensions ``pair`` (both ``i, j >= 2``)."""
    _require_pair_domain(pair)
    a, b = grid.a, grid.b
    lo = math.sqrt((pair.i - 2) ** 2 * a * a + (pair.j - 2) ** 2 * b * b)
    hi = math.sqrt(pair.i**2 * a * a + pair.j**2 * b * b)
    return lo, hi


def _require_pair_domain(pair: PairIJ):
    if pair.i < 2 or pair.j < 2:
        raise DomainError(f"pair must have i, j >= 2, got ({pair.i}, {pair.j})")


def exceeds_squared(length: float, sq: float) -> bool:
    """Strict ``length**2 > sq`` with boundary values snapped to equality."""
    if sq == 0:
        # length * length may underflow
        return length > 0
    l2 = length * length
    return l2 - sq > SNAP_RTOL * max(l2, sq)


def check_pair_feasibility(length: float, pair: PairIJ, grid: GridSpec) -> bool:
    """Whether some segment of length at most ``length`` has bounding
    rectangle dimensions ``pair``."""
    _require_pair_domain(pair)
    if not length > 0:
        raise DomainError(f"length must be positive, got {length!r}")
    a, b = grid.a, grid.b
    return exceeds_squared(length, (pair.i - 2) ** 2 * a * a + (pair.j - 2) ** 2 * b * b)
