"""Maximum number of tiles a segment of given length can visit, and the
infimum length needed to visit a given number of tiles.

``funt`` / ``max_tiles`` solve the direct problem on an arbitrary
rectangular grid, ``min_length`` the inverse one. The ``*_unit_square``
variants and the integer sequences ``funti`` / ``funli`` specialise to
``a = b = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .grid_core import (
    DomainError,
    GridSpec,
    PairIJ,
    Point,
    Segment,
    check_pair_feasibility,
    exact_dims,
    exact_interior_hits,
    pair_length_bounds,
    sceil,
    sfloor,
    snap,
)

SQRT2 = math.sqrt(2.0)
GOLDEN = (math.sqrt(5.0) - 1) / 2


@dataclass(frozen=True)
class SolveResult:
    tiles: int
    pair: PairIJ
    witness: Segment


@dataclass(frozen=True)
class InverseResult:
    inf_length: float
    pair: PairIJ
    rounding_residual: float


def _require_length(length: float):
    if not (isinstance(length, (int, float)) and math.isfinite(length) and length > 0):
        raise DomainError(f"length must be a positive finite number, got {length!r}")


def _require_int(name: str, value, minimum: int):
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")


# ---------------------------------------------------------------------------
# optimal pairs


@lru_cache(maxsize=4096)
def optimal_pair(T: int, grid: GridSpec) -> PairIJ:
    """The pair on ``i + j - 1 = T`` closest to ``(2, 2)`` in the grid metric.

    Rounding ties pick the larger ``i``.
    """
    _require_int("T", T, 3)
    a2, b2 = grid.a**2, grid.b**2
    i = sfloor((T - 3) * b2 / (a2 + b2) + 2.5)
    return PairIJ(i, T + 1 - i)


class OptimalPairSet:
    """Lazily generated optimal pairs ``(i_T, j_T)`` for ``T = 3, 4, ...``."""

    def __init__(self, grid: GridSpec):
        self.grid = grid

    def __getitem__(self, T: int) -> PairIJ:
        return optimal_pair(T, self.grid)

    def __iter__(self) -> Iterator[PairIJ]:
        T = 3
        while True:
            yield optimal_pair(T, self.grid)
            T += 1

    def pairs(self, T_max: int) -> list[PairIJ]:
        return [optimal_pair(T, self.grid) for T in range(3, T_max + 1)]

    def upper_line(self, i: float) -> float:
        """All pairs lie strictly below this line ``j(i)``."""
        r = self.grid.a**2 / self.grid.b**2
        return i * r - 1.5 * r + 2.5

    def lower_line(self, i: float) -> float:
        """All pairs lie on or above this line ``j(i)``."""
        r = self.grid.a**2 / self.grid.b**2
        return i * r - 2.5 * r + 1.5

    def contains(self, pair: PairIJ) -> bool:
        T = pair.tiles
        return T >= 3 and optimal_pair(T, self.grid) == pair

    def squared_cost(self, pair: PairIJ) -> float:
        return (pair.i - 2) ** 2 * self.grid.a**2 + (pair.j - 2) ** 2 * self.grid.b**2


# ---------------------------------------------------------------------------
# direct problem


def _funt_pair_wide(length: float, a: float, b: float) -> PairIJ:
    # requires a >= b
    radicand = length * length / (a * a + b * b) - 0.25
    root = math.sqrt(radicand) if radicand > 0 else 0.0
    i = sceil(1.5 + b / a * root)
    rest = length * length - (i - 2) ** 2 * a * a
    # the exact values are at least 2; snapping must not pull tiny lengths below
    j = max(sceil(1.0 + math.sqrt(max(rest, 0.0)) / b), 2)
    return PairIJ(i, j)


def funt_pair(length: float, grid: GridSpec) -> PairIJ:
    """Bounding-rectangle dimensions that attain the maximum tile count."""
    _require_length(length)
    if grid.a >= grid.b:
        return _funt_pair_wide(length, grid.a, grid.b)
    return _funt_pair_wide(length, grid.b, grid.a).swapped()


def funt(length: float, grid: GridSpec = GridSpec()) -> int:
    """Maximum number of tiles visited by a segment of length ``length``."""
    return funt_pair(length, grid).tiles


def max_tiles(length: float, grid: GridSpec = GridSpec()) -> SolveResult:
    """Maximum tile count together with its pair and a verified witness segment."""
    pair = funt_pair(length, grid)
    witness = place_witness(pair, grid, length)
    return SolveResult(pair.tiles, pair, witness)


# ---------------------------------------------------------------------------
# inverse problem


def min_length(T: int, grid: GridSpec = GridSpec()) -> InverseResult:
    """Infimum length of segments visiting at least ``T`` tiles."""
    _require_int("T", T, 1)
    a2, b2 = grid.a**2, grid.b**2
    i_real = max((T - 3) * b2 / (a2 + b2), 0.0) + 2
    i = sfloor(i_real + 0.5)
    if T >= 3:
        j = T + 1 - i
    else:
        j = 2
    length = math.sqrt((i - 2) ** 2 * a2 + (j - 2) ** 2 * b2)
    return InverseResult(length, PairIJ(i, j), abs(i - i_real))


def funl(T: int, grid: GridSpec = GridSpec()) -> float:
    return min_length(T, grid).inf_length


def funl_via_residual(T: int, grid: GridSpec = GridSpec()) -> float:
    """Same value as :func:`funl` for ``T >= 3``, written as the squared distance
    to the diagonal plus the rounding penalty."""
    _require_int("T", T, 3)
    a2, b2 = grid.a**2, grid.b**2
    rho = min_length(T, grid).rounding_residual
    return math.sqrt((T - 3) ** 2 * a2 * b2 / (a2 + b2) + rho * rho * (a2 + b2))


def asymptotic_slope(grid: GridSpec) -> float:
    return math.sqrt(1 / grid.a**2 + 1 / grid.b**2)


# ---------------------------------------------------------------------------
# unit square grid

UNIT = GridSpec(1.0, 1.0)


def funt_unit_square(length: float) -> int:
    """``floor(sqrt(2*ceil(len^2) - 2)) + 3`` with integer arithmetic after the ceiling."""
    _require_length(length)
    c = max(sceil(length * length), 1)
    return math.isqrt(2 * c - 2) + 3


def max_tiles_unit_square(length: float) -> SolveResult:
    _require_length(length)
    i = max(sceil(length / SQRT2), 1) + 1
    rest = length * length - (i - 2) ** 2
    j = max(sceil(math.sqrt(max(rest, 0.0))), 1) + 1
    pair = PairIJ(i, j)
    return SolveResult(pair.tiles, pair, place_witness(pair, UNIT, length))


def min_length_unit_square(T: int) -> float:
    _require_int("T", T, 1)
    if T <= 2:
        return 0.0
    return math.sqrt(((T - 3) ** 2 + 1) // 2)


def min_length_unit_square_split(T: int) -> float:
    """Odd/even form of :func:`min_length_unit_square`."""
    _require_int("T", T, 1)
    if T <= 2:
        return 0.0
    if T % 2:
        return (T - 3) / SQRT2
    return math.hypot(T - 4, T - 2) / 2


def length_interval_for_tiles(T: int) -> tuple[float, float]:
    """Half-open interval ``(low, high]`` of lengths whose unit-square maximum is ``T``."""
    _require_int("T", T, 3)
    if T % 2:
        return (T - 3) / SQRT2, math.hypot(T - 3, T - 1) / 2
    return math.hypot(T - 4, T - 2) / 2, (T - 2) / SQRT2


# ---------------------------------------------------------------------------
# integer lengths on the unit square


def funti(n: int) -> int:
    """Maximum tiles for integer length ``n`` (OEIS A346232)."""
    _require_int("n", n, 1)
    return math.isqrt(2 * n * n - 2) + 3


def funli(T: int) -> int:
    """Minimum integer length visiting at least ``T`` tiles (OEIS A346693)."""
    _require_int("T", T, 1)
    if T <= 3:
        return 1
    # smallest L with 2 L^2 >= (T - 3)^2 + 2
    m = -(-((T - 3) ** 2 + 2) // 2)
    return math.isqrt(m - 1) + 1


def funti_sequence(count: int) -> list[int]:
    _require_int("count", count, 1)
    return [funti(n) for n in range(1, count + 1)]


def funli_sequence(count: int) -> list[int]:
    _require_int("count", count, 1)
    return [funli(T) for T in range(1, count + 1)]


# ---------------------------------------------------------------------------
# witness segments


def _angle_window(length: float, pair: PairIJ, grid: GridSpec) -> tuple[float, float]:
    # Directions phi in (0, pi/2) whose displacement length*(cos, sin) spans
    # strictly between (i-2, j-2) and (i, j) tile sizes.
    a, b = grid.a, grid.b
    i, j = pair.i, pair.j
    cos_hi = (i - 2) * a / length
    sin_lo = (j - 2) * b / length
    if cos_hi >= 1 or sin_lo >= 1:
        return 1.0, 0.0
    lo = max(math.acos(min(1.0, i * a / length)), math.asin(sin_lo))
    hi = min(math.acos(cos_hi), math.asin(min(1.0, j * b / length)))
    return lo, hi


def _candidate(length: float, pair: PairIJ, grid: GridSpec, phi: float, fx: float, fy: float):
    a, b = grid.a, grid.b
    dx, dy = length * math.cos(phi), length * math.sin(phi)
    # first endpoint in tile (-1, -1), second in tile (i-2, j-2); the inner
    # corner sits at the origin, where short segments are exactly representable
    x_lo, x_hi = max(-a, (pair.i - 2) * a - dx), min(0.0, (pair.i - 1) * a - dx)
    y_lo, y_hi = max(-b, (pair.j - 2) * b - dy), min(0.0, (pair.j - 1) * b - dy)
    x1 = x_lo + fx * (x_hi - x_lo)
    y1 = y_lo + fy * (y_hi - y_lo)
    return Segment(Point(x1, y1), Point(x1 + dx, y1 + dy))


# Offset directions: mostly along one axis, tilted so the endpoint leaves the
# grid line through the corner.
_AXES = ((1.0, 0.125), (0.125, 1.0))


def _corner_candidate(length: float, pair: PairIJ, grid: GridSpec, u1, u2, w: float):
    # Start just outside the inner corner of tile (-1, -1) at the origin, end
    # just outside the inner corner of tile (i-2, j-2); offsets run along
    # directions u1, u2 with weights w, 1 - w, scaled so the length is exact.
    a, b = grid.a, grid.b
    dx, dy = (pair.i - 2) * a, (pair.j - 2) * b
    lo = math.hypot(dx, dy)
    vx, vy = w * u1[0] + (1 - w) * u2[0], w * u1[1] + (1 - w) * u2[1]
    dv = dx * vx + dy * vy
    vv = vx * vx + vy * vy
    if lo == 0:
        c = length / math.sqrt(vv)
    else:
        slack = (length - lo) * (length + lo)
        c = slack / (dv + math.sqrt(dv * dv + vv * slack))
    x1, y1 = -c * w * u1[0], -c * w * u1[1]
    x2, y2 = dx + c * (1 - w) * u2[0], dy + c * (1 - w) * u2[1]
    return Segment(Point(x1, y1), Point(x2, y2))


def _corner_candidates(length: float, pair: PairIJ, grid: GridSpec):
    # Used when the length is barely above the pair's lower bound and the
    # admissible direction window is thinner than the snapping tolerance.
    ws = [_open_fraction(0.5 + k * GOLDEN) for k in range(48)]
    for w in ws:
        for u1 in _AXES:
            for u2 in _AXES:
                yield _corner_candidate(length, pair, grid, u1, u2, w)


def _is_valid_witness(seg: Segment, pair: PairIJ, grid: GridSpec) -> bool:
    # Judged exactly: near a breakpoint the segment may pass a grid point
    # closer than any fixed tolerance.
    return exact_dims(seg, grid)[0] == pair and not exact_interior_hits(seg, grid)


def place_witness(pair: PairIJ, grid: GridSpec, length: float, attempts: int = 64) -> Segment:
    """A segment of length ``length`` whose bounding rectangle is ``pair`` and
    which avoids interior grid points, so it visits ``i + j - 1`` tiles.

    The direction is taken from the middle of the admissible angle window
    and the first endpoint from an irrational fraction of its admissible
    range; on failure both are nudged by a doubling offset. Lengths barely
    above the pair's lower bound fall back to segments hugging the two inner
    corner grid points.
    """
    _require_length(length)
    if not check_pair_feasibility(length, pair, grid):
        raise DomainError(f"no segment of length {length!r} has bounding rectangle {pair}")
    upper = pair_length_bounds(pair, grid)[1]
    if length > upper * (1 + 1e-12):
        raise DomainError(f"length {length!r} exceeds the largest span {upper!r} of {pair}")

    lo, hi = _angle_window(length, pair, grid)
    for attempt in range(attempts if lo < hi else 0):
        delta = 0.0 if attempt == 0 else 1e-9 * 2.0 ** (attempt - 1)
        fphi = _open_fraction(0.5 + delta * GOLDEN)
        fx = _open_fraction(0.5 + delta)
        fy = _open_fraction(GOLDEN + delta * GOLDEN)
        seg = _candidate(length, pair, grid, lo + fphi * (hi - lo), fx, fy)
        if _is_valid_witness(seg, pair, grid):
            return seg
    for seg in _corner_candidates(length, pair, grid):
        if abs(seg.length - length) <= 1e-12 * length and _is_valid_witness(seg, pair, grid):
            return seg
    raise DomainError(f"could not place a witness for {pair} at length {length!r}")


def _open_fraction(x: float) -> float:
    f = x % 1.0
    return f if 0.0 < f < 1.0 else 0.5
