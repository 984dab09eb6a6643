"""Closed forms for a uniformly random segment of fixed length.

The first endpoint is uniform on the reference tile ``[0, a) x [0, b)`` and
the orientation uniform on ``[0, 2*pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .deterministic import funt_unit_square
from .grid_core import DomainError, GridSpec

# arguments of acos/asin beyond [-1, 1] by at most this much are clamped
CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class TailDistribution:
    """``Pr[dim >= n]`` for ``n = 1, 2, ...`` until it reaches 0."""

    values: dict[int, float]

    def __getitem__(self, n: int) -> float:
        return self.values.get(n, 0.0)

    def mean(self) -> float:
        return math.fsum(self.values.values())


@dataclass(frozen=True)
class ProbMaxCase:
    T: int
    parity: str  # "odd" | "even"
    sub_case: str  # "single-pair" | "two-pairs"
    interval: tuple[float, float]


@dataclass(frozen=True)
class Breakpoint:
    T: int
    len_T: float


def _clamp_unit(x: float) -> float:
    if x > 1.0:
        if x - 1.0 > CLAMP_TOL:
            raise DomainError(f"argument {x!r} outside [-1, 1]")
        return 1.0
    if x < -1.0:
        if -1.0 - x > CLAMP_TOL:
            raise DomainError(f"argument {x!r} outside [-1, 1]")
        return -1.0
    return x


def _require_length(length: float):
    if not (math.isfinite(length) and length > 0):
        raise DomainError(f"length must be a positive finite number, got {length!r}")


# ---------------------------------------------------------------------------
# average number of visited tiles


def avg_tiles(length: float, grid: GridSpec = GridSpec()) -> float:
    _require_length(length)
    return 2 * length / math.pi * (1 / grid.a + 1 / grid.b) + 1


def avg_tiles_inverse(T: float, grid: GridSpec = GridSpec()) -> float:
    """Length whose average visited-tile count is ``T``."""
    if not (math.isfinite(T) and T > 1):
        raise DomainError(f"average tile count must exceed 1, got {T!r}")
    return (T - 1) * math.pi / (2 * (1 / grid.a + 1 / grid.b))


def asymptotic_ratio(r: float) -> float:
    """Limit of average over maximum tile count for long segments, as a
    function of the aspect ratio ``r = a / b``."""
    if not (math.isfinite(r) and r > 0):
        raise DomainError(f"aspect ratio must be positive, got {r!r}")
    return 2 * (1 + r) / (math.pi * math.sqrt(1 + r * r))


# ---------------------------------------------------------------------------
# marginal tails of the bounding rectangle


def helper_f(z: float) -> float:
    """Integral of ``acos`` over ``[0, z]``."""
    if not (-CLAMP_TOL <= z <= 1 + CLAMP_TOL):
        raise DomainError(f"helper_f needs 0 <= z <= 1, got {z!r}")
    z = min(max(z, 0.0), 1.0)
    return z * math.acos(z) - math.sqrt(1 - z * z) + 1


def _tail(n: int, length: float, spacing: float) -> float:
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    _require_length(length)
    if n == 1:
        return 1.0
    scale = 2 * length / (math.pi * spacing)
    if spacing * (n - 1) < length:
        return scale * (helper_f(spacing * (n - 1) / length) - helper_f(spacing * (n - 2) / length))
    if spacing * (n - 2) < length:
        return scale * (1 - helper_f(spacing * (n - 2) / length))
    return 0.0


def tail_prob_i(n: int, length: float, grid: GridSpec = GridSpec()) -> float:
    """``Pr[i >= n]`` for the normalized bounding-rectangle width ``i``."""
    return _tail(n, length, grid.a)


def tail_prob_j(n: int, length: float, grid: GridSpec = GridSpec()) -> float:
    return _tail(n, length, grid.b)


def tail_distribution(length: float, spacing: float) -> TailDistribution:
    n_max = math.floor(length / spacing) + 2
    values = {n: _tail(n, length, spacing) for n in range(1, n_max + 1)}
    return TailDistribution({n: p for n, p in values.items() if p > 0 or n == 1})


# ---------------------------------------------------------------------------
# probability of visiting the maximum number of tiles (unit square grid)


def helper_g(x: float, u: int, v: int) -> float:
    """Closed form of ``(2/pi) * integral of (x sin t - u/2)(x cos t - v/2)``
    over ``t`` from ``asin(u / 2x)`` to ``acos(v / 2x)``."""
    if not (x > 0 and u >= 0 and v >= 0):
        raise DomainError(f"helper_g needs x > 0 and u, v >= 0, got ({x!r}, {u!r}, {v!r})")
    two_x = 2 * x
    su, sv = _clamp_unit(u / two_x), _clamp_unit(v / two_x)
    four_x2 = two_x * two_x
    ru = math.sqrt(max(four_x2 - u * u, 0.0))
    rv = math.sqrt(max(four_x2 - v * v, 0.0))
    angle = math.acos(sv) - math.asin(su)
    total = angle * u * v + 2 * x * x + (u * u + v * v) / 2 - u * rv - v * ru
    return total / (2 * math.pi)


def prob_max_case(length: float) -> ProbMaxCase:
    """Which branch of the maximal-coverage probability applies at ``length``."""
    _require_length(length)
    T = funt_unit_square(length)
    if T % 2:
        low, high = (T - 3) / math.sqrt(2), math.hypot(T - 3, T - 1) / 2
        threshold = math.hypot(T - 5, T - 1) / 2
    else:
        low, high = math.hypot(T - 4, T - 2) / 2, (T - 2) / math.sqrt(2)
        threshold = math.hypot(T - 6, T) / 2
    parity = "odd" if T % 2 else "even"
    if length <= threshold:
        return ProbMaxCase(T, parity, "single-pair", (low, min(threshold, high)))
    return ProbMaxCase(T, parity, "two-pairs", (threshold, high))


def prob_max(length: float) -> float:
    """Probability that a random segment on the unit square grid visits the
    maximum number of tiles possible for its length."""
    case = prob_max_case(length)
    T = case.T
    if case.parity == "odd":
        p = helper_g(length, T - 3, T - 3)
        if case.sub_case == "two-pairs":
            p += 2 * helper_g(length, T - 5, T - 1)
    else:
        p = 2 * helper_g(length, T - 4, T - 2)
        if case.sub_case == "two-pairs":
            p += 2 * helper_g(length, T - 6, T)
    return min(max(p, 0.0), 1.0)


def breakpoint_length(T: int) -> float:
    """Largest length whose unit-square maximum tile count is still ``T``."""
    if isinstance(T, bool) or not isinstance(T, int) or T < 3:
        raise DomainError(f"T must be an integer >= 3, got {T!r}")
    if T % 2:
        return math.hypot(T - 3, T - 1) / 2
    return (T - 2) / math.sqrt(2)


def breakpoints(T_max: int) -> list[Breakpoint]:
    if isinstance(T_max, bool) or not isinstance(T_max, int) or T_max < 3:
        raise DomainError(f"T_max must be an integer >= 3, got {T_max!r}")
    return [Breakpoint(T, breakpoint_length(T)) for T in range(3, T_max + 1)]


ODD_PEAK_LIMIT = 2 / math.pi
EVEN_PEAK_LIMIT = 8 / (3 * math.pi)
LIMSUP_SCALED = 4 * math.sqrt(2) / (3 * math.pi)


def prob_max_peak_limits() -> tuple[float, float, float]:
    """Limits of ``T * prob_max(len_T)`` along odd and even ``T``, and the
    limsup of ``len * prob_max(len)``."""
    return ODD_PEAK_LIMIT, EVEN_PEAK_LIMIT, LIMSUP_SCALED


def scaled_peak(T: int) -> float:
    """``T * prob_max(len_T)``, which tends to the constants above."""
    return T * prob_max(breakpoint_length(T))
