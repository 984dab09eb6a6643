"""Monte Carlo estimators for the random-segment closed forms, and a
brute-force pair search for the maximum tile count.

Each chunk of samples draws from its own Philox stream keyed by
``(seed, chunk_index)``; chunk summaries hold exact integer moments and are
merged in index order, so results do not depend on how chunks are executed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .deterministic import funt
from .grid_core import (
    SNAP_RTOL,
    DomainError,
    GridSpec,
    PairIJ,
    Point,
    Segment,
    count_visited_tiles,
    discrete_bounding_rect,
    passes_through_interior_grid_point,
)

BATCH = 1 << 18
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class SamplerConfig:
    grid: GridSpec
    length: float
    samples: int
    seed: int = 0
    chunks: int = 1
    debug: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.length) and self.length > 0):
            raise DomainError(f"length must be positive, got {self.length!r}")
        if self.samples < 1:
            raise DomainError(f"samples must be >= 1, got {self.samples!r}")
        if self.chunks < 1:
            raise DomainError(f"chunks must be >= 1, got {self.chunks!r}")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")

    def chunk_sizes(self) -> list[int]:
        base, extra = divmod(self.samples, self.chunks)
        return [base + (c < extra) for c in range(self.chunks)]


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    n: int
    ci95: tuple[float, float]

    def within(self, reference: float, sigmas: float = 4.0) -> bool:
        """Whether ``reference`` lies within ``sigmas`` standard errors.

        A sample with no spread has a zero standard error; it is then taken
        as consistent with references within ``sigmas**2 / n``, which for an
        indicator with no hits is the usual zero-count bound.
        """
        if self.std_error == 0:
            return abs(self.mean - reference) <= sigmas * sigmas / self.n
        return abs(self.mean - reference) <= sigmas * self.std_error


@dataclass
class Moments:
    """Exact running sums of an integer-valued sample."""

    n: int = 0
    s: int = 0
    ss: int = 0

    @classmethod
    def of(cls, values: np.ndarray) -> Moments:
        v = values.astype(np.int64)
        return cls(int(v.size), int(v.sum()), int((v * v).sum()))

    def merge(self, other: Moments) -> Moments:
        return Moments(self.n + other.n, self.s + other.s, self.ss + other.ss)

    def estimate(self) -> Estimate:
        if self.n == 0:
            raise DomainError("no samples")
        mean = Fraction(self.s, self.n)
        if self.n > 1:
            var = Fraction(self.n * self.ss - self.s * self.s, self.n * (self.n - 1))
        else:
            var = Fraction(0)
        se = math.sqrt(var / self.n)
        m = float(mean)
        return Estimate(m, se, self.n, (m - 1.96 * se, m + 1.96 * se))


@dataclass
class ChunkSummary:
    tiles: Moments = field(default_factory=Moments)
    at_max: Moments = field(default_factory=Moments)
    tail_i: dict[int, Moments] = field(default_factory=dict)
    tail_j: dict[int, Moments] = field(default_factory=dict)

    def merge(self, other: ChunkSummary) -> ChunkSummary:
        return ChunkSummary(
            self.tiles.merge(other.tiles),
            self.at_max.merge(other.at_max),
            {n: m.merge(other.tail_i[n]) for n, m in self.tail_i.items()},
            {n: m.merge(other.tail_j[n]) for n, m in self.tail_j.items()},
        )


def make_stream(cfg: SamplerConfig, chunk: int) -> np.random.Generator:
    """Independent generator for one chunk, derived from ``(seed, chunk)``."""
    ss = np.random.SeedSequence(cfg.seed, spawn_key=(chunk,))
    return np.random.Generator(np.random.Philox(ss))


def _draw(rng: np.random.Generator, cfg: SamplerConfig, n: int):
    a, b = cfg.grid.a, cfg.grid.b
    x1 = rng.random(n) * a
    y1 = rng.random(n) * b
    # orientation counterclockwise from the +x axis
    theta = rng.random(n) * TWO_PI
    x2 = x1 + cfg.length * np.cos(theta)
    y2 = y1 + cfg.length * np.sin(theta)
    return x1, y1, x2, y2


def _snap(v: np.ndarray) -> np.ndarray:
    r = np.round(v)
    return np.where(np.abs(v - r) <= SNAP_RTOL * np.maximum(1.0, np.abs(v)), r, v)


def _dims(lo: np.ndarray, hi: np.ndarray, spacing: float):
    first = np.floor(_snap(lo / spacing)).astype(np.int64)
    last = np.ceil(_snap(hi / spacing)).astype(np.int64)
    return first, last - first


def _grid_point_hits(x1, y1, x2, y2, grid: GridSpec, length: float) -> np.ndarray:
    """Vectorised form of :func:`passes_through_interior_grid_point`."""
    a, b = grid.a, grid.b
    col, i = _dims(np.minimum(x1, x2), np.maximum(x1, x2), a)
    row, j = _dims(np.minimum(y1, y2), np.maximum(y1, y2), b)
    hit = np.zeros(x1.shape, dtype=bool)
    active = (i >= 2) & (j >= 2)
    if not active.any():
        return hit
    dx, dy = x2 - x1, y2 - y1
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = dy / dx
    for m in range(1, int(i[active].max())):
        sel = active & (m < i)
        k = col + m
        px = k * a
        y = y1 + (px - x1) * slope
        mm = np.round(y / b)
        py = mm * b
        dist = np.abs(dx * (py - y1) - dy * (px - x1)) / length
        inside = (mm > row) & (mm < row + j)
        hit |= sel & inside & (dist <= SNAP_RTOL * length)
    return hit


def _sample_batch(rng: np.random.Generator, cfg: SamplerConfig, n: int):
    x1, y1, x2, y2 = _draw(rng, cfg, n)
    bad = _grid_point_hits(x1, y1, x2, y2, cfg.grid, cfg.length)
    while bad.any():
        idx = np.flatnonzero(bad)
        nx1, ny1, nx2, ny2 = _draw(rng, cfg, idx.size)
        x1[idx], y1[idx], x2[idx], y2[idx] = nx1, ny1, nx2, ny2
        bad = np.zeros(n, dtype=bool)
        bad[idx] = _grid_point_hits(nx1, ny1, nx2, ny2, cfg.grid, cfg.length)
    return x1, y1, x2, y2


def sample_dims(cfg: SamplerConfig, x1, y1, x2, y2):
    """Bounding-rectangle dims ``(i, j)`` and visited tiles for sampled segments
    that avoid interior grid points."""
    _, i = _dims(np.minimum(x1, x2), np.maximum(x1, x2), cfg.grid.a)
    _, j = _dims(np.minimum(y1, y2), np.maximum(y1, y2), cfg.grid.b)
    tiles = np.where((i >= 1) & (j >= 1), i + j - 1, 0)
    return i, j, tiles


def _debug_check(cfg: SamplerConfig, x1, y1, x2, y2, i, j, tiles):
    a, b, length = cfg.grid.a, cfg.grid.b, cfg.length
    for k in range(x1.size):
        seg = Segment(Point(x1[k], y1[k]), Point(x2[k], y2[k]))
        assert count_visited_tiles(seg, cfg.grid) == tiles[k]
        dims = discrete_bounding_rect(seg, cfg.grid).dims
        assert (dims.i, dims.j) == (i[k], j[k])
        if i[k] >= 1 and j[k] >= 1:
            assert tiles[k] <= i[k] + j[k] - 1
        if i[k] >= 2 and j[k] >= 2:
            lo = math.hypot((i[k] - 2) * a, (j[k] - 2) * b)
            hi = math.hypot(i[k] * a, j[k] * b)
            assert lo < length * (1 + 1e-12) and length <= hi * (1 + 1e-12)


def sample_segment(cfg: SamplerConfig, rng: np.random.Generator) -> Segment:
    """One random segment; resampled if it passes through an interior grid point."""
    while True:
        x1, y1, x2, y2 = (float(c[0]) for c in _draw(rng, cfg, 1))
        seg = Segment(Point(x1, y1), Point(x2, y2))
        if not passes_through_interior_grid_point(seg, cfg.grid):
            return seg


def run_chunk(cfg: SamplerConfig, chunk: int, size: int, tail_ns=(), target: int | None = None):
    rng = make_stream(cfg, chunk)
    out = ChunkSummary(
        tail_i={n: Moments() for n in tail_ns},
        tail_j={n: Moments() for n in tail_ns},
    )
    done = 0
    while done < size:
        n = min(BATCH, size - done)
        x1, y1, x2, y2 = _sample_batch(rng, cfg, n)
        i, j, tiles = sample_dims(cfg, x1, y1, x2, y2)
        if cfg.debug:
            _debug_check(cfg, x1, y1, x2, y2, i, j, tiles)
        part = ChunkSummary(
            Moments.of(tiles),
            Moments.of(tiles == target) if target is not None else Moments(),
            {n_: Moments.of(i >= n_) for n_ in tail_ns},
            {n_: Moments.of(j >= n_) for n_ in tail_ns},
        )
        out = out.merge(part)
        done += n
    return out


def simulate(cfg: SamplerConfig, tail_ns=(), workers: int = 1) -> ChunkSummary:
    """Run every chunk and merge their summaries in chunk order."""
    tail_ns = tuple(tail_ns)
    target = funt(cfg.length, cfg.grid)
    sizes = cfg.chunk_sizes()

    def job(c):
        return run_chunk(cfg, c, sizes[c], tail_ns, target)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(job, range(cfg.chunks)))
    else:
        parts = [job(c) for c in range(cfg.chunks)]
    total = parts[0]
    for p in parts[1:]:
        total = total.merge(p)
    return total


def estimate_avg_tiles(cfg: SamplerConfig, workers: int = 1) -> Estimate:
    return simulate(cfg, workers=workers).tiles.estimate()


def estimate_tail_prob_i(cfg: SamplerConfig, n_values, workers: int = 1) -> dict[int, Estimate]:
    summary = simulate(cfg, n_values, workers=workers)
    return {n: m.estimate() for n, m in summary.tail_i.items()}


def estimate_tail_prob_j(cfg: SamplerConfig, n_values, workers: int = 1) -> dict[int, Estimate]:
    summary = simulate(cfg, n_values, workers=workers)
    return {n: m.estimate() for n, m in summary.tail_j.items()}


def estimate_prob_max(cfg: SamplerConfig, workers: int = 1) -> Estimate:
    """Frequency of segments visiting the maximum tile count; unit square grid only."""
    if cfg.grid != GridSpec(1.0, 1.0):
        raise DomainError("maximal-coverage probability is only available on the unit square grid")
    return simulate(cfg, workers=workers).at_max.estimate()


def brute_force_max_tiles(length: float, grid: GridSpec, bound: int | None = None):
    """Largest ``i + j - 1`` over ``2 <= i, j <= bound`` meeting the strict
    length inequality, by exhaustive enumeration."""
    if not (math.isfinite(length) and length > 0):
        raise DomainError(f"length must be positive, got {length!r}")
    need = math.ceil(length / min(grid.a, grid.b)) + 3
    if bound is None:
        bound = need
    if bound < need:
        raise DomainError(f"bound {bound} too small, need at least {need}")
    ks = np.arange(2, bound + 1)
    ii, jj = np.meshgrid(ks, ks, indexing="ij")
    sq = ((ii - 2) * grid.a) ** 2 + ((jj - 2) * grid.b) ** 2
    l2 = length * length
    feasible = l2 - sq > SNAP_RTOL * np.maximum(l2, sq)
    tiles = np.where(feasible, ii + jj - 1, 0)
    flat = int(np.argmax(tiles))
    return int(tiles.flat[flat]), PairIJ(int(ii.flat[flat]), int(jj.flat[flat]))
