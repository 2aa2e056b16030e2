"""
Bond percolation on the (m+1) x m rectangle.

Vertices form ``m`` rows and ``m + 1`` columns (vertex ``r * (m + 1) + c``).
Edges are enumerated horizontal first, row-major, then vertical, column
within row, which gives ``m**2 + (m + 1)(m - 1) = 2 m**2 - 1`` edges.  A
crossing is an open path from column 0 to column ``m``.

Crossing detection is union-find with path compression, compiled with numba
and run over batches of configurations.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numba
import numpy as np

from .errors import ContractError
from .montecarlo import Estimate, sample_chunks, stream

HORIZONTAL, VERTICAL = 0, 1


@dataclass(frozen=True)
class GridRectangle:
    m: int
    u: np.ndarray
    v: np.ndarray
    orientation: np.ndarray
    incident: np.ndarray  # (vertices, 4) edge ids, -1 padded

    @property
    def edge_count(self) -> int:
        return int(self.u.size)

    @property
    def vertex_count(self) -> int:
        return self.m * (self.m + 1)

    @property
    def left_boundary(self) -> np.ndarray:
        return np.arange(self.m) * (self.m + 1)

    @property
    def right_boundary(self) -> np.ndarray:
        return np.arange(self.m) * (self.m + 1) + self.m

    def column(self, vertex) -> np.ndarray:
        return np.asarray(vertex) % (self.m + 1)

    def midpoint_x(self) -> np.ndarray:
        """Horizontal coordinate of each edge's midpoint."""
        return (self.column(self.u) + self.column(self.v)) / 2.0

    def right_half(self) -> np.ndarray:
        """Edges whose midpoint is at or right of the centre line ``x = m/2``."""
        return np.flatnonzero(self.midpoint_x() >= self.m / 2.0)


def build_grid(m: int) -> GridRectangle:
    if m < 1:
        raise ContractError(f"m must be >= 1, got {m}")
    w = m + 1
    rows, cols = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    hu = (rows * w + cols).ravel()
    hv = hu + 1
    rows, cols = np.meshgrid(np.arange(m - 1), np.arange(w), indexing="ij")
    vu = (rows * w + cols).ravel()
    vv = vu + w
    u = np.concatenate([hu, vu]).astype(np.int64)
    v = np.concatenate([hv, vv]).astype(np.int64)
    orient = np.concatenate([np.full(hu.size, HORIZONTAL), np.full(vu.size, VERTICAL)]).astype(np.int8)
    assert u.size == 2 * m * m - 1
    incident = np.full((m * w, 4), -1, dtype=np.int64)
    fill = np.zeros(m * w, dtype=np.int64)
    for e in range(u.size):
        for x in (u[e], v[e]):
            incident[x, fill[x]] = e
            fill[x] += 1
    return GridRectangle(m, u, v, orient, incident)


def _as_batch(grid: GridRectangle, cfg) -> np.ndarray:
    a = np.asarray(cfg, dtype=np.bool_)
    if a.ndim == 1:
        a = a[None, :]
    if a.shape[-1] != grid.edge_count:
        raise ContractError(f"configuration has {a.shape[-1]} edges, grid has {grid.edge_count}")
    return np.ascontiguousarray(a)


# -- compiled kernels --------------------------------------------------------

@numba.njit(cache=True, nogil=True)
def _find(parent, a):
    root = a
    while parent[root] != root:
        root = parent[root]
    while parent[a] != root:
        nxt = parent[a]
        parent[a] = root
        a = nxt
    return root


@numba.njit(cache=True, nogil=True)
def _crosses(cfg, u, v, m, parent):
    w = m + 1
    nv = m * w
    src, snk = nv, nv + 1
    for i in range(nv + 2):
        parent[i] = i
    for r in range(m):
        parent[r * w] = src
        parent[r * w + m] = snk
    for e in range(u.size):
        if cfg[e]:
            a = _find(parent, u[e])
            b = _find(parent, v[e])
            if a != b:
                parent[a] = b
    return _find(parent, src) == _find(parent, snk)


@numba.njit(cache=True, nogil=True)
def _crossing_batch(cfgs, u, v, m):
    out = np.empty(cfgs.shape[0], dtype=np.bool_)
    parent = np.empty(m * (m + 1) + 2, dtype=np.int64)
    for i in range(cfgs.shape[0]):
        out[i] = _crosses(cfgs[i], u, v, m, parent)
    return out


@numba.njit(cache=True, nogil=True)
def _explore(cfg, u, v, incident, m, visited):
    # FIFO exploration of the left cluster; edge states are read only when visited
    w = m + 1
    nv = m * w
    inside = np.zeros(nv, dtype=np.bool_)
    queue = np.empty(4 * nv + 4 * m, dtype=np.int64)
    head = 0
    tail = 0
    for r in range(m):
        inside[r * w] = True
    for r in range(m):
        for k in range(4):
            e = incident[r * w, k]
            if e >= 0 and not (inside[u[e]] and inside[v[e]]):
                queue[tail] = e
                tail += 1
    nvisit = 0
    while head < tail:
        e = queue[head]
        head += 1
        if visited[e] or (inside[u[e]] and inside[v[e]]):
            continue
        visited[e] = True
        nvisit += 1
        if cfg[e]:
            new = v[e] if inside[u[e]] else u[e]
            inside[new] = True
            for k in range(4):
                f = incident[new, k]
                if f >= 0 and not visited[f] and not (inside[u[f]] and inside[v[f]]):
                    queue[tail] = f
                    tail += 1
    crossed = False
    for r in range(m):
        if inside[r * w + m]:
            crossed = True
    return crossed, nvisit


@numba.njit(cache=True, nogil=True)
def _explore_batch(cfgs, u, v, incident, m, K_mask):
    n = cfgs.shape[0]
    crossed = np.empty(n, dtype=np.bool_)
    hits = np.empty(n, dtype=np.int64)
    visited = np.zeros(u.size, dtype=np.bool_)
    for i in range(n):
        visited[:] = False
        crossed[i], _ = _explore(cfgs[i], u, v, incident, m, visited)
        c = 0
        for e in range(u.size):
            if visited[e] and K_mask[e]:
                c += 1
        hits[i] = c
    return crossed, hits


@numba.njit(cache=True, nogil=True)
def _dynamical(cfg, times, edges, u, v, m, fast):
    parent = np.empty(m * (m + 1) + 2, dtype=np.int64)
    state = _crosses(cfg, u, v, m, parent)
    initial = state
    switches = np.empty(times.size, dtype=np.float64)
    k = 0
    for i in range(times.size):
        e = edges[i]
        cfg[e] = not cfg[e]
        # monotonicity: opening cannot destroy a crossing, closing cannot create one
        if fast and (cfg[e] == state):
            continue
        new = _crosses(cfg, u, v, m, parent)
        if new != state:
            switches[k] = times[i]
            k += 1
            state = new
    return initial, switches[:k]


# -- public operations -------------------------------------------------------

def crossing_batch(grid: GridRectangle, cfgs) -> np.ndarray:
    """Crossing indicator for each row of a (samples, edges) boolean array."""
    return _crossing_batch(_as_batch(grid, cfgs), grid.u, grid.v, grid.m)


def has_crossing(grid: GridRectangle, cfg) -> bool:
    a = np.asarray(cfg, dtype=np.bool_)
    if a.ndim != 1:
        raise ContractError("has_crossing takes a single configuration")
    return bool(crossing_batch(grid, a)[0])


def explore_crossing(grid: GridRectangle, edge_oracle: Callable[[int], bool]) -> tuple[bool, set]:
    """Grow the cluster of the left side, querying each frontier edge once (FIFO).

    Returns whether the cluster reaches the right side and the set of queried edges.
    """
    m, w = grid.m, grid.m + 1
    inside = np.zeros(grid.vertex_count, dtype=bool)
    inside[grid.left_boundary] = True
    u, v, inc = grid.u, grid.v, grid.incident
    visited: set = set()
    queue = deque(int(e) for x in grid.left_boundary for e in inc[x] if e >= 0 and not (inside[u[e]] and inside[v[e]]))
    while queue:
        e = queue.popleft()
        if e in visited or (inside[u[e]] and inside[v[e]]):
            continue
        visited.add(e)
        if edge_oracle(e):
            new = v[e] if inside[u[e]] else u[e]
            inside[new] = True
            queue.extend(int(f) for f in inc[new] if f >= 0 and f not in visited and not (inside[u[f]] and inside[v[f]]))
    return bool(inside[np.arange(m) * w + m].any()), visited


def explore_batch(grid: GridRectangle, cfgs, K: Optional[Sequence[int]] = None) -> tuple[np.ndarray, np.ndarray]:
    """Compiled exploration over configurations used as oracles.

    Returns the crossing flags and ``|K & VISITED|`` per configuration.
    """
    mask = np.zeros(grid.edge_count, dtype=np.bool_)
    if K is not None:
        mask[np.asarray(K, dtype=np.int64)] = True
    return _explore_batch(_as_batch(grid, cfgs), grid.u, grid.v, grid.incident, grid.m, mask)


def uniform_configs(grid: GridRectangle, rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.random((size, grid.edge_count)) < 0.5


def _chunk(grid: GridRectangle) -> int:
    return max(256, (1 << 22) // grid.edge_count)


def estimate_crossing(grid: GridRectangle, samples: int = 10_000, seed: int = 0, *,
                      exact: bool = False, workers: int = 1) -> Estimate:
    """Crossing probability; ``exact=True`` enumerates all configurations (edges <= 20)."""
    if exact:
        E = grid.edge_count
        if E > 20:
            raise ContractError(f"exact enumeration needs <= 20 edges, grid has {E}")
        idx = np.arange(1 << E)
        cfgs = ((idx[:, None] >> np.arange(E)) & 1).astype(np.bool_)
        return Estimate.exact(crossing_batch(grid, cfgs).mean(), seed)
    if samples < 1:
        raise ContractError("samples must be >= 1")

    def draw(rng, size):
        return crossing_batch(grid, uniform_configs(grid, rng, size)).astype(np.float64)

    hits = sample_chunks(draw, samples, seed, chunk=_chunk(grid), workers=workers)
    p = hits.mean()
    return Estimate(float(p), float(np.sqrt(p * (1 - p) / samples)), samples, seed)


@dataclass(frozen=True)
class SensitivityReport:
    m: int
    eps: float
    outer: int
    inner: int
    seed: int
    p_bar: float
    covariance: float
    covariance_stderr: float
    deltas: tuple
    gamma_hat: tuple
    inner_sigma: float
    inner_ok: tuple  # per delta: inner-sampling sigma <= delta / 3


def estimate_noise_sensitivity(grid: GridRectangle, eps: float, delta_grid: Sequence[float] = (),
                               outer: int = 10_000, inner: int = 1, seed: int = 0, *,
                               workers: int = 1) -> SensitivityReport:
    """Nested Monte Carlo over configurations ``x`` and ``inner`` noisy copies each.

    ``gamma_hat[i]`` is the fraction of ``x`` whose estimated conditional crossing
    probability differs from the overall mean by more than ``delta_grid[i]``; the
    inner sampling error inflates it.  ``covariance`` estimates
    ``E[chi(x) chi(N_eps x)] - p^2``, an unbiased proxy for ``VAR(C, eps)``.
    """
    if not 0.0 < eps < 1.0:
        raise ContractError(f"eps={eps} outside (0, 1)")
    if outer < 1 or inner < 1:
        raise ContractError("outer and inner must be >= 1")

    def draw(rng, size):
        x = uniform_configs(grid, rng, size)
        cx = crossing_batch(grid, x).astype(np.float64)
        cy = np.zeros(size)
        for _ in range(inner):
            y = x ^ (rng.random(x.shape) < eps)
            cy += crossing_batch(grid, y)
        return np.stack([cx, cy / inner], axis=1)

    rows = sample_chunks(draw, outer, seed, chunk=max(64, _chunk(grid) // (inner + 1)), workers=workers)
    cx, py = rows[:, 0], rows[:, 1]
    a = (cx + py) / 2.0
    p_bar = float(a.mean())
    z = cx * py
    cov = float(z.mean()) - p_bar**2
    psi = z - 2.0 * p_bar * a
    se = float(psi.std(ddof=1) / np.sqrt(outer)) if outer > 1 else float("nan")
    dev = np.abs(py - p_bar)
    deltas = tuple(float(d) for d in delta_grid)
    gam = tuple(float(np.mean(dev > d)) for d in deltas)
    sigma = float(np.sqrt(p_bar * (1 - p_bar) / inner))
    ok = tuple(sigma <= d / 3.0 for d in deltas)
    return SensitivityReport(grid.m, eps, outer, inner, seed, p_bar, cov, se, deltas, gam, sigma, ok)


def exactly_one_crossing(grid: GridRectangle, eps: float, samples: int, seed: int) -> Estimate:
    """``P[exactly one of x, N_eps(x) crosses]``."""

    def draw(rng, size):
        x = uniform_configs(grid, rng, size)
        y = x ^ (rng.random(x.shape) < eps)
        return (crossing_batch(grid, x) != crossing_batch(grid, y)).astype(np.float64)

    return Estimate.from_samples(sample_chunks(draw, samples, seed, chunk=_chunk(grid)), seed)


def resolve_subset(grid: GridRectangle, K) -> np.ndarray:
    """Edge ids for ``'right-half'`` or an explicit collection."""
    if isinstance(K, str):
        if K != "right-half":
            raise ContractError(f"unknown edge subset {K!r}")
        return grid.right_half()
    ids = np.unique(np.asarray(list(K), dtype=np.int64))
    if ids.size == 0:
        raise ContractError("edge subset is empty")
    if ids.min() < 0 or ids.max() >= grid.edge_count:
        raise ContractError("edge id out of range")
    return ids


def estimate_majority_correlation(grid: GridRectangle, K="right-half", samples: int = 10_000,
                                  seed: int = 0, *, workers: int = 1) -> Estimate:
    """``E[chi_C(x) M_K(x)]`` with ``M_K`` the majority sign of the edges in K (0 on ties)."""
    ids = resolve_subset(grid, K)

    def draw(rng, size):
        x = uniform_configs(grid, rng, size)
        s = 2 * x[:, ids].sum(axis=1) - ids.size
        return crossing_batch(grid, x) * np.sign(s).astype(np.float64)

    return Estimate.from_samples(sample_chunks(draw, samples, seed, chunk=_chunk(grid), workers=workers), seed)


def visited_fraction(grid: GridRectangle, K="right-half", samples: int = 10_000, seed: int = 0) -> Estimate:
    """Mean of ``|K & VISITED| / |K|`` under the exploration algorithm."""
    ids = resolve_subset(grid, K)

    def draw(rng, size):
        _, hits = explore_batch(grid, uniform_configs(grid, rng, size), ids)
        return hits / ids.size

    return Estimate.from_samples(sample_chunks(draw, samples, seed, chunk=_chunk(grid)), seed)


def one_arm(grid: GridRectangle, radii: Sequence[int], samples: int = 10_000, seed: int = 0) -> list[Estimate]:
    """Probability that the middle vertex of the left side connects to column ``r``."""
    start = (grid.m // 2) * (grid.m + 1)
    radii = [int(r) for r in radii]

    def draw(rng, size):
        x = uniform_configs(grid, rng, size)
        reach = np.empty(size)
        for i in range(size):
            reach[i] = _max_column(grid, x[i], start)
        return reach

    reach = sample_chunks(draw, samples, seed, chunk=_chunk(grid))
    return [Estimate.from_samples((reach >= r).astype(np.float64), seed) for r in radii]


def _max_column(grid: GridRectangle, cfg: np.ndarray, start: int) -> int:
    seen = {start}
    stack = [start]
    best = 0
    while stack:
        a = stack.pop()
        best = max(best, a % (grid.m + 1))
        for e in grid.incident[a]:
            if e < 0 or not cfg[e]:
                continue
            b = int(grid.v[e] if grid.u[e] == a else grid.u[e])
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return best


# -- dynamical percolation ---------------------------------------------------

@dataclass(frozen=True)
class SwitchingRecord:
    duration: float
    switch_times: np.ndarray
    initial_state: bool

    @property
    def count(self) -> int:
        return int(self.switch_times.size)


def poisson_events(edge_count: int, duration: float, rate: float, rng: np.random.Generator):
    """Superposed clock rings on ``[0, duration]``: sorted times and the edge hit at each."""
    total = edge_count * rate
    count = rng.poisson(total * duration)
    times = np.sort(rng.random(count) * duration)
    edges = rng.integers(0, edge_count, count)
    return times, edges


def run_dynamical(grid: GridRectangle, duration: float = 1.0, rate: float = 1.0, seed: int = 0, *,
                  fast: bool = False, replica: int = 0) -> SwitchingRecord:
    """Flip each edge at the points of its own rate-``rate`` Poisson process.

    ``fast=True`` skips the connectivity rebuild when monotonicity already rules
    out a change; results are identical to the full rebuild.
    """
    if duration <= 0 or rate <= 0:
        raise ContractError("duration and rate must be positive")
    rng = stream(seed, replica)
    cfg = uniform_configs(grid, rng, 1)[0].copy()
    times, edges = poisson_events(grid.edge_count, duration, rate, rng)
    initial, sw = _dynamical(cfg, times, edges.astype(np.int64), grid.u, grid.v, grid.m, fast)
    return SwitchingRecord(duration, sw, bool(initial))


def dynamical_counts(grid: GridRectangle, replicas: int, duration: float = 1.0, rate: float = 1.0,
                     seed: int = 0, *, fast: bool = True) -> np.ndarray:
    """Switch counts ``|S_m & [0, duration]|`` for independent replicas."""
    return np.array([run_dynamical(grid, duration, rate, seed, fast=fast, replica=i).count for i in range(replicas)])


# -- serialisation -----------------------------------------------------------

def config_to_hex(grid: GridRectangle, cfg) -> str:
    """``m=<int>`` header line plus the configuration as a hex integer (bit e = edge e)."""
    bits = np.asarray(cfg, dtype=bool)
    if bits.size != grid.edge_count:
        raise ContractError("configuration size does not match grid")
    value = int("".join("1" if b else "0" for b in bits[::-1]) or "0", 2)
    return f"m={grid.m}\n{value:x}\n"


def config_from_hex(text: str) -> tuple[GridRectangle, np.ndarray]:
    header, body = text.strip().split("\n", 1)
    key, _, val = header.partition("=")
    if key.strip() != "m":
        raise ContractError(f"bad configuration header {header!r}")
    grid = build_grid(int(val))
    value = int(body.strip(), 16)
    if value >> grid.edge_count:
        raise ContractError("hex value has more bits than the grid has edges")
    bits = np.array([(value >> e) & 1 for e in range(grid.edge_count)], dtype=bool)
    return grid, bits
