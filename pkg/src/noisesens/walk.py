"""
Lazy random walk on the hypercube started uniformly on an event.

The state is the density ``f_t = 2^n P_A^t`` relative to the uniform measure.
One step averages ``f`` with itself (weight 1/2) and its n neighbours (weight
1/(2n) each), so level-k Fourier coefficients shrink by
``1/2 + (n - 2k) / (2n) = (n - k) / n``.

Distances use the total mass of the signed difference, ``2^-n sum |f_t - 1|``,
which is twice the usual total-variation distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .spectral import BooleanFunction, Spectrum, check_size, flip_table, inverse_table, wht


@dataclass(frozen=True)
class WalkState:
    n: int
    density: np.ndarray
    t: int = 0

    def __post_init__(self):
        d = np.asarray(self.density, dtype=np.float64)
        if d.size != 1 << self.n:
            raise ContractError("density length does not match n")
        d.setflags(write=False)
        object.__setattr__(self, "density", d)


def _check_event(A: BooleanFunction) -> None:
    if A.kind != "indicator":
        raise ContractError("the walk starts from an event (indicator function)")
    if not A.table.any():
        raise ContractError("the starting event is empty")
    check_size(A.n, tables=2)


def walk_start(A: BooleanFunction) -> WalkState:
    _check_event(A)
    return WalkState(A.n, A.table / A.mean(), 0)


def level_factors(n: int, steps: int) -> np.ndarray:
    """``((n - k) / n)**steps`` for k = 0..n."""
    k = np.arange(n + 1)
    return ((n - k) / n) ** steps


def walk_evolve(state: WalkState, steps: int, method: str = "spectral") -> WalkState:
    """Advance ``steps`` steps, spectrally (default) or by repeated averaging."""
    if steps < 0:
        raise ContractError("steps must be >= 0")
    if steps == 0:
        return state
    n = state.n
    if method == "spectral":
        sp = Spectrum(n, wht(state.density, normalize=True)).scale_by_level(level_factors(n, steps))
        dens = inverse_table(sp)
    elif method == "direct":
        dens = np.array(state.density)
        for _ in range(steps):
            acc = 0.5 * dens
            for j in range(n):
                acc = acc + flip_table(dens, j) / (2.0 * n)
            dens = acc
    else:
        raise ContractError(f"unknown method {method!r}")
    return WalkState(n, dens, state.t + steps)


def tv_distance(state: WalkState) -> float:
    """``2^-n sum_x |f_t(x) - 1|``."""
    return float(np.abs(state.density - 1.0).mean())


class _Walker:
    """Caches the starting spectrum so each candidate t costs one inverse transform."""

    def __init__(self, A: BooleanFunction):
        _check_event(A)
        self.A = A
        self.p = A.mean()
        self.spectrum = Spectrum(A.n, wht(A.table / self.p, normalize=True))
        self.levels = self.spectrum.level_weights()

    def tv(self, t: int) -> float:
        dens = inverse_table(self.spectrum.scale_by_level(level_factors(self.A.n, t)))
        return float(np.abs(dens - 1.0).mean())

    def l2(self, t: int) -> float:
        """``||f_t - 1||_2``, an upper bound for the distance at step t."""
        return math.sqrt(float(np.dot(self.levels[1:], level_factors(self.A.n, 2 * t)[1:])))


def _first_below(value, eps: float) -> int:
    if value(0) < eps:
        return 0
    hi = 1
    while value(hi) >= eps:
        hi *= 2
        if hi > 1 << 40:
            raise ContractError("distance does not fall below eps")
    lo = hi // 2  # value(lo) >= eps
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if value(mid) < eps:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class MixingResult:
    t: int
    l2_bound_t: int


def mixing_time(A: BooleanFunction, eps: float) -> MixingResult:
    """Smallest t with distance strictly below eps, and the same for the L2 bound."""
    if eps <= 0:
        raise ContractError("eps must be positive")
    w = _Walker(A)
    return MixingResult(_first_below(w.tv, eps), _first_below(w.l2, eps))


def l2_chain(A: BooleanFunction, t: int) -> tuple[float, float]:
    """``(distance^2, ||f_t - 1||_2^2)``; the first never exceeds the second."""
    w = _Walker(A)
    return w.tv(t) ** 2, w.l2(t) ** 2


def tv_curve(A: BooleanFunction, ts) -> np.ndarray:
    w = _Walker(A)
    return np.array([w.tv(int(t)) for t in ts])


def truncated_bound(A: BooleanFunction, t: int, k: int) -> float:
    """``P[A]^-2 (sum_{|s| >= k} chi^(s)^2) exp(-t k / n) + sum_{0 < |s| < k} chi^(s)^2 / P[A]^2``.

    Bounds ``||f_t - 1||^2`` since ``((n - k) / n)^(2t) <= exp(-2 t k / n)``.
    """
    w = _Walker(A)
    n = A.n
    low = float(w.levels[1:k].sum()) if k > 1 else 0.0
    high = float(w.levels[k:].sum())
    return high * math.exp(-t * k / n) + low
