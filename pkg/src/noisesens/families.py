"""
Named Boolean function families: dictator, parity, majority, tribes,
recursive ternary majority, runs and weighted majority.

Every generator returns an indicator table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ContractError
from .majority import WeightedMajority, weighted_event
from .spectral import BooleanFunction, check_size, popcount

FAMILY_KINDS = ("dictator", "parity", "majority", "tribes", "recmaj3", "runs", "weighted")

RECMAJ_TABLE_MAX_DEPTH = 3


@dataclass(frozen=True)
class FamilySpec:
    """Parameters of one member of a family.

    ``n`` is required for dictator, parity, majority and runs; tribes derives it
    from ``t * s`` (or picks ``t, s`` from ``n`` via :func:`tribes_params`),
    recmaj3 from ``3 ** depth`` and weighted from ``len(weights)``.
    """

    kind: str
    n: Optional[int] = None
    t: Optional[int] = None
    s: Optional[int] = None
    depth: Optional[int] = None
    threshold: Optional[float] = None
    weights: Optional[tuple] = field(default=None)

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ContractError(f"unknown family {self.kind!r}; expected one of {FAMILY_KINDS}")
        n = self.n
        if self.kind == "tribes":
            if self.t is None or self.s is None:
                if n is None:
                    raise ContractError("tribes needs (t, s) or n")
                t, s = tribes_params(n)
                object.__setattr__(self, "t", t)
                object.__setattr__(self, "s", s)
            if self.t < 1 or self.s < 1:
                raise ContractError("tribes needs t >= 1 and s >= 1")
            if n is None:
                n = self.t * self.s
            if n < self.t * self.s:
                raise ContractError(f"n={n} smaller than t*s={self.t * self.s}")
        elif self.kind == "recmaj3":
            if self.depth is None or self.depth < 1:
                raise ContractError("recmaj3 needs depth >= 1")
            if n is not None and n != 3**self.depth:
                raise ContractError(f"recmaj3 of depth {self.depth} has n = {3**self.depth}, not {n}")
            n = 3**self.depth
        elif self.kind == "weighted":
            if not self.weights:
                raise ContractError("weighted family needs weights")
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
            if n is not None and n != len(self.weights):
                raise ContractError("n does not match the number of weights")
            n = len(self.weights)
        elif n is None or n < 1:
            raise ContractError(f"{self.kind} needs n >= 1")
        if self.kind == "runs" and n < 2:
            raise ContractError("runs needs n >= 2")
        object.__setattr__(self, "n", int(n))


def _bits(n: int) -> np.ndarray:
    check_size(n)
    return ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(np.int8)


def dictator(n: int, var: int = 1) -> BooleanFunction:
    """``{x : x_var = 1}``."""
    if not 1 <= var <= n:
        raise ContractError(f"variable {var} out of range 1..{n}")
    check_size(n)
    return BooleanFunction(n, (np.arange(1 << n) >> (var - 1)) & 1, "indicator")


def parity(n: int) -> BooleanFunction:
    check_size(n)
    return BooleanFunction(n, popcount(np.arange(1 << n)) & 1, "indicator")


def majority(n: int) -> BooleanFunction:
    """``{x : sum_j x_j > n/2}``; for even n ties are outside the event."""
    check_size(n)
    return BooleanFunction(n, 2 * popcount(np.arange(1 << n)) > n, "indicator")


def tribes(t: int, s: int, n: Optional[int] = None) -> BooleanFunction:
    """1 iff one of the consecutive blocks of ``s`` variables is all ones.

    Variables past ``t * s`` are dummies.
    """
    n = t * s if n is None else n
    check_size(n)
    idx = np.arange(1 << n)
    block = (1 << s) - 1
    out = np.zeros(1 << n, dtype=bool)
    for i in range(t):
        out |= (idx >> (i * s)) & block == block
    return BooleanFunction(n, out, "indicator")


def tribes_params(n: int) -> tuple[int, int]:
    """Tribe count and size closest to balanced for ``n`` variables.

    ``s`` is the floor or ceiling of ``log2 n - log2 log2 n`` (at least 1) whose
    ``1 - (1 - 2^-s)^(n/s)`` is nearest to 1/2; ``t = n // s``.
    """
    if n < 4:
        raise ContractError(f"tribes_params needs n >= 4, got {n}")
    sigma = math.log2(n) - math.log2(math.log2(n))
    cands = sorted({max(1, math.floor(sigma)), max(1, math.ceil(sigma))})
    s = min(cands, key=lambda s: (abs(tribes_balance(n, s) - 0.5), s))
    return n // s, s


def tribes_balance(n: int, s: int) -> float:
    """``1 - (1 - 2^-s)^(n/s)``, the nominal ``P[f = 1]``."""
    return 1.0 - (1.0 - 2.0**-s) ** (n / s)


def tribes_influence(t: int, s: int) -> float:
    """Influence of every non-dummy variable: ``2^-(s-1) (1 - 2^-s)^(t-1)``."""
    return 2.0 ** -(s - 1) * (1.0 - 2.0**-s) ** (t - 1)


def recursive_majority3(depth: int) -> BooleanFunction:
    """Majority of three at every node of a ternary tree with leaves in index order."""
    if not 1 <= depth <= RECMAJ_TABLE_MAX_DEPTH:
        raise ContractError(f"table depth must be in 1..{RECMAJ_TABLE_MAX_DEPTH}, got {depth}; "
                            "use recursive_majority3_influence beyond that")
    n = 3**depth
    check_size(n)
    out = np.empty(1 << n, dtype=bool)
    chunk = 1 << min(n, 20)
    for start in range(0, 1 << n, chunk):
        idx = np.arange(start, start + chunk, dtype=np.int64)
        vals = [(idx >> j) & 1 == 1 for j in range(n)]
        while len(vals) > 1:
            vals = [(a & b) | (a & c) | (b & c) for a, b, c in zip(vals[0::3], vals[1::3], vals[2::3])]
        out[start:start + chunk] = vals[0]
    return BooleanFunction(n, out, "indicator")


def recursive_majority3_influence(depth: int) -> float:
    """Each leaf is pivotal iff it is pivotal at every level, probability 1/2 per level."""
    return 0.5**depth


def runs_count(x_bits: np.ndarray) -> np.ndarray:
    """``R(x) = 1 + #{i : x_i != x_{i+1}}`` along the last axis."""
    x_bits = np.asarray(x_bits)
    return 1 + np.count_nonzero(x_bits[..., 1:] != x_bits[..., :-1], axis=-1)


def runs_median_threshold(n: int) -> int:
    """Threshold with ``P[R > thr] <= 1/2 < P[R >= thr]``.

    ``R - 1`` is Binomial(n - 1, 1/2) since the boundary bits are independent.
    """
    m = n - 1
    pmf = np.array([math.comb(m, k) for k in range(m + 1)], dtype=np.float64) / 2.0**m
    tail_ge = np.cumsum(pmf[::-1])[::-1]  # tail_ge[k] = P[R - 1 >= k]
    for thr in range(1, n + 1):
        gt = tail_ge[thr] if thr <= m else 0.0  # P[R > thr] = P[R - 1 >= thr]
        ge = tail_ge[thr - 1]
        if gt <= 0.5 < ge:
            return thr
    raise AssertionError("unreachable: the median always exists")


def runs(n: int, threshold: Optional[int] = None) -> BooleanFunction:
    thr = runs_median_threshold(n) if threshold is None else threshold
    return BooleanFunction(n, runs_count(_bits(n)) > thr, "indicator")


def runs_boundary_bits(x: np.ndarray) -> np.ndarray:
    """``y_i = x_i xor x_{i+1}``, the independent boundary variables."""
    x = np.asarray(x)
    return x[..., 1:] ^ x[..., :-1]


def make_family(spec: FamilySpec) -> BooleanFunction:
    check_size(spec.n)
    k = spec.kind
    if k == "dictator":
        return dictator(spec.n)
    if k == "parity":
        return parity(spec.n)
    if k == "majority":
        return majority(spec.n)
    if k == "tribes":
        return tribes(spec.t, spec.s, spec.n)
    if k == "recmaj3":
        return recursive_majority3(spec.depth)
    if k == "runs":
        thr = None if spec.threshold is None else int(spec.threshold)
        return runs(spec.n, thr)
    if k == "weighted":
        return weighted_event(WeightedMajority(spec.weights, spec.threshold or 0.0))
    raise ContractError(f"unknown family {k!r}")
