"""
Majority and weighted-majority functions, correlation with majority, noise
stability of weighted majorities and the moment identities behind them.

Two tie conventions coexist on purpose: the weighted majority *event* uses a
strict ``> s``, while the *sign* function ``M_w`` used in correlations is 0 on
ties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ContractError, ResourceError
from .montecarlo import Estimate, sample_chunks
from .noise import smoothed
from .spectral import BooleanFunction, check_size, influences, is_monotone, popcount

LAMBDA_EXACT_MAX_N = 12
EXACT_DEFICIT_MAX_N = 12


def majority_sign(x: int, K: int) -> int:
    """Sign of ``sum_{j in K} (2 x_j - 1)``; 0 on an exact split or empty K."""
    k = bin(K).count("1")
    s = 2 * bin(x & K).count("1") - k
    return (s > 0) - (s < 0)


def majority_sign_table(n: int, K: int) -> np.ndarray:
    """``M_K(x)`` for every ``x`` in ``{0,1}^n``."""
    s = 2 * popcount(np.arange(1 << n) & K) - bin(K).count("1")
    return np.sign(s).astype(np.float64)


def linear_form_table(weights) -> np.ndarray:
    """``sum_j w_j (2 x_j - 1)`` for every ``x``, built one variable at a time."""
    w = np.asarray(weights, dtype=np.float64)
    check_size(len(w))
    out = np.zeros(1)
    for wj in w:
        out = np.concatenate([out - wj, out + wj])
    return out


def _check_weights(w) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1 or w.size == 0 or not np.any(w != 0):
        raise ContractError("weights must be a non-empty vector that is not all zero")
    return w


@dataclass(frozen=True)
class WeightedMajority:
    """The event ``{x : sum_j (2 x_j - 1) w_j > threshold}``."""

    weights: tuple
    threshold: float = 0.0

    def __post_init__(self):
        w = _check_weights(self.weights)
        object.__setattr__(self, "weights", tuple(float(v) for v in w))

    @classmethod
    def uniform(cls, n: int, threshold: float = 0.0) -> "WeightedMajority":
        return cls((1.0,) * n, threshold)

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def is_uniform(self) -> bool:
        return len(set(self.weights)) == 1


def weighted_event(wm: WeightedMajority, n: Optional[int] = None) -> BooleanFunction:
    n = wm.n if n is None else n
    if n != wm.n:
        raise ContractError(f"weights have length {wm.n}, expected {n}")
    table = (linear_form_table(wm.weights) > wm.threshold).astype(np.float64)
    return BooleanFunction(n, table, "indicator")


def weighted_sign(weights) -> BooleanFunction:
    """``M_w = sign(sum_j w_j (2 x_j - 1))`` as a signed table."""
    w = _check_weights(weights)
    return BooleanFunction(len(w), np.sign(linear_form_table(w)), "signed")


@dataclass(frozen=True)
class CorrelationReport:
    value: float
    subset: int
    bound_rhs: Optional[float] = None
    ratio: Optional[float] = None


def correlation_with_majority(f: BooleanFunction, K: int) -> CorrelationReport:
    """``E(f M_K)``; for monotone indicators also the sub-majority bound with C = 1.

    The bound is ``sqrt|K| E(f M_K) (1 + sqrt(-log E(f M_K)))`` and ``ratio`` is
    ``I_K(f)`` divided by it.  Neither is asserted anywhere, the constant is unknown.
    """
    if f.kind not in ("indicator", "signed"):
        raise ContractError(f"expected an indicator or signed function, got {f.kind!r}")
    if not 0 <= K < (1 << f.n):
        raise ContractError(f"subset mask {K} out of range for n={f.n}")
    value = float(np.dot(f.table, majority_sign_table(f.n, K))) / (1 << f.n)
    bound = ratio = None
    if f.kind == "indicator" and 0 < value < 1 and is_monotone(f):
        size = bin(K).count("1")
        bound = math.sqrt(size) * value * (1.0 + math.sqrt(-math.log(value)))
        infl = influences(f)
        ratio = float(sum(infl[j] for j in range(f.n) if K >> j & 1)) / bound
    return CorrelationReport(value, K, bound, ratio)


def lambda_exact(f: BooleanFunction) -> tuple[float, int]:
    """``max_K |E(f M_K)|`` over all subsets and the maximising mask (smallest on ties)."""
    n = f.n
    if n > LAMBDA_EXACT_MAX_N:
        raise ResourceError(f"exact Lambda needs n <= {LAMBDA_EXACT_MAX_N}, got {n}; use mode='heuristic'")
    xs = np.arange(1 << n)
    best, arg = -1.0, 0
    step = max(1, (1 << 20) >> n)
    for start in range(0, 1 << n, step):
        Ks = np.arange(start, min(start + step, 1 << n))
        s = 2 * popcount(Ks[:, None] & xs[None, :]) - popcount(Ks)[:, None]
        vals = np.abs(np.sign(s) @ f.table) / (1 << n)
        i = int(np.argmax(vals))
        if vals[i] > best + 1e-15:
            best, arg = float(vals[i]), int(Ks[i])
    return best, arg


def lambda_candidates(f: BooleanFunction) -> dict[str, np.ndarray]:
    """Weight vectors tried by the heuristic lower bound for the weighted Lambda."""
    n = f.n
    infl = influences(f)
    order = np.argsort(-infl, kind="stable")
    cands = {"uniform": np.ones(n)}
    for k in range(1, n + 1):
        w = np.zeros(n)
        w[order[:k]] = 1.0
        cands[f"top{k}"] = w
    if infl.max() > 0:
        cands["influence"] = infl / infl.max()
    return cands


def lambda_heuristic(f: BooleanFunction) -> tuple[float, str]:
    best, name = 0.0, "uniform"
    for label, w in lambda_candidates(f).items():
        val = abs(float(np.dot(f.table, weighted_sign(w).table))) / (1 << f.n)
        if val > best + 1e-15:
            best, name = val, label
    return best, name


def lambda_(f: BooleanFunction, mode: str = "exact") -> float:
    """Maximal correlation with majority: exact over subsets, or the weighted heuristic."""
    if mode == "exact":
        return lambda_exact(f)[0]
    if mode == "heuristic":
        return lambda_heuristic(f)[0]
    raise ContractError(f"unknown mode {mode!r}")


# -- stability -----------------------------------------------------------------

def exact_deficit(f: BooleanFunction, eps: float) -> float:
    """``P[x in A xor N_eps(x) in A] = 2 (P[A] - E[chi_A Q_eps chi_A])``."""
    q = smoothed(f, eps)
    return max(0.0, 2.0 * (f.mean() - float(np.dot(f.table, q)) / (1 << f.n)))


def _uniform_deficit_draw(n: int, threshold: float, w: float, eps: float):
    # exact in law: only the count of ones matters for equal weights
    def draw(rng, size):
        k = rng.binomial(n, 0.5, size)
        k2 = k - rng.binomial(k, eps) + rng.binomial(n - k, eps)
        before = w * (2 * k - n) > threshold
        after = w * (2 * k2 - n) > threshold
        return (before != after).astype(np.float64)

    return draw


def _general_deficit_draw(w: np.ndarray, threshold: float, eps: float):
    def draw(rng, size):
        x = rng.random((size, w.size)) < 0.5
        y = x ^ (rng.random((size, w.size)) < eps)
        before = (2.0 * x - 1.0) @ w > threshold
        after = (2.0 * y - 1.0) @ w > threshold
        return (before != after).astype(np.float64)

    return draw


def stability_deficit(wm: WeightedMajority, n: Optional[int] = None, eps: float = 0.1,
                      samples: int = 100_000, seed: int = 0, *, workers: int = 1) -> Estimate:
    """``P[M xor N_eps M]``; exact for n <= 12, Monte Carlo otherwise."""
    n = wm.n if n is None else n
    if n != wm.n:
        raise ContractError(f"weights have length {wm.n}, expected {n}")
    if not 0.0 <= eps <= 1.0:
        raise ContractError(f"eps={eps} outside [0, 1]")
    if samples < 1:
        raise ContractError("samples must be >= 1")
    if n <= EXACT_DEFICIT_MAX_N:
        return Estimate.exact(exact_deficit(weighted_event(wm), eps), seed)
    if wm.is_uniform:
        draw = _uniform_deficit_draw(n, wm.threshold, wm.weights[0], eps)
        chunk = 1 << 16
    else:
        draw = _general_deficit_draw(np.asarray(wm.weights), wm.threshold, eps)
        chunk = max(64, (1 << 22) // n)
    hits = sample_chunks(draw, samples, seed, chunk=chunk, workers=workers)
    return Estimate.from_samples(hits, seed)


# -- influence vector and moments ------------------------------------------------

def influence_inner_product(weights, n: Optional[int] = None) -> tuple[float, float]:
    """``(sum_j w_j I_j(M_w), E|sum_j w_j (2 x_j - 1)|)``.

    ``I_j`` is the L1 influence of the {-1,0,1}-valued ``M_w``; for nonnegative
    weights the first entry is exactly twice the second.
    """
    w = _check_weights(weights)
    if n is not None and n != w.size:
        raise ContractError(f"weights have length {w.size}, expected {n}")
    lin = linear_form_table(w)
    ip = float(np.dot(w, influences(BooleanFunction(w.size, np.sign(lin), "signed"))))
    return ip, float(np.abs(lin).mean())


def moment_check(weights, samples: Optional[int] = None, seed: int = 0) -> tuple[float, float]:
    """``(E[f^4], 3 ||w||_2^4 - 2 ||w||_4^4)`` for ``f = sum_j w_j (2 x_j - 1)``.

    Exact by enumeration when ``samples`` is None, sampled otherwise.
    """
    w = _check_weights(weights)
    rhs = 3.0 * float(np.sum(w**2)) ** 2 - 2.0 * float(np.sum(w**4))
    if samples is None:
        return float(np.mean(linear_form_table(w) ** 4)), rhs

    def draw(rng, size):
        x = rng.integers(0, 2, (size, w.size)) * 2.0 - 1.0
        return (x @ w) ** 4

    return float(sample_chunks(draw, samples, seed, chunk=max(64, (1 << 20) // w.size)).mean()), rhs


def tail_frequency(weights, t: float) -> float:
    """Exact ``P[|f| >= t ||w||_2]``; bounded by ``3 t^-4``."""
    w = _check_weights(weights)
    lin = linear_form_table(w)
    return float(np.mean(np.abs(lin) >= t * np.linalg.norm(w)))


def anticoncentration(v: Sequence[float], s: float, b: float, samples: int, seed: int) -> Estimate:
    """Sampled ``P[|g - s| <= b]`` for ``g = sum_j z_j v_j`` with fair random signs."""
    v = np.asarray(v, dtype=np.float64)

    def draw(rng, size):
        z = rng.integers(0, 2, (size, v.size)) * 2.0 - 1.0
        return (np.abs(z @ v - s) <= b).astype(np.float64)

    return Estimate.from_samples(sample_chunks(draw, samples, seed, chunk=max(64, (1 << 20) // v.size)), seed)


def conditional_sign_agreement(n: int, k: int, samples: int, seed: int) -> Estimate:
    """Sampled ``P[f_w >= 0 | f_u >= 0]`` with ``w_j = 1/sqrt(j log n)`` and u uniform on the first k.

    Uses rejection on ``f_u >= 0``; the estimate's sample count is the number kept.
    """
    w = 1.0 / np.sqrt(np.arange(1, n + 1) * math.log(n))

    def draw(rng, size):
        x = rng.integers(0, 2, (size, n), dtype=np.int8) * 2 - 1
        keep = x[:, :k].sum(axis=1) >= 0
        fw = x[keep].astype(np.float64) @ w
        return (fw >= 0).astype(np.float64)

    hits = sample_chunks(draw, samples, seed, chunk=max(16, (1 << 22) // n))
    return Estimate.from_samples(hits, seed)
