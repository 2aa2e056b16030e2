"""
Noise operators, exact noise variance and the sensitivity gauge.

``Q_eps`` is the conditional expectation under independent eps-flips, acting
on the spectrum by ``(1 - 2 eps)^|S|``.  ``T_eta`` is the same operator written
with ``eta = 1 - 2 eps``.  The fixed-size operator flips a uniformly chosen set
of exactly ``q`` bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .errors import ContractError
from .spectral import BooleanFunction, Spectrum, check_size, inverse_table, transform

# deviations closer than this are treated as equal (float noise from the WHT)
DEVIATION_TOL = 1e-12


@dataclass(frozen=True)
class Bernoulli:
    eps: float

    def __post_init__(self):
        if not 0.0 <= self.eps <= 1.0:
            raise ContractError(f"flip probability {self.eps} outside [0, 1]")


@dataclass(frozen=True)
class FixedSize:
    q: int

    def __post_init__(self):
        if self.q < 0:
            raise ContractError(f"flip count {self.q} is negative")


NoiseModel = Union[Bernoulli, FixedSize]


def parse_noise(spec) -> NoiseModel:
    """Build a model from ``{'bernoulli': 0.1}`` / ``{'fixed': 12}`` or the text ``bernoulli:0.1``."""
    if isinstance(spec, str):
        key, _, val = spec.strip().strip("{}").partition(":")
        spec = {key.strip(): val.strip()}
    if len(spec) != 1:
        raise ContractError(f"noise spec must have exactly one entry, got {spec!r}")
    (key, val), = spec.items()
    if key == "bernoulli":
        return Bernoulli(float(val))
    if key == "fixed":
        return FixedSize(int(val))
    raise ContractError(f"unknown noise model {key!r}")


def sample_noise(x: int, n: int, model: NoiseModel, rng: np.random.Generator) -> int:
    """One noisy copy of configuration ``x``."""
    if isinstance(model, Bernoulli):
        flips = rng.random(n) < model.eps
        mask = int(np.dot(flips.astype(np.int64), 1 << np.arange(n, dtype=np.int64)))
        return x ^ mask
    if model.q > n:
        raise ContractError(f"cannot flip q={model.q} of n={n} bits")
    # partial Fisher-Yates over bit positions
    pos = list(range(n))
    mask = 0
    for i in range(model.q):
        k = i + int(rng.integers(n - i))
        pos[i], pos[k] = pos[k], pos[i]
        mask |= 1 << pos[i]
    return x ^ mask


def flip_bits(bits: np.ndarray, eps: float, rng: np.random.Generator) -> np.ndarray:
    """Independently flip each entry of a 0/1 (or bool) array with probability eps."""
    return bits ^ (rng.random(bits.shape) < eps)


def _check_eps(eps: float) -> None:
    if not 0.0 <= eps <= 1.0:
        raise ContractError(f"eps={eps} outside [0, 1]")


def noise_operator(sp: Spectrum, eps: float) -> Spectrum:
    """Spectrum of ``Q_eps f``."""
    _check_eps(eps)
    return sp.scale_by_level((1.0 - 2.0 * eps) ** np.arange(sp.n + 1))


def T(sp: Spectrum, eta: float) -> Spectrum:
    """``T_eta = Q_{(1 - eta)/2}``."""
    return noise_operator(sp, (1.0 - eta) / 2.0)


def var_noise(sp: Spectrum, eps: float) -> float:
    """``VAR(f, eps) = sum_{S != 0} f^(S)^2 (1 - 2 eps)^{2|S|}``."""
    _check_eps(eps)
    w = sp.level_weights()
    return float(np.dot(w[1:], (1.0 - 2.0 * eps) ** (2 * np.arange(1, sp.n + 1))))


def smoothed(f: BooleanFunction, eps: float) -> np.ndarray:
    """Pointwise table of ``Q_eps f(x) = E f(N_eps(x))``."""
    check_size(f.n, tables=2)
    return inverse_table(noise_operator(transform(f), eps))


def _require_indicator(f: BooleanFunction) -> None:
    if f.kind != "indicator":
        raise ContractError(f"expected an indicator function, got kind={f.kind!r}")


def deviation_distribution(f: BooleanFunction, eps: float) -> list[tuple[float, float]]:
    """Sorted ``(|Q_eps f(x) - E f|, mass)`` pairs, nearly equal values merged."""
    _require_indicator(f)
    dev = np.sort(np.abs(smoothed(f, eps) - f.mean()))
    if dev.size == 0:
        return []
    # group runs whose neighbours differ by at most DEVIATION_TOL; the run's max labels it
    breaks = np.flatnonzero(np.diff(dev) > DEVIATION_TOL)
    ends = np.append(breaks, dev.size - 1)
    starts = np.insert(breaks + 1, 0, 0)
    mass = (ends - starts + 1) / dev.size
    return [(float(dev[e]), float(m)) for e, m in zip(ends, mass)]


def gamma(f: BooleanFunction, eps: float, delta: float) -> float:
    """Mass of ``{x : |Q_eps f(x) - E f| > delta}`` (strict)."""
    if delta <= 0:
        raise ContractError("delta must be positive")
    dev = np.abs(smoothed_checked(f, eps) - f.mean())
    return float(np.mean(dev > delta + DEVIATION_TOL))


def smoothed_checked(f: BooleanFunction, eps: float) -> np.ndarray:
    _require_indicator(f)
    return smoothed(f, eps)


@dataclass(frozen=True)
class GaugeResult:
    phi: float
    var_noise: float
    deviation_distribution: list


def phi_from_distribution(dist: Sequence[tuple[float, float]]) -> float:
    """``inf{delta > 0 : gamma(delta) < delta}`` for a step-function gamma."""
    values = [v for v, _ in dist]
    masses = [m for _, m in dist]
    tail = sum(masses)
    # (0, v_1): gamma equals the total mass of positive deviations
    if values and values[0] > 0 and tail < values[0]:
        return tail
    for i, v in enumerate(values):
        tail -= masses[i]  # gamma on [v_i, v_{i+1}) is the mass strictly above v_i
        upper = values[i + 1] if i + 1 < len(values) else math.inf
        if tail < v:
            return max(v, 0.0)
        if tail < upper:
            return tail
    return 0.0


def gauge_phi(f: BooleanFunction, eps: float) -> GaugeResult:
    """Exact sensitivity gauge of an indicator via its deviation distribution."""
    dist = deviation_distribution(f, eps)
    return GaugeResult(phi_from_distribution(dist), var_noise(transform(f), eps), dist)


# -- generalised two-stage noise --------------------------------------------

def zeta_from_distribution(values: Sequence[float], probs: Sequence[float]) -> float:
    """Variance of a first-stage variable taking ``values`` with ``probs``."""
    values = np.asarray(values, dtype=np.float64)
    probs = np.asarray(probs, dtype=np.float64)
    mean = float(np.dot(values, probs))
    return float(np.dot(probs, (values - mean) ** 2))


def bernoulli_zetas(n: int, eps: float) -> np.ndarray:
    """q_j in {eps, 1 - eps} with equal mass."""
    return np.full(n, zeta_from_distribution([1 - eps, eps], [0.5, 0.5]))


def asymmetric_zetas(n: int, eps: float) -> np.ndarray:
    """Ones robust, zeros noisy: q_j = 1 w.p. 1/2 - eps, else eps / (1/2 + eps)."""
    z = zeta_from_distribution([1.0, eps / (0.5 + eps)], [0.5 - eps, 0.5 + eps])
    return np.full(n, z)


def three_point_zetas(n: int, eps: float) -> np.ndarray:
    """q_j in {1, 0, 1/2} with masses (1 - eps)/2, (1 - eps)/2, eps."""
    z = zeta_from_distribution([1.0, 0.0, 0.5], [(1 - eps) / 2, (1 - eps) / 2, eps])
    return np.full(n, z)


ZETA_PRESETS = {
    "bernoulli": bernoulli_zetas,
    "asymmetric": asymmetric_zetas,
    "three_point": three_point_zetas,
}


def z_general(sp: Spectrum, zetas) -> float:
    """``Z(f, nu) = sum_S f^(S)^2 prod_{j in S} 4 zeta_j``."""
    zetas = np.asarray(zetas, dtype=np.float64)
    if zetas.shape != (sp.n,):
        raise ContractError(f"need {sp.n} variances, got shape {zetas.shape}")
    if np.any(zetas < 0) or np.any(zetas > 0.25 + 1e-15):
        raise ContractError("variances must lie in [0, 1/4]")
    # product over S of 4 zeta_j is itself a Walsh-style product table
    prod = np.ones(1 << sp.n)
    for j, z in enumerate(4.0 * zetas):
        prod.reshape(-1, 2, 1 << j)[:, 1, :] *= z
    return float(np.dot(sp.coeffs**2, prod))


# -- hypercontractivity -------------------------------------------------------

def bonami_margin(f: BooleanFunction, eta: float) -> tuple[float, float]:
    """Both sides of ``||T_eta f||_2 <= ||f||_{1 + eta^2}``."""
    if not 0.0 <= eta <= 1.0:
        raise ContractError(f"eta={eta} outside [0, 1]")
    sp = T(transform(f), eta)
    lhs = math.sqrt(float(np.dot(sp.coeffs, sp.coeffs)))
    p = 1.0 + eta * eta
    rhs = float(np.mean(np.abs(f.table) ** p)) ** (1.0 / p)
    return lhs, rhs


# -- fixed-size noise ---------------------------------------------------------

@lru_cache(maxsize=4096)
def fixed_noise_coeff_exact(n: int, q: int, k: int) -> Fraction:
    """``c(n,q,k) = C(n,q)^-1 sum_j (-1)^j C(k,j) C(n-k,q-j)`` as an exact rational."""
    if not (0 <= q <= n and 0 <= k <= n):
        raise ContractError(f"need 0 <= q, k <= n; got n={n}, q={q}, k={k}")
    total = sum((-1) ** j * math.comb(k, j) * math.comb(n - k, q - j) for j in range(max(0, q - n + k), min(k, q) + 1))
    return Fraction(total, math.comb(n, q))


def fixed_noise_coeff(n: int, q: int, k: int) -> float:
    # big-integer arithmetic removes the alternating-sum cancellation for every n
    return float(fixed_noise_coeff_exact(n, q, k))


def fixed_noise_operator(sp: Spectrum, q: int) -> Spectrum:
    """Spectrum of ``f -> E_s f(x xor s)`` over masks of popcount q."""
    if not 0 <= q <= sp.n:
        raise ContractError(f"q={q} outside 0..{sp.n}")
    return sp.scale_by_level([fixed_noise_coeff(sp.n, q, k) for k in range(sp.n + 1)])


def var_fixed(sp: Spectrum, q: int) -> float:
    """``sum_{S != 0} c(n,q,|S|)^2 f^(S)^2``."""
    if not 0 <= q <= sp.n:
        raise ContractError(f"q={q} outside 0..{sp.n}")
    c = np.array([fixed_noise_coeff(sp.n, q, k) for k in range(sp.n + 1)])
    w = sp.level_weights()
    return float(np.dot(w[1:], c[1:] ** 2))
