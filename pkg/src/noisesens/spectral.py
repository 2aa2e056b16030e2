"""
Truth tables on the discrete cube and their Fourier-Walsh spectra.

Configurations are integers: bit ``j`` (0-based) of the index ``b`` holds the
value of variable ``x_{j+1}``.  Subset masks use the same convention, so the
character ``u_S(x) = (-1)^{|S & x|}`` is indexed by the same integers as the
table itself.

The forward transform carries the ``2^-n`` factor, so ``coeffs[0]`` is the mean
of the table and Parseval reads ``sum(coeffs**2) == mean(table**2)``.
"""

from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ContractError, ResourceError

MAX_N = int(os.environ.get("NOISESENS_MAX_N", "28"))

KINDS = ("indicator", "signed", "real")

_POPCOUNT8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)


def popcount(a) -> np.ndarray:
    """Vectorised popcount for non-negative integers below 2**32."""
    a = np.asarray(a, dtype=np.uint64)
    out = np.zeros(a.shape, dtype=np.int64)
    for shift in (0, 8, 16, 24):
        out += _POPCOUNT8[(a >> np.uint64(shift)) & np.uint64(0xFF)]
    return out


def check_size(n: int, tables: int = 1) -> None:
    """Raise ResourceError if ``tables`` dense tables of size 2**n exceed the cap.

    Operations holding two tables at once (a function and its spectrum) get an
    effective cap of ``MAX_N - 1``.
    """
    cap = MAX_N - (tables - 1)
    if n > cap:
        raise ResourceError(f"n={n} exceeds the dense-table cap n<={cap} (MAX_N={MAX_N})")


def _classify(table: np.ndarray) -> str:
    if np.all((table == 0) | (table == 1)):
        return "indicator"
    if np.all((table == 0) | (table == 1) | (table == -1)):
        return "signed"
    return "real"


def _validate_kind(table: np.ndarray, kind: str) -> None:
    if kind not in KINDS:
        raise ContractError(f"unknown kind {kind!r}; expected one of {KINDS}")
    if kind == "indicator" and not np.all((table == 0) | (table == 1)):
        raise ContractError("indicator table has entries outside {0,1}")
    if kind == "signed" and not np.all((table == 0) | (np.abs(table) == 1)):
        raise ContractError("signed table has entries outside {-1,0,1}")


@dataclass(frozen=True)
class BooleanFunction:
    """Dense real table of a function on ``{0,1}^n``.

    Parameters
    ----------
    n : int
        Number of variables.
    table : array_like
        ``2**n`` values, entry ``b`` is ``f(x)`` with ``x_{j+1}`` = bit ``j`` of ``b``.
    kind : {'indicator', 'signed', 'real'}, optional
        Claimed value class, validated on construction.  Inferred when omitted.
    """

    n: int
    table: np.ndarray = field(repr=False)
    kind: str = ""

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ContractError(f"n must be a positive integer, got {self.n!r}")
        check_size(int(self.n))
        table = np.array(self.table, dtype=np.float64).ravel()
        if table.shape[0] != 1 << self.n:
            raise ContractError(f"table length {table.shape[0]} != 2**{self.n}")
        kind = self.kind or _classify(table)
        _validate_kind(table, kind)
        table.setflags(write=False)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "kind", kind)

    @classmethod
    def from_callable(cls, n: int, func, kind: str = "") -> "BooleanFunction":
        """Tabulate ``func`` applied to the (2**n, n) 0/1 matrix of all inputs."""
        check_size(n)
        bits = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(np.int8)
        return cls(n, np.asarray(func(bits), dtype=np.float64), kind)

    def mean(self) -> float:
        return float(self.table.mean())

    def __call__(self, x: int) -> float:
        return float(self.table[x])

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.n, self.table.tobytes()))


@dataclass(frozen=True)
class Spectrum:
    """Fourier-Walsh coefficients ``coeffs[S]`` indexed by subset bitmask."""

    n: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.float64).ravel()
        if coeffs.shape[0] != 1 << self.n:
            raise ContractError(f"spectrum length {coeffs.shape[0]} != 2**{self.n}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def degrees(self) -> np.ndarray:
        """``|S|`` for every mask ``S``."""
        return popcount(np.arange(1 << self.n))

    def level_weights(self) -> np.ndarray:
        """``W_k = sum_{|S|=k} coeffs[S]**2`` for k = 0..n."""
        return np.bincount(self.degrees(), weights=self.coeffs**2, minlength=self.n + 1)

    def scale_by_level(self, factors: Sequence[float]) -> "Spectrum":
        """Multiply each coefficient by ``factors[|S|]``."""
        factors = np.asarray(factors, dtype=np.float64)
        return Spectrum(self.n, self.coeffs * factors[self.degrees()])


def _butterflies(a: np.ndarray, n: int) -> np.ndarray:
    # in-place unnormalised Walsh-Hadamard passes, one per bit
    for j in range(n):
        v = a.reshape(-1, 2, 1 << j)
        lo = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        v[:, 1, :] *= -1.0
        v[:, 1, :] += lo
    return a


def wht(values, normalize: bool = False) -> np.ndarray:
    """Walsh-Hadamard transform of a length-2**n array.

    With ``normalize=True`` the result is scaled by ``2**-n``.  Applying the
    unnormalised transform to the normalised one returns the input.
    """
    a = np.array(values, dtype=np.float64)
    size = a.shape[0]
    n = size.bit_length() - 1
    if size != 1 << n:
        raise ContractError(f"length {size} is not a power of two")
    _butterflies(a, n)
    if normalize:
        a *= 2.0**-n
    return a


def transform(f: BooleanFunction) -> Spectrum:
    """Fourier-Walsh spectrum, ``coeffs[S] = 2^-n sum_x f(x) (-1)^{|S & x|}``."""
    check_size(f.n, tables=2)
    return Spectrum(f.n, wht(f.table, normalize=True))


def inverse_table(sp: Spectrum) -> np.ndarray:
    """Pointwise values ``sum_S coeffs[S] u_S(x)`` as a plain array."""
    return wht(sp.coeffs)


def inverse(sp: Spectrum, kind: str = "") -> BooleanFunction:
    """Rebuild the table from a spectrum; ``kind`` is inferred when empty."""
    return BooleanFunction(sp.n, inverse_table(sp), kind)


def naive_transform(f: BooleanFunction) -> Spectrum:
    """O(4^n) transform straight from the definition, for cross-checking."""
    return Spectrum(f.n, _character_matrix(f.n) @ f.table / (1 << f.n))


@functools.lru_cache(maxsize=4)
def _character_matrix(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    return 1.0 - 2.0 * (popcount(idx[:, None] & idx[None, :]) & 1)


def flip_table(table: np.ndarray, j: int) -> np.ndarray:
    """Table of ``x -> f(sigma_j x)`` for 0-based variable ``j``."""
    n = table.shape[0].bit_length() - 1
    v = table.reshape(-1, 2, 1 << j)
    return v[:, ::-1, :].reshape(1 << n)


@dataclass(frozen=True)
class InfluenceProfile:
    """Per-variable influences and the aggregate quantities built from them.

    ``alpha`` and ``beta`` are None when undefined (n == 1, or I resp. J is zero).
    """

    per_var: np.ndarray
    total_I: float
    total_II: float
    J: float
    alpha: Optional[float]
    beta: Optional[float]
    level_weights: np.ndarray


def influences(f: BooleanFunction) -> np.ndarray:
    """``I_k = mean_x |f(x) - f(sigma_k x)|`` by direct table traversal."""
    out = np.empty(f.n)
    for k in range(f.n):
        v = f.table.reshape(-1, 2, 1 << k)
        # each unordered pair {x, sigma_k x} appears twice in the mean
        out[k] = np.abs(v[:, 1, :] - v[:, 0, :]).sum() * 2.0 / (1 << f.n)
    return out


def influence_profile(f: BooleanFunction, spectrum: Optional[Spectrum] = None) -> InfluenceProfile:
    sp = spectrum if spectrum is not None else transform(f)
    per_var = influences(f)
    total_I = float(per_var.sum())
    total_II = float((per_var**2).sum())
    deg = sp.degrees()
    nz = deg > 0
    J = float((sp.coeffs[nz] ** 2 / deg[nz]).sum())
    n = f.n
    alpha = math.log(total_I) / math.log(n) if n > 1 and total_I > 0 else None
    beta = -math.log(J) / math.log(n) if n > 1 and J > 0 else None
    return InfluenceProfile(per_var, total_I, total_II, J, alpha, beta, sp.level_weights())


def shift(f: BooleanFunction, j: int) -> BooleanFunction:
    """The j-shift: max of the pair at ``x_j = 1``, min at ``x_j = 0``.

    ``j`` is 1-based, as in ``x_1 .. x_n``.
    """
    if not 1 <= j <= f.n:
        raise ContractError(f"shift index {j} outside 1..{f.n}")
    v = f.table.reshape(-1, 2, 1 << (j - 1))
    out = np.empty_like(v)
    out[:, 0, :] = np.minimum(v[:, 0, :], v[:, 1, :])
    out[:, 1, :] = np.maximum(v[:, 0, :], v[:, 1, :])
    return BooleanFunction(f.n, out.reshape(-1), f.kind)


def monotonize(f: BooleanFunction) -> BooleanFunction:
    """Apply ``kappa_1 kappa_2 ... kappa_n``; ``kappa_n`` acts first."""
    g = f
    for j in range(f.n, 0, -1):
        g = shift(g, j)
    return g


def is_monotone(f: BooleanFunction) -> bool:
    for k in range(f.n):
        v = f.table.reshape(-1, 2, 1 << k)
        if np.any(v[:, 0, :] > v[:, 1, :]):
            return False
    return True


# -- truth-table file format -------------------------------------------------

def _fmt(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def dumps(obj) -> str:
    """Serialise a BooleanFunction or Spectrum to the text table format."""
    if isinstance(obj, BooleanFunction):
        header = f"n={obj.n} kind={obj.kind}"
        values = obj.table
    elif isinstance(obj, Spectrum):
        header = f"n={obj.n} spectrum"
        values = obj.coeffs
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")
    return header + "\n" + "\n".join(_fmt(v) for v in values) + "\n"


def loads(text: str):
    """Parse the output of :func:`dumps`."""
    lines = text.strip().splitlines()
    if not lines:
        raise ContractError("empty table file")
    fields = dict(tok.split("=", 1) if "=" in tok else (tok, "") for tok in lines[0].split())
    try:
        n = int(fields["n"])
    except (KeyError, ValueError):
        raise ContractError(f"bad table header {lines[0]!r}") from None
    values = np.array(" ".join(lines[1:]).split(), dtype=np.float64)
    if "spectrum" in fields:
        return Spectrum(n, values)
    return BooleanFunction(n, values, fields.get("kind", ""))


def save(obj, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def load(path):
    with open(path) as fh:
        return loads(fh.read())
