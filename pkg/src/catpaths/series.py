"""Exact truncated power series for every generating function of the model.

All builders work on integer-weighted copies of the jump set: with
``p_j = w_j / L`` and ``q = w_q / L`` a path of length n weighs
``integer / L**n``, so the recurrences run on Python ints and the final
coefficient ``n`` is divided by ``L**n`` once.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import UnknownParam
from .model import JumpSet

PARAMS = ("catastrophes", "returns", "cumulative", "avg_cat", "waiting")


# -- integer list kernels -------------------------------------------------

def _conv(a: Sequence[int], b: Sequence[int], N: int) -> list:
    out = [0] * (N + 1)
    nz_b = [(j, y) for j, y in enumerate(b[: N + 1]) if y]
    for i, x in enumerate(a[: N + 1]):
        if not x:
            continue
        lim = N - i
        for j, y in nz_b:
            if j > lim:
                break
            out[i + j] += x * y
    return out


def _recip_unit(a: Sequence[int], N: int) -> list:
    """Reciprocal of an integer series with ``a[0] == 1``."""
    if a[0] != 1:
        raise ValueError("integer reciprocal needs constant term 1")
    b = [0] * (N + 1)
    b[0] = 1
    nz = [(i, x) for i, x in enumerate(a[1: N + 1], start=1) if x]
    for n in range(1, N + 1):
        s = 0
        for i, x in nz:
            if i > n:
                break
            s += x * b[n - i]
        b[n] = -s
    return b


def _pad(a: Sequence, N: int) -> list:
    a = list(a[: N + 1])
    return a + [0] * (N + 1 - len(a))


def _polymul(a: Sequence[int], b: Sequence[int]) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _polyadd(a: Sequence[int], b: Sequence[int], sign: int = 1) -> list:
    n = max(len(a), len(b))
    out = list(a) + [0] * (n - len(a))
    for i, y in enumerate(b):
        out[i] += sign * y
    return out


def _bmul(A: Sequence, B: Sequence, N: int) -> list:
    """Product of two bivariate integer series given as lists of u-rows."""
    out = [[] for _ in range(N + 1)]
    for i, ra in enumerate(A[: N + 1]):
        if not any(ra):
            continue
        for j, rb in enumerate(B[: N + 1 - i]):
            if any(rb):
                out[i + j] = _polyadd(out[i + j], _polymul(ra, rb))
    return out


def _bmul_z(A: Sequence, s: Sequence[int], N: int) -> list:
    """Bivariate series times a z-only series."""
    out = [[] for _ in range(N + 1)]
    for i, ra in enumerate(A[: N + 1]):
        if not any(ra):
            continue
        for j, y in enumerate(s[: N + 1 - i]):
            if y:
                out[i + j] = _polyadd(out[i + j], [y * x for x in ra])
    return out


def _brecip_one_minus(Qb: Sequence, N: int) -> list:
    """``1 / (1 - Q(z,u))`` for a bivariate Q with no z^0 term."""
    D = [[] for _ in range(N + 1)]
    D[0] = [1]
    for n in range(1, N + 1):
        acc: list = []
        for i in range(1, n + 1):
            if i < len(Qb) and any(Qb[i]) and any(D[n - i]):
                acc = _polyadd(acc, _polymul(Qb[i], D[n - i]))
        D[n] = acc
    return D


def _trim(row: list) -> list:
    while row and row[-1] == 0:
        row.pop()
    return row


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# -- public series types --------------------------------------------------

@dataclass(frozen=True)
class Series:
    """Truncated power series ``c_0 + ... + c_N z^N`` over the rationals."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("a series has at least one coefficient")

    @classmethod
    def from_scaled(cls, ints: Sequence[int], L: int) -> "Series":
        if L == 1:
            return cls(tuple(Fraction(x) for x in ints))
        return cls(tuple(Fraction(x, L ** n) for n, x in enumerate(ints)))

    @classmethod
    def zero(cls, N: int) -> "Series":
        return cls((0,) * (N + 1))

    @classmethod
    def one(cls, N: int) -> "Series":
        return cls((1,) + (0,) * N)

    @classmethod
    def z(cls, N: int) -> "Series":
        return cls.monomial(1, N)

    @classmethod
    def monomial(cls, k: int, N: int) -> "Series":
        c = [0] * (N + 1)
        if k <= N:
            c[k] = 1
        return cls(tuple(c))

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    order = N

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, n):
        return self.coeffs[n]

    def __iter__(self):
        return iter(self.coeffs)

    def _scaled(self):
        den = math.lcm(*(c.denominator for c in self.coeffs))
        return [int(c * den) for c in self.coeffs], den

    def _align(self, other: "Series") -> int:
        return min(self.N, other.N)

    def truncate(self, N: int) -> "Series":
        if N > self.N:
            raise ValueError("cannot extend a truncated series")
        return Series(self.coeffs[: N + 1])

    def __add__(self, other):
        if isinstance(other, Series):
            N = self._align(other)
            return Series(tuple(a + b for a, b in zip(self.coeffs[: N + 1], other.coeffs)))
        c = list(self.coeffs)
        c[0] += Fraction(other)
        return Series(tuple(c))

    __radd__ = __add__

    def __neg__(self):
        return Series(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Series):
            N = self._align(other)
            a, da = self._scaled()
            b, db = other._scaled()
            prod = _conv(a, b, N)
            den = da * db
            return Series(tuple(Fraction(x, den) for x in prod))
        k = Fraction(other)
        return Series(tuple(k * c for c in self.coeffs))

    __rmul__ = __mul__

    def reciprocal(self) -> "Series":
        """``1/self``; the constant term must be non-zero."""
        a0 = self.coeffs[0]
        if a0 == 0:
            raise ZeroDivisionError("series reciprocal needs a non-zero constant term")
        N = self.N
        if a0 == 1 and all(c.denominator == 1 for c in self.coeffs):
            return Series(tuple(_recip_unit([int(c) for c in self.coeffs], N)))
        inv0 = 1 / a0
        b = [inv0] + [Fraction(0)] * N
        for n in range(1, N + 1):
            s = sum((self.coeffs[i] * b[n - i] for i in range(1, n + 1)), Fraction(0))
            b[n] = -inv0 * s
        return Series(tuple(b))

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other.reciprocal()
        return self * (1 / Fraction(other))

    def shift(self, k: int = 1) -> "Series":
        """Multiply by ``z**k`` keeping the order."""
        return Series(((0,) * k + self.coeffs)[: self.N + 1])

    def evaluate(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def derivative(self) -> "Series":
        if self.N == 0:
            return Series((0,))
        return Series(tuple(n * self.coeffs[n] for n in range(1, self.N + 1)))

    def to_json(self) -> dict:
        return {"N": self.N, "coeffs": [_frac_str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "Series":
        if isinstance(obj, str):
            obj = json.loads(obj)
        s = cls(tuple(Fraction(c) for c in obj["coeffs"]))
        if s.N != obj["N"]:
            raise ValueError("order mismatch in serialized series")
        return s


@dataclass(frozen=True)
class BivariateSeries:
    """Rows ``n = 0..N``; row ``n`` holds the coefficients in the second variable."""

    rows: tuple

    @classmethod
    def from_scaled(cls, rows: Sequence[Sequence[int]], L: int) -> "BivariateSeries":
        out = []
        for n, r in enumerate(rows):
            den = L ** n
            out.append(tuple(Fraction(x, den) for x in _trim(list(r))))
        return cls(tuple(out))

    @property
    def N(self) -> int:
        return len(self.rows) - 1

    def coeff(self, n: int, k: int) -> Fraction:
        row = self.rows[n]
        return row[k] if 0 <= k < len(row) else Fraction(0)

    def row(self, n: int) -> tuple:
        return self.rows[n]

    def marginal(self) -> Series:
        return Series(tuple(sum(r, Fraction(0)) for r in self.rows))

    def slice(self, k: int) -> Series:
        return Series(tuple(self.coeff(n, k) for n in range(self.N + 1)))

    def to_json(self) -> dict:
        return {"N": self.N, "rows": [[_frac_str(x) for x in r] for r in self.rows]}


# -- builders -------------------------------------------------------------

_ROW_CACHE: dict = {}


def _altitude_rows(J: JumpSet, N: int, with_catastrophes: bool) -> tuple:
    # rows hold weights scaled by L (which depends on q too), so key on the scaled ints
    L, w, wq = J.scaled_integers()
    key = (tuple(sorted(w.items())),) + ((wq, J.excluded) if with_catastrophes else ()) + (with_catastrophes,)
    rows = _ROW_CACHE.get(key)
    if rows is None or len(rows) <= N:
        if len(_ROW_CACHE) > 64:
            _ROW_CACHE.clear()
        rows = _compute_rows(J, N, with_catastrophes)
        _ROW_CACHE[key] = rows
    return rows[: N + 1]


def _compute_rows(J: JumpSet, N: int, with_catastrophes: bool) -> tuple:
    _, w, wq = J.scaled_integers()
    d = J.d
    jumps = sorted(w.items())
    rows = [(1,)]
    for n in range(N):
        prev = rows[-1]
        width = (n + 1) * d + 1
        cur = [0] * width
        for k, x in enumerate(prev):
            if not x:
                continue
            for j, wj in jumps:
                t = k + j
                if t >= 0:
                    cur[t] += wj * x
        if with_catastrophes:
            cur[0] += wq * sum(x for k, x in enumerate(prev) if x and J.permits(k))
        rows.append(tuple(cur))
    return tuple(rows)


def counting_table(J: JumpSet, N: int, with_catastrophes: bool = True) -> BivariateSeries:
    """Weighted counts of meanders of length n ending at altitude k.

    Row 0 of the u-coefficients is the excursion series, the row sums give
    the meander series, and a fixed k gives the series of meanders ending at k.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    L, _, _ = J.scaled_integers()
    return BivariateSeries.from_scaled(_altitude_rows(J, N, with_catastrophes), L)


class _IntGFs:
    """Integer-scaled slices shared by the builders (scale factor L**n)."""

    def __init__(self, J: JumpSet, N: int):
        self.J = J
        self.N = N
        self.L, self.w, self.wq = J.scaled_integers()
        rows = _altitude_rows(J, N, False)
        self.rows = rows
        self.E = [r[0] for r in rows]
        self.M = [sum(r) for r in rows]
        self.excl = sorted(h for h in J.excluded if h <= N * J.d)
        # Q_n = wq * (meanders of length n-1 ending at a permitted altitude)
        self.Q = [0] + [
            self.wq * (self.M[n - 1] - sum(rows[n - 1][h] for h in self.excl if h < len(rows[n - 1])))
            for n in range(1, N + 1)
        ]
        self._D = None

    @property
    def D(self):
        if self._D is None:
            self._D = _recip_unit([1] + [-x for x in self.Q[1:]], self.N)
        return self._D

    def Qbiv(self):
        """Q(z,u): row n lists wq * m_{n-1,h} at permitted h."""
        out = [[]]
        for n in range(1, self.N + 1):
            prev = self.rows[n - 1]
            out.append([self.wq * x if self.J.permits(h) else 0 for h, x in enumerate(prev)])
        return out

    def series(self, ints) -> Series:
        return Series.from_scaled(ints, self.L)


@lru_cache(maxsize=32)
def _gfs(J: JumpSet, N: int) -> _IntGFs:
    return _IntGFs(J, N)


def e_series(J: JumpSet, N: int) -> Series:
    """Catastrophe-free excursions E(z)."""
    g = _gfs(J, N)
    return g.series(g.E)


def m_series(J: JumpSet, N: int) -> Series:
    """Catastrophe-free meanders M(z)."""
    g = _gfs(J, N)
    return g.series(g.M)


def mk_series(J: JumpSet, N: int, k: int) -> Series:
    """Catastrophe-free meanders ending at altitude k."""
    g = _gfs(J, N)
    return g.series([r[k] if k < len(r) else 0 for r in g.rows])


def q_series(J: JumpSet, N: int) -> Series:
    """Excursions whose only catastrophe is their last step."""
    g = _gfs(J, N)
    return g.series(g.Q)


def d_series(J: JumpSet, N: int) -> Series:
    """Excursions ending with a catastrophe (including the empty path): 1/(1-Q)."""
    g = _gfs(J, N)
    return g.series(g.D)


def f0_series(J: JumpSet, N: int) -> Series:
    """Excursions with catastrophes, as D(z) E(z)."""
    g = _gfs(J, N)
    return g.series(_conv(g.D, g.E, N))


def f_series(J: JumpSet, N: int) -> Series:
    """Meanders with catastrophes, as D(z) M(z)."""
    g = _gfs(J, N)
    return g.series(_conv(g.D, g.M, N))


def q_bivariate(J: JumpSet, N: int) -> BivariateSeries:
    """Q(z,u) with u marking the catastrophe size."""
    g = _gfs(J, N)
    return BivariateSeries.from_scaled(g.Qbiv(), g.L)


def parameter_series(J: JumpSet, N: int, param: str) -> BivariateSeries:
    """Bivariate series of excursions with catastrophes by a path parameter.

    ``param`` is one of ``catastrophes``, ``returns``, ``cumulative``,
    ``avg_cat`` (each catastrophe of each path counted with its size) or
    ``waiting`` (step index of the first catastrophe, 0 if none).
    """
    if param not in PARAMS:
        raise UnknownParam(f"unknown parameter {param!r}; choose from {PARAMS}")
    g = _gfs(J, N)
    E, Q, D = g.E, g.Q, g.D
    if param == "catastrophes":
        rows = _powers_table(Q, E, N)
    elif param == "returns":
        F0 = _conv(D, E, N)
        A = [0] + [-x for x in _recip_unit(F0, N)[1:]]
        rows = _powers_table(A, [1] + [0] * N, N)
    elif param == "cumulative":
        Db = _brecip_one_minus(g.Qbiv(), N)
        rows = _bmul_z(Db, E, N)
    elif param == "avg_cat":
        DDE = _conv(_conv(D, D, N), E, N)
        rows = _bmul_z(g.Qbiv(), DDE, N)
        for n in range(N + 1):
            rows[n] = _polyadd(rows[n], [E[n]])
    else:
        DE = _conv(D, E, N)
        rows = [[E[n]] + [Q[k] * DE[n - k] for k in range(1, n + 1)] for n in range(N + 1)]
    return BivariateSeries.from_scaled(rows, g.L)


def _powers_table(base: Sequence[int], factor: Sequence[int], N: int) -> list:
    """Rows of sum_k v^k base^k * factor, for a base with zero constant term."""
    rows = [[0] * (N + 1) for _ in range(N + 1)]
    power = [1] + [0] * N
    k = 0
    while any(power) and k <= N:
        term = _conv(power, factor, N)
        for n, x in enumerate(term):
            if x:
                rows[n][k] = x
        power = _conv(power, base, N)
        k += 1
    return rows


@dataclass(frozen=True)
class ArchSeries:
    A: Series
    A_cat: Series
    A_nocat: Series


def arch_series(J: JumpSet, N: int) -> ArchSeries:
    """Arches of excursions with catastrophes, split by how they end."""
    g = _gfs(J, N)
    F0 = _conv(g.D, g.E, N)
    A = [0] + [-x for x in _recip_unit(F0, N)[1:]]
    Acat = _conv(g.Q, _recip_unit(g.E, N), N)
    Anocat = [a - b for a, b in zip(A, Acat)]
    if any(x < 0 for x in Anocat):
        raise ArithmeticError("negative coefficient in the no-catastrophe arch series")
    return ArchSeries(g.series(A), g.series(Acat), g.series(Anocat))


def dyck_arch_closed_form(n: int) -> int:
    """Number of Dyck arches of length n ending with a catastrophe."""
    if n < 3:
        return 0
    return math.comb(n - 2, (n - 3) // 2)


def catalan_z2(N: int) -> Series:
    """C(z) = 1/(1 - z^2 C(z)): Catalan numbers on even powers."""
    c = [0] * (N + 1)
    for m in range(N // 2 + 1):
        c[2 * m] = math.comb(2 * m, m) // (m + 1)
    return Series(tuple(c))


def continued_fraction_H(N: int) -> Series:
    """Paths with horizontal steps allowed only at altitude 1.

    Uses the periodic part of the continued fraction in closed form:
    ``H = 1 / (1 - z^2 / (1 - z - z^2 C(z)))``.
    """
    C = catalan_z2(N)
    z = Series.z(N)
    inner = 1 - z - (C.shift(2))
    return (1 - inner.reciprocal().shift(2)).reciprocal()
