"""Weight-proportional random paths of fixed length from suffix tables.

``T[m][k]`` is the total weight of legal suffixes of length ``m`` that start
at altitude ``k`` and satisfy the endpoint condition.  From altitude ``k``
with ``m`` steps left, jump ``j`` is taken with probability
``p_j T[m-1][k+j] / T[m][k]`` and a catastrophe (where permitted) with
probability ``q T[m-1][0] / T[m][k]``.

Two engines share this rule:

* :func:`sample` keeps the tables as exact integers (weights scaled by a
  common denominator) and inverts a uniform integer, so draws are exactly
  proportional to path weight.
* :func:`empirical_law` walks many paths at once through float tables with
  the numba or numpy kernel and only returns statistics.
"""

from __future__ import annotations

import bisect
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from ._accel import resolve
from .errors import EmptySupport, UnknownParam
from .model import Catastrophe, Jump, JumpSet, Path, path_statistics, validate_path

RNG_NAME = "PCG64"
KINDS = ("excursion", "meander")
PARAMS = ("catastrophes", "returns", "cumulative", "waiting", "first_size", "final_altitude", "avg_cat")
_STAT_COL = {
    "final_altitude": _kernels.FINAL,
    "catastrophes": _kernels.NCAT,
    "returns": _kernels.NRET,
    "cumulative": _kernels.CUM,
    "waiting": _kernels.WAIT,
    "first_size": _kernels.FIRST,
}


def _endpoint(kind) -> int | None:
    """None for meanders, otherwise the required final altitude."""
    if kind == "excursion":
        return 0
    if kind == "meander":
        return None
    if isinstance(kind, int) and not isinstance(kind, bool) and kind >= 0:
        return kind
    raise ValueError(f"kind must be 'excursion', 'meander' or a final altitude, got {kind!r}")


@dataclass(frozen=True)
class SamplerTables:
    """Exact suffix tables; ``rows[m][k] = L**m * T[m][k]`` as Python ints."""

    J: JumpSet
    n: int
    kind: object
    L: int
    rows: tuple = field(repr=False)

    def T(self, m: int, k: int) -> Fraction:
        row = self.rows[m]
        if k < 0 or k >= len(row):
            return Fraction(0)
        return Fraction(row[k], self.L**m)

    @property
    def total(self) -> Fraction:
        return self.T(self.n, 0)

    def options(self, m: int, k: int) -> list:
        """``(step, integer weight)`` for every move from altitude k with m steps left."""
        _, w, wq = self.J.scaled_integers()
        prev = self.rows[m - 1]
        out = []
        for j in self.J.support:
            t = k + j
            if 0 <= t < len(prev) and prev[t]:
                out.append((Jump(j), w[j] * prev[t]))
        if self.J.permits(k) and prev[0]:
            out.append((Catastrophe(k), wq * prev[0]))
        return out


def build_sampler(J: JumpSet, n: int, kind="excursion") -> SamplerTables:
    if n < 0:
        raise ValueError("n must be non-negative")
    end = _endpoint(kind)
    L, w, wq = J.scaled_integers()
    d = J.d
    # row m only needs altitudes reachable after n - m steps
    width = lambda m: (n - m) * d + 1  # noqa: E731
    top = width(0)
    row0 = [1] * top if end is None else [int(k == end) for k in range(top)]
    rows = [row0]
    permitted = [J.permits(k) for k in range(top)]
    for m in range(1, n + 1):
        prev = rows[-1]
        lp = len(prev)
        cat = wq * prev[0]
        row = []
        for k in range(width(m)):
            s = cat if permitted[k] else 0
            for j, wj in w.items():
                t = k + j
                if 0 <= t < lp:
                    s += wj * prev[t]
            row.append(s)
        rows.append(row)
    return SamplerTables(J, n, kind, L, tuple(rows))


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.Generator(np.random.PCG64(rng))


def uniform_below(gen: np.random.Generator, N: int) -> int:
    """Uniform integer in [0, N) from 64-bit words by rejection."""
    if N <= 0:
        raise ValueError("N must be positive")
    bits = N.bit_length()
    words = (bits + 63) // 64
    mask = (1 << bits) - 1
    raw = gen.bit_generator.random_raw
    while True:
        x = 0
        for wd in raw(words).tolist():
            x = (x << 64) | wd
        x &= mask
        if x < N:
            return x


def sample(t: SamplerTables, rng=None) -> Path:
    """One path drawn with probability weight / T[n][0]."""
    if t.rows[t.n][0] == 0:
        raise EmptySupport(f"no path of length {t.n} of kind {t.kind}")
    gen = _rng(rng)
    alt = 0
    steps = []
    for m in range(t.n, 0, -1):
        opts = t.options(m, alt)
        cum = list(itertools.accumulate(wt for _, wt in opts))
        r = uniform_below(gen, cum[-1])
        step = opts[bisect.bisect_right(cum, r)][0]
        steps.append(step)
        alt = 0 if isinstance(step, Catastrophe) else alt + step.j
    return validate_path(t.J, steps)


def sample_many(t: SamplerTables, count: int, seed: int = 0) -> list:
    gen = _rng(seed)
    return [sample(t, gen) for _ in range(count)]


def path_probability(t: SamplerTables, p: Path) -> Fraction:
    """Product of the transition probabilities along ``p``."""
    prob = Fraction(1)
    alt = 0
    for i, step in enumerate(p.steps):
        m = t.n - i
        opts = t.options(m, alt)
        tot = sum(wt for _, wt in opts)
        wt = dict(opts).get(step, 0)
        if wt == 0:
            return Fraction(0)
        prob *= Fraction(wt, tot)
        alt = 0 if isinstance(step, Catastrophe) else alt + step.j
    return prob


def check_exactness(J: JumpSet, n: int, kind="excursion") -> bool:
    """Every legal path gets probability weight / T[n][0], compared as rationals."""
    from .brute import enumerate as enumerate_paths

    t = build_sampler(J, n, kind)
    end = _endpoint(kind)
    total = t.total
    seen = Fraction(0)
    for p, w in enumerate_paths(J, n, "meander"):
        if end is not None and p.final_altitude != end:
            continue
        if path_probability(t, p) != w / total:
            return False
        seen += w
    return seen == total


# -- batch engine ---------------------------------------------------------


@dataclass(frozen=True)
class FloatTables:
    J: JumpSet
    n: int
    kind: object
    T: np.ndarray = field(repr=False)
    jumps: np.ndarray = field(repr=False)
    jw: np.ndarray = field(repr=False)
    wq: float
    permitted: np.ndarray = field(repr=False)


def build_float_tables(J: JumpSet, n: int, kind="excursion") -> FloatTables:
    end = _endpoint(kind)
    W = n * J.d + 1
    start = np.ones(W) if end is None else (np.arange(W) == end).astype(float)
    jumps = np.array(J.support, dtype=np.int64)
    jw = np.array([float(p) for _, p in J.weights])
    permitted = np.array([J.permits(k) for k in range(W)], dtype=np.bool_)
    T = _kernels.float_table(jumps, jw, float(J.q), permitted, n, start)
    if T[n, 0] == 0:
        raise EmptySupport(f"no path of length {n} of kind {kind}")
    return FloatTables(J, n, kind, T, jumps, jw, float(J.q), permitted)


def walk_stats(ft: FloatTables, uniforms: np.ndarray, backend: str | None = None):
    return _kernels.walk_batch(ft.T, ft.jumps, ft.jw, ft.wq, ft.permitted, uniforms, backend)


@dataclass
class EmpiricalLaw:
    param: str
    n: int
    trials: int
    seed: int
    threads: int
    backend: str
    counts: dict
    mean: float
    var: float
    rng: str = RNG_NAME

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def pmf(self) -> dict:
        tot = self.total
        return {k: c / tot for k, c in sorted(self.counts.items())}

    @property
    def stderr(self) -> float:
        return math.sqrt(self.var / self.total)

    def tv_distance(self, pmf) -> float:
        """Total variation distance to a reference PMF (dict or sequence)."""
        ref = dict(pmf) if isinstance(pmf, dict) else dict(enumerate(pmf))
        emp = self.pmf
        keys = set(ref) | set(emp)
        return 0.5 * sum(abs(emp.get(k, 0.0) - float(ref.get(k, 0.0))) for k in keys)

    def to_json(self) -> dict:
        return {
            "param": self.param,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "threads": self.threads,
            "backend": self.backend,
            "rng": self.rng,
            "mean": self.mean,
            "var": self.var,
            "stderr": self.stderr,
            "mean_over_n": self.mean / self.n if self.n else None,
            "stderr_over_n": self.stderr / self.n if self.n else None,
            "pmf": {str(k): v for k, v in self.pmf.items()},
        }


def _chunk(ft, trials, seed, index, backend, block):
    gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))
    stats, hist = [], np.zeros(ft.T.shape[1], dtype=np.int64)
    for s in range(0, trials, block):
        U = gen.random((min(block, trials - s), ft.n))
        st, h = walk_stats(ft, U, backend)
        stats.append(st)
        hist += h
    if not stats:
        return np.zeros((0, _kernels.NSTATS), dtype=np.int64), hist
    return np.concatenate(stats), hist


def run_batch(J: JumpSet, n: int, trials: int, seed: int = 0, threads: int = 1,
              kind="excursion", backend: str | None = None, block: int = 2048):
    """Raw statistics of ``trials`` sampled paths; thread t uses SeedSequence([seed, t])."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if threads < 1:
        raise ValueError("threads must be at least 1")
    ft = build_float_tables(J, n, kind)
    be = resolve(backend)
    sizes = [trials // threads + (i < trials % threads) for i in range(threads)]
    if threads == 1:
        parts = [_chunk(ft, sizes[0], seed, 0, be, block)]
    else:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda i: _chunk(ft, sizes[i], seed, i, be, block), range(threads)))
    stats = np.concatenate([p[0] for p in parts])
    hist = sum(p[1] for p in parts)
    return stats, hist, be


def empirical_law(J: JumpSet, n: int, trials: int, param: str = "catastrophes", seed: int = 0,
                  threads: int = 1, backend: str | None = None) -> EmpiricalLaw:
    """Histogram and moments of one statistic over sampled paths.

    ``final_altitude`` samples meanders, everything else samples excursions.
    ``avg_cat`` pools the sizes of all catastrophes of all sampled paths
    (paths without a catastrophe count once at 0).
    """
    if param not in PARAMS:
        raise UnknownParam(f"unknown parameter {param!r}; expected one of {PARAMS}")
    kind = "meander" if param == "final_altitude" else "excursion"
    stats, hist, be = run_batch(J, n, trials, seed, threads, kind, backend)
    if param == "avg_cat":
        hist = hist.copy()
        hist[0] += int((stats[:, _kernels.NCAT] == 0).sum())
        ks = np.nonzero(hist)[0]
        counts = {int(k): int(hist[k]) for k in ks}
        vals, wts = ks.astype(float), hist[ks].astype(float)
        mean = float(np.average(vals, weights=wts))
        var = float(np.average((vals - mean) ** 2, weights=wts))
    else:
        x = stats[:, _STAT_COL[param]]
        ks, cs = np.unique(x, return_counts=True)
        counts = dict(zip(ks.tolist(), cs.tolist()))
        mean = float(x.mean())
        var = float(x.var(ddof=1)) if len(x) > 1 else 0.0
    return EmpiricalLaw(param, n, trials, seed, threads, be, counts, mean, var)


def sample_statistics(paths) -> list:
    return [path_statistics(p) for p in paths]
