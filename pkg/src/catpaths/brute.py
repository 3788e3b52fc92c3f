"""Exhaustive enumeration: the ground truth every other module is checked against.

Two routes, both visiting every legal path once:

* :func:`enumerate` is a plain depth-first generator of :class:`Path` objects.
* :class:`Census` expands all paths level by level as numpy rows (in bounded
  chunks) and tallies statistics by the exponent vector of the path weight,
  so one enumeration serves every weighting of the same support.
"""

from __future__ import annotations

import builtins
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BoundExceeded
from .model import Catastrophe, Jump, JumpSet, ParamVector, Path, path_statistics, validate_path

DEFAULT_BOUND = 16
ENDPOINTS = ("excursion", "meander")


def _check(n: int, bound: int):
    if n < 0:
        raise ValueError("length must be non-negative")
    if n > bound:
        raise BoundExceeded(f"n={n} exceeds the enumeration bound {bound}")


def _options(J: JumpSet, alt: int):
    for j in J.support:
        if alt + j >= 0:
            yield Jump(j)
    if J.permits(alt):
        yield Catastrophe(alt)


def enumerate(J: JumpSet, n: int, endpoint: str = "excursion", bound: int = DEFAULT_BOUND):
    """All legal length-n paths as ``(Path, weight)``, jumps before catastrophes."""
    if endpoint not in ENDPOINTS:
        raise ValueError(f"endpoint must be one of {ENDPOINTS}")
    _check(n, bound)
    out = []
    steps: list = []

    def rec(alt: int):
        if len(steps) == n:
            if endpoint == "meander" or alt == 0:
                p = validate_path(J, steps)
                out.append((p, p.weight))
            return
        for s in _options(J, alt):
            steps.append(s)
            rec(alt + s.j if isinstance(s, Jump) else 0)
            steps.pop()

    rec(0)
    return out


@dataclass
class OracleTally:
    n: int
    endpoint: str
    by_params: dict = field(default_factory=dict)
    excursion_total: Fraction = Fraction(0)
    meander_total: Fraction = Fraction(0)

    @property
    def total(self) -> Fraction:
        return sum(self.by_params.values(), Fraction(0))


def oracle_tally(J: JumpSet, n: int, endpoint: str = "excursion", bound: int = DEFAULT_BOUND) -> OracleTally:
    t = OracleTally(n, endpoint)
    for p, w in enumerate(J, n, "meander", bound):
        pv = path_statistics(p)
        t.meander_total += w
        if pv.final_altitude == 0:
            t.excursion_total += w
        if endpoint == "meander" or pv.final_altitude == 0:
            t.by_params[pv] = t.by_params.get(pv, Fraction(0)) + w
    return t


def param_value_tally(J: JumpSet, n: int, param: str, bound: int = DEFAULT_BOUND) -> dict:
    """{k: weight} over excursions for one parameter, straight from the paths."""
    out: dict = defaultdict(Fraction)
    for p, w in enumerate(J, n, "excursion", bound):
        pv = path_statistics(p)
        if param == "avg_cat":
            sizes = p.catastrophe_sizes
            if not sizes:
                out[0] += w
            for h in sizes:
                out[h] += w
        else:
            out[_pick(pv, param)] += w
    return dict(out)


def _pick(pv: ParamVector, param: str) -> int:
    return {
        "catastrophes": pv.n_catastrophes,
        "returns": pv.n_returns_to_zero,
        "cumulative": pv.cumulative_cat_size,
        "waiting": pv.waiting_time_first_cat,
        "final": pv.final_altitude,
    }[param]


# -- vectorized census ----------------------------------------------------

_COLS = ("alt", "ncat", "nret", "cum", "wait", "first")


class Census:
    """Tallies of every path of length ``0..nmax`` for one support and policy.

    Tallies are keyed by ``(value, exponents)`` where ``exponents`` counts the
    uses of each jump (in support order) followed by the catastrophe count.
    """

    def __init__(self, J: JumpSet, nmax: int, chunk: int = 1 << 16, bound: int = DEFAULT_BOUND):
        _check(nmax, bound)
        self.support = J.support
        self.excluded = J.excluded
        self.nmax = nmax
        self.chunk = chunk
        self.width = nmax * J.d + 1
        self.permitted = np.array([J.permits(h) for h in range(self.width)], dtype=bool)
        self.nexp = len(self.support) + 1
        self.tallies = {name: [defaultdict(int) for _ in range(nmax + 1)]
                        for name in ("final", "catastrophes", "returns", "cumulative", "waiting", "avg_cat")}
        self.n_paths = [0] * (nmax + 1)
        root = {c: np.zeros(1, dtype=np.int32) for c in _COLS}
        root["exp"] = np.zeros((1, self.nexp), dtype=np.int32)
        root["sizes"] = np.zeros((1, self.width), dtype=np.int32)
        self._walk(root, 0)

    def _walk(self, rows: dict, depth: int):
        self._record(rows, depth)
        if depth == self.nmax:
            return
        kids = self._expand(rows, depth)
        m = len(kids["alt"])
        for s in range(0, m, self.chunk):
            self._walk({k: v[s: s + self.chunk] for k, v in kids.items()}, depth + 1)

    def _expand(self, r: dict, depth: int) -> dict:
        parts = []
        t = depth + 1
        for idx, j in builtins.enumerate(self.support):
            new_alt = r["alt"] + j
            keep = new_alt >= 0
            if not keep.any():
                continue
            c = {k: v[keep].copy() for k, v in r.items()}
            c["alt"] = new_alt[keep]
            c["exp"][:, idx] += 1
            c["nret"] += c["alt"] == 0
            parts.append(c)
        keep = self.permitted[r["alt"]]
        if keep.any():
            c = {k: v[keep].copy() for k, v in r.items()}
            h = c["alt"]
            first = c["ncat"] == 0
            c["wait"][first] = t
            c["first"][first] = h[first]
            c["ncat"] += 1
            c["cum"] += h
            c["sizes"][np.arange(len(h)), h] += 1
            c["exp"][:, -1] += 1
            c["nret"] += 1
            c["alt"] = np.zeros_like(h)
            parts.append(c)
        return {k: np.concatenate([p[k] for p in parts]) for k in r}

    def _group(self, values: np.ndarray, exps: np.ndarray, counts: np.ndarray | None, target: dict):
        if len(values) == 0:
            return
        # pack (value, exponents) into one int64 so unique runs on a flat array
        R = self.nmax + 1
        key = values.astype(np.int64)
        for i in range(self.nexp):
            key = key * R + exps[:, i]
        uniq, inv = np.unique(key, return_inverse=True)
        tot = np.bincount(inv, weights=counts, minlength=len(uniq))
        for k, cnt in zip(uniq.tolist(), tot.tolist()):
            ex = []
            for _ in range(self.nexp):
                k, e = divmod(k, R)
                ex.append(e)
            target[(k, tuple(reversed(ex)))] += int(cnt)

    def _record(self, r: dict, n: int):
        self.n_paths[n] += len(r["alt"])
        T = self.tallies
        self._group(r["alt"], r["exp"], None, T["final"][n])
        exc = r["alt"] == 0
        if not exc.any():
            return
        e = r["exp"][exc]
        for name, col in (("catastrophes", "ncat"), ("returns", "nret"), ("cumulative", "cum"), ("waiting", "wait")):
            self._group(r[col][exc], e, None, T[name][n])
        sizes = r["sizes"][exc]
        nocat = r["ncat"][exc] == 0
        self._group(np.zeros(int(nocat.sum()), dtype=np.int32), e[nocat], None, T["avg_cat"][n])
        for h in np.nonzero(sizes.any(axis=0))[0]:
            sel = sizes[:, h] > 0
            self._group(np.full(int(sel.sum()), h, dtype=np.int32), e[sel], sizes[sel, h], T["avg_cat"][n])

    def weighted(self, J: JumpSet, name: str, n: int) -> dict:
        """{value: total weight} for tally ``name`` at length ``n`` under J's weights."""
        if J.support != self.support or J.excluded != self.excluded:
            raise ValueError("census was built for a different support or policy")
        ws = [p for _, p in J.weights] + [J.q]
        out: dict = defaultdict(Fraction)
        for (v, exps), cnt in self.tallies[name][n].items():
            w = Fraction(cnt)
            for p, e in zip(ws, exps):
                if e:
                    w *= p ** e
            out[v] += w
        return dict(out)

    def excursion_total(self, J: JumpSet, n: int) -> Fraction:
        return self.weighted(J, "final", n).get(0, Fraction(0))

    def meander_total(self, J: JumpSet, n: int) -> Fraction:
        return sum(self.weighted(J, "final", n).values(), Fraction(0))


def enumerate_hpaths(n: int):
    """Dyck paths with an extra horizontal step allowed only at altitude 1.

    Yields tuples over ``{1, -1, "H"}`` ending at altitude 0.
    """
    steps: list = []

    def rec(alt: int):
        if len(steps) == n:
            if alt == 0:
                yield tuple(steps)
            return
        if alt > n - len(steps):
            return
        for s in (1, -1, "H"):
            if s == "H":
                if alt != 1:
                    continue
                nxt = 1
            else:
                nxt = alt + s
                if nxt < 0:
                    continue
            steps.append(s)
            yield from rec(nxt)
            steps.pop()

    yield from rec(0)
