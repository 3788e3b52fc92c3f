"""Jump sets, catastrophe policies, paths and per-path statistics.

A jump set is the weighted Laurent polynomial ``P(u) = sum_j p_j u^j`` on
``{-c, ..., d}`` together with the catastrophe weight ``q``.  A catastrophe
sends the walk from altitude ``h`` straight to 0; which ``h`` are allowed is
decided by the :class:`CatastrophePolicy`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

from .errors import (
    EmptySupport,
    IllegalCatastrophe,
    InvalidJumpSet,
    NegativeAltitude,
    UnknownJump,
)

Rational = Union[int, Fraction, str]


def as_fraction(x: Rational) -> Fraction:
    if isinstance(x, float):
        raise TypeError("weights must be exact; pass a Fraction or an 'a/b' string")
    return Fraction(x)


@dataclass(frozen=True)
class CatastrophePolicy:
    """Which source altitudes may host a catastrophe.

    ``kind`` is ``"default"`` (every positive altitude ``h`` such that ``-h`` is
    not a jump), ``"anywhere"`` (every altitude, including 0) or ``"excluded"``
    (every altitude outside ``excluded``).
    """

    kind: str = "default"
    excluded: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in ("default", "anywhere", "excluded"):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if any(h < 0 for h in self.excluded):
            raise ValueError("excluded altitudes must be non-negative")

    @classmethod
    def default(cls) -> "CatastrophePolicy":
        return cls("default")

    @classmethod
    def anywhere(cls) -> "CatastrophePolicy":
        return cls("anywhere")

    @classmethod
    def excluding(cls, altitudes: Iterable[int]) -> "CatastrophePolicy":
        return cls("excluded", frozenset(int(h) for h in altitudes))

    @classmethod
    def parse(cls, text: str) -> "CatastrophePolicy":
        text = text.strip().lower()
        if text in ("", "default"):
            return cls.default()
        if text in ("anywhere", "from-anywhere"):
            return cls.anywhere()
        if text.startswith("exclude:") or text.startswith("excluded:"):
            body = re.split(r"[,;]", text.split(":", 1)[1])
            return cls.excluding(int(t) for t in body if t.strip())
        raise ValueError(f"cannot parse policy {text!r}")

    def __str__(self):
        if self.kind == "excluded":
            return "exclude:" + ";".join(str(h) for h in sorted(self.excluded))
        return self.kind


@dataclass(frozen=True)
class JumpSet:
    """Weighted jump set with catastrophes.

    Build it with :meth:`from_weights` or :meth:`parse`; the raw constructor
    takes ``weights`` as a sorted tuple of ``(j, p_j)`` pairs with ``p_j > 0``.
    """

    weights: tuple
    q: Fraction
    policy: CatastrophePolicy = field(default_factory=CatastrophePolicy.default)
    excluded: frozenset = field(init=False)

    def __post_init__(self):
        if not self.weights:
            raise EmptySupport("jump set has no jump of positive weight")
        for j, p in self.weights:
            if not isinstance(p, Fraction) or p <= 0:
                raise InvalidJumpSet(f"weight of jump {j} must be a positive Fraction")
        if not isinstance(self.q, Fraction) or self.q <= 0:
            raise InvalidJumpSet("catastrophe weight q must be a positive rational")
        js = [j for j, _ in self.weights]
        if js != sorted(set(js)):
            raise InvalidJumpSet("jumps must be distinct and sorted")
        if js[0] >= 0 or js[-1] <= 0:
            raise InvalidJumpSet("need at least one negative and one positive jump")
        if self.policy.kind == "default":
            excl = frozenset({0} | {-j for j in js if j < 0})
        elif self.policy.kind == "anywhere":
            excl = frozenset()
        else:
            excl = self.policy.excluded
        object.__setattr__(self, "excluded", excl)

    @classmethod
    def from_weights(
        cls,
        weights: Mapping[int, Rational],
        q: Rational = 1,
        policy: CatastrophePolicy | str | None = None,
    ) -> "JumpSet":
        if isinstance(policy, str):
            policy = CatastrophePolicy.parse(policy)
        pairs = []
        for j, p in sorted(weights.items()):
            p = as_fraction(p)
            if p < 0:
                raise InvalidJumpSet(f"negative weight for jump {j}")
            if p > 0:
                pairs.append((int(j), p))
        return cls(tuple(pairs), as_fraction(q), policy or CatastrophePolicy.default())

    @classmethod
    def parse(cls, text: str, policy: CatastrophePolicy | str | None = None) -> "JumpSet":
        """Parse ``"-1:1,1:1,q=1"``; whitespace is ignored."""
        text = re.sub(r"\s+", "", text)
        weights: dict[int, Fraction] = {}
        q = None
        for tok in filter(None, text.split(",")):
            if tok.startswith("q="):
                q = Fraction(tok[2:])
            elif tok.startswith("policy="):
                policy = policy or tok[len("policy="):]
            else:
                j, _, p = tok.partition(":")
                if not _:
                    raise InvalidJumpSet(f"bad token {tok!r}, expected j:weight")
                j = int(j)
                if j in weights:
                    raise InvalidJumpSet(f"jump {j} given twice")
                weights[j] = Fraction(p)
        if q is None:
            raise InvalidJumpSet("missing q=<rational>")
        return cls.from_weights(weights, q, policy)

    def __str__(self):
        body = ",".join(f"{j}:{p}" for j, p in self.weights)
        pol = "" if self.policy.kind == "default" else f",policy={self.policy}"
        return f"{body},q={self.q}{pol}"

    @property
    def c(self) -> int:
        return -self.weights[0][0]

    @property
    def d(self) -> int:
        return self.weights[-1][0]

    @property
    def support(self) -> tuple:
        return tuple(j for j, _ in self.weights)

    @property
    def weight_map(self) -> dict:
        return dict(self.weights)

    def p(self, j: int) -> Fraction:
        return self.weight_map.get(j, Fraction(0))

    def permits(self, altitude: int) -> bool:
        """True if a catastrophe may start from ``altitude``."""
        return altitude >= 0 and altitude not in self.excluded

    def with_q(self, q: Rational) -> "JumpSet":
        return JumpSet(self.weights, as_fraction(q), self.policy)

    def with_policy(self, policy: CatastrophePolicy | str) -> "JumpSet":
        if isinstance(policy, str):
            policy = CatastrophePolicy.parse(policy)
        return JumpSet(self.weights, self.q, policy)

    def scaled_integers(self):
        """Return ``(L, w, wq)`` with integer weights ``w_j = L p_j``, ``wq = L q``.

        A length-n path then has weight ``(integer) / L**n``, which lets the
        series code run on Python ints.
        """
        dens = [p.denominator for _, p in self.weights] + [self.q.denominator]
        L = reduce(math.lcm, dens, 1)
        w = {j: int(p * L) for j, p in self.weights}
        return L, w, int(self.q * L)

    def float_weights(self) -> dict:
        return {j: float(p) for j, p in self.weights}


DYCK = JumpSet.from_weights({-1: 1, 1: 1}, q=1)
MOTZKIN = JumpSet.from_weights({-1: 1, 0: 1, 1: 1}, q=1)


@dataclass(frozen=True)
class Jump:
    j: int

    def __str__(self):
        return str(self.j)


@dataclass(frozen=True)
class Catastrophe:
    h: int

    def __str__(self):
        return f"C{self.h}"


Step = Union[Jump, Catastrophe]


class ParamVector(NamedTuple):
    final_altitude: int
    n_catastrophes: int
    n_returns_to_zero: int
    cumulative_cat_size: int
    waiting_time_first_cat: int
    first_cat_size: int


@dataclass(frozen=True)
class Path:
    jumpset: JumpSet
    steps: tuple
    altitudes: tuple
    weight: Fraction

    def __len__(self):
        return len(self.steps)

    def __str__(self):
        return format_steps(self.steps)

    @property
    def final_altitude(self) -> int:
        return self.altitudes[-1]

    @property
    def is_excursion(self) -> bool:
        return self.altitudes[-1] == 0

    @property
    def catastrophe_sizes(self) -> list:
        return [s.h for s in self.steps if isinstance(s, Catastrophe)]


def _coerce_step(s) -> Step:
    if isinstance(s, (Jump, Catastrophe)):
        return s
    if isinstance(s, int):
        return Jump(s)
    if isinstance(s, str):
        return parse_step(s)
    raise TypeError(f"cannot interpret {s!r} as a step")


def validate_path(J: JumpSet, steps: Iterable) -> Path:
    """Check a step sequence against ``J`` and return the :class:`Path`.

    Integers are read as jumps and ``"C<h>"`` strings as catastrophes.
    Raises the matching :class:`~catpaths.errors.InvalidPath` subclass at the
    first offending index.
    """
    wmap = J.weight_map
    alt = 0
    alts = [0]
    weight = Fraction(1)
    out = []
    for i, raw in enumerate(steps):
        s = _coerce_step(raw)
        if isinstance(s, Jump):
            if s.j not in wmap:
                raise UnknownJump(i, s.j)
            alt += s.j
            if alt < 0:
                raise NegativeAltitude(i, alt)
            weight *= wmap[s.j]
        else:
            if s.h != alt:
                raise IllegalCatastrophe(i, alt, f"catastrophe of size {s.h} from a different altitude")
            if not J.permits(alt):
                raise IllegalCatastrophe(i, alt)
            alt = 0
            weight *= J.q
        out.append(s)
        alts.append(alt)
    return Path(J, tuple(out), tuple(alts), weight)


def path_statistics(p: Path) -> ParamVector:
    n_cat = 0
    cum = 0
    wait = 0
    first = 0
    returns = 0
    for i, s in enumerate(p.steps):
        if p.altitudes[i + 1] == 0:
            returns += 1
        if isinstance(s, Catastrophe):
            if n_cat == 0:
                wait = i + 1
                first = s.h
            n_cat += 1
            cum += s.h
    return ParamVector(p.altitudes[-1], n_cat, returns, cum, wait, first)


def detect_period(J: JumpSet | Sequence[int]) -> int:
    """Largest p dividing every difference of support elements (1 = aperiodic)."""
    support = J.support if isinstance(J, JumpSet) else tuple(J)
    if not support:
        raise EmptySupport("empty support")
    g = 0
    for j in support[1:]:
        g = math.gcd(g, j - support[0])
    return g if g else 1


def parse_step(tok: str) -> Step:
    tok = tok.strip()
    if tok[:1] in ("C", "c"):
        return Catastrophe(int(tok[1:]))
    return Jump(int(tok))


def parse_steps(line: str) -> list:
    return [parse_step(t) for t in line.split()]


def format_steps(steps: Iterable) -> str:
    return " ".join(str(_coerce_step(s)) for s in steps)
