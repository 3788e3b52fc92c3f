"""Dyck paths with catastrophes versus 1-horizontal Dyck paths.

A 1-horizontal Dyck path uses +1, -1 and a horizontal step H that may only
be taken at altitude 1.  Both families are cut into arches at their returns
to 0; arches ending with a catastrophe of size h correspond to arches with
h - 1 horizontal steps, and classical arches are left alone.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidHPath, NotAnExcursion, UnsupportedJumpSet
from .model import Catastrophe, Jump, JumpSet, Path, validate_path

H = "H"
H_TOKEN = "0h"


@dataclass(frozen=True)
class Arch:
    steps: tuple
    kind: str  # "cat" or "nocat"


@dataclass(frozen=True)
class HPath:
    steps: tuple

    def __post_init__(self):
        alt = 0
        for i, s in enumerate(self.steps):
            if s == H:
                if alt != 1:
                    raise InvalidHPath(f"step {i}: horizontal step at altitude {alt}")
            elif s in (1, -1):
                alt += s
                if alt < 0:
                    raise InvalidHPath(f"step {i}: altitude would become {alt}")
            else:
                raise InvalidHPath(f"step {i}: unknown step {s!r}")

    @property
    def altitudes(self) -> tuple:
        alts = [0]
        for s in self.steps:
            alts.append(alts[-1] + (0 if s == H else s))
        return tuple(alts)

    @property
    def is_excursion(self) -> bool:
        return self.altitudes[-1] == 0

    def __len__(self):
        return len(self.steps)

    def __str__(self):
        return " ".join(H_TOKEN if s == H else str(s) for s in self.steps)

    @classmethod
    def parse(cls, line: str) -> "HPath":
        steps = []
        for tok in line.split():
            if tok.lower() in (H_TOKEN, "h"):
                steps.append(H)
            else:
                try:
                    steps.append(int(tok))
                except ValueError:
                    raise InvalidHPath(f"bad token {tok!r}") from None
        return cls(tuple(steps))


def arch_decompose(p: Path) -> list:
    """Cut an excursion at its returns to 0."""
    if not p.is_excursion:
        raise NotAnExcursion(f"path ends at altitude {p.final_altitude}")
    arches, cur = [], []
    for s, alt in zip(p.steps, p.altitudes[1:]):
        cur.append(s)
        if alt == 0:
            arches.append(Arch(tuple(cur), "cat" if isinstance(s, Catastrophe) else "nocat"))
            cur = []
    return arches


def _require_dyck(J: JumpSet):
    if J.support != (-1, 1) or J.excluded != frozenset({0, 1}):
        raise UnsupportedJumpSet("the bijection needs jumps {-1,+1} with the default catastrophe policy")


def _arch_to_h(steps: tuple) -> list:
    last = steps[-1]
    out = [s.j for s in steps[:-1]]
    if not isinstance(last, Catastrophe):
        return out + [last.j]
    h = last.h
    # last up-step into each level 1..h; keep the one into level 1
    lastup = {}
    alt = 0
    for i, j in enumerate(out):
        if j == 1:
            lastup[alt + 1] = i
        alt += j
    for level in range(2, h + 1):
        out[lastup[level]] = H
    return out + [-1]


def to_horizontal(p: Path) -> HPath:
    _require_dyck(p.jumpset)
    steps = []
    for arch in arch_decompose(p):
        steps.extend(_arch_to_h(arch.steps))
    return HPath(tuple(steps))


def from_horizontal(hp: HPath, J: JumpSet | None = None) -> Path:
    from .model import DYCK

    J = J or DYCK
    _require_dyck(J)
    if not hp.is_excursion:
        raise InvalidHPath("1-horizontal path does not end at altitude 0")
    out: list = []
    cur: list = []
    alt = 0
    for s in hp.steps:
        cur.append(s)
        alt += 0 if s == H else s
        if alt == 0:
            n_h = sum(1 for x in cur if x == H)
            if n_h:
                out.extend(Jump(1) if x == H else Jump(x) for x in cur[:-1])
                out.append(Catastrophe(n_h + 1))
            else:
                out.extend(Jump(x) for x in cur)
            cur = []
    return validate_path(J, out)
