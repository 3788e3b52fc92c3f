"""Kernel roots, structural constants, rho0, eta and the regime trichotomy.

Everything here is floating point.  The meander generating function is
evaluated through the large roots only,

    M(z, u) = -1 / (z p_d prod_l (u - v_l(z))),

which stays finite at u = 1 and gives clean u-expansions and analytic
z-derivatives (the v_l satisfy v' = -1 / (z^2 P'(v))).
"""

from __future__ import annotations

import enum
import math
import os
import warnings
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import (
    ClassificationAmbiguous,
    DerivativeUnstable,
    ExtrapolationUnstable,
    PeriodicUnsupported,
    PoleAtZ,
    RootFindFailure,
)
from .model import JumpSet, detect_period


@dataclass(frozen=True)
class Tolerances:
    root: float = 1e-12
    bisect: float = 1e-12
    eta: float = 1e-7
    critical: float = 1e-8
    gap: float = 1e-9

    @classmethod
    def from_env(cls) -> "Tolerances":
        kw = {}
        for name in cls.__dataclass_fields__:
            val = os.environ.get(f"CATPATHS_TOL_{name.upper()}")
            if val:
                kw[name] = float(val)
        return cls(**kw)


TOL = Tolerances.from_env()


class Regime(str, enum.Enum):
    SUBCRITICAL = "SubcriticalPole"
    CRITICAL = "CriticalRoot"
    NOROOT = "NoRoot"


# -- polynomial helpers ---------------------------------------------------

def _P(J: JumpSet, u, k: int = 0):
    """k-th derivative of P at u (scalar or array, real or complex)."""
    out = 0
    for j, p in J.weights:
        c = float(p)
        for i in range(k):
            c *= j - i
        if c:
            out = out + c * u ** (j - k)
    return out


def kernel_polynomial(J: JumpSet, z: float) -> np.ndarray:
    """Ascending coefficients of u^c (1 - z P(u))."""
    c = J.c
    a = np.zeros(c + J.d + 1)
    a[c] += 1.0
    for j, p in J.weights:
        a[j + c] -= z * float(p)
    return a


def _initial_guesses(a: np.ndarray) -> np.ndarray:
    # one circle per edge of the upper convex hull of (k, log|a_k|)
    n = len(a) - 1
    pts = [(k, math.log(abs(x))) for k, x in enumerate(a) if x != 0]
    hull: list = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) <= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    guesses = []
    for (i, yi), (j, yj) in zip(hull, hull[1:]):
        r = math.exp((yi - yj) / (j - i))
        m = j - i
        for t in range(m):
            ang = 2 * math.pi * t / m + 0.4 + 0.1 * len(guesses)
            guesses.append(r * complex(math.cos(ang), math.sin(ang)))
    assert len(guesses) == n
    return np.array(guesses, dtype=complex)


def aberth(a, tol: float = 1e-15, maxiter: int = 500) -> np.ndarray:
    """All roots of the polynomial with ascending coefficients ``a``.

    Aberth-Ehrlich simultaneous iteration from Newton-polygon radii, followed
    by a Newton polish of each root.
    """
    a = np.asarray(a, dtype=complex)
    while len(a) > 1 and a[-1] == 0:
        a = a[:-1]
    n = len(a) - 1
    if n < 1:
        return np.zeros(0, dtype=complex)
    if a[0] == 0:
        raise ValueError("polynomial has a root at 0; divide it out first")
    desc = a[::-1]
    ddesc = np.polyder(desc)
    z = _initial_guesses(a)
    for _ in range(maxiter):
        ratio = np.polyval(desc, z) / np.polyval(ddesc, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        w = ratio / (1.0 - ratio * inv.sum(axis=1))
        z = z - w
        if np.all(np.abs(w) <= tol * np.maximum(1.0, np.abs(z))):
            break
    else:
        res = np.abs(np.polyval(desc, z)) / np.polyval(np.abs(desc), np.abs(z))
        if res.max() > 1e-10:
            raise RootFindFailure(f"Aberth iteration did not converge (residual {res.max():.2e})")
    for _ in range(3):
        d = np.polyval(ddesc, z)
        step = np.where(d != 0, np.polyval(desc, z) / np.where(d != 0, d, 1), 0)
        better = np.abs(np.polyval(desc, z - step)) < np.abs(np.polyval(desc, z))
        z = np.where(better, z - step, z)
    return z


def _clean(r: np.ndarray) -> np.ndarray:
    r = r.copy()
    tiny = np.abs(r.imag) <= 1e-13 * np.abs(r)
    r[tiny] = r[tiny].real
    return r


# -- structural constants -------------------------------------------------

@dataclass
class KernelReport:
    tau: float
    rho: float
    rho1: float
    C: float
    delta: float
    period: int
    Q_at_rho: float | None = None
    rho0: float | None = None
    eta: float | None = None
    regime: Regime | None = None
    errors: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def to_json(self) -> dict:
        d = asdict(self)
        d["regime"] = self.regime.value if self.regime else None
        if d["Q_at_rho"] is not None and math.isinf(d["Q_at_rho"]):
            d["Q_at_rho"] = "inf"
        return d


@lru_cache(maxsize=256)
def structural_constants(J: JumpSet) -> KernelReport:
    """tau, rho, rho1, C, delta and the period of the support."""
    f = lambda u: _P(J, u, 1)
    lo, hi = 1.0, 1.0
    while f(lo) >= 0:
        lo /= 2
        if lo < 1e-300:
            raise RootFindFailure("no sign change of P' near 0")
    while f(hi) <= 0:
        hi *= 2
        if hi > 1e300:
            raise RootFindFailure("no sign change of P' at infinity")
    if f(1.0) == 0:
        tau = 1.0
    else:
        try:
            tau = brentq(f, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500)
        except (RuntimeError, ValueError) as exc:
            raise RootFindFailure(str(exc)) from exc
    Ptau = _P(J, tau)
    rho = 1.0 / Ptau
    return KernelReport(
        tau=tau,
        rho=rho,
        rho1=1.0 / _P(J, 1.0),
        C=math.sqrt(2 * Ptau / _P(J, tau, 2)),
        delta=float(sum(j * p for j, p in J.weights)),
        period=detect_period(J),
        errors={"tau": abs(f(tau)) / _P(J, tau, 2)},
    )


# -- roots ---------------------------------------------------------------

@dataclass(frozen=True)
class KernelRoots:
    z: float
    small: np.ndarray
    large: np.ndarray

    @property
    def u1(self) -> float:
        return float(self.small[np.argmax(np.abs(self.small))].real)

    @property
    def v1(self) -> float:
        return float(self.large[np.argmin(np.abs(self.large))].real)


def kernel_roots(J: JumpSet, z: float, tol: Tolerances = TOL) -> KernelRoots:
    """Small and large roots of 1 - z P(u) = 0 for real 0 < z < rho."""
    sc = structural_constants(J)
    if not 0 < z < sc.rho:
        raise ValueError(f"z must lie in (0, rho={sc.rho}); use kernel_roots_at_rho at rho")
    r = _clean(aberth(kernel_polynomial(J, z)))
    r = r[np.argsort(np.abs(r))]
    small, large = r[: J.c], r[J.c:]
    gap = np.abs(large[0]) - np.abs(small[-1])
    if gap <= tol.gap * sc.tau or np.sum(np.abs(r) < sc.tau) != J.c:
        raise ClassificationAmbiguous(f"small/large roots not separated at z={z} (gap {gap:.2e})")
    return KernelRoots(z, small, large)


@lru_cache(maxsize=256)
def kernel_roots_at_rho(J: JumpSet) -> KernelRoots:
    """Roots at z = rho, where u_1 = v_1 = tau is a double root (divided out exactly)."""
    sc = structural_constants(J)
    tau = sc.tau
    a = kernel_polynomial(J, sc.rho)[::-1]
    q, _ = np.polydiv(a, np.poly([tau, tau]))
    rest = _clean(aberth(q[::-1])) if len(q) > 1 else np.zeros(0, dtype=complex)
    inner = [x for x in rest if abs(x) < tau * (1 - 1e-7)]
    outer = [x for x in rest if abs(x) > tau * (1 + 1e-7)]
    circle = sorted((x for x in rest if tau * (1 - 1e-7) <= abs(x) <= tau * (1 + 1e-7)), key=np.angle)
    # roots on |u| = tau come in coalesced pairs when the support is periodic
    small = inner + circle[0::2] + [tau]
    large = [tau] + circle[1::2] + outer
    if len(small) != J.c or len(large) != J.d:
        raise ClassificationAmbiguous("cannot split roots at z = rho")
    return KernelRoots(sc.rho, np.array(small, dtype=complex), np.array(large, dtype=complex))


# -- evaluation at a point ------------------------------------------------

def _geom_coeffs(v: np.ndarray, K: int, power: int = 1) -> np.ndarray:
    """u-coefficients (k = 0..K) of sum_l 1/(u - v_l)^power, one row per root."""
    k = np.arange(K + 1)
    if power == 1:
        return -(v[:, None] ** (-(k[None, :] + 1)))
    return (k[None, :] + 1) * v[:, None] ** (-(k[None, :] + 2))


class KernelPoint:
    """M(z, u), its u-expansion and derivatives at one real z.

    ``derivatives`` enables the z-derivatives (not available at z = rho,
    where v_1 has a square-root singularity).
    """

    def __init__(self, J: JumpSet, z: float, large: np.ndarray, derivatives: bool = True):
        self.J = J
        self.z = z
        self.v = np.asarray(large, dtype=complex)
        self.pd = float(J.p(J.d))
        self.excluded = sorted(J.excluded)
        self.q = float(J.q)
        L = np.poly(self.v)[::-1]  # ascending coefficients of prod (u - v)
        self.L = L.real
        self.derivatives = derivatives
        if derivatives:
            P1 = _P(J, self.v, 1)
            P2 = _P(J, self.v, 2)
            self.v1 = -1.0 / (z * z * P1)
            self.v2 = 2.0 / (z**3 * P1) + P2 * self.v1 / (z * z * P1 * P1)

    # u-series -------------------------------------------------------
    def m_coeffs(self, K: int) -> np.ndarray:
        """[u^k] M(z, u) for k = 0..K."""
        L = self.L
        g = np.zeros(K + 1)
        g[0] = 1.0 / L[0]
        for k in range(1, K + 1):
            top = min(k, len(L) - 1)
            g[k] = -np.dot(L[1: top + 1], g[k - top: k][::-1]) / L[0]
        return -g / (self.z * self.pd)

    def m_coeffs_z(self, K: int):
        """(M_k, dM_k/dz, d2M_k/dz2) for k = 0..K."""
        self._need_derivs()
        m = self.m_coeffs(K)
        z = self.z
        G1 = _geom_coeffs(self.v, K, 1)
        G2 = _geom_coeffs(self.v, K, 2)
        L1 = (self.v1[:, None] * G1).sum(axis=0).real
        L1[0] -= 1.0 / z
        dL1 = (self.v2[:, None] * G1 + (self.v1**2)[:, None] * G2).sum(axis=0).real
        dL1[0] += 1.0 / (z * z)
        mz = np.convolve(m, L1)[: K + 1]
        mzz = np.convolve(m, np.convolve(L1, L1)[: K + 1] + dL1)[: K + 1]
        return m, mz, mzz

    def q_coeffs(self, K: int) -> np.ndarray:
        """[u^k] Q(z, u): catastrophe of size k ending an excursion."""
        out = self.z * self.q * self.m_coeffs(K)
        for h in self.excluded:
            if h <= K:
                out[h] = 0.0
        return out

    # closed forms at a real u ---------------------------------------
    def M(self, u: float = 1.0) -> float:
        return float((-1.0 / (self.z * self.pd * np.prod(u - self.v))).real)

    def _S(self, u: float, K: int | None = None):
        """S(z,u) = sum_{h in A} u^h M_h and its derivatives, as a dict."""
        out = dict(S=0.0, Sz=0.0, Szz=0.0, Su=0.0, Suu=0.0, Szu=0.0)
        if not self.excluded:
            return out
        top = self.excluded[-1]
        if self.derivatives:
            m, mz, mzz = self.m_coeffs_z(top)
        else:
            m = self.m_coeffs(top)
            mz = mzz = np.full(top + 1, np.nan)
        for h in self.excluded:
            uh = u**h
            duh = h * u ** (h - 1) if h >= 1 else 0.0
            d2uh = h * (h - 1) * u ** (h - 2) if h >= 2 else 0.0
            out["S"] += uh * m[h]
            out["Sz"] += uh * mz[h]
            out["Szz"] += uh * mzz[h]
            out["Su"] += duh * m[h]
            out["Suu"] += d2uh * m[h]
            out["Szu"] += duh * mz[h]
        return out

    def Q(self, u: float = 1.0) -> float:
        return self.z * self.q * (self.M(u) - self._S(u)["S"])

    def E(self) -> float:
        return self.M(0.0)

    def u_derivs(self, u: float = 1.0):
        """M, M_u, M_uu at u."""
        M = -1.0 / (self.z * self.pd * np.prod(u - self.v))
        r1 = 1.0 / (u - self.v)
        Lu = -r1.sum()
        Muu = M * (Lu * Lu + (r1 * r1).sum())
        return float(M.real), float((M * Lu).real), float(Muu.real)

    def z_derivs(self, u: float = 1.0):
        """M_z, M_zz, M_zu at u."""
        self._need_derivs()
        z = self.z
        M = -1.0 / (z * self.pd * np.prod(u - self.v))
        r1 = 1.0 / (u - self.v)
        L1 = -1.0 / z + (self.v1 * r1).sum()
        dL1 = 1.0 / (z * z) + (self.v2 * r1 + self.v1**2 * r1 * r1).sum()
        Lu = -r1.sum()
        Mzu = M * (L1 * Lu - (self.v1 * r1 * r1).sum())
        return float((M * L1).real), float((M * (L1 * L1 + dL1)).real), float(Mzu.real)

    def Q_derivs(self, u: float = 1.0) -> dict:
        """Q and its first and second partial derivatives at (z, u)."""
        z, q = self.z, self.q
        M, Mu, Muu = self.u_derivs(u)
        S = self._S(u)
        out = dict(
            Q=z * q * (M - S["S"]),
            Qu=z * q * (Mu - S["Su"]),
            Quu=z * q * (Muu - S["Suu"]),
        )
        if self.derivatives:
            Mz, Mzz, Mzu = self.z_derivs(u)
            out["Qz"] = q * (M - S["S"]) + z * q * (Mz - S["Sz"])
            out["Qzz"] = 2 * q * (Mz - S["Sz"]) + z * q * (Mzz - S["Szz"])
            out["Qzu"] = q * (Mu - S["Su"]) + z * q * (Mzu - S["Szu"])
        return out

    def _need_derivs(self):
        if not self.derivatives:
            raise DerivativeUnstable("z-derivatives are singular at z = rho")


def kernel_point(J: JumpSet, z: float, tol: Tolerances = TOL) -> KernelPoint:
    sc = structural_constants(J)
    if z == sc.rho:
        return KernelPoint(J, z, kernel_roots_at_rho(J).large, derivatives=False)
    return KernelPoint(J, z, kernel_roots(J, z, tol).large)


def _check_pole(J: JumpSet, z: float):
    sc = structural_constants(J)
    if sc.delta >= 0 and z >= sc.rho1:
        raise PoleAtZ(f"M(z) has a pole at rho1={sc.rho1}; z={z} is beyond it")


def evaluate_gfs(J: JumpSet, z: float, tol: Tolerances = TOL) -> dict:
    """Numeric E, M, M_h (h excluded from catastrophes), Q and D at real z in (0, rho]."""
    kp = kernel_point(J, z, tol)
    top = max(J.excluded, default=0)
    mh = kp.m_coeffs(top)
    out = {"E": float(mh[0]), "M_h": {h: float(mh[h]) for h in sorted(J.excluded)}}
    sc = structural_constants(J)
    if sc.delta >= 0 and z >= sc.rho1:
        out.update(M=math.inf, Q=math.inf, D=0.0)
        raise PoleAtZ(f"M(z) has a pole at rho1={sc.rho1}")
    out["M"] = kp.M(1.0)
    out["Q"] = kp.Q(1.0)
    out["D"] = 1.0 / (1.0 - out["Q"]) if out["Q"] != 1.0 else math.inf
    return out


def excursion_gf_small_roots(J: JumpSet, z: float) -> float:
    """E(z) from the product of small roots (independent of the large-root route)."""
    r = kernel_roots(J, z)
    val = (-1) ** (J.c - 1) / (float(J.p(-J.c)) * z) * np.prod(r.small)
    return float(val.real)


def meander_gf_small_roots(J: JumpSet, z: float) -> float:
    r = kernel_roots(J, z)
    _check_pole(J, z)
    return float((np.prod(1 - r.small) / (1 - z * _P(J, 1.0))).real)


# -- rho0, eta and the regime ---------------------------------------------

def Q_at(J: JumpSet, z: float, tol: Tolerances = TOL) -> float:
    _check_pole(J, z)
    return kernel_point(J, z, tol).Q(1.0)


@lru_cache(maxsize=256)
def Q_at_rho(J: JumpSet) -> float:
    sc = structural_constants(J)
    if sc.delta >= 0:
        return math.inf
    return kernel_point(J, sc.rho).Q(1.0)


def find_rho0(J: JumpSet, tol: Tolerances = TOL) -> float | None:
    """Smallest positive root of Q(z) = 1 on (0, rho], or None."""
    sc = structural_constants(J)
    f = lambda z: Q_at(J, z, tol) - 1.0
    lo = sc.rho * 1e-6
    if sc.delta >= 0:
        hi = None
        for k in range(1, 60):
            b = sc.rho1 * (1 - 2.0**-k)
            if f(b) > 0:
                hi = b
                break
            lo = b
        if hi is None:
            raise RootFindFailure("could not bracket rho0 below rho1")
    else:
        qr = Q_at_rho(J)
        if abs(qr - 1.0) <= tol.critical:
            return sc.rho
        if qr < 1.0:
            return None
        hi = sc.rho
    try:
        return brentq(f, lo, hi, xtol=tol.bisect * 1e-3, rtol=4 * np.finfo(float).eps, maxiter=500)
    except (RuntimeError, ValueError) as exc:
        raise RootFindFailure(str(exc)) from exc


@dataclass(frozen=True)
class EtaEstimate:
    value: float
    error: float
    method: str


def eta_closed_form(J: JumpSet, u: float = 1.0) -> float:
    """eta(u) from the square-root term of v_1 at rho: v_1 ~ tau + C sqrt(1 - z/rho)."""
    sc = structural_constants(J)
    kp = kernel_point(J, sc.rho)
    tau = sc.tau
    # M(rho, w) / (w - tau) as a w-series: extra root tau in the large factor
    ext = KernelPoint(J, sc.rho, np.append(kp.v, tau), derivatives=False)
    top = max(kp.excluded, default=0)
    coeffs = ext.m_coeffs(top)
    val = ext.M(u)
    for h in kp.excluded:
        val -= u**h * coeffs[h]
    return -sc.C * sc.rho * kp.q * val


def puiseux_eta(J: JumpSet, u: float = 1.0, tol: Tolerances = TOL, levels: int = 9,
                s0: float = 0.2, allow_periodic: bool = False) -> EtaEstimate:
    """eta(u) by Richardson extrapolation of (Q(rho,u) - Q(rho(1-s^2),u)) / s as s -> 0."""
    sc = structural_constants(J)
    if sc.period > 1 and not allow_periodic:
        raise PeriodicUnsupported(f"support has period {sc.period}")
    if sc.delta >= 0:
        raise PoleAtZ("Q is infinite at rho when the drift is non-negative")
    q_rho = kernel_point(J, sc.rho).Q(u)
    T: list = []
    err = math.inf
    for k in range(levels):
        s = s0 / 2**k
        row = [(q_rho - kernel_point(J, sc.rho * (1 - s * s), tol).Q(u)) / s]
        for j in range(1, k + 1):
            row.append(row[j - 1] + (row[j - 1] - T[k - 1][j - 1]) / (2**j - 1))
        T.append(row)
        if k >= 2:
            err = abs(T[k][k] - T[k - 1][k - 1])
    value = T[-1][-1]
    if not math.isfinite(value) or err > max(tol.eta, tol.eta * abs(value)):
        raise ExtrapolationUnstable(f"eta estimate {value} with error {err:.2e}")
    return EtaEstimate(value, err, "richardson")


def critical_q(J: JumpSet, max_denominator: int = 10**12):
    """The catastrophe weight making Q(rho) = 1 (Q is linear in q)."""
    from fractions import Fraction

    qr = Q_at_rho(J)
    if not math.isfinite(qr):
        raise ValueError("critical q exists only for negative drift")
    return Fraction(float(J.q) / qr).limit_denominator(max_denominator)


def classify_regime(J: JumpSet, tol: Tolerances = TOL, with_eta: bool | None = None) -> KernelReport:
    """Complete report: rho0, Q(rho), regime and (when relevant) eta.

    Periodic supports are classified too; ``report.warnings`` notes that the
    rho-singularity analysis then ignores the other singularities on the circle.
    """
    base = structural_constants(J)
    rep = KernelReport(**{k: getattr(base, k) for k in ("tau", "rho", "rho1", "C", "delta", "period")})
    rep.errors = dict(base.errors)
    rep.Q_at_rho = Q_at_rho(J)
    rep.rho0 = find_rho0(J, tol)
    if rep.rho0 is None:
        rep.regime = Regime.NOROOT
    elif rep.rho0 == rep.rho:
        rep.regime = Regime.CRITICAL
        msg = f"|Q(rho) - 1| = {abs(rep.Q_at_rho - 1):.2e} is inside the critical window {tol.critical:g}"
        rep.warnings.append(msg)
        warnings.warn(msg, stacklevel=2)
    else:
        rep.regime = Regime.SUBCRITICAL
        rep.errors["rho0"] = tol.bisect
    if rep.period > 1 and rep.regime is not Regime.SUBCRITICAL:
        rep.warnings.append(f"support has period {rep.period}; other singularities lie on |z| = rho")
    if with_eta is None:
        with_eta = rep.regime is not Regime.SUBCRITICAL
    if with_eta and rep.delta < 0:
        rep.eta = eta_closed_form(J)
        try:
            est = puiseux_eta(J, tol=tol, allow_periodic=True)
            rep.errors["eta"] = max(est.error, abs(est.value - rep.eta))
        except ExtrapolationUnstable as exc:
            rep.warnings.append(str(exc))
    return rep
