"""Limit laws of the six path parameters, one function per parameter.

Each law function classifies the regime first: a pole of D below rho gives
Gaussian laws (or pole-driven discrete ones), a critical root gives Rayleigh
laws, and no root leaves discrete laws built from the square-root terms at rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernel as K
from . import series as S
from .errors import DegenerateVariance, PeriodicUnsupported, TailBoundExceeded, UnknownParam
from .model import JumpSet

LAW_PARAMS = ("catastrophes", "returns", "final_altitude", "cumulative", "avg_cat", "waiting")
TAIL_TARGET = 1e-8


@dataclass
class LimitLaw:
    regime: K.Regime
    constants: dict = field(default_factory=dict, kw_only=True)

    variant = "LimitLaw"

    def parameters(self) -> dict:
        return {}

    def to_json(self) -> dict:
        out = {"variant": self.variant, "regime": self.regime.value, "parameters": self.parameters(),
               "constants": self.constants}
        if isinstance(self, DiscretePMF):
            out["pmf"] = list(self.pmf)
            out["tail_bound"] = self.tail_bound
        return out


@dataclass
class Gaussian(LimitLaw):
    """(X_n - mu n) / sqrt(sigma2 n) tends to N(0, 1)."""

    mu: float
    sigma2: float
    variant = "Gaussian"

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise DegenerateVariance(f"sigma^2 = {self.sigma2}")

    def parameters(self):
        return {"mu": self.mu, "sigma2": self.sigma2}

    def mean(self, n: int) -> float:
        return self.mu * n


@dataclass
class Rayleigh(LimitLaw):
    """X_n / (theta sqrt(n)) tends to the density x exp(-x^2/2)."""

    theta: float
    variant = "Rayleigh"

    def parameters(self):
        return {"theta": self.theta}

    def mean(self, n: int) -> float:
        return self.theta * math.sqrt(math.pi / 2 * n)


@dataclass
class DiscretePMF(LimitLaw):
    pmf: tuple
    tail_bound: float
    variant = "DiscretePMF"

    @property
    def K(self) -> int:
        return len(self.pmf) - 1

    def parameters(self):
        return {"K": self.K}

    def mean(self, n: int | None = None) -> float:
        return float(sum(k * p for k, p in enumerate(self.pmf)))


@dataclass
class GeometricShifted(DiscretePMF):
    """P(X = k) = (1 - lam) lam^(k - shift) for k >= shift."""

    lam: float = 0.0
    shift: int = 0
    variant = "GeometricShifted"

    def parameters(self):
        return {"lambda": self.lam, "shift": self.shift, "K": self.K}


@dataclass
class NegBinomMixture(DiscretePMF):
    """Weighted sum of shifted negative binomials; ``components`` holds (weight, r, lam, shift)."""

    components: tuple = ()
    variant = "NegBinomMixture"

    def parameters(self):
        return {"components": [dict(weight=w, r=r, lam=l, shift=s) for w, r, l, s in self.components],
                "K": self.K}


def negbinom_pmf(r: int, lam: float, K: int, shift: int = 0) -> np.ndarray:
    out = np.zeros(K + 1)
    for k in range(shift, K + 1):
        j = k - shift
        out[k] = math.comb(j + r - 1, j) * lam**j * (1 - lam) ** r
    return out


def _mixture(comps, regime, K, consts) -> NegBinomMixture:
    pmf = sum(w * negbinom_pmf(r, lam, K, s) for w, r, lam, s in comps)
    return NegBinomMixture(regime, tuple(float(x) for x in pmf), _tail(pmf, 1.0), components=tuple(comps),
                           constants=consts)


def _tail(pmf, total: float) -> float:
    return float(max(0.0, abs(total - float(np.sum(pmf)))))


def _report(J: JumpSet, allow_periodic: bool) -> K.KernelReport:
    rep = K.classify_regime(J, with_eta=True)
    if rep.period > 1 and rep.regime is not K.Regime.SUBCRITICAL and not allow_periodic:
        raise PeriodicUnsupported(f"support has period {rep.period}")
    return rep


def _sub_point(J: JumpSet, rep: K.KernelReport):
    kp = K.kernel_point(J, rep.rho0)
    return kp, kp.Q_derivs()


def _pole_moments(h1: float, h2: float, r: float):
    # sequence of components counted by h, evaluated at its root r
    mu = 1.0 / (r * h1)
    sigma2 = (r * h2 + h1 - r * h1 * h1) / (r * r * h1**3)
    return mu, sigma2


def _common(rep: K.KernelReport) -> dict:
    return {k: getattr(rep, k) for k in ("tau", "rho", "C", "delta", "rho0", "eta", "Q_at_rho")}


def law_catastrophes(J: JumpSet, K_max: int = 200, allow_periodic: bool = False) -> LimitLaw:
    rep = _report(J, allow_periodic)
    consts = _common(rep)
    if rep.regime is K.Regime.SUBCRITICAL:
        _, d = _sub_point(J, rep)
        mu, s2 = _pole_moments(d["Qz"], d["Qzz"], rep.rho0)
        consts.update(Qz=d["Qz"], Qzz=d["Qzz"])
        return Gaussian(rep.regime, mu, s2, constants=consts)
    if rep.regime is K.Regime.CRITICAL:
        return Rayleigh(rep.regime, math.sqrt(2) / rep.eta, constants=consts)
    lam = rep.Q_at_rho
    D = 1.0 / (1.0 - lam)
    a, b = rep.eta * D * D, rep.C / rep.tau * D
    comps = [(a / (a + b), 2, lam, 1), (b / (a + b), 1, lam, 0)]
    return _mixture(comps, rep.regime, K_max, consts)


def law_returns(J: JumpSet, K_max: int = 200, allow_periodic: bool = False) -> LimitLaw:
    rep = _report(J, allow_periodic)
    consts = _common(rep)
    if rep.regime is K.Regime.SUBCRITICAL:
        kp, d = _sub_point(J, rep)
        m, mz, _ = kp.m_coeffs_z(0)
        E, Ez = m[0], mz[0]
        # A = 1 - (1 - Q)/E; at rho0 the (1 - Q) terms vanish
        A1 = d["Qz"] / E
        A2 = d["Qzz"] / E - 2 * d["Qz"] * Ez / E**2
        mu, s2 = _pole_moments(A1, A2, rep.rho0)
        consts.update(A1=A1, A2=A2)
        return Gaussian(rep.regime, mu, s2, constants=consts)
    E = K.kernel_point(J, rep.rho).E()
    if rep.regime is K.Regime.CRITICAL:
        return Rayleigh(rep.regime, math.sqrt(2) * E / rep.eta, constants=consts)
    F0 = E / (1.0 - rep.Q_at_rho)
    lam = 1.0 - 1.0 / F0
    consts["F0_at_rho"] = F0
    return _mixture([(1.0, 2, lam, 1)], rep.regime, K_max, consts)


def _series_recip(a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    out[0] = 1.0 / a[0]
    for k in range(1, len(a)):
        out[k] = -np.dot(a[1: k + 1], out[:k][::-1]) / a[0]
    return out


def law_final_altitude(J: JumpSet, K_max: int = 40, allow_periodic: bool = False) -> DiscretePMF:
    rep = _report(J, allow_periodic)
    consts = _common(rep)
    z = rep.rho if rep.regime is K.Regime.NOROOT else rep.rho0
    kp = K.kernel_point(J, z)
    omega = kp.m_coeffs(K_max) / kp.M(1.0)
    if rep.regime is K.Regime.NOROOT:
        D = 1.0 / (1.0 - rep.Q_at_rho)
        tau, C = rep.tau, rep.C
        pref = (C / tau) * tau ** -np.arange(K_max + 1.0)
        pref[0] += rep.eta * D
        pref /= rep.eta * D + C / (tau - 1)
        omega = np.convolve(omega, pref)[: K_max + 1]
    law = DiscretePMF(rep.regime, tuple(float(x) for x in omega), _tail(omega, 1.0), constants=consts)
    if J.d == 1 and rep.regime is not K.Regime.NOROOT:
        lam = 1.0 / K.kernel_point(J, z).v[0].real
        law = GeometricShifted(rep.regime, law.pmf, law.tail_bound, lam=lam, shift=0, constants=consts)
    return law


def _gaussian_cumulative(d: dict, r: float):
    """Mean and variance per step of a sum of component sizes, pole at r."""
    Qz, Qzz, Qu, Quu, Qzu = d["Qz"], d["Qzz"], d["Qu"], d["Quu"], d["Qzu"]
    mu = Qu / (r * Qz)
    sigma2 = mu * mu + mu + (r * Qzz * mu * mu - 2 * Qzu * mu + Quu / r) / Qz
    return mu, sigma2


def law_cumulative(J: JumpSet, K_max: int = 200, allow_periodic: bool = False) -> LimitLaw:
    rep = _report(J, allow_periodic)
    consts = _common(rep)
    if rep.regime is K.Regime.SUBCRITICAL:
        _, d = _sub_point(J, rep)
        mu, s2 = _gaussian_cumulative(d, rep.rho0)
        consts.update({k: d[k] for k in ("Qz", "Qzz", "Qu", "Quu", "Qzu")})
        return Gaussian(rep.regime, mu, s2, constants=consts)
    kp = K.kernel_point(J, rep.rho)
    if rep.regime is K.Regime.CRITICAL:
        Qu = kp.Q_derivs(1.0)["Qu"]
        consts["Qu"] = Qu
        return Rayleigh(rep.regime, math.sqrt(2) * Qu / rep.eta, constants=consts)
    D = 1.0 / (1.0 - rep.Q_at_rho)
    Du = _series_recip(np.r_[1.0, np.zeros(K_max)] - kp.q_coeffs(K_max))
    eta_u = eta_series(J, K_max)
    num = np.convolve(eta_u, np.convolve(Du, Du)[: K_max + 1])[: K_max + 1] + rep.C / rep.tau * Du
    pmf = num / (rep.eta * D * D + rep.C / rep.tau * D)
    return DiscretePMF(rep.regime, tuple(float(x) for x in pmf), _tail(pmf, 1.0), constants=consts)


def eta_series(J: JumpSet, K_max: int) -> np.ndarray:
    """u-coefficients of eta(u), the square-root coefficient of Q(z, u) at rho."""
    sc = K.structural_constants(J)
    kp = K.kernel_point(J, sc.rho)
    ext = K.KernelPoint(J, sc.rho, np.append(kp.v, sc.tau), derivatives=False)
    out = -sc.C * sc.rho * float(J.q) * ext.m_coeffs(K_max)
    for h in J.excluded:
        if h <= K_max:
            out[h] = 0.0
    return out


def law_avg_catastrophe(J: JumpSet, K_max: int = 80, allow_periodic: bool = False,
                        tail_target: float = TAIL_TARGET) -> DiscretePMF:
    rep = _report(J, allow_periodic)
    consts = _common(rep)
    if rep.regime is not K.Regime.NOROOT:
        kp = K.kernel_point(J, rep.rho0)
        pmf = kp.q_coeffs(K_max)
        total = kp.Q(1.0)
    else:
        kp = K.kernel_point(J, rep.rho)
        D = 1.0 / (1.0 - rep.Q_at_rho)
        Ct = rep.C / rep.tau
        mid = Ct * D * D + 2 * rep.eta * D**3
        num = mid * kp.q_coeffs(K_max) + D * D * eta_series(J, K_max)
        num[0] += Ct
        den = Ct + mid * rep.Q_at_rho + rep.eta * D * D
        pmf = num / den
        total = 1.0
    tail = _tail(pmf, total)
    if tail > tail_target:
        raise TailBoundExceeded(f"mass {tail:.2e} beyond K={K_max}; increase K")
    law = DiscretePMF(rep.regime, tuple(float(x) for x in pmf), tail, constants=consts)
    return law


def avg_catastrophe_from_series(J: JumpSet, z: float, K_max: int, N: int) -> np.ndarray:
    """[u^k] Q(z, u) summed from exact bivariate rows up to z^N (cross-check route)."""
    rows = S.q_bivariate(J, N).rows
    out = np.zeros(K_max + 1)
    for n, row in enumerate(rows):
        zn = z**n
        for k, c in enumerate(row[: K_max + 1]):
            if c:
                out[k] += float(c) * zn
    return out


def law_waiting_time(J: JumpSet, K_max: int = 400, allow_periodic: bool = False,
                     tail_target: float = 1e-6) -> DiscretePMF:
    """P(first catastrophe at step k) in the limit; k = 0 means no catastrophe.

    In the NoRoot case the law is defective: a share of the mass drifts to
    first catastrophes at distance O(1) from the end of the path.  That share
    is reported as ``constants["escaping_mass"]`` and the PMF sums to one
    minus it.
    """
    rep = _report(J, allow_periodic)
    consts = _common(rep)
    z = rep.rho if rep.regime is K.Regime.NOROOT else rep.rho0
    qs = S.q_series(J, K_max).coeffs
    pmf = np.zeros(K_max + 1)
    lz = math.log(z)
    for k, c in enumerate(qs):
        if c:
            pmf[k] = math.exp(math.log(c.numerator) - math.log(c.denominator) + k * lz)
    total = 1.0
    if rep.regime is K.Regime.NOROOT:
        D = 1.0 / (1.0 - rep.Q_at_rho)
        Ct = rep.C / rep.tau
        # e_n over f0_n: the square-root terms of E and of D E at rho
        pmf[0] += (1.0 - rep.Q_at_rho) * Ct / (Ct + rep.eta * D)
        total = pmf[0] + rep.Q_at_rho
        consts["escaping_mass"] = 1.0 - total
    else:
        total = K.kernel_point(J, z).Q(1.0)
    tail = _tail(pmf, total)
    if tail > tail_target:
        raise TailBoundExceeded(f"mass {tail:.2e} beyond K={K_max}; increase K")
    return DiscretePMF(rep.regime, tuple(float(x) for x in pmf), tail, constants=consts)


def limit_law(J: JumpSet, param: str, K_max: int | None = None, allow_periodic: bool = False) -> LimitLaw:
    funcs = {
        "catastrophes": law_catastrophes,
        "returns": law_returns,
        "final_altitude": law_final_altitude,
        "cumulative": law_cumulative,
        "avg_cat": law_avg_catastrophe,
        "waiting": law_waiting_time,
    }
    param = param.replace("-", "_")
    if param not in funcs:
        raise UnknownParam(f"unknown parameter {param!r}; choose from {LAW_PARAMS}")
    kw = {"allow_periodic": allow_periodic}
    if K_max is not None:
        kw["K_max"] = K_max
    return funcs[param](J, **kw)


def exact_law(J: JumpSet, param: str, n: int) -> list:
    """Exact distribution at length n as floats (k -> probability)."""
    param = param.replace("-", "_")
    if param == "final_altitude":
        row = S.counting_table(J, n).rows[n]
    elif param in S.PARAMS:
        row = S.parameter_series(J, n, param).rows[n]
    else:
        raise UnknownParam(param)
    total = sum(row, Fraction(0))
    return [float(x / total) for x in row]
