"""Leading-order asymptotics of d_n, e_n, m_n in the three regimes."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from . import kernel as K
from . import series as S
from .errors import PeriodicUnsupported, RegimeUnavailable
from .model import DYCK, JumpSet

FAMILIES = ("d", "e", "m")


@dataclass(frozen=True)
class AsymptoticEstimate:
    family: str
    n: int
    regime: K.Regime
    constant: float
    rate: float
    alpha: float

    @property
    def log_value(self) -> float:
        return math.log(self.constant) + self.n * math.log(self.rate) + self.alpha * math.log(self.n)

    @property
    def value(self) -> float:
        lv = self.log_value
        return math.exp(lv) if lv < 709 else math.inf

    def ratio_to(self, exact: Fraction | int) -> float:
        """exact / estimate, computed in log space so large n does not overflow."""
        exact = Fraction(exact)
        if exact <= 0:
            return 0.0
        le = math.log(exact.numerator) - math.log(exact.denominator)
        return math.exp(le - self.log_value)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "regime": self.regime.value,
            "constant": self.constant,
            "rate": self.rate,
            "alpha": self.alpha,
            "estimate": self.value,
            "log_estimate": self.log_value,
        }


def _report(J: JumpSet, allow_periodic: bool) -> K.KernelReport:
    rep = K.classify_regime(J, with_eta=True)
    if rep.period > 1 and rep.regime is not K.Regime.SUBCRITICAL and not allow_periodic:
        raise PeriodicUnsupported(
            f"support has period {rep.period}; the {rep.regime.value} regime needs every singularity on |z| = rho"
        )
    return rep


def _at_rho0(J: JumpSet, rep: K.KernelReport):
    kp = K.kernel_point(J, rep.rho0)
    d = kp.Q_derivs()
    return kp, d["Qz"]


def asym_coeff(J: JumpSet, family: str, n: int, allow_periodic: bool = False) -> AsymptoticEstimate:
    """Leading term of d_n (ending with a catastrophe), e_n (excursions) or m_n (meanders)."""
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}")
    if n < 1:
        raise ValueError("n must be positive")
    rep = _report(J, allow_periodic)
    if rep.regime is K.Regime.SUBCRITICAL:
        kp, Qp = _at_rho0(J, rep)
        base = 1.0 / (rep.rho0 * Qp)
        factor = {"d": 1.0, "e": kp.E(), "m": kp.M(1.0)}[family]
        return AsymptoticEstimate(family, n, rep.regime, base * factor, 1.0 / rep.rho0, 0.0)
    if rep.eta is None or rep.eta <= 0:
        raise RegimeUnavailable("eta is not available for this jump set")
    kp = K.kernel_point(J, rep.rho)
    E, M = kp.E(), kp.M(1.0)
    sqpi = math.sqrt(math.pi)
    if rep.regime is K.Regime.CRITICAL:
        factor = {"d": 1.0, "e": E, "m": M}[family]
        return AsymptoticEstimate(family, n, rep.regime, factor / (rep.eta * sqpi), 1.0 / rep.rho, -0.5)
    D = 1.0 / (1.0 - rep.Q_at_rho)
    if family == "d":
        const = D * D * rep.eta / (2 * sqpi)
    elif family == "e":
        const = D * E / 2 * (rep.C / rep.tau + rep.eta * D) / sqpi
    else:
        if rep.tau == 1:
            raise RegimeUnavailable("tau = 1 makes the meander constant undefined")
        const = D * M / 2 * (rep.C / (rep.tau - 1) + rep.eta * D) / sqpi
    if const <= 0:
        warnings.warn(f"non-positive asymptotic constant {const} for family {family}", stacklevel=2)
        raise RegimeUnavailable(f"asymptotic constant {const} is not positive")
    return AsymptoticEstimate(family, n, rep.regime, const, 1.0 / rep.rho, -1.5)


def exact_coefficient(J: JumpSet, family: str, n: int) -> Fraction:
    builder = {"d": S.d_series, "e": S.f0_series, "m": S.f_series}[family]
    return builder(J, n).coeffs[n]


def excursion_ratio(J: JumpSet, allow_periodic: bool = False) -> float:
    """Limit of e_n / m_n."""
    rep = _report(J, allow_periodic)
    if rep.regime is not K.Regime.NOROOT:
        z = rep.rho0
        kp = K.kernel_point(J, z)
        return kp.E() / kp.M(1.0)
    kp = K.kernel_point(J, rep.rho)
    D = 1.0 / (1.0 - rep.Q_at_rho)
    tau = rep.tau
    corr = 1.0 - 1.0 / (tau + tau * (tau - 1) * rep.eta * D / rep.C)
    return kp.E() / kp.M(1.0) * corr


@dataclass(frozen=True)
class DyckConstants:
    rho0: float
    C_e: float
    C_m: float
    rho0_closed_form: float
    residuals: dict

    def to_json(self) -> dict:
        return {
            "rho0": self.rho0,
            "C_e": self.C_e,
            "C_m": self.C_m,
            "rho0_closed_form": self.rho0_closed_form,
            "residuals": self.residuals,
        }


def dyck_constants() -> DyckConstants:
    rho0 = K.find_rho0(DYCK)
    kp = K.kernel_point(DYCK, rho0)
    Qp = kp.Q_derivs()["Qz"]
    ce = kp.E() / (rho0 * Qp)
    cm = kp.M(1.0) / (rho0 * Qp)
    r = (116 + 12 * math.sqrt(93)) ** (1 / 3)
    closed = r / 6 + (2 / 3) / r - 2 / 3
    res = {
        "rho0": abs(rho0**3 + 2 * rho0**2 + rho0 - 1),
        "C_e": abs(31 * ce**3 - 62 * ce**2 + 35 * ce - 3),
        "C_m": abs(31 * cm**3 - 31 * cm**2 + 16 * cm - 3),
    }
    return DyckConstants(rho0, ce, cm, closed, res)
