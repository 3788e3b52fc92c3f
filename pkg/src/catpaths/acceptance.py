"""The nine end-to-end acceptance checks, shared by the CLI and the test-suite.

Each check returns a :class:`CheckResult` carrying the measured numbers, so a
failure says by how much it missed.  Wall-clock budgets are part of the check.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import asymptotics as A
from . import brute as B
from . import kernel as K
from . import limits as LM
from . import sampler as SM
from . import series as S
from .bijection import from_horizontal, to_horizontal
from .model import DYCK, JumpSet

LAMBDA_POLY = (1, 0, 1, -1)


@dataclass
class CheckResult:
    number: int
    topic: str
    passed: bool
    seconds: float
    budget: float
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.number}. {self.topic} ({self.seconds:.2f}s / {self.budget:g}s)"

    def to_json(self) -> dict:
        return {"number": self.number, "topic": self.topic, "passed": self.passed,
                "seconds": self.seconds, "budget": self.budget, "details": self.details}


def _poly(coeffs, x: float) -> float:
    return float(np.polyval(coeffs, x))


def _timed(number, topic, budget, fn) -> CheckResult:
    t0 = time.perf_counter()
    ok, details = fn()
    dt = time.perf_counter() - t0
    return CheckResult(number, topic, bool(ok and dt < budget), dt, budget, details)


# -- 1 --------------------------------------------------------------------

def _series_fixtures():
    e = [int(x) for x in S.f0_series(DYCK, 7).coeffs]
    m = [int(x) for x in S.f_series(DYCK, 6).coeffs]
    ok = e == [1, 0, 1, 1, 3, 5, 12, 23] and m == [1, 1, 2, 4, 8, 17, 35]
    return ok, {"excursions": e, "meanders": m}


# -- 2 --------------------------------------------------------------------

def _arch_formula():
    arches = S.arch_series(DYCK, 50).A_cat
    bad = [n for n in range(3, 51) if arches[n] != S.dyck_arch_closed_form(n)]
    return not bad, {"mismatches": bad}


# -- 3 --------------------------------------------------------------------

ORACLE_SUPPORTS = ((-1, 1), (-1, 0, 1), (-2, 1), (-1, 2))
ORACLE_POLICIES = ("default", "anywhere", "exclude:0;2")
ORACLE_N = 12


def _rational_weights(support) -> dict:
    pool = [Fraction(2, 3), Fraction(1, 2), Fraction(5, 4)]
    return {j: pool[i % len(pool)] for i, j in enumerate(support)}


def oracle_jumpsets():
    for support in ORACLE_SUPPORTS:
        for policy in ORACLE_POLICIES:
            unit = JumpSet.from_weights({j: 1 for j in support}, 1, policy)
            rat = JumpSet.from_weights(_rational_weights(support), Fraction(3, 5), policy)
            yield support, policy, (unit, rat)


def oracle_mismatches(J: JumpSet, census: B.Census, N: int) -> list:
    """Every coefficient where series and enumeration disagree, as (what, n, k)."""
    bad = []
    f0, f = S.f0_series(J, N), S.f_series(J, N)
    for n in range(N + 1):
        if f0[n] != census.excursion_total(J, n):
            bad.append(("F0", n, None))
        if f[n] != census.meander_total(J, n):
            bad.append(("F(z,1)", n, None))
    for param in S.PARAMS:
        bs = S.parameter_series(J, N, param)
        for n in range(N + 1):
            want = census.weighted(J, param, n)
            keys = set(want) | set(range(len(bs.rows[n])))
            for k in keys:
                if bs.coeff(n, k) != want.get(k, 0):
                    bad.append((param, n, k))
    return bad


def _oracle():
    details = {}
    ok = True
    for support, policy, sets in oracle_jumpsets():
        census = B.Census(sets[0], ORACLE_N)
        for J in sets:
            bad = oracle_mismatches(J, census, ORACLE_N)
            details[str(J)] = len(bad)
            ok &= not bad
    return ok, {"mismatch_counts": details}


# -- 4 --------------------------------------------------------------------

def _bijection():
    details = {}
    ok = True
    for n in range(15):
        images = set()
        for p, _ in B.enumerate(DYCK, n):
            hp = to_horizontal(p)
            ok &= from_horizontal(hp) == p
            images.add(hp.steps)
        hpaths = set(B.enumerate_hpaths(n))
        ok &= images == hpaths
        details[n] = len(hpaths)
    H = S.continued_fraction_H(40)
    ok &= H.coeffs == S.f0_series(DYCK, 40).coeffs
    return ok, {"h_counts": details}


# -- 5 --------------------------------------------------------------------

MINPOLYS = {
    "catastrophes": ((31, 31, 40, -3), (29791, 0, -59582, 0, 60579, 0, -2927)),
    "returns": ((31, -62, 35, -3), (29791, 0, 0, 0, 231, 0, -79)),
    "cumulative": ((31, 62, 71, -27), (29791, 0, -59582, 0, 298411, 0, -159099)),
}
MU_TARGETS = {"catastrophes": 0.0708358118, "returns": 0.1038149281, "cumulative": 0.2938197987}


def _constants():
    dc = A.dyck_constants()
    lam = LM.law_final_altitude(DYCK).lam
    res = {k: float(v) for k, v in dc.residuals.items()}
    res["lambda"] = abs(_poly(LAMBDA_POLY, lam))
    values = {"rho0": dc.rho0, "C_e": dc.C_e, "C_m": dc.C_m, "lambda": lam}
    # the quoted decimals are truncated, so allow one unit in the last digit
    ok = (abs(dc.rho0 - 0.46557) < 1e-5 and abs(dc.C_e - 0.10381) < 1e-5
          and abs(dc.C_m - 0.32679) < 1e-5 and abs(lam - 0.6823278) < 1e-7)
    for param, (pmu, psig) in MINPOLYS.items():
        g = LM.limit_law(DYCK, param)
        res[f"mu_{param}"] = abs(_poly(pmu, g.mu))
        res[f"sigma_{param}"] = abs(_poly(psig, math.sqrt(g.sigma2)))
        values[f"mu_{param}"] = g.mu
        values[f"sigma2_{param}"] = g.sigma2
        ok &= abs(g.mu - MU_TARGETS[param]) < 1e-8
    ok &= all(r < 1e-8 for r in res.values())
    return ok, {"values": values, "residuals": res}


# -- 6 --------------------------------------------------------------------

def _asymptotic():
    rel = {}
    for fam in ("e", "m"):
        est = A.asym_coeff(DYCK, fam, 300)
        rel[fam] = abs(est.ratio_to(A.exact_coefficient(DYCK, fam, 300)) - 1)
    e400, m400 = A.exact_coefficient(DYCK, "e", 400), A.exact_coefficient(DYCK, "m", 400)
    ratio = float(e400 / m400)
    ok = rel["e"] < 0.02 and rel["m"] < 0.02 and abs(ratio - 0.31767) < 0.005
    return ok, {"relative_error_n300": rel, "e400_over_m400": ratio}


# -- 7 --------------------------------------------------------------------

def _limit_pmfs():
    fa = LM.law_final_altitude(DYCK)
    lam = fa.lam
    err_fa = max(abs(fa.pmf[k] - (1 - lam) * lam**k) for k in range(31))
    av = LM.law_avg_catastrophe(DYCK)
    err_av = max(abs(av.pmf[k] - (1 - lam) * lam ** (k - 2)) for k in range(2, len(av.pmf)))
    wt = LM.law_waiting_time(DYCK)
    total = float(sum(wt.pmf))
    ok = err_fa < 1e-8 and err_av < 1e-8 and wt.pmf[6] > wt.pmf[4] and abs(total - 1) < 1e-6
    return ok, {"final_altitude_max_error": err_fa, "avg_cat_max_error": err_av,
                "waiting_P4": wt.pmf[4], "waiting_P6": wt.pmf[6], "waiting_sum": total}


# -- 8 --------------------------------------------------------------------

SAMPLER_N = 1000
SAMPLER_TRIALS = 10_000
SAMPLER_SEED = 20240101


def _sampler():
    n, trials, seed = SAMPLER_N, SAMPLER_TRIALS, SAMPLER_SEED
    stats, _, backend = SM.run_batch(DYCK, n, trials, seed)
    details = {"backend": backend, "seed": seed, "rng": SM.RNG_NAME}
    ok = True
    for param, col in (("catastrophes", 1), ("returns", 2), ("cumulative", 3)):
        x = stats[:, col] / n
        mean, se = float(x.mean()), float(x.std(ddof=1) / math.sqrt(trials))
        z = (mean - MU_TARGETS[param]) / se
        details[param] = {"mean_over_n": mean, "stderr": se, "z": z}
        ok &= abs(z) <= 3
    law = SM.empirical_law(DYCK, n, trials, "final_altitude", seed)
    ref = LM.law_final_altitude(DYCK, K_max=200)
    tv = law.tv_distance(dict(enumerate(ref.pmf)))
    details["final_altitude_tv"] = tv
    ok &= tv < 0.02
    exact = all(SM.check_exactness(J, n_, kind)
                for J in (DYCK, JumpSet.from_weights({-1: 1, 1: 2}, 1))
                for n_ in range(11) for kind in ("excursion", "meander"))
    details["exactness_n_le_10"] = exact
    ok &= exact
    return ok, details


# -- 9 --------------------------------------------------------------------

TRICHOTOMY_WEIGHTS = {-1: 4, 1: 1}
TRICHOTOMY_Q = {"SubcriticalPole": Fraction(8), "NoRoot": Fraction(2)}


def trichotomy_jumpsets() -> dict:
    base = JumpSet.from_weights(TRICHOTOMY_WEIGHTS, 1)
    return {
        "SubcriticalPole": base.with_q(TRICHOTOMY_Q["SubcriticalPole"]),
        "CriticalRoot": base.with_q(K.critical_q(base)),
        "NoRoot": base.with_q(TRICHOTOMY_Q["NoRoot"]),
    }


def _trichotomy():
    import warnings

    details = {}
    ok = True
    for want, J in trichotomy_jumpsets().items():
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep = K.classify_regime(J, with_eta=True)
            est = A.asym_coeff(J, "d", 400, allow_periodic=True)
        ratio = est.ratio_to(A.exact_coefficient(J, "d", 400))
        info = {"q": str(J.q), "regime": rep.regime.value, "Q_at_rho": float(rep.Q_at_rho), "d400_ratio": float(ratio)}
        good = rep.regime.value == want and abs(ratio - 1) < 0.05
        if want == "CriticalRoot":
            good &= abs(rep.Q_at_rho - 1) < 1e-8
        info["passed"] = bool(good)
        details[want] = info
        ok &= good
    return ok, details


CHECKS = (
    (1, "excursion and meander series fixtures", 1, _series_fixtures),
    (2, "catastrophe arches closed form", 1, _arch_formula),
    (3, "series against brute-force enumeration", 120, _oracle),
    (4, "bijection with 1-horizontal Dyck paths", 60, _bijection),
    (5, "Dyck constants and minimal polynomials", 5, _constants),
    (6, "asymptotic convergence of e_n, m_n", 30, _asymptotic),
    (7, "Dyck discrete limit laws", 10, _limit_pmfs),
    (8, "sampler statistics", 120, _sampler),
    (9, "regime trichotomy for {-1:4,+1:1}", 60, _trichotomy),
)


def run_check(number: int) -> CheckResult:
    for num, topic, budget, fn in CHECKS:
        if num == number:
            return _timed(num, topic, budget, fn)
    raise KeyError(number)


def run_all(numbers=None) -> list:
    return [run_check(num) for num, *_ in CHECKS if numbers is None or num in numbers]
