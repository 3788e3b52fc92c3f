import math
import warnings
from fractions import Fraction

import numpy as np
import pytest

from catpaths import kernel as K
from catpaths import limits as LM
from catpaths import series as S
from catpaths.errors import DegenerateVariance, PeriodicUnsupported, TailBoundExceeded, UnknownParam
from catpaths.model import DYCK, MOTZKIN, JumpSet

NEG = JumpSet.parse("-1:3,0:1,1:1,q=1")  # NoRoot, aperiodic
LAM = 0.6823278038280193


def _moments(J, N, param):
    """Exact mean and variance of a parameter at lengths N/2 and N, via univariate series."""
    E, Q, D = S.e_series(J, N), S.q_series(J, N), S.d_series(J, N)
    F0 = D * E
    if param == "catastrophes":
        f1 = Q * D * D * E
        f2 = 2 * Q * Q * D * D * D * E
    elif param == "returns":
        A = 1 - F0.reciprocal()
        G = (1 - A).reciprocal()
        f1 = A * G * G
        f2 = 2 * A * A * G * G * G
    else:
        Qb = S.q_bivariate(J, N)
        Qu = S.Series(tuple(sum(k * x for k, x in enumerate(r)) for r in Qb.rows))
        Quu = S.Series(tuple(sum(k * (k - 1) * x for k, x in enumerate(r)) for r in Qb.rows))
        f1 = Qu * D * D * E
        f2 = (Quu * D * D + 2 * Qu * Qu * D * D * D) * E
    out = []
    for n in (N // 2, N):
        m = f1[n] / F0[n]
        v = f2[n] / F0[n] + m - m * m
        out.append((float(m), float(v)))
    return out


@pytest.mark.parametrize("J", [DYCK, MOTZKIN, JumpSet.parse("-2:1,0:1,1:1,q=1")])
@pytest.mark.parametrize("param", ["catastrophes", "returns", "cumulative"])
def test_gaussian_parameters_match_exact_moments(J, param):
    law = LM.limit_law(J, param)
    assert isinstance(law, LM.Gaussian)
    N = 600
    (m1, v1), (m2, v2) = _moments(J, N, param)
    # mean = mu n + c + O(rho0/rho)^n, so differences isolate mu and sigma^2
    # rho0/rho is about 0.98 for the {-2,0,1} set, hence the looser margin
    assert (m2 - m1) / (N / 2) == pytest.approx(law.mu, rel=1e-4)
    assert (v2 - v1) / (N / 2) == pytest.approx(law.sigma2, rel=1e-3)


def test_dyck_gaussian_constants():
    cat = LM.limit_law(DYCK, "catastrophes")
    ret = LM.limit_law(DYCK, "returns")
    cum = LM.limit_law(DYCK, "cumulative")
    assert abs(31 * cat.mu**3 + 31 * cat.mu**2 + 40 * cat.mu - 3) < 1e-12
    s = math.sqrt(cat.sigma2)
    assert abs(29791 * s**6 - 59582 * s**4 + 60579 * s**2 - 2927) < 1e-9
    assert abs(31 * ret.mu**3 - 62 * ret.mu**2 + 35 * ret.mu - 3) < 1e-12
    s = math.sqrt(ret.sigma2)
    assert abs(29791 * s**6 + 231 * s**2 - 79) < 1e-9
    assert abs(31 * cum.mu**3 + 62 * cum.mu**2 + 71 * cum.mu - 27) < 1e-12
    s = math.sqrt(cum.sigma2)
    assert abs(29791 * s**6 - 59582 * s**4 + 298411 * s**2 - 159099) < 1e-8
    # the quoted decimals for the cumulative law are off in the ninth place
    assert cum.mu == pytest.approx(0.2938197957788, abs=1e-12)
    assert cum.sigma2 == pytest.approx(0.5809694229340, abs=1e-11)


def test_dyck_final_altitude_geometric():
    law = LM.law_final_altitude(DYCK)
    assert isinstance(law, LM.GeometricShifted)
    assert law.lam == pytest.approx(LAM, abs=1e-14)
    for k in range(31):
        assert law.pmf[k] == pytest.approx((1 - LAM) * LAM**k, abs=1e-14)


@pytest.mark.parametrize("J", [MOTZKIN, JumpSet.parse("-1:1,2:1,q=1"), NEG])
def test_final_altitude_matches_exact(J):
    law = LM.law_final_altitude(J, K_max=15)
    n = 160
    table = S.counting_table(J, n)
    row = table.rows[n]
    tot = sum(row, Fraction(0))
    exact = [float(row[k] / tot) if k < len(row) else 0.0 for k in range(16)]
    err = max(abs(a - b) for a, b in zip(law.pmf, exact))
    assert err < (0.05 if law.regime is K.Regime.NOROOT else 1e-6)


def test_dyck_avg_catastrophe():
    law = LM.law_avg_catastrophe(DYCK)
    assert law.pmf[0] == 0 and law.pmf[1] == 0
    for k in range(2, len(law.pmf)):
        assert law.pmf[k] == pytest.approx((1 - LAM) * LAM ** (k - 2), abs=1e-14)


def test_avg_catastrophe_cross_check():
    J = JumpSet.parse("-2:1,0:1,1:1,q=1")
    rep = K.classify_regime(J)
    law = LM.law_avg_catastrophe(J, K_max=30, tail_target=1)
    direct = LM.avg_catastrophe_from_series(J, rep.rho0 * 0.999, 30, 400)
    direct /= direct.sum()
    assert np.max(np.abs(np.array(law.pmf[:31]) / sum(law.pmf) - direct)) < 5e-3


def test_dyck_waiting_time():
    law = LM.law_waiting_time(DYCK)
    assert law.pmf[6] > law.pmf[4]
    assert sum(law.pmf) == pytest.approx(1, abs=1e-6)
    assert all(law.pmf[k] == 0 for k in (0, 1, 2))


def _waiting_exact(J, n, kmax):
    E, Q, D = S.e_series(J, n), S.q_series(J, n), S.d_series(J, n)
    DE = D * E
    return [float((E[n] if k == 0 else Q[k] * DE[n - k]) / DE[n]) for k in range(kmax + 1)]


def test_waiting_time_matches_exact():
    law = LM.law_waiting_time(DYCK)
    exact = _waiting_exact(DYCK, 500, 30)
    assert max(abs(a - b) for a, b in zip(law.pmf, exact)) < 1e-6


def test_noroot_waiting_heavy_tail():
    with pytest.raises(TailBoundExceeded):
        LM.law_waiting_time(NEG)
    law = LM.law_waiting_time(NEG, tail_target=1)
    assert 0 < law.constants["escaping_mass"] < 1
    ns = (300, 600, 1200, 2400)
    p0 = [_waiting_exact(NEG, n, 0)[0] for n in ns]
    assert p0[0] > p0[1] > p0[2] > p0[3] > law.pmf[0]

    def fit(idx):
        # P(no catastrophe) = L + a/sqrt(n) + b/n
        A = np.array([[1, ns[i] ** -0.5, 1 / ns[i]] for i in idx])
        return np.linalg.solve(A, [p0[i] for i in idx])[0]

    e1, e2 = abs(fit((0, 1, 2)) - law.pmf[0]), abs(fit((1, 2, 3)) - law.pmf[0])
    assert e2 < e1 and e2 < 3e-3
    exact = _waiting_exact(NEG, 1200, 10)
    assert max(abs(a - b) for a, b in zip(law.pmf[1:], exact[1:])) < 2e-3


def test_noroot_waiting_mass_split():
    law = LM.law_waiting_time(NEG, K_max=2000, tail_target=1)
    rep = K.classify_regime(NEG)
    assert law.constants["escaping_mass"] == pytest.approx(1 - law.pmf[0] - rep.Q_at_rho)
    assert sum(law.pmf[1:]) < rep.Q_at_rho
    assert law.tail_bound == pytest.approx(rep.Q_at_rho - sum(law.pmf[1:]))


def _catastrophe_pmf_exact(J, n, kmax):
    E, Q, D = S.e_series(J, n), S.q_series(J, n), S.d_series(J, n)
    F0 = (D * E)[n]
    out, term = [], E
    for _ in range(kmax + 1):
        out.append(float(term[n] / F0))
        term = term * Q
    return out


def test_noroot_catastrophes_converge():
    law = LM.law_catastrophes(NEG, K_max=40)
    assert isinstance(law, LM.NegBinomMixture)
    assert sum(law.pmf) == pytest.approx(1, abs=1e-6)
    tvs = []
    for n in (100, 200, 400):
        ex = _catastrophe_pmf_exact(NEG, n, 40)
        tvs.append(0.5 * sum(abs(a - b) for a, b in zip(law.pmf, ex)))
    assert tvs[0] > tvs[1] > tvs[2]


def test_noroot_returns_law():
    law = LM.law_returns(NEG, K_max=150)
    lam = law.components[0][2]
    assert law.pmf[0] == 0
    assert law.pmf[3] == pytest.approx(3 * lam**2 * (1 - lam) ** 2)
    assert sum(law.pmf) == pytest.approx(1, abs=1e-6)


def test_noroot_cumulative_and_avg_cat_are_distributions():
    cum = LM.law_cumulative(NEG, K_max=200)
    assert sum(cum.pmf) == pytest.approx(1, abs=1e-6)
    assert min(cum.pmf) >= -1e-15
    av = LM.law_avg_catastrophe(NEG, K_max=120, tail_target=1e-6)
    assert sum(av.pmf) == pytest.approx(1, abs=1e-6)


def test_critical_rayleigh():
    J = NEG.with_q(K.critical_q(NEG))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for param in ("catastrophes", "returns", "cumulative"):
            law = LM.limit_law(J, param)
            assert isinstance(law, LM.Rayleigh) and law.theta > 0
        cat = LM.limit_law(J, "catastrophes")
    assert cat.mean(400) == pytest.approx(cat.theta * math.sqrt(math.pi * 200))


def test_periodic_guard():
    J = JumpSet.parse("-1:4,1:1,q=2")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(PeriodicUnsupported):
            LM.law_catastrophes(J)
        assert LM.law_catastrophes(J, allow_periodic=True).regime is K.Regime.NOROOT


def test_degenerate_variance():
    with pytest.raises(DegenerateVariance):
        LM.Gaussian(K.Regime.SUBCRITICAL, 0.1, 0.0)


def test_dispatch_and_json():
    assert LM.limit_law(DYCK, "final-altitude").variant == "GeometricShifted"
    d = LM.limit_law(DYCK, "waiting").to_json()
    assert d["variant"] == "DiscretePMF" and len(d["pmf"]) == 401
    with pytest.raises(UnknownParam):
        LM.limit_law(DYCK, "height")


def test_exact_law_small_n():
    pmf = LM.exact_law(DYCK, "catastrophes", 8)
    assert sum(pmf) == pytest.approx(1)
    assert pmf[0] == pytest.approx(14 / 52)
