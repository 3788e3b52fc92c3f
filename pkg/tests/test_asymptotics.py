import math
import warnings

import pytest

from catpaths import asymptotics as A
from catpaths import kernel as K
from catpaths.errors import PeriodicUnsupported
from catpaths.model import DYCK, MOTZKIN, JumpSet

NEG = JumpSet.parse("-1:3,0:1,1:1,q=1")


@pytest.mark.parametrize("family", ["d", "e", "m"])
def test_dyck_ratios(family):
    est = A.asym_coeff(DYCK, family, 300)
    assert est.ratio_to(A.exact_coefficient(DYCK, family, 300)) == pytest.approx(1, abs=1e-9)


def test_dyck_constants():
    dc = A.dyck_constants()
    assert dc.rho0 == pytest.approx(dc.rho0_closed_form, abs=1e-14)
    assert all(r < 1e-12 for r in dc.residuals.values())
    assert dc.C_e == pytest.approx(0.10381, abs=1e-5)
    assert dc.C_m == pytest.approx(0.32679, abs=1e-5)


def test_excursion_ratio_dyck():
    r = A.excursion_ratio(DYCK)
    exact = A.exact_coefficient(DYCK, "e", 400) / A.exact_coefficient(DYCK, "m", 400)
    assert r == pytest.approx(float(exact), abs=1e-9)
    assert r == pytest.approx(0.31767, abs=5e-5)


@pytest.mark.parametrize(
    "J, tol",
    [
        (MOTZKIN, 1e-6),
        (JumpSet.parse("-2:1,0:1,1:1,q=1"), 1e-4),
        (NEG.with_q(5), 1e-4),
        # rho0 = 0.548 sits just below rho = 0.552, so the correction decays slowly
        (JumpSet.parse("-1:1,0:1/2,2:1/3,q=1/2"), 2e-3),
    ],
)
def test_subcritical_other_sets(J, tol):
    assert K.classify_regime(J).regime is K.Regime.SUBCRITICAL
    for fam in ("d", "e", "m"):
        est = A.asym_coeff(J, fam, 400)
        assert est.ratio_to(A.exact_coefficient(J, fam, 400)) == pytest.approx(1, abs=tol)


def test_critical_aperiodic():
    J = NEG.with_q(K.critical_q(NEG))
    est = A.asym_coeff(J, "d", 300)
    assert est.regime is K.Regime.CRITICAL and est.alpha == -0.5
    assert est.ratio_to(A.exact_coefficient(J, "d", 300)) == pytest.approx(1, abs=0.05)


def _richardson(r):
    # remove c1/n then c2/n^(3/2) from ratios at n, 2n, 4n
    a = [2 * r[1] - r[0], 2 * r[2] - r[1]]
    k = 2**1.5
    return (k * a[1] - a[0]) / (k - 1)


@pytest.mark.parametrize("family", ["d", "e", "m"])
def test_noroot_aperiodic_converges(family):
    # close to the critical q the 1/n correction is large (constant ~ 100)
    ns = (400, 800, 1600)
    r = [A.asym_coeff(NEG, family, n).ratio_to(A.exact_coefficient(NEG, family, n)) for n in ns]
    assert A.asym_coeff(NEG, family, 10).alpha == -1.5
    assert abs(r[0] - 1) > abs(r[1] - 1) > abs(r[2] - 1)
    assert _richardson(r) == pytest.approx(1, abs=5e-3)


def test_periodic_guard():
    J = JumpSet.parse("-1:4,1:1,q=2")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(PeriodicUnsupported):
            A.asym_coeff(J, "d", 100)
        assert A.asym_coeff(J, "d", 100, allow_periodic=True).regime is K.Regime.NOROOT


def test_log_space_estimate():
    est = A.asym_coeff(DYCK, "e", 5000)
    assert est.value == math.inf or est.value > 0
    assert est.log_value == pytest.approx(math.log(est.constant) + 5000 * math.log(est.rate))
    assert est.to_json()["family"] == "e"


def test_bad_family():
    with pytest.raises(ValueError):
        A.asym_coeff(DYCK, "x", 10)
