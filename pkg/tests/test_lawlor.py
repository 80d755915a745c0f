import math
from fractions import Fraction

import pytest

from grasscones import lawlor as lw
from grasscones.lawlor import CaseFlag, ConeCase, Profile, Verdict

EXP, F = Profile.EXP_PROFILE, Profile.F_PROFILE

# frozen outputs of the solver at default tolerances (degrees)
FROZEN = [
    (12, 3.0, EXP, 8.629773600842553),
    (12, math.sqrt(3), EXP, 8.136656884004882),
    (12, 3 / math.sqrt(2), EXP, 8.23927829127198),
    (5, math.sqrt(2), F, 26.884507492775164),
    (11, math.sqrt(5 / 3), F, 8.85908741470353),
    (9, 2.0, F, 11.56279956657304),
    (7, math.sqrt(3.6), F, 16.272629570982854),
]


@pytest.mark.parametrize("k,alpha,prof,deg", FROZEN)
def test_frozen_angles(k, alpha, prof, deg):
    assert lw.vanishing_angle(k, alpha, prof).degrees == pytest.approx(deg, abs=1e-6)


def test_tolerance_refinement_is_stable():
    a = lw.vanishing_angle(12, 3.0, EXP, rtol=1e-8).angle
    b = lw.vanishing_angle(12, 3.0, EXP, rtol=1e-12).angle
    assert abs(a - b) < 1e-7


def test_report_contents():
    res = lw.vanishing_angle(9, 2.0, F)
    rep = res.integration_report
    assert rep["taylor_C"] == pytest.approx(rep["taylor_C_closed"], rel=1e-6)
    assert 0 < rep["tail_bound"] < 1e-6
    assert res.constraint_ok


def test_profile_values():
    assert lw.profile_value(EXP, 1.0, 0.0, 5) == 1.0
    assert lw.profile_value(EXP, 2.0, 0.25, 5) == pytest.approx(0.5 * math.exp(0.5))
    k, a, t = 7, 1.3, 0.4
    expect = (1 - a * t * math.sqrt((k - 2) / (k - 1))) * (1 + a * t / math.sqrt((k - 1) * (k - 2))) ** (k - 2)
    assert lw.profile_value(F, a, t, k) == pytest.approx(expect)
    assert lw.profile_value(EXP, 1.0, 1.0, 5) == 0.0


def test_constraint_exceeded():
    with pytest.raises(lw.ConstraintExceeded):
        lw.profile_value(EXP, 2.0, 0.6, 5)
    with pytest.raises(lw.ConstraintExceeded):
        lw.profile_value(F, 1.0, math.sqrt(6 / 5) + 1e-3, 7)
    assert lw.constraint_limit(F, 7) == pytest.approx(6 / 5)


def test_exp_is_large_k_limit_of_f():
    for x in (0.05, 0.1, 0.2):
        f = lw.profile_value(F, 1.0, x, 10_000)
        e = lw.profile_value(EXP, 1.0, x, 10_000)
        assert f == pytest.approx(e, rel=1e-3)


def test_monotone_in_alpha_and_k():
    angles = [lw.vanishing_angle(12, a, EXP).angle for a in (1.0, 1.5, 2.0, 2.5, 3.0)]
    assert all(x <= y for x, y in zip(angles, angles[1:]))
    by_k = [lw.vanishing_angle(k, 1.5, EXP).angle for k in (8, 10, 12, 14)]
    assert all(x > y for x, y in zip(by_k, by_k[1:]))


def test_f_bound_below_exp_bound():
    # the F profile is the sharper estimate
    assert lw.vanishing_angle(9, 2.0, F).angle < lw.vanishing_angle(9, 2.0, EXP).angle


def test_no_real_seed():
    with pytest.raises(lw.NoConvergence):
        lw.vanishing_angle(3, math.sqrt(2 / 3), F)
    with pytest.raises(lw.NoConvergence):
        lw.vanishing_angle(5, 2.0, F)


def test_scaled_bound():
    t = lw.scaled_vanishing_tan(17, math.sqrt(16 / 3))
    inner = lw.vanishing_angle(12, 12 * math.sqrt(16 / 3) / 17, EXP)
    assert t == pytest.approx(12 / 17 * math.tan(inner.angle))
    assert lw.vanishing_angle(17, math.sqrt(16 / 3), Profile.SCALED_EXP).degrees == pytest.approx(5.747311222695695)
    with pytest.raises(ValueError):
        lw.scaled_vanishing_tan(12, 1.0)


def test_profile_order():
    assert lw.profile_order(9) == [F, EXP]
    assert lw.profile_order(17) == [Profile.SCALED_EXP, EXP]
    assert lw.profile_order(9, "exp") == [EXP]


def test_certify_minimizing():
    cert = lw.certify(ConeCase(5, 2.0, math.pi / 2, "G(2,4;R)"))
    assert cert.verdict is Verdict.MINIMIZING and cert.profile is F
    assert 2 * cert.theta < math.pi / 2


def test_certify_tie_is_inconclusive():
    theta = lw.vanishing_angle(5, math.sqrt(2), F).angle
    cert = lw.certify(ConeCase(5, 2.0, 2 * theta, "tie"), "f")
    assert cert.verdict is Verdict.INCONCLUSIVE


def test_certify_known_unstable_reason():
    cert = lw.certify(ConeCase(5, 4.0, math.pi / 2, "G~(2,4;R)", CaseFlag.KNOWN_UNSTABLE))
    assert cert.verdict is Verdict.INCONCLUSIVE
    assert cert.flag is CaseFlag.KNOWN_UNSTABLE and "unstable" in cert.reason


def test_certify_totally_geodesic():
    cert = lw.certify(ConeCase(2, 0.0, math.pi, "RP^1", CaseFlag.TOTALLY_GEODESIC))
    assert cert.verdict is Verdict.TOTALLY_GEODESIC


def test_cone_case_validation():
    with pytest.raises(ValueError):
        ConeCase(2, 1.0, 1.0, "x")
    with pytest.raises(ValueError):
        ConeCase(5, -1.0, 1.0, "x")
    with pytest.raises(ValueError):
        ConeCase(5, 1.0, 4.0, "x")


def test_chains_small_range():
    checks = lw.inequality_chains(m_max=30)
    assert checks and all(c.holds for c in checks)
    names = {c.name for c in checks}
    assert "2 theta cap < radius" in names and "pi/2 < radius" in names


def test_chain_constants_are_exact():
    for d, (m0, cap_sq, theta_cap, lhs) in lw.GRASSMANN_CHAINS.items():
        assert isinstance(cap_sq, Fraction) and isinstance(theta_cap(m0), Fraction)
        assert isinstance(lhs(m0), Fraction)
