"""Vanishing-angle integration and the curvature-criterion certificate.

A minimal cone of dimension k whose link has curvature bound alpha^2 is
area-minimizing when twice its (estimated) vanishing angle is below the
normal radius of the link.  The angle is the total sweep of the curve

    dtheta/dr = 1 / (r sqrt(r^(2k) cos(theta)^(2k-2) G(tan theta)^2 - 1)),  theta(1) = 0,

as r -> infinity, where G is a lower profile for the inf-det term.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from scipy.integrate import solve_ivp

# total log-radicand at which integration stops and the analytic tail takes over
TAIL_LOG = 40.0
SEED_OFFSET = 1e-8
DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-13


class CaseFlag(enum.Enum):
    NONE = "NONE"
    TOTALLY_GEODESIC = "TOTALLY_GEODESIC"
    KNOWN_UNSTABLE = "KNOWN_UNSTABLE"
    EXCLUDED = "EXCLUDED"


class Profile(enum.Enum):
    F_PROFILE = "F"
    EXP_PROFILE = "EXP"
    SCALED_EXP = "SCALED"


class Verdict(enum.Enum):
    MINIMIZING = "MINIMIZING"
    TOTALLY_GEODESIC = "TOTALLY_GEODESIC"
    INCONCLUSIVE = "INCONCLUSIVE"


class ConstraintExceeded(ArithmeticError):
    """Profile left its admissible range (alpha^2 t^2 above the profile's zero)."""


class NoConvergence(ArithmeticError):
    pass


@dataclass(frozen=True)
class ConeCase:
    k: int
    alpha_sq: float
    normal_radius: float
    family: str
    flag: CaseFlag = CaseFlag.NONE
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        # planar cones (totally geodesic links) may have k = 2
        k_min = 2 if self.flag is CaseFlag.TOTALLY_GEODESIC else 3
        if int(self.k) != self.k or self.k < k_min:
            raise ValueError(f"cone dimension must be an integer >= {k_min}, got {self.k}")
        if not self.alpha_sq >= 0:
            raise ValueError(f"alpha_sq must be >= 0, got {self.alpha_sq}")
        if not 0 < self.normal_radius <= math.pi + 1e-15:
            raise ValueError(f"normal radius must lie in (0, pi], got {self.normal_radius}")

    @property
    def alpha(self) -> float:
        return math.sqrt(self.alpha_sq)


@dataclass(frozen=True)
class VanishingAngleResult:
    angle: float
    profile: Profile
    constraint_ok: bool
    integration_report: dict

    @property
    def degrees(self) -> float:
        return math.degrees(self.angle)


# ---------------------------------------------------------------------------
# profiles


def _coerce_profile(p) -> Profile:
    if isinstance(p, Profile):
        return p
    key = str(p).strip().upper()
    for prof in Profile:
        if key in (prof.value, prof.name, prof.name.split("_")[0]):
            return prof
    raise ValueError(f"unknown profile {p!r}")


def constraint_limit(profile, k: int) -> float:
    """Largest admissible alpha^2 t^2 for a profile."""
    profile = _coerce_profile(profile)
    if profile is Profile.F_PROFILE:
        return (k - 1) / (k - 2)
    return 1.0


def log_profile(profile: Profile, alpha: float, t: float, k: int) -> float:
    """log G; -inf at the profile's zero, nan beyond it."""
    x = alpha * t
    if profile is Profile.F_PROFILE:
        a = math.sqrt((k - 2) / (k - 1))
        b = 1.0 / math.sqrt((k - 1) * (k - 2))
        y = x * a
        if y >= 1.0:
            return -math.inf if y == 1.0 else math.nan
        return math.log1p(-y) + (k - 2) * math.log1p(x * b)
    if x >= 1.0:
        return -math.inf if x == 1.0 else math.nan
    return math.log1p(-x) + x


def profile_value(profile, alpha: float, t: float, k: int) -> float:
    """F(alpha, t, k-1) = (1 - alpha t sqrt((k-2)/(k-1))) (1 + alpha t / sqrt((k-1)(k-2)))^(k-2),
    or (1 - alpha t) exp(alpha t) for the exponential profile."""
    profile = _coerce_profile(profile)
    if profile is Profile.SCALED_EXP:
        profile = Profile.EXP_PROFILE
    if t < 0:
        raise ValueError("t must be >= 0")
    if profile is Profile.F_PROFILE and k < 3:
        raise ValueError("F profile needs k >= 3")
    if (alpha * t) ** 2 > constraint_limit(profile, k) * (1 + 1e-15):
        raise ConstraintExceeded(
            f"alpha^2 t^2 = {(alpha * t) ** 2:.6g} exceeds {constraint_limit(profile, k):.6g}"
        )
    lg = log_profile(profile, alpha, t, k)
    return 0.0 if lg == -math.inf else math.exp(lg)


# ---------------------------------------------------------------------------
# vanishing-angle ODE


def _log_angular(profile, alpha, k, theta):
    """(2k-2) log cos(theta) + 2 log G(tan theta)."""
    c = math.cos(theta)
    if c <= 0.0:
        return math.nan
    lg = log_profile(profile, alpha, math.tan(theta), k)
    return (2 * k - 2) * math.log(c) + 2.0 * lg


def quadratic_coefficient(profile, alpha, k, h=1e-4) -> float:
    """C in r^(2k) cos^(2k-2) G^2 = 1 + 2k(r - 1) - C theta^2 + ..., by central differences."""
    # G is evaluated at negative t here; still smooth at 0.
    def lam(th):
        c = math.cos(th)
        t = math.tan(th)
        x = alpha * t
        if profile is Profile.F_PROFILE:
            a = math.sqrt((k - 2) / (k - 1))
            b = 1.0 / math.sqrt((k - 1) * (k - 2))
            lg = math.log1p(-x * a) + (k - 2) * math.log1p(x * b)
        else:
            lg = math.log1p(-x) + x
        return (2 * k - 2) * math.log(c) + 2 * lg

    c1 = -(lam(h) + lam(-h)) / (2 * h * h)
    c2 = -(lam(h / 2) + lam(-h / 2)) / (2 * (h / 2) ** 2)
    return (4 * c2 - c1) / 3


def _tail_bound(k, profile, alpha, u_end, theta_end):
    """Bound on the remaining sweep beyond u = log r = u_end.

    With the angular factor frozen at its value at theta_end + tau, the
    integral is (1/k) arctan(1 / sqrt(expm1(L))), L the total log-radicand.
    The frozen value is a valid lower bound for the factor while theta stays
    below theta_end + tau, which the fixed-point iteration enforces.
    """
    def tail(th):
        lam = _log_angular(profile, alpha, k, th)
        if not math.isfinite(lam):
            return math.inf
        L = 2 * k * u_end + lam
        if L <= 0:
            return math.inf
        return math.atan(1.0 / math.sqrt(math.expm1(L))) / k

    tau = tail(theta_end)
    for _ in range(20):
        nxt = tail(theta_end + 2 * tau)
        if nxt <= 2 * tau:
            return 2 * tau
        tau = nxt
    raise NoConvergence("tail bound did not settle")


def _integrate(k: int, alpha: float, profile: Profile, rtol: float, atol: float, seed_offset: float):
    if k < 3:
        raise ValueError("k must be >= 3")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    c_closed = k - 1 + alpha * alpha
    c_num = quadratic_coefficient(profile, alpha, k)
    if abs(c_num - c_closed) > 1e-5 * c_closed:
        raise NoConvergence(f"Taylor coefficient mismatch {c_num} vs {c_closed}")
    C = c_num
    disc = k * k - 4 * C
    if disc < 0:
        raise NoConvergence(
            f"no real seed: a^2(2k - C a^2) = 4 has no root (k^2 - 4C = {disc:.4g})"
        )
    # smaller root: the branch that stays below the profile constraint
    a2 = (k - math.sqrt(disc)) / C
    u0 = math.log1p(seed_offset)
    s0 = math.sqrt(u0)
    th0 = math.sqrt(a2) * s0
    limit = math.atan(math.sqrt(constraint_limit(profile, k)) / alpha) if alpha > 0 else math.pi / 2
    limit = min(limit, math.pi / 2)
    state = {"rejected": 0, "max_theta": th0}

    def radicand_log(s, th):
        lam = _log_angular(profile, alpha, k, th)
        return 2 * k * s * s + lam

    def rhs(s, y):
        th = y[0]
        if th >= limit:
            state["rejected"] += 1
            return [1e3]
        L = radicand_log(s, th)
        if not L > 0:
            state["rejected"] += 1
            return [1e3]
        return [2 * s / math.sqrt(math.expm1(L))]

    def reached_tail(s, y):
        L = radicand_log(s, y[0])
        return (L if math.isfinite(L) else -TAIL_LOG) - TAIL_LOG

    reached_tail.terminal = True
    reached_tail.direction = 1

    s_max = math.sqrt(4 * TAIL_LOG / k) + 4.0
    sol = solve_ivp(rhs, (s0, s_max), [th0], method="DOP853", rtol=rtol, atol=atol,
                    events=reached_tail, dense_output=False)
    if sol.status < 0:
        raise NoConvergence(f"integrator failed: {sol.message}")
    th_end = float(sol.y[0, -1])
    if th_end >= limit:
        raise ConstraintExceeded(
            f"trajectory reached the profile constraint at theta = {math.degrees(th_end):.4f} deg"
        )
    if sol.status != 1:
        raise NoConvergence("radicand never reached the tail regime")
    s_end = float(sol.t[-1])
    tail = _tail_bound(k, profile, alpha, s_end * s_end, th_end)
    upper = th_end + tail
    if upper >= limit:
        raise ConstraintExceeded("tail bound crosses the profile constraint")
    report = {
        "nfev": int(sol.nfev),
        "steps": int(len(sol.t)),
        "rejected_evaluations": state["rejected"],
        "seed_a_sq": a2,
        "taylor_C": c_num,
        "taylor_C_closed": c_closed,
        "log_r_end": s_end * s_end,
        "theta_integrated": th_end,
        "tail_bound": tail,
        "rtol": rtol,
    }
    return upper, report


@lru_cache(maxsize=4096)
def _cached_angle(k, alpha, profile, rtol, atol, seed_offset):
    return _integrate(k, alpha, profile, rtol, atol, seed_offset)


def vanishing_angle(k: int, alpha: float, profile=Profile.EXP_PROFILE, *, rtol: float = DEFAULT_RTOL,
                    atol: float = DEFAULT_ATOL, seed_offset: float = SEED_OFFSET) -> VanishingAngleResult:
    """Vanishing angle (radians, upper end of the tail bracket) for a cone of dimension k.

    The ODE is integrated in s = sqrt(log r), which turns the sqrt(r - 1)
    start into a regular one.  Raises ConstraintExceeded or NoConvergence.
    """
    profile = _coerce_profile(profile)
    if profile is Profile.SCALED_EXP:
        if k <= 12:
            raise ValueError("scaled bound applies for k > 12 only")
        return VanishingAngleResult(math.atan(scaled_vanishing_tan(k, alpha, rtol=rtol)), profile, True,
                                    {"inner_k": 12, "inner_alpha": 12 * alpha / k})
    angle, report = _cached_angle(int(k), float(alpha), profile, float(rtol), float(atol), float(seed_offset))
    return VanishingAngleResult(angle, profile, True, dict(report))


def scaled_vanishing_tan(k: int, alpha: float, *, rtol: float = DEFAULT_RTOL) -> float:
    """(12/k) tan(theta_2(12, 12 alpha / k)), an upper bound on tan(theta_2(k, alpha)) for k > 12."""
    if k <= 12:
        raise ValueError(f"scaled bound needs k > 12, got {k}")
    inner = vanishing_angle(12, 12.0 * alpha / k, Profile.EXP_PROFILE, rtol=rtol)
    return 12.0 / k * math.tan(inner.angle)


# ---------------------------------------------------------------------------
# certification


@dataclass(frozen=True)
class Certificate:
    case: ConeCase
    verdict: Verdict
    profile: Profile | None
    theta: float | None
    reason: str
    attempts: tuple = ()

    @property
    def theta_deg(self) -> float | None:
        return None if self.theta is None else math.degrees(self.theta)

    @property
    def flag(self) -> CaseFlag:
        return self.case.flag


def profile_order(k: int, profile="auto") -> list[Profile]:
    if profile in (None, "auto", "AUTO"):
        return [Profile.F_PROFILE, Profile.EXP_PROFILE] if k <= 12 else [Profile.SCALED_EXP, Profile.EXP_PROFILE]
    p = _coerce_profile(profile)
    if p is Profile.SCALED_EXP and k <= 12:
        return [Profile.EXP_PROFILE]
    return [p]


def certify(case: ConeCase, profile="auto", *, rtol: float = DEFAULT_RTOL) -> Certificate:
    """Compare twice the vanishing-angle bound against the normal radius (strictly)."""
    if case.flag is CaseFlag.TOTALLY_GEODESIC:
        return Certificate(case, Verdict.TOTALLY_GEODESIC, None, 0.0, "link is totally geodesic; the cone is a plane")
    attempts = []
    last_theta, last_prof = None, None
    for prof in profile_order(case.k, profile):
        try:
            res = vanishing_angle(case.k, case.alpha, prof, rtol=rtol)
        except (ConstraintExceeded, NoConvergence) as exc:
            attempts.append((prof.value, None, f"{type(exc).__name__}: {exc}"))
            continue
        last_theta, last_prof = res.angle, prof
        if 2 * res.angle < case.normal_radius:
            attempts.append((prof.value, res.angle, "ok"))
            reason = f"2 theta = {math.degrees(2 * res.angle):.4f} deg < radius {math.degrees(case.normal_radius):.4f} deg"
            if case.flag is not CaseFlag.NONE:
                reason += f" [{case.flag.value}]"
            return Certificate(case, Verdict.MINIMIZING, prof, res.angle, reason, tuple(attempts))
        attempts.append((prof.value, res.angle, "2 theta >= normal radius"))
    parts = [f"{p}: {msg}" for p, _, msg in attempts]
    if case.flag is CaseFlag.KNOWN_UNSTABLE:
        parts.append("known unstable (Lawlor, Cor. 4.4.6)")
    elif case.flag is CaseFlag.EXCLUDED:
        parts.append("excluded: open problem")
    return Certificate(case, Verdict.INCONCLUSIVE, last_prof, last_theta, "; ".join(parts), tuple(attempts))


# ---------------------------------------------------------------------------
# closed-form sufficiency chains for large cones


@dataclass(frozen=True)
class ChainCheck:
    name: str
    params: tuple
    holds: bool
    detail: str = ""


# d -> (smallest m, cap^2 for the inner k = 12 argument, theta cap, stated radius-test left side)
GRASSMANN_CHAINS = {
    1: (7, Fraction(9), lambda m: Fraction(1, m - 2), lambda m: Fraction(2, m - 2)),
    2: (5, Fraction(36, 5), lambda m: Fraction(1, 2 * (m - 2)), lambda m: Fraction(1, m - 2)),
    4: (4, Fraction(9, 2), lambda m: Fraction(1, 4 * (m - 2)), lambda m: Fraction(1, 4 * (m - 2))),
}
# c with cos(x) > 1 - x^2/2 >= 1 - 4/m reducing to c (m-2)^2 >= m
_COS_SLACK = {1: 2, 2: 8, 4: 128}


def grassmann_chains(d: int, m_max: int = 200) -> list[ChainCheck]:
    """Every link of the k > 12 argument for G(n, m; F), 2 <= n <= m/2, m <= m_max."""
    m_min, cap_sq, theta_cap, lhs_fn = GRASSMANN_CHAINS[d]
    t12 = math.tan(vanishing_angle(12, math.sqrt(cap_sq), Profile.EXP_PROFILE).angle)
    out = [ChainCheck("12 tan(theta2(12, cap)) < 2", (d, float(cap_sq)), 12 * t12 < 2, f"{12 * t12:.6f}")]
    for m in range(m_min, m_max + 1):
        for n in range(2, m // 2 + 1):
            k = d * n * (m - n) + 1
            if k <= 12:
                continue
            p = (d, n, m)
            a_sq = Fraction(d * n * (m - n) ** 2, m)
            bound = Fraction(2, k)
            cap = theta_cap(m)
            lhs = lhs_fn(m)
            x = float(lhs)
            radius = math.acos(1 - m / (n * (m - n)))
            # squared forms of 12 alpha / k < 12 / sqrt(dnm) <= cap
            out.append(ChainCheck("inner alpha < 12/sqrt(dnm)", p, 144 * a_sq / (k * k) < Fraction(144, d * n * m)))
            out.append(ChainCheck("12/sqrt(dnm) <= cap", p, Fraction(144, d * n * m) <= cap_sq))
            out.append(ChainCheck("arctan(2/k) < 2/k", p, math.atan(float(bound)) < float(bound)))
            out.append(ChainCheck("2/k < theta cap", p, bound < cap))
            out.append(ChainCheck("radius >= arccos(1 - 4/m)", p, Fraction(m, n * (m - n)) >= Fraction(4, m)))
            out.append(ChainCheck("cos(lhs) > 1 - lhs^2/2", p, math.cos(x) > 1 - x * x / 2))
            out.append(ChainCheck("slack c(m-2)^2 >= m", p, _COS_SLACK[d] * (m - 2) ** 2 >= m))
            out.append(ChainCheck("1 - lhs^2/2 >= 1 - 4/m", p, 1 - lhs * lhs / 2 >= 1 - Fraction(4, m)))
            out.append(ChainCheck("cos(lhs) > 1 - 4/m", p, math.cos(x) > 1 - 4 / m))
            out.append(ChainCheck("lhs < radius", p, x < radius))
            out.append(ChainCheck("2 theta cap < radius", p, 2 * float(cap) < radius))
            out.append(ChainCheck("2 arctan(scaled bound) < radius", p, 2 * math.atan(12 / k * t12) < radius))
    return out


PROJECTIVE_CHAINS = {
    2: (7, Fraction(12, 7), math.radians(8.07)),
    4: (4, Fraction(3), math.radians(8.15)),
}


def projective_chains(d: int, m_max: int = 200) -> list[ChainCheck]:
    m_min, cap_sq, quoted = PROJECTIVE_CHAINS[d]
    th = vanishing_angle(12, math.sqrt(cap_sq), Profile.EXP_PROFILE).angle
    out = [
        ChainCheck("theta2(12, cap) < quoted cap", (d,), th < quoted, f"{math.degrees(th):.4f} deg"),
        ChainCheck("theta2(12, cap) < pi/4", (d,), th < math.pi / 4),
    ]
    for m in range(m_min, m_max + 1):
        k = d * (m - 1) + 1
        p = (d, m)
        a_sq = Fraction(d * (m - 1), m)
        out.append(ChainCheck("inner alpha < 12/sqrt(d(m-1)m)", p, 144 * a_sq / (k * k) < Fraction(144, d * (m - 1) * m)))
        out.append(ChainCheck("12/sqrt(d(m-1)m) <= cap", p, Fraction(144, d * (m - 1) * m) <= cap_sq))
        out.append(ChainCheck("12/k < 1", p, Fraction(12, k) < 1))
        out.append(ChainCheck("pi/2 < radius", p, math.pi / 2 < math.acos(-1 / (m - 1))))
        out.append(ChainCheck("2 arctan(12/k tan theta) < radius", p,
                              2 * math.atan(12 / k * math.tan(th)) < math.acos(-1 / (m - 1))))
    return out


def inequality_chains(m_max: int = 200) -> list[ChainCheck]:
    out = []
    for d in (1, 2, 4):
        out += grassmann_chains(d, m_max)
    for d in (2, 4):
        out += projective_chains(d, m_max)
    return out
