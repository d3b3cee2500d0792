"""One-period Euler machinery: residual, rate map, benchmark rate.

The object being solved is
    K_t(a, R) = u'(e^y_t - a) - beta * R * v'(e^o_{t+1} + R a),
and the rate map g_t sends a saving level a to the unique R with
K_t(a, R) = 0.  Existence and uniqueness need two structural facts: the
old endowment is positive and c v'(c) is nondecreasing (then K is strictly
decreasing in R), and the saving level satisfies
    a * u'(e^y_t - a) < beta * lim_{c->inf} c v'(c)
(otherwise K stays positive for every R and no finite rate exists).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AssumptionViolated, BracketFailure, DomainError, NoFiniteRate
from .model import Economy, LogUtility

_BRACKET_CAP = 1e30


def euler_residual(econ: Economy, t: int, a: float, R: float) -> float:
    """K_t(a, R); the marginal gain of saving one more unit at rate R."""
    ey = econ.ey(t)
    if not 0.0 < a < ey:
        raise DomainError(f"saving a={a} outside (0, e^y_{t}={ey})")
    if R < 0.0 or math.isnan(R):
        raise DomainError(f"rate must be >= 0, got {R}")
    u = econ.utility
    lhs = u.u1(ey - a)
    if R == 0.0:
        # beta * 0 * v'(e^o) -> 0 even when v'(0) = inf
        return lhs
    co = econ.eo(t + 1) + R * a
    return lhs - u.beta * R * u.v1(co)


def benchmark_rate(econ: Economy, t: int) -> float:
    """Autarky rate between t and t+1: u'(e^y_t) / (beta v'(e^o_{t+1}))."""
    ey = econ.ey(t)
    eo1 = econ.eo(t + 1)
    u = econ.utility
    if eo1 == 0.0 and u.vprime_at_zero_infinite:
        return 0.0
    return u.u1(ey) / (u.beta * u.v1(eo1))


def forward_rate_ratio(econ: Economy, t: int, x1: float, x2: float) -> float:
    """Marginal-utility ratio at endowment-scaled consumptions.

    Evaluates u'(e^y_t x1) / (beta v'(e^y_t x2)); x1, x2 are fractions of the
    young endowment.  This is the V-ratio used by the all-bubbly criterion.
    """
    ey = econ.ey(t)
    if not x1 > 0.0:
        raise DomainError(f"x1 must be positive, got {x1}")
    if x2 < 0.0:
        raise DomainError(f"x2 must be >= 0, got {x2}")
    u = econ.utility
    if x2 == 0.0 and u.vprime_at_zero_infinite:
        raise DomainError("x2 = 0 makes the denominator v'(0) infinite")
    return u.u1(ey * x1) / (u.beta * u.v1(ey * x2))


@dataclass(frozen=True)
class EulerPoint:
    """A solved point of the rate map, carried around by diagnostics."""

    t: int
    a: float
    R: float
    residual: float


def g_solve(econ: Economy, t: int, a: float, method: str = "auto") -> float:
    """Rate map g_t(a): the unique R > 0 with euler_residual(econ, t, a, R) = 0.

    method="auto" uses the log family's closed form R = e^o / (beta e^y - (1+beta) a)
    when available; method="bisect" forces the generic bracket-and-bisect route
    (used by the oracle cross-checks).
    """
    ey = econ.ey(t)
    if not 0.0 < a < ey:
        raise DomainError(f"saving a={a} outside (0, e^y_{t}={ey})")
    if not econ.add_assum:
        raise AssumptionViolated(
            "rate solving needs a positive old endowment and nondecreasing c*v'(c)")
    u = econ.utility

    # root existence: a u'(e^y - a) < beta * lim c v'(c)
    lim_cv = u.cv_limit()
    if not math.isinf(lim_cv):
        if a * u.u1(ey - a) >= u.beta * lim_cv:
            raise NoFiniteRate(
                f"a*u'(e^y-a) = {a * u.u1(ey - a):.6g} >= beta*lim c v'(c) = "
                f"{u.beta * lim_cv:.6g}: the Euler equation has no root at t={t}")

    if method == "auto" and isinstance(u, LogUtility):
        denom = u.beta * ey - (1.0 + u.beta) * a
        # denom > 0 is exactly the existence condition above for the log family
        return econ.eo(t + 1) / denom

    # bracket: K(a, 0) = u'(e^y - a) > 0; expand upward from the autarky rate
    hi = max(benchmark_rate(econ, t), 1e-8)
    while euler_residual(econ, t, a, hi) > 0.0:
        hi *= 2.0
        if hi > _BRACKET_CAP:
            raise BracketFailure(
                f"no sign change below R = {_BRACKET_CAP:g} at t={t}, a={a}")
    lo = 0.0
    tol = econ.tol.root_tol
    for _ in range(256):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if euler_residual(econ, t, a, mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(abs(mid), 1e-12):
            break
    return 0.5 * (lo + hi)


def euler_point(econ: Economy, t: int, a: float, method: str = "auto") -> EulerPoint:
    R = g_solve(econ, t, a, method=method)
    return EulerPoint(t=t, a=a, R=R, residual=euler_residual(econ, t, a, R))
