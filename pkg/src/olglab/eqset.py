"""Equilibrium-set machinery: survival bisection, horizon ladder, steady state.

The set of equilibrium starting values is a compact interval [a_low, a_high]
and paths from larger a_0 stay pointwise larger, so one-dimensional bisection
on a_0 is sound.  A probe that dies tells us which side it died on:
collapsing to zero means a_0 was below the set, hitting the endowment bound
means above.  Boundaries are located from those exit directions, which keeps
working even at horizons where the set is narrower than one float ulp and no
representable a_0 survives outright.

The maximal equilibrium is a saddle path: the forward map expands deviations
(factor ~2 per step near the steady state), so a single forward run from any
float loses it after ~50 steps.  maximal_path therefore re-anchors the state
every few steps by bisecting the survival boundary of the remaining tail,
i.e. shooting with periodic re-bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import (AssumptionViolated, BracketFailure, DomainError,
                     EmptySurvivalSet, ModelPreconditionFailed, NoFiniteRate,
                     NonConvergedSet, NoPositiveSteadyState, NotApplicable,
                     OlgLabError)
from .euler import benchmark_rate, g_solve
from .model import ClosedFormSeq, Economy, LogUtility
from .numerics import aitken_limit, bisect_boundary
from .paths import EquilibriumPath, path_from_arrays, simulate

BELOW, INSIDE, ABOVE = "below", "inside", "above"


# relative size below which the recursion is linear to double precision:
# R(a) differs from the zero-asset benchmark rate by O(a / e^y)
_LINEAR_FRAC = 1e-18


def _direction(econ: Economy, t0: int, a: float, steps: int, cache: dict) -> str:
    """Run the recursion from (t0, a) for `steps` periods; report the exit side.

    Orbits that decay geometrically are legitimate (they stay positive
    forever), so there is no absolute floor here.  Once the position falls
    below _LINEAR_FRAC * e^y the map is exactly linear in double precision
    and the orbit is carried as mantissa * exp(offset), immune to underflow.
    """
    if a <= 0.0 or math.isnan(a):
        return BELOW
    n = econ.n
    m, L = float(a), 0.0  # orbit value is m * exp(L)
    linear = False
    for k in range(steps):
        t = t0 + k
        row = cache.get(t)
        if row is None:
            ey1 = econ.ey(t + 1)
            row = (econ.ey(t), econ.d(t + 1), ey1, econ.log_d(t + 1),
                   math.log(ey1))
            cache[t] = row
        ey, d1, ey1, logd1, log_ey1 = row
        if not linear:
            if m >= ey:
                return ABOVE
            if m < _LINEAR_FRAC * ey:
                linear = True
            else:
                try:
                    R = g_solve(econ, t, m)
                except NoFiniteRate:
                    return ABOVE
                m = m * R / n - d1
                if math.isnan(m) or m <= 0.0:
                    return BELOW
                if m >= ey1:
                    return ABOVE
                continue
        key = ("r0", t)
        r0 = cache.get(key)
        if r0 is None:
            r0 = benchmark_rate(econ, t)
            cache[key] = r0
        if r0 <= 0.0:
            return BELOW
        dd_log = logd1 - L
        if dd_log > 690.0:
            return BELOW  # dividend dwarfs the rescaled position
        dd = math.exp(dd_log) if dd_log > -745.0 else 0.0
        m = m * r0 / n - dd
        if m <= 0.0:
            return BELOW
        lm = math.log(m)
        if L + lm >= log_ey1:
            return ABOVE
        L += lm
        m = 1.0
        if L > math.log(_LINEAR_FRAC * ey1):
            # regrew into the nonlinear range
            m, L, linear = math.exp(L), 0.0, False
    return INSIDE


@dataclass(frozen=True)
class SurvivalInterval:
    lower: float
    upper: float
    horizon: int
    lower_is_survivor: bool
    upper_is_survivor: bool


def survival_interval(econ: Economy, T: int) -> SurvivalInterval:
    """Bisect the boundaries of {a_0 : the path stays in (0, e^y) through T}.

    Seeds come from a 64-point log-uniform grid on (1e-6 e^y_0, (1-1e-6) e^y_0).
    Returned endpoints are within bisect_tol of the true inf/sup; they are
    actual survivors whenever the survival set contains representable floats.
    """
    ey0 = econ.ey(0)
    lo_edge, hi_edge = 1e-6 * ey0, (1.0 - 1e-6) * ey0
    grid = [math.exp(x) for x in _linspace(math.log(lo_edge), math.log(hi_edge), 64)]
    cache: dict = {}
    dirs = [_direction(econ, 0, a, T, cache) for a in grid]

    if all(d == BELOW for d in dirs) or all(d == ABOVE for d in dirs):
        # no transition on the grid; try the extreme fiat points
        probe_hi = _direction(econ, 0, ey0 * (1.0 - 1e-12), T, cache)
        probe_lo = _direction(econ, 0, 1e-12 * ey0, T, cache)
        if probe_lo == dirs[0] and probe_hi == dirs[0]:
            raise EmptySurvivalSet(
                "no collapse-to-explode transition found on the seed grid",
                diagnostics={"horizon": T, "grid": grid, "directions": dirs})

    tol = econ.tol.bisect_tol

    # lower boundary: below -> not-below
    below_left = [a for a, d in zip(grid, dirs) if d == BELOW]
    not_below = [a for a, d in zip(grid, dirs) if d != BELOW]
    lo0 = max(below_left) if below_left else 0.0
    hi0 = min(not_below) if not_below else ey0 * (1.0 - 1e-12)
    lo_b, hi_b = bisect_boundary(
        lambda a: a <= 0.0 or _direction(econ, 0, a, T, cache) == BELOW,
        lo0, hi0, tol=tol)

    # upper boundary: not-above -> above
    not_above = [a for a, d in zip(grid, dirs) if d != ABOVE]
    above_right = [a for a, d in zip(grid, dirs) if d == ABOVE]
    lo1 = max(not_above) if not_above else 1e-12 * ey0
    hi1 = min(above_right) if above_right else ey0
    lo_t, hi_t = bisect_boundary(
        lambda a: a < ey0 and _direction(econ, 0, a, T, cache) != ABOVE,
        lo1, hi1, tol=tol)

    lower, upper = hi_b, lo_t
    return SurvivalInterval(
        lower=lower, upper=upper, horizon=T,
        lower_is_survivor=_direction(econ, 0, lower, T, cache) == INSIDE,
        upper_is_survivor=_direction(econ, 0, upper, T, cache) == INSIDE)


def _linspace(a: float, b: float, k: int) -> list[float]:
    step = (b - a) / (k - 1)
    return [a + i * step for i in range(k)]


@dataclass(frozen=True)
class EquilibriumSetResult:
    lower: float
    upper: float
    horizon_used: int
    bracket_width: float
    kind: str  # "unique" | "continuum" | "empty"
    steady_state: Optional[float]
    probes: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def describe(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "horizon_used": self.horizon_used,
            "bracket_width": self.bracket_width,
            "kind": self.kind,
            "steady_state": self.steady_state,
            "probes": self.probes,
        }


def equilibrium_set(econ: Economy) -> EquilibriumSetResult:
    """Estimate [a_low, a_high] on the horizon ladder (T, 2T, 4T).

    Endpoints are stabilized by Aitken extrapolation across the rungs.  The
    result is "unique" when the final bracket is at the bisection floor
    (width <= 2 bisect_tol) and either shrank tenfold across the ladder or
    started at the floor already; a persistent positive width is a continuum.
    """
    T0 = econ.horizon
    rungs = [T0, 2 * T0, 4 * T0]
    tol = econ.tol.bisect_tol
    lowers, uppers, probes = [], [], []
    for T in rungs:
        try:
            si = survival_interval(econ, T)
        except EmptySurvivalSet as err:
            return EquilibriumSetResult(
                lower=math.nan, upper=math.nan, horizon_used=T,
                bracket_width=math.nan, kind="empty", steady_state=None,
                probes=probes, diagnostics=dict(err.diagnostics))
        lowers.append(si.lower)
        uppers.append(si.upper)
        probes.append({"horizon": T, "lower": si.lower, "upper": si.upper,
                       "lower_is_survivor": si.lower_is_survivor,
                       "upper_is_survivor": si.upper_is_survivor})

    scale = max(1.0, abs(uppers[-1]), abs(lowers[-1]))
    drift = max(abs(lowers[2] - lowers[1]), abs(uppers[2] - uppers[1])) / scale
    if drift > 1e-3:
        raise NonConvergedSet(
            f"survival endpoints still moving between rungs (rel change {drift:.3g})",
            partial={"lowers": lowers, "uppers": uppers})

    lower = aitken_limit(*lowers)
    upper = aitken_limit(*uppers)
    if lower > upper:
        # extrapolation noise on a degenerate interval; collapse to the midpoint
        lower = upper = 0.5 * (lower + upper)
    width_first = max(0.0, uppers[0] - lowers[0])
    width_last = max(0.0, uppers[-1] - lowers[-1])
    at_floor = width_last <= 2.0 * tol
    # "started at the floor" counts as shrunk: the bisection cannot resolve
    # a width below its own tolerance, so a first rung already at the floor
    # carries no evidence of a persistent interval.
    shrank = width_first <= 2.0 * tol or width_first >= 10.0 * max(width_last, tol)
    # a raw width that keeps shrinking polynomially (knife-edge instability)
    # never hits the floor on a finite ladder, but its extrapolation does
    collapsing = (upper - lower <= 2.0 * tol
                  and width_last < 0.75 * width_first)
    kind = "unique" if ((at_floor and shrank) or collapsing) else "continuum"

    steady = None
    if econ.stationary_endowments:
        try:
            steady = steady_state_a_hat(econ)
        except (NoPositiveSteadyState, NotApplicable, DomainError):
            steady = None
    return EquilibriumSetResult(
        lower=lower, upper=upper, horizon_used=rungs[-1],
        bracket_width=width_last, kind=kind, steady_state=steady, probes=probes)


def steady_state_a_hat(econ: Economy) -> float:
    """Positive root of u'(e^y - a) = beta n v'(e^o + n a) for stationary economies.

    This is the no-dividend steady state the maximal path converges to when
    R* < n.  At R* = n (within rel 1e-12) the root degenerates to 0; R* > n
    means no positive steady state exists.
    """
    if not econ.stationary_endowments:
        raise NotApplicable("steady state needs stationary endowments")
    rstar = benchmark_rate(econ, 0)
    n = econ.n
    if rstar > n * (1.0 + 1e-12):
        raise NoPositiveSteadyState(f"R* = {rstar:.6g} > n = {n:.6g}")
    if abs(rstar - n) <= 1e-12 * n:
        return 0.0
    ey = econ.ey(0)
    eo = econ.eo(0)
    u = econ.utility

    def gap(a: float) -> float:
        return u.u1(ey - a) - u.beta * n * u.v1(eo + n * a)

    lo, hi = bisect_boundary(lambda a: gap(a) < 0.0, 1e-300, ey * (1.0 - 1e-15))
    return 0.5 * (lo + hi)


def maximal_path(econ: Economy, T: int, lookahead: int = 60,
                 reanchor_every: int = 8) -> EquilibriumPath:
    """Track the maximal equilibrium path for T periods.

    Forward simulation with periodic re-anchoring: every few steps the state
    is re-bisected onto the upper survival boundary of the remaining tail
    (largest a at date t whose continuation does not explode within
    `lookahead` periods).  With a strongly unstable saddle (expansion factor
    well above 1) the anchor is accurate to a few ulp; tracking accuracy
    degrades toward ~e^y * factor^(-lookahead) when the instability is mild,
    in which case raise `lookahead`.

    Rates on the returned path are derived from the non-arbitrage identity,
    so the pricing/telescoping identities hold exactly across re-anchors.
    """
    cache: dict = {}
    ey0 = econ.ey(0)
    a0 = _refine_upper(econ, 0, 1e-12 * ey0, ey0 * (1.0 - 1e-12), lookahead, cache)
    a_vals = [a0]
    n = econ.n
    for t in range(T):
        a_t = a_vals[t]
        try:
            R = g_solve(econ, t, a_t)
            a_next = a_t * R / n - econ.d(t + 1)
        except NoFiniteRate:
            a_next = math.nan
        t1 = t + 1
        ey1 = econ.ey(t1)
        broken = not (0.0 < a_next < ey1) or math.isnan(a_next)
        if broken or t1 % reanchor_every == 0:
            a_next = _anchor_near(econ, t1, a_next, ey1, lookahead, cache)
        a_vals.append(a_next)
    path = path_from_arrays(econ, a_vals)
    if _euler_consistency(econ, path) <= _CONSISTENCY_TOL:
        return path
    # The anchor resolves the boundary to an absolute scale of roughly
    # ey * (n/R)^lookahead, so a path that decays geometrically to zero
    # falls below anchor resolution and the tracked orbit stops satisfying
    # the one-period optimality condition.  On such economies the (unique)
    # equilibrium is the discounted-dividend path; solve for it directly
    # and accept it only if it agrees with the tracker at t = 0.
    try:
        fp = fundamental_path(econ, T)
    except OlgLabError as err:
        raise BracketFailure(
            "tracked path lost one-period optimality and the "
            f"discounted-dividend fallback failed: {err}") from err
    if (_euler_consistency(econ, fp) <= _CONSISTENCY_TOL
            and abs(fp.a[0] - path.a[0]) <= 1e-4 * max(fp.a[0], path.a[0])):
        return fp
    raise BracketFailure(
        "tracked path lost one-period optimality and the discounted-dividend "
        "path does not match its starting value")


_CONSISTENCY_TOL = 1e-6


def _euler_consistency(econ: Economy, path: EquilibriumPath) -> float:
    """Worst sampled relative gap between path rates and the Euler rate.

    Path rates come from the non-arbitrage identity; on a true orbit they
    coincide with g_solve at the held position.  Sampling covers an even
    stride plus the final stretch, where anchor-resolution failures live.
    """
    if not econ.add_assum:
        return 0.0
    s = path.survived_to
    if s < 1:
        return 0.0
    stride = max(1, s // 256)
    ts = sorted(set(range(0, s, stride)) | set(range(max(0, s - 32), s)))
    worst = 0.0
    for t in ts:
        try:
            r_euler = g_solve(econ, t, path.a[t])
        except OlgLabError:
            return math.inf
        worst = max(worst, abs(r_euler - path.R[t + 1]) / max(r_euler, 1e-300))
    return worst


def fundamental_path(econ: Economy, T: Optional[int] = None,
                     max_iter: int = 120) -> EquilibriumPath:
    """Bubbleless path: the asset is worth its discounted dividend stream.

    Fixed point between the rate path and the discounted tail: start from
    the zero-asset benchmark rates, discount dividends backward, refresh the
    rates from the one-period optimality condition at the implied positions,
    repeat.  The truncation horizon is extended until the returned values
    are insensitive to it.
    """
    if T is None:
        T = econ.horizon
    if not econ.add_assum:
        raise AssumptionViolated(
            "discounted-dividend solver needs e^o > 0 and nondecreasing c v'(c)")
    ext = max(T + 200, 2 * T)
    prev: Optional[list] = None
    for _attempt in range(4):
        head = _discount_fixed_point(econ, T, ext, max_iter)
        if prev is not None and all(
                abs(x - y) <= 1e-12 * max(abs(x), 1e-300)
                for x, y in zip(head, prev)):
            return path_from_arrays(econ, head)
        prev = head
        ext *= 2
    raise BracketFailure(
        "discounted dividend value did not stabilize under horizon extension")


def _discount_fixed_point(econ: Economy, T: int, ext: int,
                          max_iter: int) -> list:
    n = econ.n
    d1 = [econ.d(t + 1) for t in range(ext)]
    rates = []
    for t in range(ext):
        r = benchmark_rate(econ, t)
        if not r > 0.0:
            raise BracketFailure(f"zero benchmark rate at t={t}; cannot discount")
        rates.append(r)
    f = [0.0] * (ext + 1)
    prev_worst = math.inf
    for _it in range(max_iter):
        for t in range(ext - 1, -1, -1):
            f[t] = (n / rates[t]) * (f[t + 1] + d1[t])
        new_rates = []
        worst = 0.0
        for t in range(ext):
            if not f[t] < econ.ey(t):
                raise BracketFailure(
                    f"discounted dividend value reaches the endowment bound at t={t}")
            if f[t] <= 0.0:
                if t <= T:
                    raise BracketFailure(
                        "dividend stream vanishes; no positive discounted-dividend path")
                # dividends underflowed this deep in the extension tail;
                # their contribution to the head is zero, keep the benchmark
                new_rates.append(rates[t])
                continue
            r = g_solve(econ, t, f[t])
            worst = max(worst, abs(r - rates[t]) / r)
            new_rates.append(r)
        if worst < 1e-14:
            return f[: T + 1]
        if worst > prev_worst:
            # oscillating; damp the update
            rates = [0.5 * (o + nn) for o, nn in zip(rates, new_rates)]
        else:
            rates = new_rates
        prev_worst = worst
    raise BracketFailure(
        f"rate/discount fixed point still moving after {max_iter} sweeps "
        f"(relative change {prev_worst:.3g})")


def _anchor_near(econ: Economy, t: int, guess: float, ey: float,
                 lookahead: int, cache: dict) -> float:
    if not (0.0 < guess < ey) or math.isnan(guess):
        return _refine_upper(econ, t, 1e-12 * ey, ey * (1.0 - 1e-12), lookahead, cache)
    delta = 1e-6 * max(guess, 1e-6 * ey)
    lo = max(guess - delta, 1e-300)
    hi = min(guess + delta, ey * (1.0 - 1e-12))
    # expand until lo is not-above and hi is above
    while _direction(econ, t, lo, lookahead, cache) == ABOVE:
        delta_lo = (hi - lo)
        lo = max(lo - 2.0 * delta_lo, 1e-300)
        if lo <= 1e-299:
            break
    while _direction(econ, t, hi, lookahead, cache) != ABOVE:
        hi = min(hi + 2.0 * (hi - lo), ey * (1.0 - 1e-12))
        if hi >= ey * (1.0 - 1e-12):
            if _direction(econ, t, hi, lookahead, cache) != ABOVE:
                # whole range survives the lookahead; ride just below the bound
                return hi
            break
    return _refine_upper(econ, t, lo, hi, lookahead, cache)


def _refine_upper(econ: Economy, t: int, lo: float, hi: float,
                  lookahead: int, cache: dict) -> float:
    lo2, _hi2 = bisect_boundary(
        lambda a: _direction(econ, t, a, lookahead, cache) != ABOVE, lo, hi)
    return lo2


# ---------------------------------------------------------------------------
# closed-form equilibrium paths
# ---------------------------------------------------------------------------

CLOSED_FORM_MODELS = ("tirole-explicit", "log-no-old-endowment")


def closed_form_path(econ: Economy, model_id: str, T: Optional[int] = None) -> EquilibriumPath:
    """Exact equilibrium paths for the two solvable specifications.

    "tirole-explicit": stationary log economy whose dividend follows the
    explicit bubbly recursion; a_t = (n/R* - 1)/h + x d_t with h = n(1+beta)/e^o.
    "log-no-old-endowment": log economy with e^o = 0; a_t = beta/(1+beta) e^y_t.
    Validity inequalities are checked and named on failure.
    """
    if T is None:
        T = econ.horizon
    u = econ.utility
    if model_id == "tirole-explicit":
        if not isinstance(u, LogUtility):
            raise ModelPreconditionFailed("tirole-explicit needs a log utility family")
        if not econ.stationary_endowments:
            raise ModelPreconditionFailed("tirole-explicit needs stationary endowments")
        gen = econ.dividend
        if not (isinstance(gen, ClosedFormSeq) and gen.form == "tirole-explicit-d"):
            raise ModelPreconditionFailed(
                "tirole-explicit needs the matching closed-form dividend generator")
        p = gen.params
        ey, eo, n, beta = econ.ey(0), econ.eo(0), econ.n, u.beta
        for key, val in (("beta", beta), ("ey", ey), ("eo", eo), ("n", n)):
            if not math.isclose(p[key], val, rel_tol=1e-12):
                raise ModelPreconditionFailed(
                    f"dividend generator {key}={p[key]} does not match the economy ({val})")
        rstar = eo / (beta * ey)
        if not rstar < n:
            raise ModelPreconditionFailed(f"R* < n fails: R* = {rstar:.6g}, n = {n:.6g}")
        x = p["x"]
        denom = 1.0 - x * (n / rstar - 1.0)
        if not denom > 0.0:
            raise ModelPreconditionFailed(
                f"1 - x(n/R* - 1) > 0 fails: x = {x:.6g}, n/R* - 1 = {n / rstar - 1.0:.6g}")
        h = n * (1.0 + beta) / eo
        d0_cap = denom / (h * x * (1.0 + x))
        d0 = p["d0"]
        if not 0.0 < d0 < d0_cap:
            raise ModelPreconditionFailed(
                f"0 < d0 < (1 - x(n/R*-1))/(h x (1+x)) fails: d0 = {d0:.6g}, cap = {d0_cap:.6g}")
        base = (n / rstar - 1.0) / h
        a_vals = [base + x * econ.d(t) for t in range(T + 1)]
        return path_from_arrays(econ, a_vals)

    if model_id == "log-no-old-endowment":
        if not isinstance(u, LogUtility):
            raise ModelPreconditionFailed("log-no-old-endowment needs a log utility family")
        probe = list(range(0, min(T, 64) + 1)) + [T]
        if any(econ.eo(t) != 0.0 for t in probe):
            raise ModelPreconditionFailed("e^o_t = 0 for all t fails")
        frac = u.beta / (1.0 + u.beta)
        a_vals = [frac * econ.ey(t) for t in range(T + 1)]
        return path_from_arrays(econ, a_vals)

    raise DomainError(f"unknown closed-form model {model_id!r}; "
                      f"known: {CLOSED_FORM_MODELS}")
