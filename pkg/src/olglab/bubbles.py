"""Bubble tests, exogenous no-bubble conditions, and regime classification.

Two complementary toolkits live here.  The path-level test reads an already
computed equilibrium: the asset price carries a bubble iff sum D_t/q_t is
finite, with the fundamental share F_t/q_t strictly falling as a cross-check.
The economy-level checkers work from primitives alone: benchmark-rate
comparisons rule bubbles out, the saving-rate condition (clauses 1, 2a, 2b
below) forces every equilibrium to be bubbly or bubbleless depending on one
dividend series, and classify_regime assembles the full decision table for
stationary separable economies.

All series are evaluated in log space so that horizon-10^4 products of rates
neither overflow nor lose the tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .errors import InvalidSeries, NotApplicable
from .euler import benchmark_rate, forward_rate_ratio
from .model import (Constant, Economy, LogUtility, SequenceGen, ToleranceSet,
                    eval_sequence)
from .numerics import KahanAccumulator, geometric_mean_ratio, power_law_fit
from .paths import EquilibriumPath, PriceDecomposition

RHO_BAND = 1e-3
_POWER_R2 = 1.0 - 1e-7
_RATIO_SPREAD = 1.25
_ALPHA_AGREE = 1e-3
_RHO_DRIFT = 1e-6
_LIMINF_THRESHOLD = 1.0 + 1e-4

TermSource = Union[Callable[[int], float], Sequence[float]]


@dataclass(frozen=True)
class SeriesVerdict:
    value_partial: float
    tail_ratio: float
    verdict: str  # "Converges" | "Diverges" | "Inconclusive"
    bound: float  # partial + tail estimate when available, else inf/nan

    def describe(self) -> dict:
        return {"value_partial": self.value_partial, "tail_ratio": self.tail_ratio,
                "verdict": self.verdict, "bound": self.bound}


def series_test(terms: TermSource, cfg: ToleranceSet) -> SeriesVerdict:
    """Classify sum of a nonnegative series from its first series_T terms.

    Geometric-looking tails are settled by the mean tail ratio (Converges
    below 1 - 1e-3, Diverges above 1 + 1e-3).  In the ambiguous band a
    power-law fit t^(-alpha) on the second half decides by the p-series rule
    (alpha <= 1 diverges), and terms that stay bounded away from zero diverge
    outright.  Anything else is Inconclusive.

    Callable inputs are evaluated at t = 1..series_T; sequence inputs are
    taken as the terms for t = 1..len.
    """
    if callable(terms):
        vals = [float(terms(t)) for t in range(1, cfg.series_T + 1)]
    else:
        vals = [float(v) for v in terms]
    if not vals:
        raise InvalidSeries("empty series")
    acc = KahanAccumulator()
    for v in vals:
        if math.isnan(v):
            raise InvalidSeries("NaN term in series")
        if v < 0.0:
            raise InvalidSeries("series terms must be nonnegative")
        acc.add(v)
    partial = acc.value
    if any(math.isinf(v) for v in vals):
        return SeriesVerdict(math.inf, math.inf, "Diverges", math.inf)

    w = min(cfg.tail_ratio_window, max(2, len(vals) // 2))
    window = vals[-w:]
    if all(v == 0.0 for v in window):
        return SeriesVerdict(partial, 0.0, "Converges", partial)
    rho = geometric_mean_ratio(window)

    # polynomial tails first: their window ratio drifts toward 1 and would
    # otherwise be mistaken for geometric decay.  A genuine t^(-alpha) tail
    # (possibly times converged 1 + O(1/t) factors) fits log-log with
    # 1 - r2 <= 1e-9 and half-window exponents within ~1e-4; logarithmic
    # corrections like 1/(t log t) show 1 - r2 >= 5e-6 and exponent drift
    # >= 1e-2, so they fall through rather than earn an unsound p-rule bound.
    half = len(vals) // 2
    ts = [i + 1 for i in range(half, len(vals)) if vals[i] > 0.0]
    ys = [vals[i] for i in range(half, len(vals)) if vals[i] > 0.0]
    if len(ts) >= 8:
        alpha, r2, _c = power_law_fit(ts, ys)
        mid = len(ts) // 2
        a_lo = power_law_fit(ts[:mid], ys[:mid])[0]
        a_hi = power_law_fit(ts[mid:], ys[mid:])[0]
        agree = abs(a_lo - a_hi) <= _ALPHA_AGREE * max(1.0, abs(alpha))
        if r2 > _POWER_R2 and agree:
            if alpha <= 1.0 + 1e-9:
                return SeriesVerdict(partial, rho, "Diverges", math.inf)
            t_last = float(ts[-1])
            tail = ys[-1] * t_last / (alpha - 1.0)
            return SeriesVerdict(partial, rho, "Converges", partial + tail)

    steps = [window[i + 1] / window[i] for i in range(len(window) - 1)
             if window[i] > 0.0 and window[i + 1] > 0.0]
    # "steady" guards the ratio shortcuts against oscillating tails whose
    # endpoint ratio looks geometric but is not
    steady = (len(steps) == len(window) - 1
              and max(steps) <= _RATIO_SPREAD * min(steps))
    last_pos = next((v for v in reversed(vals) if v > 0.0), 0.0)
    if steady and not math.isnan(rho):
        if rho > 1.0 + RHO_BAND:
            return SeriesVerdict(partial, rho, "Diverges", math.inf)
        if window[-1] - window[0] == 0.0 or (
                max(window) - min(window) <= 1e-9 * max(window)):
            # terms pinned at a positive level: partial sums grow linearly.
            # Strict flatness only; a ratio merely near 1 may still be a
            # convergent geometric (0.99995^t) or a drifting polynomial.
            return SeriesVerdict(partial, rho, "Diverges", math.inf)
        if rho < 1.0 - RHO_BAND and len(window) >= 4:
            # the geometric bound is only sound if the ratio is genuinely
            # stable: polynomial tails drift ~1e-4 between half-windows on
            # their way to 1, true geometric tails are stable to 1e-15
            cut = len(window) // 2
            rho_a = geometric_mean_ratio(window[: cut + 1])
            rho_b = geometric_mean_ratio(window[cut:])
            if abs(rho_b - rho_a) <= max(1e-9, _RHO_DRIFT * rho):
                return SeriesVerdict(partial, rho, "Converges",
                                     partial + last_pos * rho / (1.0 - rho))
    return SeriesVerdict(partial, rho, "Inconclusive", math.nan)


@dataclass(frozen=True)
class LimitVerdict:
    value_last: float
    tail_ratio: float
    verdict: str  # "Zero" | "Positive" | "Inconclusive"

    def describe(self) -> dict:
        return {"value_last": self.value_last, "tail_ratio": self.tail_ratio,
                "verdict": self.verdict}


def _limit_verdict(log_terms: Sequence[float]) -> LimitVerdict:
    """Does exp(log_terms[t]) tend to zero or stay positive?"""
    finite = [x for x in log_terms if not math.isnan(x)]
    if not finite:
        return LimitVerdict(math.nan, math.nan, "Inconclusive")
    last = finite[-1]
    value_last = math.exp(last) if last < 700.0 else math.inf
    w = max(2, min(24, len(finite) // 2))
    tail = finite[-w:]
    rho = math.exp((tail[-1] - tail[0]) / max(1, len(tail) - 1))
    if tail[-1] < math.log(1e-300) or rho < 1.0 - RHO_BAND:
        return LimitVerdict(value_last, rho, "Zero")
    if rho > 1.0 + RHO_BAND or (min(tail) > math.log(1e-12) and rho >= 1.0 - RHO_BAND):
        return LimitVerdict(value_last, rho, "Positive")
    return LimitVerdict(value_last, rho, "Inconclusive")


# ---------------------------------------------------------------------------
# path-level bubble test
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BubbleTestReport:
    verdict: str  # "Bubbly" | "Bubbleless" | "Inconclusive"
    series: Optional[SeriesVerdict]
    fundamental_share_decreasing: Optional[bool]
    bubble_share_increasing: Optional[bool]
    monotone_verdict: str  # same labels, from the F/q shape alone
    bound_ok: Optional[bool]
    bound_value: float
    reason: str = ""

    def describe(self) -> dict:
        return {
            "verdict": self.verdict,
            "series": self.series.describe() if self.series else None,
            "fundamental_share_decreasing": self.fundamental_share_decreasing,
            "bubble_share_increasing": self.bubble_share_increasing,
            "monotone_verdict": self.monotone_verdict,
            "bound_ok": self.bound_ok,
            "bound_value": self.bound_value,
            "reason": self.reason,
        }


def bubble_test_path(econ: Economy, path: EquilibriumPath,
                     decomp: PriceDecomposition) -> BubbleTestReport:
    """Decide Bubbly/Bubbleless from sum D_t/q_t along a computed path.

    Per-capita identity D_t/q_t = d_t/a_t, so the series is formed without
    aggregate overflow.  The share cross-checks and the bound
    sum <= (F0/q0)/(1 - F0/q0) (truncated F0 plus its tail bound) are
    reported alongside; a decomposition whose dividend tail cannot be
    bounded yields Inconclusive.
    """
    if decomp.possibly_infinite_tail:
        return BubbleTestReport(
            verdict="Inconclusive", series=None,
            fundamental_share_decreasing=None, bubble_share_increasing=None,
            monotone_verdict="Inconclusive", bound_ok=None,
            bound_value=math.nan,
            reason="dividend tail of the decomposition is possibly infinite")

    Tmax = min(path.survived_to, econ.tol.series_T)
    terms = [econ.d(t) / path.a[t] for t in range(1, Tmax + 1)]
    sv = series_test(terms, econ.tol)

    # the decomposition pins f to zero at its truncation date, so the last
    # stretch of the shares is an artifact; judge the shape on the body only
    body = max(1, Tmax - econ.tol.tail_ratio_window)
    f_share = [decomp.f[t] / path.a[t] for t in range(0, body + 1)]
    b_share = [decomp.b[t] / path.a[t] for t in range(0, body + 1)]
    dec = all(f_share[t + 1] < f_share[t] for t in range(body))
    inc = all(b_share[t + 1] > b_share[t] for t in range(body))

    any_dividend = any(econ.d(t) > 0.0 for t in range(1, Tmax + 1))
    if not any_dividend:
        monotone = "Inconclusive"
    elif dec:
        monotone = "Bubbly"
    elif max(abs(s - 1.0) for s in f_share) < 1e-9:
        monotone = "Bubbleless"
    else:
        monotone = "Inconclusive"

    f0_frac = float((decomp.f[0] + decomp.tail_bound) / path.a[0])
    if f0_frac < 1.0:
        bound_value = f0_frac / (1.0 - f0_frac)
    else:
        bound_value = math.inf
    if sv.verdict == "Converges":
        verdict = "Bubbly"
        bound_ok = bool(sv.value_partial <= bound_value + 1e-8)
    elif sv.verdict == "Diverges":
        verdict = "Bubbleless"
        bound_ok = None
    else:
        verdict = "Inconclusive"
        bound_ok = None
    return BubbleTestReport(
        verdict=verdict, series=sv,
        fundamental_share_decreasing=dec, bubble_share_increasing=inc,
        monotone_verdict=monotone, bound_ok=bound_ok, bound_value=bound_value)


# ---------------------------------------------------------------------------
# economy-level no-bubble conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoBubbleReport:
    non_negligible_dividend: SeriesVerdict  # sum D_t/(n^t e^y_t); holds on Diverges
    high_interest: LimitVerdict             # lim n^t e^y_t/(R*_1..R*_t); holds on Zero
    not_too_low_interest: SeriesVerdict     # sum D_t/(R*_1..R*_t); holds on Converges
    flags: dict

    def describe(self) -> dict:
        return {
            "non_negligible_dividend": self.non_negligible_dividend.describe(),
            "high_interest": self.high_interest.describe(),
            "not_too_low_interest": self.not_too_low_interest.describe(),
            "flags": dict(self.flags),
        }


def _log_or_ninf(x: float) -> float:
    if x > 0.0:
        return math.log(x) if not math.isinf(x) else math.inf
    return -math.inf


def no_bubble_conditions(econ: Economy) -> NoBubbleReport:
    """Evaluate the three exogenous conditions that settle bubble existence.

    Flags are one-sided implications: True means the condition battery
    establishes the property, False means it does not (not that the property
    fails).  Uniqueness flags additionally need the separable monotone-trade
    assumption; without it they stay False.
    """
    T = econ.tol.series_T
    logn = math.log(econ.n)
    log_rstar_cum = [0.0]
    for s in range(1, T + 1):
        log_rstar_cum.append(log_rstar_cum[-1] + _log_or_ninf(benchmark_rate(econ, s - 1)))

    def safe_exp(x: float) -> float:
        if x == -math.inf:
            return 0.0
        if x > 709.0:
            return math.inf
        return math.exp(x)

    nn_terms = []
    hi_logs = []
    ntl_terms = []
    for t in range(1, T + 1):
        logD = _log_or_ninf(econ.D(t))
        log_cap = t * logn + _log_or_ninf(econ.ey(t))
        nn_terms.append(safe_exp(logD - log_cap))
        hi_logs.append(log_cap - log_rstar_cum[t])
        if logD == -math.inf:
            ntl_terms.append(0.0)
        else:
            ntl_terms.append(safe_exp(logD - log_rstar_cum[t]))

    nn = series_test(nn_terms, econ.tol)
    hi = _limit_verdict(hi_logs)
    ntl = series_test(ntl_terms, econ.tol)

    no_bubbly = nn.verdict == "Diverges" or hi.verdict == "Zero"
    separable_unique = bool(econ.add_assum)
    bubbleless_exists = ntl.verdict == "Converges" or (no_bubbly and separable_unique)
    # existence of the discounted-dividend path alone does not give
    # uniqueness (a continuum can sit on top of it); ruling out bubbly
    # equilibria is what pins the equilibrium down
    unique_bubbleless = separable_unique and no_bubbly and bubbleless_exists
    return NoBubbleReport(
        non_negligible_dividend=nn, high_interest=hi, not_too_low_interest=ntl,
        flags={"no-bubbly-equilibria": no_bubbly,
               "bubbleless-exists": bubbleless_exists,
               "unique-bubbleless": unique_bubbleless})


# ---------------------------------------------------------------------------
# saving-rate condition (clauses 1, 2a, 2b) and its constant-rate derivation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionBSpec:
    """Bounding-rate data for the saving-rate condition.

    X_t are the candidate rate bounds, Xbar_t the search caps for the
    fixed-point clause, eps_bar the saving-rate threshold, gamma optional
    weights for the generalized (vanishing saving rate) variant.
    """
    X: SequenceGen
    Xbar: SequenceGen
    eps_bar: float
    gamma: Optional[SequenceGen] = None
    T_start: int = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.eps_bar < 1.0:
            raise NotApplicable(f"eps_bar must lie in (0,1), got {self.eps_bar}")
        for t in range(0, 33):
            if eval_sequence(self.X, t) <= 0.0 or eval_sequence(self.Xbar, t) <= 0.0:
                raise NotApplicable("bounding rates X, Xbar must be positive")
            if self.gamma is not None:
                g = eval_sequence(self.gamma, t)
                if not 0.0 < g < 1.0:
                    raise NotApplicable("gamma weights must lie in (0,1)")

    def describe(self) -> dict:
        return {"X": self.X.describe(), "Xbar": self.Xbar.describe(),
                "eps_bar": self.eps_bar,
                "gamma": self.gamma.describe() if self.gamma else None,
                "T_start": self.T_start}


@dataclass(frozen=True)
class ConditionBReport:
    holds: bool
    clauses: dict
    spec_used: Optional[dict]
    derivation: Optional[dict]
    low_dividend_sum: SeriesVerdict  # sum D_t/(n^t e^y_t)
    conclusions: dict

    def describe(self) -> dict:
        return {"holds": self.holds, "clauses": dict(self.clauses),
                "spec_used": self.spec_used, "derivation": self.derivation,
                "low_dividend_sum": self.low_dividend_sum.describe(),
                "conclusions": dict(self.conclusions)}


def _growth_ratio_ge(econ: Economy, t: int) -> float:
    """Old-age endowment growth g_{e,t+1} = e^o_{t+1}/e^y_t."""
    return econ.eo(t + 1) / econ.ey(t)


def _fixed_points(econ: Economy, t: int, eps: float, xbar: float,
                  gamma_t: float) -> list[float]:
    """Solve X = V1(1-w, g_e+Xw)/V2(1-w, g_e+Xw) with w = eps*gamma_t on [0, xbar]."""
    w = eps * gamma_t
    ge = _growth_ratio_ge(econ, t)
    u = econ.utility
    if isinstance(u, LogUtility):
        denom = u.beta - w * (1.0 + u.beta)
        if denom <= 0.0:
            return []
        x = ge / denom
        return [x] if x <= xbar else []

    def psi(x: float) -> float:
        return forward_rate_ratio(econ, t, 1.0 - w, ge + x * w) - x

    roots = []
    k = 64
    prev_x, prev_s = 0.0, psi(0.0)
    for i in range(1, k + 1):
        x = xbar * i / k
        s = psi(x)
        if prev_s == 0.0:
            roots.append(prev_x)
        elif s * prev_s < 0.0:
            lo, hi = prev_x, x
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if psi(lo) * psi(mid) <= 0.0:
                    hi = mid
                else:
                    lo = mid
            roots.append(0.5 * (lo + hi))
        prev_x, prev_s = x, s
    if prev_s == 0.0:
        roots.append(prev_x)
    return roots


def condition_B_check(econ: Economy, bspec: Optional[ConditionBSpec] = None) -> ConditionBReport:
    """Check the saving-rate condition clause by clause.

    Clause 1 (not-too-low dividend): sum D_t/(X_1..X_t) diverges.
    Clause 2a: X_{t+1} <= n e^y_{t+1}/e^y_t from T_start on.
    Clause 2b: every fixed point X in [0, Xbar_{t+1}] of the small-trade
    rate equation satisfies X <= X_{t+1}, for saving rates below eps_bar.

    When no spec is supplied one is derived by the constant-rate recipe:
    find R with sup V1/V2(1-eps, g_e+eps) <= R <= inf n e^y_{t+1}/e^y_t and
    sum D_t/R^t = inf.  If the condition holds, every equilibrium keeps
    a_t/e^y_t (or a_t/(gamma_t e^y_t)) bounded away from zero and bubbliness
    is decided by the single series sum D_t/(n^t e^y_t).
    """
    derivation = None
    if bspec is None:
        bspec, derivation = _derive_condition_B(econ)
    low_div = _low_dividend_series(econ)
    if bspec is None:
        return ConditionBReport(
            holds=False,
            clauses={"not-too-low-dividend": {
                "passed": False,
                "witness": derivation.get("failure", "no admissible constant rate")}},
            spec_used=None, derivation=derivation, low_dividend_sum=low_div,
            conclusions={"saving-rate-bounded-away": False,
                         "all-bubbly": False, "all-bubbleless": False})

    T = econ.tol.series_T
    clauses: dict = {}

    # clause 1: sum D_t/(X_1..X_t) = inf
    log_x_cum = [0.0]
    for s in range(1, T + 1):
        log_x_cum.append(log_x_cum[-1] + math.log(eval_sequence(bspec.X, s)))
    c1_terms = []
    for t in range(1, T + 1):
        logD = _log_or_ninf(econ.D(t))
        c1_terms.append(0.0 if logD == -math.inf
                        else math.exp(min(700.0, logD - log_x_cum[t])))
    c1 = series_test(c1_terms, econ.tol)
    clauses["not-too-low-dividend"] = {
        "passed": c1.verdict == "Diverges", "witness": c1.describe()}

    # clause 2a: X_{t+1} <= n e^y_{t+1}/e^y_t for t >= T_start
    c2a_pass, c2a_witness = True, None
    for t in range(bspec.T_start, T + 1):
        cap = econ.n * econ.ey(t + 1) / econ.ey(t)
        x_next = eval_sequence(bspec.X, t + 1)
        if x_next > cap * (1.0 + 1e-12):
            c2a_pass, c2a_witness = False, {"t": t, "X": x_next, "cap": cap}
            break
    clauses["rate-below-growth"] = {"passed": c2a_pass, "witness": c2a_witness}

    # clause 2b: fixed points of the small-trade rate equation stay below X_{t+1}
    c2b_pass, c2b_witness = True, None
    step = max(1, (T - bspec.T_start) // 32)
    eps_grid = [bspec.eps_bar * k / 8.0 for k in range(1, 8)]
    for t in range(bspec.T_start, T + 1, step):
        xbar = eval_sequence(bspec.Xbar, t + 1)
        x_cap = eval_sequence(bspec.X, t + 1)
        gamma_t = eval_sequence(bspec.gamma, t) if bspec.gamma is not None else 1.0
        for eps in eps_grid:
            for root in _fixed_points(econ, t, eps, xbar, gamma_t):
                if root > x_cap * (1.0 + 1e-9):
                    c2b_pass = False
                    c2b_witness = {"t": t, "eps": eps, "fixed_point": root,
                                   "X": x_cap}
                    break
            if not c2b_pass:
                break
        if not c2b_pass:
            break
    clauses["small-trade-rate-dominated"] = {"passed": c2b_pass, "witness": c2b_witness}

    holds = all(c["passed"] for c in clauses.values())
    conclusions = {
        "saving-rate-bounded-away": holds,
        "all-bubbly": holds and low_div.verdict == "Converges",
        "all-bubbleless": holds and low_div.verdict == "Diverges",
    }
    return ConditionBReport(
        holds=holds, clauses=clauses, spec_used=bspec.describe(),
        derivation=derivation, low_dividend_sum=low_div, conclusions=conclusions)


def _low_dividend_series(econ: Economy) -> SeriesVerdict:
    T = econ.tol.series_T
    logn = math.log(econ.n)

    def term(t: int) -> float:
        logD = _log_or_ninf(econ.D(t))
        if logD == -math.inf:
            return 0.0
        return math.exp(min(700.0, logD - t * logn - _log_or_ninf(econ.ey(t))))

    return series_test(term, econ.tol)


def _derive_condition_B(econ: Economy) -> tuple[Optional[ConditionBSpec], dict]:
    """Constant-rate derivation: one R serving as every X_t."""
    eps_bar = 0.05
    T = min(econ.tol.series_T, 200)
    vmax = 0.0
    ncap_min = math.inf
    ncap_max = 0.0
    for t in range(1, T + 1):
        ge = _growth_ratio_ge(econ, t)
        vmax = max(vmax, forward_rate_ratio(econ, t, 1.0 - eps_bar, ge + eps_bar))
        cap = econ.n * econ.ey(t + 1) / econ.ey(t)
        ncap_min = min(ncap_min, cap)
        ncap_max = max(ncap_max, cap)

    root = econ.dividend.root_limit()
    if root is None:
        root = _numeric_root_limsup(econ)
    hi = min(ncap_min, root)
    record = {"vmax": vmax, "growth_cap": ncap_min, "dividend_root": root,
              "eps_bar": eps_bar}
    if not hi > vmax * (1.0 - 1e-12):
        record["failure"] = (
            f"no constant rate fits: forward-rate bound {vmax:.6g} exceeds "
            f"min(growth cap {ncap_min:.6g}, dividend root {root:.6g})")
        return None, record
    R = math.sqrt(max(vmax, 1e-300) * hi) if vmax > 0.0 else 0.5 * hi
    R = min(R, ncap_min)

    def div_term(t: int) -> float:
        logD = _log_or_ninf(econ.D(t))
        if logD == -math.inf:
            return 0.0
        return math.exp(min(700.0, logD - t * math.log(R)))

    sv = series_test(div_term, econ.tol)
    if sv.verdict != "Diverges":
        if vmax > 0.0:
            R = vmax
            sv = series_test(div_term, econ.tol)
        if sv.verdict != "Diverges":
            record["failure"] = (
                f"sum D_t/R^t fails to diverge at every admissible rate "
                f"(tried R={R:.6g}, verdict {sv.verdict})")
            record["R"] = R
            return None, record
    record["R"] = R
    spec = ConditionBSpec(X=Constant(R), Xbar=Constant(max(ncap_max, R)),
                          eps_bar=eps_bar, T_start=1)
    return spec, record


def _numeric_root_limsup(econ: Economy) -> float:
    """max of D_t^(1/t) over the last half of the series horizon."""
    T = econ.tol.series_T
    best = 0.0
    for t in range(max(2, T // 2), T + 1):
        D = econ.D(t)
        if D > 0.0:
            best = max(best, math.exp(_log_or_ninf(D) / t))
    return best


# ---------------------------------------------------------------------------
# regime classification
# ---------------------------------------------------------------------------

REGIMES = ("UniqueBubbleless", "Continuum", "UniqueBubbly",
           "KnifeEdgeRstarEqualsN", "Undetermined")


@dataclass(frozen=True)
class RegimeReport:
    R_star: float
    n: float
    tests: dict
    root_value: float
    regime: str
    basis: list
    optimality: dict

    def describe(self) -> dict:
        return {"R_star": self.R_star, "n": self.n,
                "tests": {k: v.describe() for k, v in self.tests.items()},
                "root_value": self.root_value, "regime": self.regime,
                "basis": list(self.basis),
                "optimality": dict(self.optimality)}


def _decide_regime(rstar: float, n: float, growth_verdict: str,
                   bench_verdict: str, root_value: float) -> tuple[str, list]:
    """Pure decision table: same inputs, same regime."""
    if rstar > n * (1.0 + 1e-12):
        return "UniqueBubbleless", ["benchmark-rate-above-growth: R* > n"]
    if growth_verdict == "Inconclusive":
        return "Undetermined", ["dividend-growth-series-inconclusive: sum D_t/n^t unresolved"]
    if growth_verdict == "Diverges":
        return "UniqueBubbleless", ["non-negligible-dividend: sum D_t/n^t = inf"]
    if abs(rstar - n) <= 1e-12 * n:
        return "KnifeEdgeRstarEqualsN", ["balanced-benchmark-rate: R* = n, sum D_t/n^t < inf"]
    # now R* < n and sum D_t/n^t converges
    if bench_verdict == "Converges":
        return "Continuum", [
            "low-rate-small-dividend: R* < n, sum D_t/n^t < inf, sum D_t/(R*)^t < inf"]
    if root_value > rstar * (1.0 + 1e-9):
        return "UniqueBubbly", [
            "dividend-root-above-benchmark: R* < n, sum D_t/n^t < inf, limsup D_t^(1/t) > R*"]
    if bench_verdict == "Inconclusive":
        return "Undetermined", ["benchmark-series-inconclusive: sum D_t/(R*)^t unresolved"]
    return "Undetermined", [
        "no-clause-fires: sum D_t/(R*)^t = inf but limsup D_t^(1/t) <= R*"]


_OPTIMALITY = {
    "UniqueBubbleless": {"unique": "Pareto optimal"},
    "Continuum": {"maximal": "asymptotically bubbly and Pareto optimal",
                  "interior": "not Pareto optimal"},
    "UniqueBubbly": {"unique": "Pareto optimal"},
    "KnifeEdgeRstarEqualsN": {},
    "Undetermined": {},
}


def classify_regime(econ: Economy) -> RegimeReport:
    """Place a stationary separable economy in the equilibrium-set taxonomy.

    Inputs to the decision table are the benchmark rate R*, the growth
    factor n, the verdicts of sum D_t/n^t and sum D_t/(R*)^t, and
    limsup D_t^(1/t) (analytic when the dividend generator knows it).
    """
    if not econ.stationary_endowments:
        raise NotApplicable(
            "regime table needs stationary endowments; use the condition-level "
            "checkers for growing economies")
    if not econ.add_assum:
        raise NotApplicable(
            "regime table needs the separable monotone-trade assumption "
            "(c v'(c) nondecreasing, e^o > 0)")
    rstar = benchmark_rate(econ, 0)
    n = econ.n
    T = econ.tol.series_T
    logn = math.log(n)
    log_rstar = math.log(rstar)

    def growth_term(t: int) -> float:
        logD = _log_or_ninf(econ.D(t))
        return 0.0 if logD == -math.inf else math.exp(min(700.0, logD - t * logn))

    def bench_term(t: int) -> float:
        logD = _log_or_ninf(econ.D(t))
        return 0.0 if logD == -math.inf else math.exp(min(700.0, logD - t * log_rstar))

    growth = series_test(growth_term, econ.tol)
    bench = series_test(bench_term, econ.tol)
    capacity = _low_dividend_series(econ)

    root = econ.dividend.root_limit()
    if root is None:
        root = _numeric_root_limsup(econ)

    regime, basis = _decide_regime(rstar, n, growth.verdict, bench.verdict, root)
    return RegimeReport(
        R_star=rstar, n=n,
        tests={"dividends-over-growth": growth,
               "dividends-over-benchmark": bench,
               "dividends-over-capacity": capacity},
        root_value=root, regime=regime, basis=basis,
        optimality=dict(_OPTIMALITY[regime]))


# ---------------------------------------------------------------------------
# ratio/root probes along a path
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthProbeReport:
    dalembert_liminf: float
    cauchy_liminf: float
    dalembert_ok: bool
    cauchy_ok: bool
    threshold: float = _LIMINF_THRESHOLD

    def describe(self) -> dict:
        return {"dalembert_liminf": self.dalembert_liminf,
                "cauchy_liminf": self.cauchy_liminf,
                "dalembert_ok": self.dalembert_ok, "cauchy_ok": self.cauchy_ok,
                "threshold": self.threshold}


def growth_rate_probe(econ: Economy, path: EquilibriumPath) -> GrowthProbeReport:
    """Ratio and root surrogates for the equilibrium necessary conditions.

    Along any equilibrium, liminf (D_{t+1}/D_t)/R_{t+1} <= 1 and
    liminf (D_t/(R_1..R_t))^(1/t) <= 1.  Running minima over the second half
    of the window stand in for the liminf; values above 1 + 1e-4 flag
    non-equilibrium inputs.
    """
    Tmax = min(path.survived_to, econ.tol.series_T)
    if Tmax < 4:
        raise NotApplicable("path too short for liminf surrogates")
    for t in range(1, Tmax + 1):
        if not econ.D(t) > 0.0:
            raise NotApplicable("ratio probes need strictly positive dividends")

    log_r_cum = [0.0] * (Tmax + 1)
    for s in range(1, Tmax + 1):
        log_r_cum[s] = log_r_cum[s - 1] + math.log(path.R[s])

    ratio_terms = []
    root_terms = []
    for t in range(1, Tmax):
        ratio_terms.append((econ.D(t + 1) / econ.D(t)) / path.R[t + 1])
    for t in range(1, Tmax + 1):
        root_terms.append(math.exp((_log_or_ninf(econ.D(t)) - log_r_cum[t]) / t))

    start_ratio = max(0, len(ratio_terms) // 2)
    start_root = max(0, len(root_terms) // 2)
    dal = float(min(ratio_terms[start_ratio:]))
    cau = float(min(root_terms[start_root:]))
    return GrowthProbeReport(
        dalembert_liminf=dal, cauchy_liminf=cau,
        dalembert_ok=dal <= _LIMINF_THRESHOLD, cauchy_ok=cau <= _LIMINF_THRESHOLD)
