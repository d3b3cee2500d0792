"""Pareto-optimality diagnostics on computed equilibrium paths.

With population weights the right objects are P_t = n^t/(R_1..R_t) and the
Cass-type sum 1/(P_t e_t).  Sufficiency for optimality comes from vanishing
supported young consumption value (P_t c^y_t -> 0), from the Cass sum
diverging under a uniform strictness constant, or from the asset value
staying significant.  Non-optimality is certified constructively by a
dominating equilibrium (strictly higher welfare for every generation plus a
better-off initial old), with the smoothness-based converse of the Cass
criterion as fallback.

All liminf/limsup claims are finite-horizon surrogates: running extrema
over the final half of the window, gated by the trend so a slowly decaying
sequence is not mistaken for one bounded away from zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .bubbles import SeriesVerdict, bubble_test_path, series_test
from .eqset import maximal_path
from .errors import DomainError, RankViolation, SmoothnessUnbounded
from .model import (CRRA2Utility, CRRAUtility, Economy, LogUtility,
                    aggregate_supply)
from .paths import EquilibriumPath, PriceDecomposition, simulate
from .numerics import trend_slope

_SUPPORT_DROP = 1e-8  # P_t c^y_t must fall below this multiple of its start
_SHORTCUT_MARGIN = 1e-6
_RANK_TOL = 1e-10


# ---------------------------------------------------------------------------
# liminf / limsup surrogates
# ---------------------------------------------------------------------------

def _tail(vals: list) -> list:
    return vals[len(vals) // 2:]


def _liminf_positive(vals: list) -> bool:
    """Tail minimum positive at scale and not still decaying."""
    if len(vals) < 4:
        return False
    tail = _tail(vals)
    m = min(tail)
    scale = max(abs(vals[0]), 1e-300)
    return m > 1e-6 * scale and tail[-1] >= 0.5 * tail[0]


def _limsup_positive(vals: list) -> bool:
    if len(vals) < 4:
        return False
    tail = _tail(vals)
    return max(tail) > 1e-6 * max(abs(vals[0]), 1e-300) and max(tail) > 0.0


# ---------------------------------------------------------------------------
# support prices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SupportPriceReport:
    passed: bool
    min_log_level: float      # min over t of log(P_t c^y_t)
    threshold_log: float
    trend: float              # slope of log(P_t c^y_t) over the final half
    shortcut_fired: bool      # liminf R_t > n with bounded e_t
    min_tail_rate: float

    def describe(self) -> dict:
        return {"passed": self.passed, "min_log_level": self.min_log_level,
                "threshold_log": self.threshold_log, "trend": self.trend,
                "shortcut_fired": self.shortcut_fired,
                "min_tail_rate": self.min_tail_rate}


def support_price_test(econ: Economy, path: EquilibriumPath,
                       decomp: PriceDecomposition) -> SupportPriceReport:
    """PASS when the supported value of young consumption vanishes.

    Main route: the running minimum of log(P_t c^y_t) drops below
    log(1e-8 P_0 c^y_0) while still trending down.  Shortcut: rates stay
    above the population growth factor (liminf R_t > n) while per-capita
    supply stays bounded, which forces P_t e_t -> 0.
    """
    Tmax = min(path.survived_to, econ.tol.series_T)
    logs = [decomp.logP[t] + math.log(path.cy[t]) for t in range(Tmax + 1)]
    threshold = math.log(_SUPPORT_DROP) + logs[0]
    min_level = min(logs)
    trend = trend_slope(_tail(logs))
    main = min_level < threshold and trend < 0.0

    rates = [path.R[t] for t in range(1, Tmax + 1)]
    e_vals = [aggregate_supply(econ, t) for t in range(Tmax + 1)]
    min_tail_rate = min(_tail(rates)) if len(rates) >= 4 else math.nan
    bounded_e = max(_tail(e_vals)) <= max(e_vals[: max(1, len(e_vals) // 2)]) * (1.0 + 1e-3)
    shortcut = (len(rates) >= 4
                and min_tail_rate > econ.n * (1.0 + _SHORTCUT_MARGIN)
                and bounded_e)
    # cast: comparisons on np.float64 yield np.bool_, which json rejects
    return SupportPriceReport(
        passed=bool(main or shortcut), min_log_level=float(min_level),
        threshold_log=float(threshold), trend=float(trend),
        shortcut_fired=bool(shortcut), min_tail_rate=float(min_tail_rate))


def cass_criterion(econ: Economy, path: EquilibriumPath) -> SeriesVerdict:
    """Series verdict for sum (R_1..R_t)/(n^t e_t), computed in log space."""
    Tmax = min(path.survived_to, econ.tol.series_T)
    logn = math.log(econ.n)
    terms = []
    log_r_cum = 0.0
    for t in range(1, Tmax + 1):
        log_r_cum += math.log(path.R[t])
        x = log_r_cum - t * logn - math.log(aggregate_supply(econ, t))
        terms.append(math.exp(min(700.0, x)))
    return series_test(terms, econ.tol)


# ---------------------------------------------------------------------------
# strictness and smoothness constants
# ---------------------------------------------------------------------------

def strictness_constant(econ: Economy, path: EquilibriumPath, h: float = 0.5) -> float:
    """Uniform strictness constant mu over the path.

    mu = inf_t (c^y_t/u'(c^y_t)) * inf over [(1-h)c^y_t, c^y_t] of (-u''/2).
    Isoelastic marginal utility u'(c) = c^(-sigma) gives mu = sigma/2 exactly,
    independent of the path; other families are evaluated numerically and may
    degrade to 0, which downstream treats as "strictness unverified".
    """
    if not 0.0 < h <= 1.0:
        raise DomainError(f"h must lie in (0,1], got {h}")
    u = econ.utility
    sig = u.crra_sigma_u
    if sig is not None:
        return sig / 2.0
    Tmax = min(path.survived_to, econ.tol.series_T)
    step = max(1, Tmax // 256)
    best = math.inf
    for t in range(0, Tmax + 1, step):
        c = path.cy[t]
        inner = min(-0.5 * u.u2((1.0 - h) * c + (h * c) * k / 15.0)
                    for k in range(16))
        best = min(best, c / u.u1(c) * inner)
    return max(0.0, best if math.isfinite(best) else 0.0)


def smoothness_constants(econ: Economy, path: EquilibriumPath,
                         x: float) -> tuple[float, float]:
    """Uniform smoothness constants (theta1, theta2) at reference share x.

    Isoelastic families admit theta2 = sigma/2 and theta1 = (sigma/2)/x^(1+sigma)
    (each nudged up by 1e-6 so the defining inequalities are strict).  Other
    families get the sup-based constants: theta1 over [x c^y_t, c^y_t] on the
    young side, theta2 over [c^o_{t+1}, n e_{t+1}] on the old side.
    """
    if not 0.0 < x < 1.0:
        raise DomainError(f"x must lie in (0,1), got {x}")
    u = econ.utility
    sig_u, sig_v = u.crra_sigma_u, u.crra_sigma_v
    if sig_u is not None and sig_v is not None:
        theta1 = (sig_u / 2.0) / x ** (1.0 + sig_u) * (1.0 + 1e-6)
        theta2 = (sig_v / 2.0) * (1.0 + 1e-6)
        return theta1, theta2

    Tmax = min(path.survived_to, econ.tol.series_T)
    step = max(1, Tmax // 256)
    m1 = m2 = 0.0
    for t in range(0, Tmax, step):
        cy = path.cy[t]
        sup_u = max(-0.5 * u.u2(x * cy + (1.0 - x) * cy * k / 15.0)
                    for k in range(16))
        m1 = max(m1, cy / u.u1(cy) * sup_u)
        co = path.co[t + 1]
        hi = econ.n * aggregate_supply(econ, t + 1)
        sup_v = max(-0.5 * u.v2(co + (hi - co) * k / 15.0) for k in range(16))
        m2 = max(m2, co / u.v1(co) * sup_v)
    if not (math.isfinite(m1) and math.isfinite(m2)):
        raise SmoothnessUnbounded(
            f"sup-based smoothness constants do not stay finite (M1={m1}, M2={m2})")
    return m1, m2


# ---------------------------------------------------------------------------
# welfare comparison
# ---------------------------------------------------------------------------

def _pow_diff(c_hi: float, c_lo: float, sigma: float) -> float:
    """(c_hi^(1-sigma) - c_lo^(1-sigma))/(1-sigma) without cancellation."""
    if sigma == 1.0:
        return math.log1p((c_hi - c_lo) / c_lo)
    s = 1.0 - sigma
    return c_lo ** s * math.expm1(s * math.log1p((c_hi - c_lo) / c_lo)) / s


def welfare_margin(econ: Economy, hi: EquilibriumPath, lo: EquilibriumPath,
                   t: int) -> float:
    """U_t(hi) - U_t(lo), computed difference-aware for the standard families."""
    u = econ.utility
    cy_h, cy_l = hi.cy[t], lo.cy[t]
    co_h, co_l = hi.co[t + 1], lo.co[t + 1]
    if isinstance(u, LogUtility):
        return (math.log1p((cy_h - cy_l) / cy_l)
                + u.beta * math.log1p((co_h - co_l) / co_l))
    if isinstance(u, CRRAUtility):
        return (_pow_diff(cy_h, cy_l, u.sigma)
                + u.beta * _pow_diff(co_h, co_l, u.sigma))
    if isinstance(u, CRRA2Utility):
        return (_pow_diff(cy_h, cy_l, u.sigma1)
                + u.beta * _pow_diff(co_h, co_l, u.sigma2))
    return (u.u(cy_h) - u.u(cy_l)) + u.beta * (u.v(co_h) - u.v(co_l))


@dataclass(frozen=True)
class WelfareRankReport:
    entries: list          # per input: {a0, survived, error}
    order: list            # surviving a0 values, ascending welfare
    pair_margins: list     # per adjacent pair: {low, high, min_margin, margins}
    strict: bool

    def describe(self) -> dict:
        return {"entries": list(self.entries), "order": list(self.order),
                "pair_margins": [dict(p) for p in self.pair_margins],
                "strict": self.strict}


def welfare_rank(econ: Economy, a0_list: list) -> WelfareRankReport:
    """Order equilibria by initial asset value and verify welfare agrees.

    Every generation prefers the path with the larger a_0, so the welfare
    order must match the a_0 order date by date.  A margin below -1e-10
    signals a solver inconsistency and raises RankViolation; non-surviving
    entries are reported per entry instead of aborting the ranking.
    """
    entries = []
    paths: list[tuple[float, EquilibriumPath]] = []
    for a0 in a0_list:
        try:
            p = simulate(econ, a0)
            if not p.status.survived:
                entries.append({"a0": a0, "survived": False,
                                "error": f"path leaves (0, e^y) at t={p.status.t}"})
            else:
                entries.append({"a0": a0, "survived": True, "error": None})
                paths.append((a0, p))
        except DomainError as err:
            entries.append({"a0": a0, "survived": False, "error": str(err)})

    paths.sort(key=lambda pair: pair[0])
    Tmax = min(econ.tol.series_T,
               min((p.survived_to for _, p in paths), default=0))
    pair_margins = []
    strict = True
    for (a_lo, p_lo), (a_hi, p_hi) in zip(paths, paths[1:]):
        margins = [welfare_margin(econ, p_hi, p_lo, t) for t in range(Tmax)]
        worst = min(margins) if margins else math.nan
        if margins and worst < -_RANK_TOL:
            t_bad = margins.index(worst)
            raise RankViolation(
                f"welfare order contradicts a0 order: a0={a_hi} vs {a_lo} "
                f"at t={t_bad}, margin={worst:.3e}")
        if not margins or worst <= 0.0:
            strict = False
        pair_margins.append({"low": a_lo, "high": a_hi,
                             "min_margin": worst, "margins": margins})
    return WelfareRankReport(
        entries=entries, order=[a0 for a0, _ in paths],
        pair_margins=pair_margins, strict=strict)


# ---------------------------------------------------------------------------
# the certificate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParetoCertificate:
    liminf_Pcy: float
    cass_sum: SeriesVerdict
    mu: float
    theta1: float
    theta2: float
    verdict: str  # "Optimal" | "NotOptimal" | "Undetermined"
    rationale: list
    support: SupportPriceReport
    domination: Optional[dict] = None

    def describe(self) -> dict:
        return {"liminf_Pcy": self.liminf_Pcy,
                "cass_sum": self.cass_sum.describe(), "mu": self.mu,
                "theta1": self.theta1, "theta2": self.theta2,
                "verdict": self.verdict, "rationale": list(self.rationale),
                "support": self.support.describe(),
                "domination": dict(self.domination) if self.domination else None}


def _domination_witness(econ: Economy, path: EquilibriumPath) -> Optional[dict]:
    """Maximal path strictly better for every generation, if it exists."""
    Tmax = min(path.survived_to, econ.tol.series_T)
    try:
        top = maximal_path(econ, Tmax)
    except Exception:
        return None
    if not top.a[0] > path.a[0] * (1.0 + 1e-9):
        return None
    if not top.co[0] > path.co[0]:
        return None
    margins = [welfare_margin(econ, top, path, t) for t in range(Tmax)]
    if margins and min(margins) > 0.0:
        return {"dominating_a0": float(top.a[0]), "min_margin": float(min(margins)),
                "dates_checked": Tmax}
    return None


def certify(econ: Economy, path: EquilibriumPath,
            decomp: PriceDecomposition) -> ParetoCertificate:
    """Assemble an optimality verdict from the sufficiency/necessity battery.

    Optimal when any route fires: (i) support prices vanish, (ii) Cass sum
    diverges with positive strictness, (iii) asset value stays significant
    with positive strictness, (iv) bubbleless with saving rate bounded away
    from zero.  NotOptimal needs a constructive witness: a dominating
    equilibrium, or the verified smoothness/interiority battery against a
    converging Cass sum.  Everything else is Undetermined.
    """
    Tmax = min(path.survived_to, econ.tol.series_T)
    support = support_price_test(econ, path, decomp)
    cass = cass_criterion(econ, path)
    mu = strictness_constant(econ, path)
    try:
        theta1, theta2 = smoothness_constants(econ, path, x=0.5)
        smooth_ok = True
    except SmoothnessUnbounded:
        theta1 = theta2 = math.nan
        smooth_ok = False

    pcy_tail = [math.exp(decomp.logP[t] + math.log(path.cy[t]))
                for t in range(Tmax // 2, Tmax + 1)]
    liminf_pcy = min(pcy_tail) if pcy_tail else math.nan

    rationale: list[str] = []
    if support.passed:
        rationale.append("support-shortcut-high-rates" if support.shortcut_fired
                         else "support-price-vanishes")
    if cass.verdict == "Diverges" and mu > 0.0:
        rationale.append("cass-sum-diverges-with-strict-curvature")
    a_over_e = [path.a[t] / aggregate_supply(econ, t) for t in range(Tmax + 1)]
    if mu > 0.0 and _limsup_positive(a_over_e):
        rationale.append("significant-asset-value")
    a_over_ey = [path.a[t] / econ.ey(t) for t in range(Tmax + 1)]
    bubble = bubble_test_path(econ, path, decomp)
    if bubble.verdict == "Bubbleless" and _liminf_positive(a_over_ey):
        rationale.append("bubbleless-with-nonvanishing-saving")

    if rationale:
        return ParetoCertificate(
            liminf_Pcy=liminf_pcy, cass_sum=cass, mu=mu,
            theta1=theta1, theta2=theta2, verdict="Optimal",
            rationale=rationale, support=support)

    witness = _domination_witness(econ, path)
    if witness is not None:
        return ParetoCertificate(
            liminf_Pcy=liminf_pcy, cass_sum=cass, mu=mu,
            theta1=theta1, theta2=theta2, verdict="NotOptimal",
            rationale=["dominated-by-larger-equilibrium"],
            support=support, domination=witness)

    if smooth_ok and cass.verdict == "Converges":
        e_vals = [aggregate_supply(econ, t) for t in range(Tmax + 1)]
        cy_share = [path.cy[t] / e_vals[t] for t in range(Tmax + 1)]
        co_share = [path.co[t] / (econ.n * e_vals[t]) for t in range(Tmax + 1)]
        pco = [(econ.n / path.R[t + 1]) * path.co[t + 1] / e_vals[t]
               for t in range(Tmax)]
        battery = (_liminf_positive(cy_share)
                   and max(_tail(co_share)) < 1.0 - 1e-6
                   and _liminf_positive(pco))
        if battery:
            return ParetoCertificate(
                liminf_Pcy=liminf_pcy, cass_sum=cass, mu=mu,
                theta1=theta1, theta2=theta2, verdict="NotOptimal",
                rationale=["cass-sum-converges-under-smooth-interior-battery"],
                support=support)

    return ParetoCertificate(
        liminf_Pcy=liminf_pcy, cass_sum=cass, mu=mu,
        theta1=theta1, theta2=theta2, verdict="Undetermined",
        rationale=["no-route-fired"], support=support)
