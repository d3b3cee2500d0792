"""Forward simulation, price decomposition, welfare, CSV emission.

A path stores per-capita asset values a_t, gross rates R_t (R[t] links
t-1 to t; R[0] is nan), consumptions, and aggregate prices q_t = n^t a_t.
The defining identities are

    R_{t+1} solves the one-period Euler equation at a_t,
    a_{t+1} = a_t R_{t+1} / n - d_{t+1}        (non-arbitrage),

and a path is alive at t while 0 < a_t < e^y_t strictly.  Bound violations
are statuses, not exceptions: the survival bisection upstream relies on
telling the two exit directions apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Optional

import numpy as np

from .errors import DomainError, NoFiniteRate
from .euler import g_solve
from .model import Economy
from .numerics import KahanAccumulator, geometric_mean_ratio

# a_t below this fraction of e^y_t counts as collapsed (denormal guard)
_NEAR_ZERO = 1e-300

STATUS_SURVIVED = "survived-horizon"
STATUS_COLLAPSED = "collapsed-below-zero"
STATUS_HIT_BOUND = "hit-endowment-bound"


@dataclass(frozen=True)
class PathStatus:
    kind: str
    t: Optional[int] = None

    @property
    def survived(self) -> bool:
        return self.kind == STATUS_SURVIVED

    def describe(self) -> dict:
        return {"kind": self.kind, "t": self.t}


@dataclass(frozen=True)
class EquilibriumPath:
    """Arrays indexed t = 0..survived_to; R[0] is nan."""

    a: np.ndarray
    R: np.ndarray
    cy: np.ndarray
    co: np.ndarray
    q: np.ndarray
    survived_to: int
    status: PathStatus

    def __len__(self) -> int:
        return self.survived_to + 1


def forward_step(econ: Economy, t: int, a_t: float) -> tuple[float, float]:
    """One step of the equilibrium recursion: (R_{t+1}, a_{t+1})."""
    R = g_solve(econ, t, a_t)
    a_next = a_t * R / econ.n - econ.d(t + 1)
    return R, a_next


def _assemble(econ: Economy, a_list: list[float], R_list: list[float],
              status: PathStatus) -> EquilibriumPath:
    s = len(a_list) - 1
    a = np.asarray(a_list, dtype=float)
    R = np.asarray([math.nan] + R_list, dtype=float)
    ey = np.asarray([econ.ey(t) for t in range(s + 1)])
    eo = np.asarray([econ.eo(t) for t in range(s + 1)])
    d = np.asarray([econ.d(t) for t in range(s + 1)])
    cy = ey - a
    co = eo + econ.n * (a + d)
    logn = math.log(econ.n) if econ.n != 1.0 else 0.0
    with np.errstate(over="ignore"):
        q = a * np.exp(logn * np.arange(s + 1)) if logn else a.copy()
    return EquilibriumPath(a=a, R=R, cy=cy, co=co, q=q, survived_to=s, status=status)


def simulate(econ: Economy, a0: float, T: Optional[int] = None) -> EquilibriumPath:
    """Run the recursion from a0 for T steps; bound violations end the path.

    Exit codes: a_{t+1} <= 0 (or denormal-small) -> collapsed at t+1;
    a_{t+1} >= e^y_{t+1} -> hit the endowment bound at t+1.  A saving level
    with no finite Euler rate also ends the path on the high side: the root
    existence bound is the effective upper limit for continuation.
    """
    if T is None:
        T = econ.horizon
    ey0 = econ.ey(0)
    if not 0.0 < a0 < ey0:
        raise DomainError(f"a0={a0} outside (0, e^y_0={ey0})")
    a_list = [float(a0)]
    R_list: list[float] = []
    status = PathStatus(STATUS_SURVIVED)
    for t in range(T):
        try:
            R, a_next = forward_step(econ, t, a_list[t])
        except NoFiniteRate:
            status = PathStatus(STATUS_HIT_BOUND, t)
            break
        if not (a_next > _NEAR_ZERO * econ.ey(t + 1)) or math.isnan(a_next):
            status = PathStatus(STATUS_COLLAPSED, t + 1)
            break
        if a_next >= econ.ey(t + 1):
            status = PathStatus(STATUS_HIT_BOUND, t + 1)
            break
        a_list.append(a_next)
        R_list.append(R)
    return _assemble(econ, a_list, R_list, status)


def path_from_arrays(econ: Economy, a_values: list[float]) -> EquilibriumPath:
    """Build a path from given a_t values, deriving R from non-arbitrage.

    R_{t+1} = n (a_{t+1} + d_{t+1}) / a_t, which keeps the pricing identities
    exact regardless of how the a_t were produced (closed forms, boundary
    tracking).  Callers guarantee the values are a valid equilibrium prefix.
    """
    R_list = [econ.n * (a_values[t + 1] + econ.d(t + 1)) / a_values[t]
              for t in range(len(a_values) - 1)]
    return _assemble(econ, [float(v) for v in a_values], R_list,
                     PathStatus(STATUS_SURVIVED))


def welfare(econ: Economy, path: EquilibriumPath, t: int) -> float:
    """Lifetime utility of generation t along the path: u(c^y_t) + beta v(c^o_{t+1})."""
    if not 0 <= t < path.survived_to:
        raise DomainError(f"welfare needs 0 <= t < {path.survived_to}, got {t}")
    u = econ.utility
    cy = float(path.cy[t])
    co1 = float(path.co[t + 1])
    if cy <= 0.0 or co1 <= 0.0:
        raise DomainError(f"consumptions not positive at t={t}: cy={cy}, co'={co1}")
    return u.u(cy) + u.beta * u.v(co1)


# ---------------------------------------------------------------------------
# price decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PriceDecomposition:
    """Truncated fundamental/bubble split along a path.

    logQ[t] = -sum_{s<=t} log R_s (equilibrium discounts), logP = t log n + logQ.
    F is the truncated fundamental value (aggregate), B = q - F; f, b are the
    per-capita counterparts.  tail_bound bounds the truncation error of F_0
    by a geometric tail estimate; it is inf when the tail ratio is >= 1
    (possibly infinite tail).
    """

    logQ: np.ndarray
    logP: np.ndarray
    F: np.ndarray
    f: np.ndarray
    B: np.ndarray
    b: np.ndarray
    tail_bound: float
    tail_ratio: float

    @property
    def possibly_infinite_tail(self) -> bool:
        return not math.isfinite(self.tail_bound)


def decompose(econ: Economy, path: EquilibriumPath) -> PriceDecomposition:
    """Split prices into fundamental and bubble parts on a surviving path.

    The fundamental is accumulated backward in per-capita form,
        f_t = n (f_{t+1} + d_{t+1}) / R_{t+1},  f_T = 0,
    which makes the recursion identities F_{t+1} + D_{t+1} = R_{t+1} F_t and
    B_{t+1} = R_{t+1} B_t exact in floating point given the path's own
    non-arbitrage linkage.
    """
    if not path.status.survived:
        raise DomainError("decompose needs a path that survived its horizon")
    s = path.survived_to
    n = econ.n
    logn = math.log(n)
    logQ = np.zeros(s + 1)
    for t in range(1, s + 1):
        logQ[t] = logQ[t - 1] - math.log(path.R[t])
    logP = logn * np.arange(s + 1) + logQ

    d = np.asarray([econ.d(t) for t in range(s + 1)])
    f = np.zeros(s + 1)
    for t in range(s - 1, -1, -1):
        f[t] = n * (f[t + 1] + d[t + 1]) / path.R[t + 1]
    b = path.a - f
    with np.errstate(over="ignore"):
        scale = np.exp(logn * np.arange(s + 1)) if n != 1.0 else np.ones(s + 1)
        F = f * scale
        B = b * scale

    # bound the truncated tail sum_(u>s) P_u d_u by classifying the
    # discounted dividend terms; the series rules are drift-aware, so a
    # ratio creeping toward 1 is not mistaken for geometric decay
    from .bubbles import series_test
    terms = [math.exp(logP[t] + math.log(d[t])) if d[t] > 0.0 else 0.0
             for t in range(1, s + 1)]
    if not terms:
        tail_bound, rho = 0.0, 0.0
    else:
        v = series_test(terms, econ.tol)
        rho = v.tail_ratio
        if v.verdict == "Converges":
            tail_bound = max(0.0, v.bound - v.value_partial)
        else:
            tail_bound = math.inf
    return PriceDecomposition(logQ=logQ, logP=logP, F=F, f=f, B=B, b=b,
                              tail_bound=float(tail_bound),
                              tail_ratio=float(rho) if not math.isnan(rho) else float("nan"))


def telescoping_residual(econ: Economy, path: EquilibriumPath,
                         decomp: PriceDecomposition) -> float:
    """Relative gap in q_0 = sum_s Q_s D_s + Q_T q_T, evaluated per-capita.

    Dividing by n^t turns the identity into a_0 = sum_s P_s d_s + P_T a_T,
    which stays in range at any horizon.  Compensated summation keeps the
    check meaningful at T = 10^4.
    """
    s = path.survived_to
    acc = KahanAccumulator()
    for t in range(1, s + 1):
        d_t = econ.d(t)
        if d_t > 0.0:
            acc.add(math.exp(decomp.logP[t] + math.log(d_t)))
    acc.add(math.exp(decomp.logP[s] + math.log(path.a[s])))
    return abs(acc.value - path.a[0]) / abs(path.a[0])


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

_CSV_COLUMNS = ("t", "a", "R", "q", "cy", "co", "f", "b", "logQ", "logP")


def write_path_csv(econ: Economy, path: EquilibriumPath,
                   decomp: Optional[PriceDecomposition], fh: IO[str]) -> None:
    """Emit the path (and decomposition, when given) with 17 significant digits."""
    fh.write(",".join(_CSV_COLUMNS) + "\n")
    s = path.survived_to
    for t in range(s + 1):
        if decomp is not None:
            f_t, b_t = decomp.f[t], decomp.b[t]
            lq, lp = decomp.logQ[t], decomp.logP[t]
        else:
            f_t = b_t = lq = lp = math.nan
        row = (t, path.a[t], path.R[t], path.q[t], path.cy[t], path.co[t],
               f_t, b_t, lq, lp)
        fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")
