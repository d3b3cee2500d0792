"""Economy primitives: utility families, sequence generators, the economy record.

Conventions (per-capita normalization): q_t is the aggregate asset price,
a_t = q_t / n^t its per-capita value, D_t the aggregate dividend and
d_t = D_t / n^t its per-capita value.  Sequence generators emit values at
integer dates t >= 0 and are pure: evaluating one never mutates it, so a
million-period economy costs O(1) memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

from .errors import DomainError, InvalidSequence

_INF = float("inf")


def _safe_exp(x: float) -> float:
    # exp without OverflowError; saturates to inf / 0.0
    if x > 709.0:
        return _INF
    if x < -745.0:
        return 0.0
    return math.exp(x)


# ---------------------------------------------------------------------------
# utility families
# ---------------------------------------------------------------------------
#
# Lifetime utility of a generation is U^t(x1, x2) = u(x1) + beta * v(x2).
# Each family exposes marginal utilities u1, v1 and their derivatives u2, v2
# analytically; finite differences are reserved for the test suite.
# cv_limit() is lim_{c -> inf} c * v'(c), the quantity that decides whether
# the one-period Euler equation has a root at a given saving level.


@dataclass(frozen=True)
class LogUtility:
    """u(c) = v(c) = ln c."""

    beta: float

    kind = "log"

    def __post_init__(self):
        if not (self.beta > 0.0 and math.isfinite(self.beta)):
            raise DomainError(f"beta must be positive and finite, got {self.beta}")

    def u(self, c: float) -> float:
        return math.log(c)

    def v(self, c: float) -> float:
        return math.log(c)

    def u1(self, c: float) -> float:
        return 1.0 / c

    def u2(self, c: float) -> float:
        return -1.0 / (c * c)

    def v1(self, c: float) -> float:
        return 1.0 / c

    def v2(self, c: float) -> float:
        return -1.0 / (c * c)

    def cv_limit(self) -> float:
        # c * (1/c) = 1 identically
        return 1.0

    @property
    def cv_nondecreasing(self) -> bool:
        return True

    @property
    def crra_sigma_u(self) -> Optional[float]:
        return 1.0

    @property
    def crra_sigma_v(self) -> Optional[float]:
        return 1.0

    @property
    def vprime_at_zero_infinite(self) -> bool:
        return True

    def describe(self) -> dict:
        return {"family": "log", "beta": self.beta}


@dataclass(frozen=True)
class CRRAUtility:
    """u(c) = v(c) = c^(1-sigma)/(1-sigma), with the log limit at sigma = 1."""

    sigma: float
    beta: float

    kind = "crra"

    def __post_init__(self):
        if not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise DomainError(f"sigma must be positive and finite, got {self.sigma}")
        if not (self.beta > 0.0 and math.isfinite(self.beta)):
            raise DomainError(f"beta must be positive and finite, got {self.beta}")

    def u(self, c: float) -> float:
        if self.sigma == 1.0:
            return math.log(c)
        return c ** (1.0 - self.sigma) / (1.0 - self.sigma)

    v = u

    def u1(self, c: float) -> float:
        return c ** (-self.sigma)

    def u2(self, c: float) -> float:
        return -self.sigma * c ** (-self.sigma - 1.0)

    v1 = u1
    v2 = u2

    def cv_limit(self) -> float:
        # c * c^(-sigma) = c^(1-sigma)
        if self.sigma < 1.0:
            return _INF
        if self.sigma == 1.0:
            return 1.0
        return 0.0

    @property
    def cv_nondecreasing(self) -> bool:
        return self.sigma <= 1.0

    @property
    def crra_sigma_u(self) -> Optional[float]:
        return self.sigma

    @property
    def crra_sigma_v(self) -> Optional[float]:
        return self.sigma

    @property
    def vprime_at_zero_infinite(self) -> bool:
        return True

    def describe(self) -> dict:
        return {"family": "crra", "sigma": self.sigma, "beta": self.beta}


@dataclass(frozen=True)
class CRRA2Utility:
    """Different curvatures when young and old: u'(c)=c^-sigma1, v'(c)=c^-sigma2.

    The reference form carries no discount factor; beta defaults to 1 and is
    kept optional so the family still fits the separable u + beta*v scheme.
    """

    sigma1: float
    sigma2: float
    beta: float = 1.0

    kind = "crra2"

    def __post_init__(self):
        for name, val in (("sigma1", self.sigma1), ("sigma2", self.sigma2), ("beta", self.beta)):
            if not (val > 0.0 and math.isfinite(val)):
                raise DomainError(f"{name} must be positive and finite, got {val}")

    def u(self, c: float) -> float:
        if self.sigma1 == 1.0:
            return math.log(c)
        return c ** (1.0 - self.sigma1) / (1.0 - self.sigma1)

    def v(self, c: float) -> float:
        if self.sigma2 == 1.0:
            return math.log(c)
        return c ** (1.0 - self.sigma2) / (1.0 - self.sigma2)

    def u1(self, c: float) -> float:
        return c ** (-self.sigma1)

    def u2(self, c: float) -> float:
        return -self.sigma1 * c ** (-self.sigma1 - 1.0)

    def v1(self, c: float) -> float:
        return c ** (-self.sigma2)

    def v2(self, c: float) -> float:
        return -self.sigma2 * c ** (-self.sigma2 - 1.0)

    def cv_limit(self) -> float:
        if self.sigma2 < 1.0:
            return _INF
        if self.sigma2 == 1.0:
            return 1.0
        return 0.0

    @property
    def cv_nondecreasing(self) -> bool:
        return self.sigma2 <= 1.0

    @property
    def crra_sigma_u(self) -> Optional[float]:
        return self.sigma1

    @property
    def crra_sigma_v(self) -> Optional[float]:
        return self.sigma2

    @property
    def vprime_at_zero_infinite(self) -> bool:
        return True

    def describe(self) -> dict:
        return {"family": "crra2", "sigma1": self.sigma1, "sigma2": self.sigma2, "beta": self.beta}


@dataclass(frozen=True)
class CustomSeparable:
    """User-supplied separable family via marginals and their derivatives.

    cv_limit is a required config field because it cannot be inferred from
    callables.  u and v themselves are optional; welfare evaluation needs
    them, the solvers do not.
    """

    u1_fn: Callable[[float], float]
    u2_fn: Callable[[float], float]
    v1_fn: Callable[[float], float]
    v2_fn: Callable[[float], float]
    cv_lim: float
    beta: float = 1.0
    u_fn: Optional[Callable[[float], float]] = None
    v_fn: Optional[Callable[[float], float]] = None
    cv_monotone: Optional[bool] = None

    kind = "custom"

    def __post_init__(self):
        if not (self.beta > 0.0 and math.isfinite(self.beta)):
            raise DomainError(f"beta must be positive and finite, got {self.beta}")
        if math.isnan(self.cv_lim) or self.cv_lim < 0.0:
            raise DomainError(f"cv_lim must be >= 0 (possibly inf), got {self.cv_lim}")

    def u(self, c: float) -> float:
        if self.u_fn is None:
            raise DomainError("this custom family has no utility level function u")
        return self.u_fn(c)

    def v(self, c: float) -> float:
        if self.v_fn is None:
            raise DomainError("this custom family has no utility level function v")
        return self.v_fn(c)

    def u1(self, c: float) -> float:
        return self.u1_fn(c)

    def u2(self, c: float) -> float:
        return self.u2_fn(c)

    def v1(self, c: float) -> float:
        return self.v1_fn(c)

    def v2(self, c: float) -> float:
        return self.v2_fn(c)

    def cv_limit(self) -> float:
        return self.cv_lim

    @property
    def cv_nondecreasing(self) -> bool:
        if self.cv_monotone is not None:
            return self.cv_monotone
        # sampled check on a log-spaced grid
        grid = [10.0 ** k for k in range(-6, 7)]
        vals = [c * self.v1_fn(c) for c in grid]
        return all(b >= a * (1.0 - 1e-9) for a, b in zip(vals, vals[1:]))

    @property
    def crra_sigma_u(self) -> Optional[float]:
        return None

    @property
    def crra_sigma_v(self) -> Optional[float]:
        return None

    @property
    def vprime_at_zero_infinite(self) -> bool:
        try:
            return self.v1_fn(1e-12) > 1e10
        except (OverflowError, ZeroDivisionError, ValueError):
            return True

    def describe(self) -> dict:
        return {"family": "custom", "beta": self.beta, "cv_limit": self.cv_lim}


UtilitySpec = LogUtility | CRRAUtility | CRRA2Utility | CustomSeparable


# ---------------------------------------------------------------------------
# sequence generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    value_const: float

    kind = "constant"

    def value(self, t: int) -> float:
        return self.value_const

    def log_value(self, t: int) -> float:
        return math.log(self.value_const) if self.value_const > 0.0 else -_INF

    def root_limit(self) -> Optional[float]:
        # limsup v_t^(1/t)
        return 1.0 if self.value_const > 0.0 else 0.0

    def ratio_limit(self) -> Optional[float]:
        return 1.0 if self.value_const > 0.0 else None

    @property
    def is_zero(self) -> bool:
        return self.value_const == 0.0

    def describe(self) -> dict:
        return {"kind": "constant", "value": self.value_const}


@dataclass(frozen=True)
class Geometric:
    c0: float
    ratio: float

    kind = "geometric"

    def __post_init__(self):
        if self.ratio < 0.0 or math.isnan(self.ratio):
            raise InvalidSequence(f"geometric ratio must be >= 0, got {self.ratio}")

    def value(self, t: int) -> float:
        if self.c0 == 0.0:
            return 0.0
        if self.ratio == 0.0:
            return self.c0 if t == 0 else 0.0
        return self.c0 * _safe_exp(t * math.log(self.ratio))

    def log_value(self, t: int) -> float:
        # exact even where value() under/overflows
        if self.c0 <= 0.0 or (self.ratio == 0.0 and t > 0):
            return -_INF
        return math.log(self.c0) + t * math.log(self.ratio) if t > 0 else math.log(self.c0)

    def root_limit(self) -> Optional[float]:
        return self.ratio if self.c0 > 0.0 else 0.0

    def ratio_limit(self) -> Optional[float]:
        return self.ratio if self.c0 > 0.0 else None

    @property
    def is_zero(self) -> bool:
        return self.c0 == 0.0

    def describe(self) -> dict:
        return {"kind": "geometric", "c0": self.c0, "ratio": self.ratio}


@dataclass(frozen=True)
class PowerLaw:
    """c0 * t^(-alpha) for t >= 1; emits c0 at t = 0 (the pole is cut off)."""

    c0: float
    alpha: float

    kind = "powerlaw"

    def value(self, t: int) -> float:
        if t == 0:
            return self.c0
        return self.c0 * float(t) ** (-self.alpha)

    def log_value(self, t: int) -> float:
        if self.c0 <= 0.0:
            return -_INF
        return math.log(self.c0) - (self.alpha * math.log(t) if t > 0 else 0.0)

    def root_limit(self) -> Optional[float]:
        return 1.0 if self.c0 > 0.0 else 0.0

    def ratio_limit(self) -> Optional[float]:
        return 1.0 if self.c0 > 0.0 else None

    @property
    def is_zero(self) -> bool:
        return self.c0 == 0.0

    def describe(self) -> dict:
        return {"kind": "powerlaw", "c0": self.c0, "alpha": self.alpha}


@dataclass(frozen=True)
class ExplicitList:
    """Finite list of values with an explicit tail rule beyond the last entry.

    tail is "repeat-last" or "geometric-extrapolate"; the latter needs ratio.
    The tail rule is part of the generator's identity and shows up in reports.
    """

    values: tuple
    tail: str = "repeat-last"
    ratio: Optional[float] = None

    kind = "list"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise InvalidSequence("explicit list must contain at least one value")
        if self.tail not in ("repeat-last", "geometric-extrapolate"):
            raise InvalidSequence(f"unknown tail rule {self.tail!r}")
        if self.tail == "geometric-extrapolate" and self.ratio is None:
            raise InvalidSequence("geometric-extrapolate tail needs a ratio")

    def value(self, t: int) -> float:
        if t < len(self.values):
            return self.values[t]
        last = self.values[-1]
        if self.tail == "repeat-last":
            return last
        k = t - (len(self.values) - 1)
        return last * _safe_exp(k * math.log(self.ratio)) if self.ratio > 0.0 else 0.0

    def log_value(self, t: int) -> float:
        if t < len(self.values):
            v = self.values[t]
            return math.log(v) if v > 0.0 else -_INF
        last = self.values[-1]
        if last <= 0.0:
            return -_INF
        if self.tail == "repeat-last":
            return math.log(last)
        if self.ratio <= 0.0:
            return -_INF
        k = t - (len(self.values) - 1)
        return math.log(last) + k * math.log(self.ratio)

    def root_limit(self) -> Optional[float]:
        if self.tail == "repeat-last":
            return 1.0 if self.values[-1] > 0.0 else 0.0
        return self.ratio if self.values[-1] > 0.0 else 0.0

    def ratio_limit(self) -> Optional[float]:
        if self.values[-1] <= 0.0:
            return None
        return 1.0 if self.tail == "repeat-last" else self.ratio

    @property
    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values)

    def describe(self) -> dict:
        d = {"kind": "list", "values": list(self.values), "tail": self.tail}
        if self.ratio is not None:
            d["ratio"] = self.ratio
        return d


def _tirole_explicit_d(params: dict, t: int) -> float:
    """Aggregate dividend for the explicit bubbly model.

    Per-capita values follow the linear recursion in 1/d,
        1/d_{t+1} = ((x+1)/x)(R*/n) * (1/d_t) - (x+1) h R* / n,
    whose solution is 1/d_t = A + rho^t (1/d0 - A) with rho = ((x+1)/x)(R*/n)
    and A the recursion's fixed point.  Emitted aggregate: D_t = n^t d_t.
    """
    beta = params["beta"]
    ey = params["ey"]
    eo = params["eo"]
    n = params["n"]
    x = params["x"]
    d0 = params["d0"]
    rstar = eo / (beta * ey)
    h = n * (1.0 + beta) / eo
    rho = (x + 1.0) / x * rstar / n
    denom = 1.0 - x * (n / rstar - 1.0)
    a_fp = h * x * (1.0 + x) / denom  # fixed point of the 1/d recursion
    try:
        growth = rho**t
    except OverflowError:
        growth = _INF
    y = a_fp + growth * (1.0 / d0 - a_fp)
    d = 0.0 if not math.isfinite(y) else 1.0 / y
    return d * _safe_exp(t * math.log(n)) if n != 1.0 else d


_CLOSED_FORMS = {
    "tirole-explicit-d": (_tirole_explicit_d, ("beta", "ey", "eo", "n", "x", "d0")),
}


@dataclass(frozen=True)
class ClosedFormSeq:
    """Named closed-form sequence; params are resolved plain numbers."""

    form: str
    params: dict = field(hash=False)

    kind = "closed-form"

    def __post_init__(self):
        if self.form not in _CLOSED_FORMS:
            raise InvalidSequence(f"unknown closed form {self.form!r}")
        _, required = _CLOSED_FORMS[self.form]
        missing = [k for k in required if k not in self.params]
        if missing:
            raise InvalidSequence(f"closed form {self.form!r} missing params {missing}")

    def value(self, t: int) -> float:
        fn, _ = _CLOSED_FORMS[self.form]
        return fn(self.params, t)

    def log_value(self, t: int) -> float:
        v = self.value(t)
        if v > 0.0:
            return math.log(v)
        if self.form == "tirole-explicit-d":
            # 1/d_t = a_fp + rho^t (1/d0 - a_fp); once rho^t overflows,
            # log d_t = -(t log rho + log(1/d0 - a_fp)) to double precision
            p = self.params
            rstar = p["eo"] / (p["beta"] * p["ey"])
            rho = (p["x"] + 1.0) / p["x"] * rstar / p["n"]
            h = p["n"] * (1.0 + p["beta"]) / p["eo"]
            denom = 1.0 - p["x"] * (p["n"] / rstar - 1.0)
            a_fp = h * p["x"] * (1.0 + p["x"]) / denom
            z = 1.0 / p["d0"] - a_fp
            if rho > 1.0 and z > 0.0:
                return -(t * math.log(rho) + math.log(z)) + t * math.log(p["n"])
        return -_INF

    def root_limit(self) -> Optional[float]:
        if self.form == "tirole-explicit-d":
            p = self.params
            rstar = p["eo"] / (p["beta"] * p["ey"])
            # D_t^(1/t) -> n * lim d_t^(1/t) = n * (x n)/((x+1) R*)
            return p["n"] * p["x"] * p["n"] / ((p["x"] + 1.0) * rstar)
        return None

    def ratio_limit(self) -> Optional[float]:
        rl = self.root_limit()
        return rl

    @property
    def is_zero(self) -> bool:
        return False

    def describe(self) -> dict:
        return {"kind": "closed-form", "form": self.form, "params": dict(self.params)}


SequenceGen = Constant | Geometric | PowerLaw | ExplicitList | ClosedFormSeq


def eval_sequence(gen: SequenceGen, t: int) -> float:
    """Evaluate a generator at integer date t >= 0, policing the sign contract."""
    if t < 0 or int(t) != t:
        raise DomainError(f"sequence dates are integers >= 0, got {t!r}")
    val = gen.value(int(t))
    if math.isnan(val) or val < 0.0:
        raise InvalidSequence(f"{gen.kind} generator emitted {val!r} at t={t}")
    return val


# ---------------------------------------------------------------------------
# tolerances and economy record
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ToleranceSet:
    """Numerical knobs, all strictly positive.

    root_tol is relative (Euler root bisection), bisect_tol absolute on a_0
    (survival bisection), series_T the truncation horizon for series verdicts,
    tail_ratio_window the tail window for ratio estimates.  survive_eps is
    recorded for reporting; survival itself uses strict open bounds
    0 < a_t < e^y_t exactly, which the closed-set argument needs.
    """

    root_tol: float = 1e-12
    series_T: int = 400
    tail_ratio_window: int = 24
    survive_eps: float = 1e-12
    bisect_tol: float = 1e-9

    def __post_init__(self):
        for name in ("root_tol", "survive_eps", "bisect_tol"):
            val = getattr(self, name)
            if not (val > 0.0 and math.isfinite(val)):
                raise DomainError(f"{name} must be positive and finite, got {val}")
        for name in ("series_T", "tail_ratio_window"):
            val = getattr(self, name)
            if not (isinstance(val, int) and val > 0):
                raise DomainError(f"{name} must be a positive integer, got {val!r}")

    def describe(self) -> dict:
        return {
            "root_tol": self.root_tol,
            "series_T": self.series_T,
            "tail_ratio_window": self.tail_ratio_window,
            "survive_eps": self.survive_eps,
            "bisect_tol": self.bisect_tol,
        }


@dataclass(frozen=True)
class Economy:
    """A two-period exchange economy with one dividend-paying asset.

    endow_young/endow_old emit e^y_t, e^o_t; dividend emits the aggregate
    D_t.  n is the population growth factor, horizon the default working
    length of paths and ladders.
    """

    utility: UtilitySpec
    endow_young: SequenceGen
    endow_old: SequenceGen
    dividend: SequenceGen
    n: float
    horizon: int
    tol: ToleranceSet = field(default_factory=ToleranceSet)

    def __post_init__(self):
        if not (self.n > 0.0 and math.isfinite(self.n)):
            raise DomainError(f"population growth n must be positive, got {self.n}")
        if not (isinstance(self.horizon, int) and self.horizon >= 2):
            raise DomainError(f"horizon must be an integer >= 2, got {self.horizon!r}")
        if self.tol.series_T > self.horizon:
            object.__setattr__(self, "tol",
                               ToleranceSet(self.tol.root_tol, self.horizon,
                                            self.tol.tail_ratio_window,
                                            self.tol.survive_eps, self.tol.bisect_tol))
        # sampled validation: young endowment and aggregate supply positive
        for t in list(range(0, min(self.horizon, 32) + 1)) + [self.horizon]:
            ey = eval_sequence(self.endow_young, t)
            if not ey > 0.0:
                raise DomainError(f"young endowment must be positive, e^y_{t} = {ey}")
            if not aggregate_supply(self, t) > 0.0:
                raise DomainError(f"aggregate supply must be positive at t={t}")

    # --- sequence access -------------------------------------------------

    def ey(self, t: int) -> float:
        return eval_sequence(self.endow_young, t)

    def eo(self, t: int) -> float:
        return eval_sequence(self.endow_old, t)

    def D(self, t: int) -> float:
        return eval_sequence(self.dividend, t)

    def d(self, t: int) -> float:
        """Per-capita dividend D_t / n^t."""
        D = self.D(t)
        if D == 0.0 or self.n == 1.0:
            return D
        return D * _safe_exp(-t * math.log(self.n))

    def log_d(self, t: int) -> float:
        """log of the per-capita dividend, exact where d(t) underflows."""
        lv = self.dividend.log_value(t)
        return lv - t * math.log(self.n) if self.n != 1.0 else lv

    def e(self, t: int) -> float:
        return aggregate_supply(self, t)

    # --- structural flags -------------------------------------------------

    @cached_property
    def add_assum(self) -> bool:
        """Old-age endowment strictly positive and c v'(c) nondecreasing.

        The interior Euler solvers require this; with e^o = 0 only the
        closed-form branches apply.
        """
        if not self.utility.cv_nondecreasing:
            return False
        gen = self.endow_old
        if getattr(gen, "is_zero", False):
            return False
        probe = list(range(0, min(self.horizon, 32) + 1)) + [self.horizon]
        return all(eval_sequence(gen, t) > 0.0 for t in probe)

    @cached_property
    def stationary_endowments(self) -> bool:
        ey, eo = self.endow_young, self.endow_old
        const = lambda g: g.kind == "constant" or (g.kind == "geometric" and g.ratio == 1.0)
        return const(ey) and const(eo)

    def describe(self) -> dict:
        return {
            "utility": self.utility.describe(),
            "endow_young": self.endow_young.describe(),
            "endow_old": self.endow_old.describe(),
            "dividend": self.dividend.describe(),
            "n": self.n,
            "horizon": self.horizon,
            "tolerances": self.tol.describe(),
        }


def aggregate_supply(econ: Economy, t: int) -> float:
    """Per-capita aggregate supply e_t = e^y_t + e^o_t / n + d_t."""
    if t > econ.horizon:
        raise DomainError(f"t={t} beyond horizon {econ.horizon}")
    return econ.ey(t) + econ.eo(t) / econ.n + econ.d(t)
