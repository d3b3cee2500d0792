"""Equilibrium-set machinery: survival bisection, set kinds, steady states,
maximal/fundamental path solvers, closed-form paths."""

import math
from fractions import Fraction

import pytest

from olglab import (ClosedFormSeq, Constant, CRRAUtility, Economy,
                    EquilibriumPath, Geometric, LogUtility, closed_form_path,
                    equilibrium_set, fundamental_path, g_solve, maximal_path,
                    simulate, steady_state_a_hat, survival_interval)
from olglab.errors import (BracketFailure, DomainError, EmptySurvivalSet,
                           ModelPreconditionFailed, NoPositiveSteadyState,
                           NotApplicable)
from olglab.model import ExplicitList

from _oracles import tirole_exact
from conftest import preset_econ

TIROLE_FR = (Fraction(1), Fraction(1), Fraction(1, 2), Fraction(1),
             Fraction(1, 2), Fraction(1, 10))


# --- survival_interval -------------------------------------------------------

def test_survival_interval_brackets_the_set():
    econ = preset_econ("tirole-explicit")
    si = survival_interval(econ, 40)
    assert 0.0 < si.lower <= si.upper < econ.ey(0)
    assert si.horizon == 40
    assert si.lower_is_survivor and si.upper_is_survivor
    mid = 0.5 * (si.lower + si.upper)
    assert simulate(econ, mid, 40).status.survived
    # exits just outside the bracket point in the right directions
    below = simulate(econ, si.lower - 1e-3, 40)
    above = simulate(econ, si.upper + 1e-3, 40)
    assert below.status.kind == "collapsed-below-zero"
    assert above.status.kind == "hit-endowment-bound"


def test_survival_interval_beyond_float_resolution():
    # at T = 80 the surviving window around the saddle is narrower than one
    # ulp: no representable a_0 survives, yet the boundary bisection still
    # localizes both edges at the true value via exit directions
    econ = preset_econ("tirole-explicit")
    si = survival_interval(econ, 80)
    assert not si.lower_is_survivor and not si.upper_is_survivor
    assert abs(si.lower - 0.3) < 1e-7
    assert abs(si.upper - 0.3) < 1e-7


def test_survival_interval_nests_with_horizon():
    econ = preset_econ("claim1-continuum")
    wide = survival_interval(econ, 50)
    narrow = survival_interval(econ, 200)
    assert wide.lower - 1e-6 <= narrow.lower
    assert narrow.upper <= wide.upper + 1e-6
    assert narrow.upper - narrow.lower > 0.4  # genuine continuum, not a point


def test_survival_interval_empty_for_fiat_under_high_interest():
    # R* > n and no dividends: any positive value compounds at R*/n > 1 and
    # explodes, so no a_0 survives and there is no below/above transition
    econ = Economy(LogUtility(1.0), Constant(2.0), Constant(3.0),
                   Constant(0.0), n=1.0, horizon=100)
    with pytest.raises(EmptySurvivalSet):
        survival_interval(econ, 100)


def test_survival_interval_transition_without_survivors():
    # dividends larger than the endowment: every path dies, but low starts die
    # below while infeasible high starts count as above, so the bisection
    # still localizes a transition and honestly flags both edges as corpses
    econ = Economy(LogUtility(1.0), Constant(1.0), Constant(0.5),
                   Constant(5.0), n=1.0, horizon=50)
    si = survival_interval(econ, 50)
    assert not si.lower_is_survivor and not si.upper_is_survivor


# --- equilibrium_set ---------------------------------------------------------

def test_equilibrium_set_unique_bubbleless_high_interest():
    res = equilibrium_set(preset_econ("high-interest"))
    assert res.kind == "unique"
    assert res.lower == pytest.approx(0.004970189693728785, rel=1e-6)
    assert res.upper == pytest.approx(res.lower, rel=1e-9)
    assert res.bracket_width <= 2e-9
    assert res.steady_state is None  # R* > n: no positive steady state
    assert res.horizon_used == 1600
    assert [p["horizon"] for p in res.probes] == [400, 800, 1600]


def test_equilibrium_set_continuum_claim1():
    res = equilibrium_set(preset_econ("claim1-continuum"))
    assert res.kind == "continuum"
    assert res.lower == pytest.approx(0.037781383177554306, rel=1e-6)
    assert res.upper == pytest.approx(0.5024864878510289, rel=1e-6)
    assert res.bracket_width > 0.4
    assert res.steady_state == pytest.approx(0.5, abs=1e-12)
    d = res.describe()
    assert d["kind"] == "continuum" and d["lower"] == res.lower


def test_equilibrium_set_unique_bubbly_claim2():
    res = equilibrium_set(preset_econ("claim2-unique"))
    assert res.kind == "unique"
    assert res.lower == pytest.approx(0.5065389634213254, rel=1e-6)
    # the unique equilibrium carries value above the no-dividend steady state
    assert res.steady_state == pytest.approx(0.5, abs=1e-12)
    assert res.lower > res.steady_state


def test_equilibrium_set_knife_edge_collapses_to_point():
    # R* = n: the raw bracket shrinks only polynomially, so the final rung is
    # wider than the bisection floor, but the extrapolated endpoints coincide
    res = equilibrium_set(preset_econ("knife-edge"))
    assert res.kind == "unique"
    assert res.lower == pytest.approx(0.00980391016197892, rel=1e-5)
    assert res.upper == pytest.approx(res.lower, rel=1e-5)
    assert res.steady_state == 0.0


def test_equilibrium_set_explicit_dividend_is_unique():
    # dividends decay slower than R*-discounting allows: every candidate below
    # the explicit orbit is eventually eaten by the dividend, so the explicit
    # orbit is the unique equilibrium, not merely the maximal one
    res = equilibrium_set(preset_econ("tirole-explicit"))
    assert res.kind == "unique"
    assert res.lower == pytest.approx(0.3, abs=1e-6)
    assert res.steady_state == pytest.approx(0.25, abs=1e-12)


def test_equilibrium_set_empty_kind():
    econ = Economy(LogUtility(1.0), Constant(2.0), Constant(3.0),
                   Constant(0.0), n=1.0, horizon=100)
    res = equilibrium_set(econ)
    assert res.kind == "empty"
    assert math.isnan(res.lower) and math.isnan(res.upper)
    assert res.steady_state is None


# --- steady_state_a_hat ------------------------------------------------------

def test_steady_state_log_closed_form():
    # log utility: a_hat = (beta e^y - e^o / n) / (1 + beta)
    assert steady_state_a_hat(preset_econ("claim1-continuum")) == pytest.approx(
        0.5, abs=1e-12)
    assert steady_state_a_hat(preset_econ("tirole-explicit")) == pytest.approx(
        0.25, abs=1e-12)


def test_steady_state_crra_matches_algebra():
    # (e^y - a)^-s = beta n (e^o + n a)^-s  =>  a = (k e^y - e^o)/(n + k),
    # k = (beta n)^(1/s)
    sigma, beta, ey, eo, n = 0.5, 0.9, 2.0, 0.5, 1.1
    econ = Economy(CRRAUtility(sigma, beta), Constant(ey), Constant(eo),
                   Constant(0.01), n=n, horizon=50)
    k = (beta * n) ** (1.0 / sigma)
    expected = (k * ey - eo) / (n + k)
    assert steady_state_a_hat(econ) == pytest.approx(expected, rel=1e-10)


def test_steady_state_refuses_high_interest():
    with pytest.raises(NoPositiveSteadyState):
        steady_state_a_hat(preset_econ("high-interest"))


def test_steady_state_knife_edge_degenerates_to_zero():
    assert steady_state_a_hat(preset_econ("knife-edge")) == 0.0


def test_steady_state_needs_stationary_endowments():
    econ = Economy(LogUtility(1.0), Geometric(1.0, 1.01), Constant(0.5),
                   Constant(0.0), n=1.0, horizon=50)
    with pytest.raises(NotApplicable):
        steady_state_a_hat(econ)


# --- maximal_path ------------------------------------------------------------

def test_maximal_path_tracks_exact_saddle_orbit():
    econ = preset_econ("tirole-explicit")
    path = maximal_path(econ, 100)
    assert isinstance(path, EquilibriumPath) and path.status.survived
    a_star, _, _ = tirole_exact(*TIROLE_FR, 100)
    worst = max(abs(path.a[t] - float(a_star[t])) for t in range(101))
    assert worst < 1e-10
    # plain forward simulation from the same float start leaves the saddle
    # (here: falls off downward and decays to ~1e-16 by t = 100, still alive
    # but nowhere near the exact orbit, which ends at ~0.254)
    drifted = simulate(econ, path.a[0], 100)
    assert abs(drifted.a[100] - float(a_star[100])) > 0.1


def test_maximal_path_lands_on_steady_state():
    econ = preset_econ("claim1-continuum")
    path = maximal_path(econ, 400)
    assert path.status.survived
    assert path.a[400] == pytest.approx(0.5, abs=1e-12)
    assert path.R[400] == pytest.approx(1.0, abs=1e-12)
    assert path.a[0] == pytest.approx(0.5024864878510289, rel=1e-6)


def test_maximal_path_euler_rates_match_positions():
    econ = preset_econ("claim1-continuum")
    path = maximal_path(econ, 200)
    for t in range(0, 200, 17):
        r = g_solve(econ, t, path.a[t])
        assert path.R[t + 1] == pytest.approx(r, rel=1e-9)


# --- fundamental_path --------------------------------------------------------

def test_fundamental_path_euler_consistent():
    econ = preset_econ("high-interest")
    path = fundamental_path(econ, 200)
    assert path.status.survived
    assert path.a[0] == pytest.approx(0.004970189693728785, rel=1e-6)
    for t in range(0, 200, 13):
        r = g_solve(econ, t, path.a[t])
        assert path.R[t + 1] == pytest.approx(r, rel=1e-10)


def test_fundamental_path_is_minimal_equilibrium():
    econ = preset_econ("claim1-continuum")
    path = fundamental_path(econ, 200)
    assert path.a[0] == pytest.approx(0.037781383177554306, rel=1e-6)
    # slightly below the discounted-dividend value nothing survives
    assert simulate(econ, 0.99 * path.a[0], 200).status.kind == "collapsed-below-zero"


def test_fundamental_path_refuses_when_discounted_value_explodes():
    # claim2: dividends large enough that the only equilibrium is bubbly; the
    # discounted-dividend candidate hits the endowment bound
    with pytest.raises(BracketFailure):
        fundamental_path(preset_econ("claim2-unique"), 100)


# --- closed_form_path --------------------------------------------------------

def test_closed_form_explicit_dividend_path_matches_oracle():
    econ = preset_econ("tirole-explicit")
    path = closed_form_path(econ, "tirole-explicit", 60)
    a_star, _, _ = tirole_exact(*TIROLE_FR, 60)
    for t in range(61):
        assert abs(path.a[t] - float(a_star[t])) < 1e-14


def _tirole_gen(**over):
    p = dict(x=0.5, d0=0.1, beta=1.0, ey=1.0, eo=0.5, n=1.0)
    p.update(over)
    return ClosedFormSeq("tirole-explicit-d", p)


def test_closed_form_preconditions_are_named():
    u = LogUtility(1.0)
    good = preset_econ("tirole-explicit")

    crra = Economy(CRRAUtility(0.5, 1.0), Constant(1.0), Constant(0.5),
                   _tirole_gen(), n=1.0, horizon=50)
    with pytest.raises(ModelPreconditionFailed, match="log utility"):
        closed_form_path(crra, "tirole-explicit", 10)

    moving = Economy(u, Geometric(1.0, 1.01), Constant(0.5), _tirole_gen(),
                     n=1.0, horizon=50)
    with pytest.raises(ModelPreconditionFailed, match="stationary"):
        closed_form_path(moving, "tirole-explicit", 10)

    wrong_gen = Economy(u, Constant(1.0), Constant(0.5), Geometric(0.1, 0.5),
                        n=1.0, horizon=50)
    with pytest.raises(ModelPreconditionFailed, match="dividend generator"):
        closed_form_path(wrong_gen, "tirole-explicit", 10)

    mismatched = Economy(u, Constant(1.0), Constant(0.5),
                         _tirole_gen(beta=0.9), n=1.0, horizon=50)
    with pytest.raises(ModelPreconditionFailed, match="does not match"):
        closed_form_path(mismatched, "tirole-explicit", 10)

    high_rate = Economy(u, Constant(1.0), Constant(2.0),
                        _tirole_gen(eo=2.0), n=1.0, horizon=50)
    with pytest.raises(ModelPreconditionFailed, match=r"R\* < n fails"):
        closed_form_path(high_rate, "tirole-explicit", 10)

    # d0 exactly at the cap keeps the dividend sequence positive (so the
    # economy constructs) but violates the strict inequality
    big_d0 = Economy(u, Constant(1.0), Constant(0.5), _tirole_gen(d0=1.0 / 6.0),
                     n=1.0, horizon=50)
    with pytest.raises(ModelPreconditionFailed, match="cap"):
        closed_form_path(big_d0, "tirole-explicit", 10)

    assert closed_form_path(good, "tirole-explicit", 10).status.survived


def test_closed_form_no_old_endowment_is_exact():
    econ = Economy(LogUtility(1.0), Geometric(1.0, 1.02), Constant(0.0),
                   Constant(0.0), n=1.0, horizon=100)
    path = closed_form_path(econ, "log-no-old-endowment", 100)
    for t in range(101):
        assert path.a[t] == 0.5 * econ.ey(t)  # exact, no rounding

    tainted = Economy(LogUtility(1.0), Constant(1.0),
                      ExplicitList((0.0, 0.0, 0.1)), Constant(0.0),
                      n=1.0, horizon=50)
    with pytest.raises(ModelPreconditionFailed, match=r"e\^o"):
        closed_form_path(tainted, "log-no-old-endowment", 10)


def test_closed_form_unknown_model_id():
    with pytest.raises(DomainError, match="unknown closed-form"):
        closed_form_path(preset_econ("tirole-explicit"), "nope", 10)
