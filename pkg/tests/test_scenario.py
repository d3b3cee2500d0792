"""Scenario INI schema: parsing, line-anchored errors, overrides, presets."""

import pytest

from olglab import parse_scenario
from olglab.errors import ScenarioError
from olglab.model import ClosedFormSeq, ExplicitList, Geometric, PowerLaw
from olglab.scenario import (PRESETS, apply_overrides, load_scenario,
                             resolve_scenario)

FULL = """\
[meta]
name = full-featured

[utility]
kind = crra2
beta = 0.95
sigma1 = 1.5
sigma2 = 0.5

[endowments]
young = list:2.0,2.1,2.2,tail=geometric-extrapolate,ratio=1.0
old = powerlaw:1.0,0.0

[dividends]
aggregate = list:0.3,0.2,0.1

[economy]
n = 1.05
horizon = 300

[tolerances]
root_tol = 1e-10
series_T = 200
tail_ratio_window = 16
survive_eps = 1e-11
bisect_tol = 1e-8
"""

# ten lines, fixed layout: [utility] at 1, its keys at 2-3, [endowments] at 5,
# young at 6, [dividends] at 9, aggregate at 10
BASE = ("[utility]\n"        # 1
        "kind = log\n"       # 2
        "bogus = 1\n"        # 3
        "\n"
        "[endowments]\n"     # 5
        "young = constant:2.0\n"
        "old = constant:1.0\n"
        "\n"
        "[dividends]\n"      # 9
        "aggregate = constant:0.0\n")


def ini(**repl: str) -> str:
    text = BASE
    for old, new in repl.items():
        text = text.replace(old.replace("_", " "), new)
    return text.replace("bogus = 1", "")  # blank line keeps the layout above


# --- parsing -----------------------------------------------------------------

def test_full_schema_parses_every_field():
    econ = parse_scenario(FULL)
    u = econ.utility
    assert u.kind == "crra2" and (u.sigma1, u.sigma2, u.beta) == (1.5, 0.5, 0.95)
    assert econ.endow_young == ExplicitList((2.0, 2.1, 2.2),
                                            tail="geometric-extrapolate", ratio=1.0)
    assert econ.endow_old == PowerLaw(1.0, 0.0)
    assert econ.dividend == ExplicitList((0.3, 0.2, 0.1))
    assert (econ.n, econ.horizon) == (1.05, 300)
    assert econ.tol.describe() == {"root_tol": 1e-10, "series_T": 200,
                                   "tail_ratio_window": 16, "survive_eps": 1e-11,
                                   "bisect_tol": 1e-8}


def test_minimal_scenario_gets_defaults():
    econ = parse_scenario(ini())
    assert econ.utility.kind == "log" and econ.utility.beta == 1.0
    assert (econ.n, econ.horizon) == (1.0, 400)
    assert econ.tol.describe() == {"root_tol": 1e-12, "series_T": 400,
                                   "tail_ratio_window": 24, "survive_eps": 1e-12,
                                   "bisect_tol": 1e-9}


def test_meta_section_is_free_form():
    parse_scenario("[meta]\nanything = goes here\nauthor = me\n" + ini())


# --- line-anchored errors ------------------------------------------------------

@pytest.mark.parametrize("text, line, fragment", [
    (BASE, 3, "[utility] bogus: unknown key"),
    ("[junk]\nx = 1\n" + ini(), 1, "[junk]: unknown section"),
    (ini(**{"kind_=_log": "kind = log\nbeta = fast"}), 3, "expected a number, got 'fast'"),
    (ini() + "\n[economy]\nhorizon = 3.5\n", 13, "expected an integer, got '3.5'"),
    (ini(**{"kind_=_log": "kind = log\nbeta = -1.0"}), 2, "beta must be positive"),
    (ini(**{"kind_=_log": "kind = cobb-douglas"}), 2, "unknown utility kind"),
    (ini(**{"aggregate_=_constant:0.0": "aggregate = fancy:1"}), 10,
     "unknown generator kind 'fancy'"),
])
def test_errors_carry_the_offending_line(text, line, fragment):
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(text)
    assert exc.value.line == line
    assert fragment in str(exc.value)
    assert str(exc.value).startswith(f"line {line}:")


@pytest.mark.parametrize("expr, fragment", [
    ("constant:1,2", "constant takes exactly one value"),
    ("geometric:0.01", "geometric takes c0,ratio"),
    ("powerlaw:0.01", "powerlaw takes c0,alpha"),
    ("list:0.1,tail=bogus", "unknown tail rule 'bogus'"),
    ("list:0.1,tail=geometric-extrapolate", "geometric-extrapolate tail needs a ratio"),
    ("list:0.1,shape=7", "unknown list option 'shape'"),
    ("list:", "list needs at least one value"),
    ("geometric:0.01,oops", "expected a number, got 'oops'"),
    ("tirole-explicit:x=0.5", "needs exactly x and d0"),
    ("tirole-explicit:0.5,0.1", "takes x=..,d0=.."),
])
def test_generator_expression_errors(expr, fragment):
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(ini(**{"aggregate_=_constant:0.0": f"aggregate = {expr}"}))
    assert exc.value.line == 10 and fragment in str(exc.value)


def test_missing_requirements_reported_without_line():
    with pytest.raises(ScenarioError, match=r"missing required section \[utility\]"):
        parse_scenario(ini().split("[endowments]", 1)[1].join(["[endowments]", ""]))
    with pytest.raises(ScenarioError, match="young: required key is missing"):
        parse_scenario(ini(**{"young_=_constant:2.0": ""}))
    with pytest.raises(ScenarioError, match="sigma: required key is missing"):
        parse_scenario(ini(**{"kind_=_log": "kind = crra"}))


def test_structural_ini_errors_are_scenario_errors():
    with pytest.raises(ScenarioError) as exc:
        parse_scenario("orphan = 1\n")
    assert exc.value.line == 1
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(ini(**{"kind_=_log": "kind = log\nkind = crra"}))
    assert "already exists" in str(exc.value)


def test_economy_validation_failures_are_wrapped():
    with pytest.raises(ScenarioError, match="economy validation failed"):
        parse_scenario(ini(**{"young_=_constant:2.0": "young = constant:-2.0"}))


# --- the closed-form dividend request -------------------------------------------

def test_tirole_dividends_pull_parameters_from_other_sections():
    econ = parse_scenario(PRESETS["tirole-explicit"])
    div = econ.dividend
    assert isinstance(div, ClosedFormSeq) and div.form == "tirole-explicit-d"
    assert div.params == {"beta": 1.0, "ey": 1.0, "eo": 0.5, "n": 1.0,
                          "x": 0.5, "d0": 0.1}
    assert econ.d(0) == 0.1
    assert econ.d(1) == pytest.approx(1.0 / 12.0, rel=1e-15)


def test_tirole_dividends_require_constant_endowments():
    bad = ini(**{"young_=_constant:2.0": "young = geometric:2.0,1.01",
                 "aggregate_=_constant:0.0":
                 "aggregate = tirole-explicit:x=0.5,d0=0.1"})
    with pytest.raises(ScenarioError, match="need constant endowments") as exc:
        parse_scenario(bad)
    assert exc.value.line == 10


def test_tirole_request_rejected_outside_dividends():
    bad = ini(**{"young_=_constant:2.0": "young = tirole-explicit:x=0.5,d0=0.1"})
    with pytest.raises(ScenarioError, match="dividend generator only") as exc:
        parse_scenario(bad)
    assert exc.value.line == 5


def test_tirole_invalid_parameters_fail_economy_validation():
    over = apply_overrides(PRESETS["tirole-explicit"],
                           ["dividends.aggregate=tirole-explicit:x=0.5,d0=0.9"])
    with pytest.raises(ScenarioError, match="economy validation failed"):
        parse_scenario(over)


# --- overrides -------------------------------------------------------------------

def test_overrides_replace_add_and_stack():
    text = apply_overrides(PRESETS["claim1-continuum"],
                           ["dividends.aggregate=constant:0.0",
                            "dividends.aggregate=geometric:0.01,0.9995",
                            "tolerances.series_T=100"])
    econ = parse_scenario(text)
    assert econ.dividend == Geometric(0.01, 0.9995)  # later override wins
    assert econ.tol.series_T == 100                  # section created on demand


@pytest.mark.parametrize("bad", ["dividends=geometric:1,1",
                                 "dividends.aggregate geometric",
                                 "dividends.=x", ".aggregate=x"])
def test_malformed_overrides_rejected(bad):
    with pytest.raises(ScenarioError, match="not of the form section.key=value"):
        apply_overrides(PRESETS["claim1-continuum"], [bad])


def test_case_of_schema_keys_is_preserved():
    # series_T must survive the INI reader; a lowercased series_t is unknown
    econ = parse_scenario(ini() + "\n[tolerances]\nseries_T = 50\n")
    assert econ.tol.series_T == 50
    with pytest.raises(ScenarioError, match="series_t: unknown key"):
        parse_scenario(ini() + "\n[tolerances]\nseries_t = 50\n")


# --- sources and presets -----------------------------------------------------------

def test_resolve_scenario_routes(tmp_path):
    assert resolve_scenario("preset:knife-edge") == PRESETS["knife-edge"]
    assert resolve_scenario("knife-edge") == PRESETS["knife-edge"]
    path = tmp_path / "econ.ini"
    path.write_text(FULL, encoding="utf-8")
    assert resolve_scenario(str(path)) == FULL
    with pytest.raises(ScenarioError, match="known: claim1-continuum"):
        resolve_scenario("preset:zzz")
    with pytest.raises(ScenarioError, match="cannot read scenario"):
        resolve_scenario(str(tmp_path / "absent.ini"))


def test_load_scenario_returns_economy_and_text(tmp_path):
    path = tmp_path / "econ.ini"
    path.write_text(FULL, encoding="utf-8")
    econ, text = load_scenario(str(path))
    assert text == FULL and econ.horizon == 300


_PRESET_SHAPE = {
    # name: (beta, ey0, eo0, dividend kind, n)
    "tirole-explicit": (1.0, 1.0, 0.5, "closed-form", 1.0),
    "log-pure-bubble": (1.0, 1.0, 0.5, "constant", 1.0),
    "claim1-continuum": (1.0, 2.0, 1.0, "geometric", 1.0),
    "claim2-unique": (1.0, 2.0, 1.0, "geometric", 1.0),
    "high-interest": (1.0, 2.0, 3.0, "geometric", 1.0),
    "knife-edge": (2.0, 1.0, 2.0, "geometric", 1.0),
}


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_parse_with_expected_shape(name):
    econ = parse_scenario(PRESETS[name])
    beta, ey0, eo0, dkind, n = _PRESET_SHAPE[name]
    assert econ.utility.beta == beta
    assert (econ.ey(0), econ.eo(0)) == (ey0, eo0)
    assert econ.dividend.kind == dkind
    assert (econ.n, econ.horizon) == (n, 400)
    assert econ.utility.kind == "log"
    if name == "log-pure-bubble":
        assert econ.dividend.is_zero
