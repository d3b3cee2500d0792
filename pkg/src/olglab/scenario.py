"""Scenario files: the INI schema, named presets, and the economy builder.

Schema (INI, `#`/`;` comments allowed)::

    [meta]                 # optional, free-form, ignored by the builder
    name = my-economy

    [utility]
    kind = log             # log | crra | crra2
    beta = 1.0
    sigma = 2.0            # crra only
    sigma1 = 1.5           # crra2 only
    sigma2 = 0.5           # crra2 only

    [endowments]
    young = constant:2.0   # generator expressions, see below
    old = constant:3.0

    [dividends]
    aggregate = geometric:0.01,0.5

    [economy]
    n = 1.0
    horizon = 400

    [tolerances]           # optional, defaults as in ToleranceSet
    root_tol = 1e-12
    series_T = 400
    tail_ratio_window = 24
    survive_eps = 1e-12
    bisect_tol = 1e-9

Generator expressions are `kind:args`:

    constant:V
    geometric:C0,RATIO                  value C0 * RATIO^t
    powerlaw:C0,ALPHA                   value C0 * t^-ALPHA (C0 at t = 0)
    list:V0,V1,...[,tail=repeat-last|geometric-extrapolate][,ratio=R]
    tirole-explicit:x=X,d0=D0           dividends only; beta, e^y, e^o, n are
                                        pulled from the other sections, which
                                        must then be constant

Unknown sections, keys, or generator kinds are errors with the offending
line number in the message.
"""

from __future__ import annotations

import configparser
import re
from typing import Optional, Union

from .errors import DomainError, InvalidSequence, ScenarioError
from .model import (CRRA2Utility, CRRAUtility, ClosedFormSeq, Constant,
                    Economy, ExplicitList, Geometric, LogUtility, PowerLaw,
                    SequenceGen, ToleranceSet)

_SECTIONS = {
    "meta": None,  # free form
    "utility": {"kind", "beta", "sigma", "sigma1", "sigma2"},
    "endowments": {"young", "old"},
    "dividends": {"aggregate"},
    "economy": {"n", "horizon"},
    "tolerances": {"root_tol", "series_T", "tail_ratio_window",
                   "survive_eps", "bisect_tol"},
}


def _find_line(text: str, section: str, key: Optional[str] = None) -> Optional[int]:
    in_section = False
    for i, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            here = stripped[1:-1].strip() == section
            if here and key is None:
                return i
            in_section = here
        elif in_section and key is not None:
            if re.match(r"\s*" + re.escape(key) + r"\s*[=:]", raw):
                return i
    return None


def _fail(text: str, section: str, key: Optional[str], msg: str) -> ScenarioError:
    where = f"[{section}]" + (f" {key}" if key else "")
    return ScenarioError(f"{where}: {msg}", line=_find_line(text, section, key))


def _get_float(cp, text: str, section: str, key: str, default=None) -> float:
    if not cp.has_option(section, key):
        if default is None:
            raise _fail(text, section, key, "required key is missing")
        return default
    raw = cp.get(section, key)
    try:
        return float(raw)
    except ValueError:
        raise _fail(text, section, key, f"expected a number, got {raw!r}") from None


def _get_int(cp, text: str, section: str, key: str, default=None) -> int:
    if not cp.has_option(section, key):
        if default is None:
            raise _fail(text, section, key, "required key is missing")
        return default
    raw = cp.get(section, key)
    try:
        return int(raw)
    except ValueError:
        raise _fail(text, section, key, f"expected an integer, got {raw!r}") from None


class _TiroleRequest:
    """Placeholder for a tirole-explicit dividend; resolved by the builder."""

    def __init__(self, x: float, d0: float):
        self.x = x
        self.d0 = d0


def parse_generator(token: str, text: str, section: str,
                    key: str) -> Union[SequenceGen, _TiroleRequest]:
    token = token.strip()
    kind, _, argstr = token.partition(":")
    kind = kind.strip().lower()
    args = [a.strip() for a in argstr.split(",")] if argstr.strip() else []

    def num(a: str) -> float:
        try:
            return float(a)
        except ValueError:
            raise _fail(text, section, key, f"expected a number, got {a!r}") from None

    try:
        if kind == "constant":
            if len(args) != 1:
                raise _fail(text, section, key, "constant takes exactly one value")
            return Constant(num(args[0]))
        if kind == "geometric":
            if len(args) != 2:
                raise _fail(text, section, key, "geometric takes c0,ratio")
            return Geometric(num(args[0]), num(args[1]))
        if kind == "powerlaw":
            if len(args) != 2:
                raise _fail(text, section, key, "powerlaw takes c0,alpha")
            return PowerLaw(num(args[0]), num(args[1]))
        if kind == "list":
            values = []
            tail = "repeat-last"
            ratio = None
            for a in args:
                if "=" in a:
                    k, _, v = a.partition("=")
                    k, v = k.strip(), v.strip()
                    if k == "tail":
                        tail = v
                    elif k == "ratio":
                        ratio = num(v)
                    else:
                        raise _fail(text, section, key, f"unknown list option {k!r}")
                else:
                    values.append(num(a))
            if not values:
                raise _fail(text, section, key, "list needs at least one value")
            if tail == "geometric-extrapolate":
                return ExplicitList(tuple(values), tail=tail, ratio=ratio)
            return ExplicitList(tuple(values), tail=tail)
        if kind == "tirole-explicit":
            opts = {}
            for a in args:
                k, eq, v = a.partition("=")
                if not eq:
                    raise _fail(text, section, key, "tirole-explicit takes x=..,d0=..")
                opts[k.strip()] = num(v.strip())
            if set(opts) != {"x", "d0"}:
                raise _fail(text, section, key,
                            f"tirole-explicit needs exactly x and d0, got {sorted(opts)}")
            return _TiroleRequest(opts["x"], opts["d0"])
    except (DomainError, InvalidSequence) as err:
        raise _fail(text, section, key, str(err)) from None
    raise _fail(text, section, key, f"unknown generator kind {kind!r}")


def build_economy(cp: configparser.ConfigParser, text: str) -> Economy:
    for section in cp.sections():
        if section not in _SECTIONS:
            raise _fail(text, section, None, "unknown section")
        allowed = _SECTIONS[section]
        if allowed is not None:
            for key in cp.options(section):
                if key not in allowed:
                    raise _fail(text, section, key, "unknown key")
    for required in ("utility", "endowments", "dividends"):
        if not cp.has_section(required):
            raise ScenarioError(f"missing required section [{required}]")

    ukind = cp.get("utility", "kind", fallback="log").strip().lower()
    beta = _get_float(cp, text, "utility", "beta", default=1.0)
    try:
        if ukind == "log":
            utility = LogUtility(beta=beta)
        elif ukind == "crra":
            sigma = _get_float(cp, text, "utility", "sigma")
            utility = CRRAUtility(sigma=sigma, beta=beta)
        elif ukind == "crra2":
            sigma1 = _get_float(cp, text, "utility", "sigma1")
            sigma2 = _get_float(cp, text, "utility", "sigma2")
            utility = CRRA2Utility(sigma1=sigma1, sigma2=sigma2, beta=beta)
        else:
            raise _fail(text, "utility", "kind",
                        f"unknown utility kind {ukind!r} (log, crra, crra2)")
    except DomainError as err:
        raise _fail(text, "utility", "kind", str(err)) from None

    young = parse_generator(cp.get("endowments", "young", fallback="")
                            or _missing(text, "endowments", "young"),
                            text, "endowments", "young")
    old = parse_generator(cp.get("endowments", "old", fallback="")
                          or _missing(text, "endowments", "old"),
                          text, "endowments", "old")
    div = parse_generator(cp.get("dividends", "aggregate", fallback="")
                          or _missing(text, "dividends", "aggregate"),
                          text, "dividends", "aggregate")
    if isinstance(young, _TiroleRequest) or isinstance(old, _TiroleRequest):
        raise _fail(text, "endowments", None,
                    "tirole-explicit is a dividend generator only")

    n = _get_float(cp, text, "economy", "n", default=1.0) if cp.has_section("economy") else 1.0
    horizon = _get_int(cp, text, "economy", "horizon", default=400) if cp.has_section("economy") else 400

    if isinstance(div, _TiroleRequest):
        if not (isinstance(young, Constant) and isinstance(old, Constant)):
            raise _fail(text, "dividends", "aggregate",
                        "tirole-explicit dividends need constant endowments")
        params = {"beta": beta, "ey": young.value_const, "eo": old.value_const,
                  "n": n, "x": div.x, "d0": div.d0}
        try:
            div = ClosedFormSeq(form="tirole-explicit-d", params=params)
        except InvalidSequence as err:
            raise _fail(text, "dividends", "aggregate", str(err)) from None

    tol_kwargs = {}
    if cp.has_section("tolerances"):
        for key in ("root_tol", "survive_eps", "bisect_tol"):
            if cp.has_option("tolerances", key):
                tol_kwargs[key] = _get_float(cp, text, "tolerances", key)
        for key in ("series_T", "tail_ratio_window"):
            if cp.has_option("tolerances", key):
                tol_kwargs[key] = _get_int(cp, text, "tolerances", key)
    try:
        tol = ToleranceSet(**tol_kwargs)
        return Economy(utility=utility, endow_young=young, endow_old=old,
                       dividend=div, n=n, horizon=horizon, tol=tol)
    except (DomainError, InvalidSequence) as err:
        raise ScenarioError(f"economy validation failed: {err}") from None


def _missing(text: str, section: str, key: str) -> str:
    raise _fail(text, section, key, "required key is missing")


def parse_scenario(text: str) -> Economy:
    cp = _read_ini(text)
    return build_economy(cp, text)


def _read_ini(text: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keep key case: the schema has series_T
    try:
        cp.read_string(text)
    except configparser.Error as err:
        raise ScenarioError(str(err).replace("\n", " "),
                            line=getattr(err, "lineno", None)) from None
    return cp


def load_scenario(path: str) -> tuple[Economy, str]:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_scenario(text), text


def apply_overrides(text: str, overrides: list[str]) -> str:
    """Apply `section.key=value` overrides, returning amended scenario text.

    Overrides are appended to the raw text via the parser so later values win;
    validation happens when the amended text is built.
    """
    cp = _read_ini(text)
    for ov in overrides:
        head, eq, value = ov.partition("=")
        section, dot, key = head.strip().partition(".")
        if not eq or not dot or not section or not key.strip():
            raise ScenarioError(
                f"override {ov!r} is not of the form section.key=value")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key.strip(), value.strip())
    lines = []
    for section in cp.sections():
        lines.append(f"[{section}]")
        for key, val in cp.items(section):
            lines.append(f"{key} = {val}")
        lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

PRESETS: dict[str, str] = {
    "tirole-explicit": """\
[meta]
name = tirole-explicit
# Stationary log economy whose dividends follow the explicit bubbly
# recursion; the equilibrium is a_t = 0.25 + 0.5 d_t with a_0 = 0.30.

[utility]
kind = log
beta = 1.0

[endowments]
young = constant:1.0
old = constant:0.5

[dividends]
aggregate = tirole-explicit:x=0.5,d0=0.1

[economy]
n = 1.0
horizon = 400
""",
    "log-pure-bubble": """\
[meta]
name = log-pure-bubble
# No dividends at all; R* = 0.5 < n so a continuum of bubbly equilibria
# exists with the maximal one converging to a_hat = 0.25.

[utility]
kind = log
beta = 1.0

[endowments]
young = constant:1.0
old = constant:0.5

[dividends]
aggregate = constant:0.0

[economy]
n = 1.0
horizon = 400
""",
    "claim1-continuum": """\
[meta]
name = claim1-continuum
# R* = 0.5 < n = 1 and sum D_t/(R*)^t converges: a continuum of equilibria.

[utility]
kind = log
beta = 1.0

[endowments]
young = constant:2.0
old = constant:1.0

[dividends]
aggregate = geometric:0.01,0.4

[economy]
n = 1.0
horizon = 400
""",
    "claim2-unique": """\
[meta]
name = claim2-unique
# R* = 0.5 but limsup D_t^(1/t) = 0.8 > R*: unique equilibrium, bubbly.

[utility]
kind = log
beta = 1.0

[endowments]
young = constant:2.0
old = constant:1.0

[dividends]
aggregate = geometric:0.01,0.8

[economy]
n = 1.0
horizon = 400
""",
    "high-interest": """\
[meta]
name = high-interest
# R* = 1.5 > n = 1: unique equilibrium, bubbleless, Pareto optimal.

[utility]
kind = log
beta = 1.0

[endowments]
young = constant:2.0
old = constant:3.0

[dividends]
aggregate = geometric:0.01,0.5

[economy]
n = 1.0
horizon = 400
""",
    "knife-edge": """\
[meta]
name = knife-edge
# R* = e^o/(beta e^y) = 1 = n exactly: the degenerate boundary case.

[utility]
kind = log
beta = 2.0

[endowments]
young = constant:1.0
old = constant:2.0

[dividends]
aggregate = geometric:0.01,0.5

[economy]
n = 1.0
horizon = 400
""",
}


def resolve_scenario(source: str) -> str:
    """Map a preset name, preset:NAME, or file path to scenario text."""
    if source.startswith("preset:"):
        name = source[len("preset:"):]
        if name not in PRESETS:
            raise ScenarioError(
                f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}")
        return PRESETS[name]
    if source in PRESETS:
        return PRESETS[source]
    try:
        with open(source, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise ScenarioError(f"cannot read scenario {source!r}: {err}") from None
