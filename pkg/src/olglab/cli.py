"""Command-line front end: scenarios in, JSON reports, CSV and plot data out.

`olg <command> [PRESET] [--scenario FILE] [--override section.key=v]*
[--out DIR] [--horizon N] [--deterministic]`

Commands: solve, classify, bubble-test, pareto, sweep, oracle-check, demo.
Reports are deterministic for a fixed configuration; --deterministic drops
the timestamp so reruns are byte-identical.  Exit codes: 0 success, 2 when
the headline verdict is Undetermined/Inconclusive, 1 on errors.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from itertools import product
from typing import Optional

import click
import numpy as np

from .bubbles import (bubble_test_path, classify_regime, condition_B_check,
                      growth_rate_probe, no_bubble_conditions)
from .eqset import (CLOSED_FORM_MODELS, closed_form_path, equilibrium_set,
                    fundamental_path, maximal_path)
from .errors import (BracketFailure, EmptySurvivalSet,
                     ModelPreconditionFailed, NonConvergedSet, NotApplicable,
                     OlgLabError, ScenarioError)
from .euler import euler_residual, g_solve
from .model import Economy, LogUtility
from .paths import decompose, simulate, telescoping_residual, write_path_csv
from .pareto import certify, welfare_rank
from .scenario import apply_overrides, parse_scenario, resolve_scenario

COMMANDS = ("solve", "classify", "bubble-test", "pareto", "sweep",
            "oracle-check", "demo")


@dataclass
class RunConfig:
    command: str
    scenario: Optional[str] = None  # preset name, preset:NAME, or file path
    output_dir: Optional[str] = None
    overrides: tuple = ()
    horizon: Optional[int] = None
    deterministic: bool = False
    grids: tuple = ()  # sweep only: "section.key=v1;v2;v3"


@dataclass
class RunReport:
    config: dict
    body: dict
    paths: dict  # name -> (EquilibriumPath, PriceDecomposition | None)
    out_dir: Optional[str]
    manifest: dict = field(default_factory=dict)
    exit_code: int = 0


def _sanitize(obj):
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def _write_file(rr: RunReport, name: str, content: str) -> Optional[str]:
    if rr.out_dir is None:
        return None
    os.makedirs(rr.out_dir, exist_ok=True)
    target = os.path.join(rr.out_dir, name)
    data = content.encode("utf-8")
    with open(target, "wb") as fh:
        fh.write(data)
    rr.manifest[name] = hashlib.sha256(data).hexdigest()
    return target


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def emit_plot_data(rr: RunReport) -> list:
    """Two-column whitespace files per stored path: a, F/q, B/q, log P."""
    written = []
    for name, (path, decomp) in rr.paths.items():
        n_pts = path.survived_to + 1
        series = {"a": [path.a[t] for t in range(n_pts)]}
        if decomp is not None:
            series["fund-share"] = [decomp.f[t] / path.a[t] for t in range(n_pts)]
            series["bubble-share"] = [decomp.b[t] / path.a[t] for t in range(n_pts)]
            series["logP"] = [decomp.logP[t] for t in range(n_pts)]
        for label, vals in series.items():
            content = "".join(f"{t} {_fmt(v)}\n" for t, v in enumerate(vals))
            fname = f"{name}-{label}.dat"
            _write_file(rr, fname, content)
            written.append(fname)
    rr.body["plot_files"] = written
    return written


def _store_path(rr: RunReport, econ: Economy, name: str, path) -> dict:
    info = {"a0": path.a[0], "survived_to": path.survived_to,
            "status": path.status.kind}
    decomp = None
    if path.status.survived:
        decomp = decompose(econ, path)
        info["telescoping_residual"] = telescoping_residual(econ, path, decomp)
        info["tail_bound"] = decomp.tail_bound
    rr.paths[name] = (path, decomp)
    buf = io.StringIO()
    write_path_csv(econ, path, decomp, buf)
    _write_file(rr, f"path-{name}.csv", buf.getvalue())
    info["csv"] = f"path-{name}.csv"
    return info


# ---------------------------------------------------------------------------
# command bodies
# ---------------------------------------------------------------------------

def _attach_regime(econ: Economy, rr: RunReport) -> Optional[str]:
    try:
        rep = classify_regime(econ)
        rr.body["regime"] = rep.describe()
        return rep.regime
    except NotApplicable as err:
        rr.body["regime"] = {"not_applicable": str(err)}
        return None


def _top_path(econ: Economy, es=None):
    """Maximal path via the tracker, else a forward orbit from the deepest
    surviving probe endpoint (Euler-consistent by construction)."""
    if es is not None and es.kind == "unique" and math.isfinite(es.lower):
        # a unique equilibrium that coincides with the discounted-dividend
        # path needs no saddle tracking
        try:
            fp = fundamental_path(econ, econ.horizon)
            if abs(fp.a[0] - es.lower) <= 1e-3 * max(es.lower, fp.a[0]):
                return fp, None
        except OlgLabError:
            pass
    try:
        return maximal_path(econ, econ.horizon), None
    except BracketFailure as err:
        if es is None:
            es = equilibrium_set(econ)
        probe = es.probes[-1]
        if probe["upper_is_survivor"]:
            p = simulate(econ, probe["upper"])
            if p.status.survived:
                note = (f"tracker unavailable ({err}); forward orbit from the "
                        f"{probe['horizon']}-period upper survival bound")
                return p, note
        raise


def _run_solve(econ: Economy, rr: RunReport) -> None:
    es = None
    try:
        es = equilibrium_set(econ)
        rr.body["equilibrium_set"] = es.describe()
    except (EmptySurvivalSet, NonConvergedSet) as err:
        rr.body["equilibrium_set"] = {"error": str(err)}
    _attach_regime(econ, rr)

    paths_info = {}
    top, note = _top_path(econ, es)
    paths_info["maximal"] = _store_path(rr, econ, "maximal", top)
    if note:
        paths_info["maximal"]["note"] = note
    if es is not None and es.kind == "continuum":
        # the minimal equilibrium is the discounted-dividend path; fall back
        # to the surviving probe endpoint when that solver does not apply
        low = None
        try:
            low = fundamental_path(econ, econ.horizon)
        except OlgLabError:
            probe = es.probes[-1]
            if probe["lower_is_survivor"]:
                low = simulate(econ, probe["lower"])
        if low is not None:
            paths_info["minimal"] = _store_path(rr, econ, "minimal", low)
        mid = 0.5 * (es.lower + es.upper)
        if es.lower < mid < es.upper:
            paths_info["interior"] = _store_path(
                rr, econ, "interior", simulate(econ, mid))

    for name, (path, decomp) in list(rr.paths.items()):
        if decomp is None:
            continue
        paths_info[name]["bubble"] = bubble_test_path(econ, path, decomp).describe()
        paths_info[name]["pareto"] = certify(econ, path, decomp).describe()
    rr.body["paths"] = paths_info
    emit_plot_data(rr)


def _run_classify(econ: Economy, rr: RunReport) -> None:
    regime = _attach_regime(econ, rr)
    rr.body["no_bubble_conditions"] = no_bubble_conditions(econ).describe()
    rr.body["condition_B"] = condition_B_check(econ).describe()
    if regime == "Undetermined":
        rr.exit_code = 2


def _run_bubble_test(econ: Economy, rr: RunReport) -> None:
    top, note = _top_path(econ)
    info = _store_path(rr, econ, "maximal", top)
    if note:
        info["note"] = note
    decomp = rr.paths["maximal"][1]
    rep = bubble_test_path(econ, top, decomp)
    info["bubble"] = rep.describe()
    try:
        info["growth_probe"] = growth_rate_probe(econ, top).describe()
    except NotApplicable as err:
        info["growth_probe"] = {"not_applicable": str(err)}
    rr.body["paths"] = {"maximal": info}
    emit_plot_data(rr)
    if rep.verdict == "Inconclusive":
        rr.exit_code = 2


def _run_pareto(econ: Economy, rr: RunReport) -> None:
    top, note = _top_path(econ)
    info = _store_path(rr, econ, "maximal", top)
    if note:
        info["note"] = note
    decomp = rr.paths["maximal"][1]
    cert = certify(econ, top, decomp)
    info["pareto"] = cert.describe()
    rr.body["paths"] = {"maximal": info}
    try:
        es = equilibrium_set(econ)
        rr.body["equilibrium_set"] = es.describe()
        if es.kind == "continuum" and es.upper > es.lower:
            width = es.upper - es.lower
            a0s = [es.lower + 0.1 * width, es.lower + 0.5 * width, es.upper]
            rr.body["welfare_rank"] = welfare_rank(econ, a0s).describe()
    except (EmptySurvivalSet, NonConvergedSet) as err:
        rr.body["equilibrium_set"] = {"error": str(err)}
    emit_plot_data(rr)
    if cert.verdict == "Undetermined":
        rr.exit_code = 2


def _run_oracle_check(econ: Economy, rr: RunReport) -> None:
    checks = []

    def record(name: str, passed: bool, value: float, threshold: float) -> None:
        checks.append({"name": name, "pass": bool(passed),
                       "value": value, "threshold": threshold})

    T = min(econ.horizon, 300)
    for model_id in CLOSED_FORM_MODELS:
        try:
            cf = closed_form_path(econ, model_id, T)
        except ModelPreconditionFailed:
            continue
        worst = 0.0
        for t in range(cf.survived_to):
            res = euler_residual(econ, t, cf.a[t], cf.R[t + 1]) if econ.add_assum else 0.0
            worst = max(worst, abs(res))
        if econ.add_assum:
            record(f"closed-form-euler-residual:{model_id}", worst < 1e-9, worst, 1e-9)
            tracked = maximal_path(econ, T)
            diff = max(abs(cf.a[t] - tracked.a[t]) for t in range(T + 1))
            record(f"closed-form-vs-tracked:{model_id}", diff < 1e-7, diff, 1e-7)
        else:
            # no interior Euler branch; verify the non-arbitrage identity instead
            worst = 0.0
            for t in range(cf.survived_to):
                lhs = cf.a[t + 1]
                rhs = cf.a[t] * cf.R[t + 1] / econ.n - econ.d(t + 1)
                worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1e-300))
            record(f"closed-form-non-arbitrage:{model_id}", worst < 1e-12, worst, 1e-12)

    if econ.add_assum and isinstance(econ.utility, LogUtility):
        worst = 0.0
        frac = econ.utility.beta / (1.0 + econ.utility.beta)
        for t in (0, 1, 5):
            for k in range(1, 10):
                a = econ.ey(t) * frac * k / 10.0
                r_auto = g_solve(econ, t, a, method="auto")
                r_bis = g_solve(econ, t, a, method="bisect")
                worst = max(worst, abs(r_auto - r_bis) / max(r_auto, 1e-300))
        record("rate-solver-two-routes", worst < 1e-9, worst, 1e-9)

    if econ.add_assum:
        top = maximal_path(econ, min(econ.horizon, 400))
        decomp = decompose(econ, top)
        resid = telescoping_residual(econ, top, decomp)
        record("telescoping-identity", abs(resid) < 1e-8, resid, 1e-8)
        worst = 0.0
        for t in range(top.survived_to):
            lhs = decomp.b[t + 1]
            rhs = decomp.b[t] * top.R[t + 1] / econ.n
            scale = max(abs(lhs), abs(top.a[t + 1]) * 1e-3, 1e-300)
            worst = max(worst, abs(lhs - rhs) / scale)
        record("bubble-growth-identity", worst < 1e-10, worst, 1e-10)

    rr.body["checks"] = checks
    if not checks:
        rr.body["note"] = "no oracle applies to this economy"
    if any(not c["pass"] for c in checks):
        rr.exit_code = 1


def _run_sweep(cfg: RunConfig, rr: RunReport) -> None:
    grids = []
    for g in cfg.grids:
        head, eq, values = g.partition("=")
        vals = [v.strip() for v in values.split(";") if v.strip()]
        if not eq or "." not in head or not vals:
            raise ScenarioError(
                f"grid {g!r} is not of the form section.key=v1;v2;...")
        grids.append((head.strip(), vals))
    if not grids:
        raise ScenarioError("sweep needs at least one --grid section.key=v1;v2;...")
    combos = list(product(*[[(k, v) for v in vals] for k, vals in grids]))
    runs = []
    worst_exit = 0
    for idx, combo in enumerate(combos):
        ovs = [f"{k}={v}" for k, v in combo]
        sub_out = os.path.join(rr.out_dir, f"run-{idx:03d}") if rr.out_dir else None
        sub_cfg = RunConfig(
            command="solve", scenario=cfg.scenario, output_dir=sub_out,
            overrides=tuple(list(cfg.overrides) + ovs), horizon=cfg.horizon,
            deterministic=cfg.deterministic)
        sub = run(sub_cfg)
        body = sub.body
        summary = {
            "run": idx, "overrides": ovs, "exit_code": sub.exit_code,
            "output_dir": sub_out,
            "maximal_a0": body.get("paths", {}).get("maximal", {}).get("a0"),
            "equilibrium_kind": body.get("equilibrium_set", {}).get("kind"),
            "regime": body.get("regime", {}).get("regime"),
        }
        runs.append(summary)
        worst_exit = max(worst_exit, sub.exit_code)
    rr.body["sweep"] = {"grid": [{"key": k, "values": vals} for k, vals in grids],
                        "runs": runs}
    rr.exit_code = worst_exit


_DISPATCH = {
    "solve": _run_solve,
    "classify": _run_classify,
    "bubble-test": _run_bubble_test,
    "pareto": _run_pareto,
    "oracle-check": _run_oracle_check,
    "demo": _run_solve,
}


def run(cfg: RunConfig) -> RunReport:
    """Execute one configured command and assemble its report."""
    if cfg.command not in COMMANDS:
        raise ScenarioError(f"unknown command {cfg.command!r}")
    source = cfg.scenario or ("tirole-explicit" if cfg.command == "demo" else None)
    if source is None:
        raise ScenarioError("no scenario given: pass a preset name or --scenario FILE")
    text = resolve_scenario(source)
    ovs = list(cfg.overrides)
    if cfg.horizon is not None:
        ovs.append(f"economy.horizon={cfg.horizon}")
    if ovs:
        text = apply_overrides(text, ovs)
    rr = RunReport(
        config={"command": cfg.command, "scenario": source,
                "overrides": list(cfg.overrides), "horizon": cfg.horizon,
                "deterministic": cfg.deterministic,
                "output_dir": cfg.output_dir},
        body={}, paths={}, out_dir=cfg.output_dir)
    if cfg.command == "sweep":
        _run_sweep(cfg, rr)
    else:
        econ = parse_scenario(text)
        rr.body["economy"] = econ.describe()
        _DISPATCH[cfg.command](econ, rr)

    body = dict(rr.body)
    body["config"] = rr.config
    if not cfg.deterministic:
        body["timestamp"] = datetime.now(timezone.utc).isoformat()
    body["manifest"] = dict(rr.manifest)
    body["exit_code"] = rr.exit_code
    content = json.dumps(_sanitize(body), indent=2, sort_keys=True)
    _write_file(rr, "report.json", content)
    rr.body = body
    return rr


# ---------------------------------------------------------------------------
# click wiring
# ---------------------------------------------------------------------------

def _common(fn):
    fn = click.option("--scenario", "scenario_opt", default=None,
                      help="Scenario file, preset name, or preset:NAME.")(fn)
    fn = click.option("--override", "overrides", multiple=True,
                      metavar="SECTION.KEY=VALUE",
                      help="Override a scenario value (repeatable).")(fn)
    fn = click.option("--out", "out_dir", default=None,
                      help="Output directory for report/CSV/plot files.")(fn)
    fn = click.option("--horizon", type=int, default=None,
                      help="Override the economy horizon.")(fn)
    fn = click.option("--deterministic", is_flag=True,
                      help="Omit timestamps so reruns are byte-identical.")(fn)
    return fn


def _execute(command: str, preset: Optional[str], scenario_opt: Optional[str],
             overrides: tuple, out_dir: Optional[str], horizon: Optional[int],
             deterministic: bool, grids: tuple = ()) -> RunReport:
    if preset and scenario_opt:
        raise click.UsageError("give either a PRESET argument or --scenario, not both")
    cfg = RunConfig(command=command, scenario=preset or scenario_opt,
                    output_dir=out_dir, overrides=tuple(overrides),
                    horizon=horizon, deterministic=deterministic,
                    grids=tuple(grids))
    try:
        return run(cfg)
    except OlgLabError as err:
        click.echo(f"error: {err}", err=True)
        raise SystemExit(1) from None


def _finish(rr: RunReport) -> None:
    if rr.out_dir is None:
        click.echo(json.dumps(_sanitize(rr.body), indent=2, sort_keys=True))
    else:
        click.echo(f"report written to {os.path.join(rr.out_dir, 'report.json')}")
    if rr.exit_code != 0:
        raise SystemExit(rr.exit_code)


@click.group()
def main() -> None:
    """Numerical laboratory for two-period exchange economies with a
    dividend-paying asset: equilibrium sets, bubble tests, optimality."""


def _simple_command(name: str, help_text: str):
    @main.command(name, help=help_text)
    @click.argument("preset", required=False)
    @_common
    def _cmd(preset, scenario_opt, overrides, out_dir, horizon, deterministic):
        rr = _execute(name, preset, scenario_opt, overrides, out_dir,
                      horizon, deterministic)
        _finish(rr)

    return _cmd


cmd_solve = _simple_command(
    "solve", "Solve the equilibrium set and the maximal path; emit CSV/plots.")
cmd_classify = _simple_command(
    "classify", "Run the regime decision table and the condition checkers.")
cmd_bubble = _simple_command(
    "bubble-test", "Decompose the maximal path and test for a bubble.")
cmd_pareto = _simple_command(
    "pareto", "Certify Pareto optimality of the maximal path.")
cmd_oracle = _simple_command(
    "oracle-check", "Cross-check solvers against closed forms and identities.")


@main.command("demo", help="Run the full pipeline on a preset (default: tirole-explicit).")
@click.argument("preset", required=False)
@_common
def cmd_demo(preset, scenario_opt, overrides, out_dir, horizon, deterministic):
    rr = _execute("demo", preset, scenario_opt, overrides, out_dir,
                  horizon, deterministic)
    body = rr.body
    eq = body.get("equilibrium_set", {})
    click.echo(f"equilibrium set: kind={eq.get('kind')} "
               f"[{eq.get('lower')}, {eq.get('upper')}]")
    regime = body.get("regime", {})
    click.echo(f"regime: {regime.get('regime', regime.get('not_applicable'))}")
    for name, info in body.get("paths", {}).items():
        bub = (info.get("bubble") or {}).get("verdict")
        par = (info.get("pareto") or {}).get("verdict")
        click.echo(f"path {name}: a0={info['a0']:.6g} bubble={bub} pareto={par}")
    _finish(rr)


@main.command("sweep", help="Run solve over a declared parameter grid.")
@click.argument("preset", required=False)
@click.option("--grid", "grids", multiple=True, metavar="SECTION.KEY=V1;V2;...",
              help="Sweep values for one key (repeatable; cartesian product).")
@_common
def cmd_sweep(preset, grids, scenario_opt, overrides, out_dir, horizon,
              deterministic):
    rr = _execute("sweep", preset, scenario_opt, overrides, out_dir,
                  horizon, deterministic, grids=grids)
    _finish(rr)


if __name__ == "__main__":
    main()
