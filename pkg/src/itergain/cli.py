"""Command-line interface.

Human output rounds gains to a configurable precision (default 4
decimals); ``--json`` switches to machine-readable output at full
precision. Engine errors exit nonzero with ``ERROR <code>: message`` on
stderr.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import __version__
from .chooser import CandidateTriple, RankCriterion, score_triples
from .dataset import load_csv
from .errors import EngineError, ParamError
from .gains import LogBase, ProbabilityAssessment
from .generators import HypothesisGenerator
from .informativeness import informativeness_check
from .notation import format_set, parse_set
from .outcomes import complement_within, expected_set
from .session import (
    ExpectationDeclaration,
    SessionStore,
    new_session,
    plan_iteration,
    replay,
    run_iteration,
    session_summary,
)
from .simulate import run_scenario
from .tools import describe_tools, make_tool

DEFAULT_STORE = "./itergain-sessions"


def engine_errors(fn):
    """Turn EngineError into a clean nonzero exit with its code."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except EngineError as exc:
            click.echo(f"ERROR {exc.code}: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _parse_params(pairs: tuple[str, ...]) -> dict:
    params: dict = {}
    for pair in pairs:
        if "=" not in pair:
            raise ParamError(f"--param expects name=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        params[key.strip()] = _coerce(raw.strip())
    return params


def _coerce(raw: str):
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def _fmt(value: float, precision: int) -> str:
    return f"{value:.{precision}f}"


def _emit_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2))


def _load_generator(text: str) -> HypothesisGenerator:
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParamError(f"generator spec is not valid JSON: {exc.msg}") from exc
    return HypothesisGenerator.from_dict(spec)


store_option = click.option(
    "--store",
    envvar="ITERGAIN_STORE",
    default=DEFAULT_STORE,
    show_default=True,
    help="Session log directory (env: ITERGAIN_STORE).",
)
json_option = click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
precision_option = click.option(
    "--precision", default=4, show_default=True, help="Decimal places for displayed gains."
)
base_option = click.option(
    "--base", default="bits", show_default=True, type=click.Choice(["bits", "nats"])
)


@click.group()
@click.version_option(version=__version__, prog_name="itergain")
def main() -> None:
    """Instrument iterative data analysis with information accounting."""


@main.group()
def session() -> None:
    """Create, inspect, and verify analysis sessions."""


@session.command("new")
@base_option
@store_option
@json_option
@engine_errors
def session_new(base: str, store: str, as_json: bool) -> None:
    """Start a fresh session backed by an append-only log."""
    sess = SessionStore(store).create(LogBase.parse(base))
    if as_json:
        _emit_json({"session_id": sess.session_id, "base": sess.base.value})
    else:
        click.echo(sess.session_id)


@session.command("summary")
@click.argument("session_id")
@store_option
@json_option
@precision_option
@engine_errors
def session_summary_cmd(session_id: str, store: str, as_json: bool, precision: int) -> None:
    """Cumulative observed vs expected information for a session."""
    sess = SessionStore(store).load(session_id)
    summary = session_summary(sess)
    if as_json:
        _emit_json(summary.to_dict())
        return
    click.echo(f"session {summary.session_id}  base={summary.base.value}")
    click.echo(
        f"t={summary.t_count}  S_G={_fmt(summary.s_g, precision)}  "
        f"S_H={_fmt(summary.s_h, precision)}  "
        f"divergence={_fmt(summary.divergence, precision)}"
    )
    if summary.n_violations:
        click.echo(f"model violations: {summary.n_violations}")
    for row in summary.rows:
        click.echo(
            f"  t={row['t']}  {row['tool_id']}  expect={row['expected_set']} "
            f"p={row['p_hat']}  observed={row['observed']}  {row['verdict']}  "
            f"G={_fmt(row['g'], precision)}"
        )


@session.command("replay")
@click.argument("logfile", type=click.Path(exists=True, dir_okay=False))
@json_option
@precision_option
@engine_errors
def session_replay(logfile: str, as_json: bool, precision: int) -> None:
    """Verify a session log: recompute every gain, verdict, and sum."""
    sess = replay(logfile)
    summary = session_summary(sess)
    if as_json:
        _emit_json({"verified": True, **summary.to_dict()})
        return
    click.echo(
        f"verified {summary.t_count} records"
        + (f" and {summary.n_violations} violation events" if summary.n_violations else "")
    )
    click.echo(
        f"S_G={_fmt(summary.s_g, precision)}  S_H={_fmt(summary.s_h, precision)}  "
        f"divergence={_fmt(summary.divergence, precision)}"
    )


def _build_tool(tool_id: str, params: tuple[str, ...], data=None):
    return make_tool(tool_id, _parse_params(params), data)


def _build_declaration(tool, expect: str, p: float, note: str = "") -> ExpectationDeclaration:
    e_set = expected_set(parse_set(expect), tool.declared_space)
    return ExpectationDeclaration(e_set, ProbabilityAssessment(p), note=note)


@main.group("iter")
def iter_group() -> None:
    """Plan and run analytic iterations."""


@iter_group.command("plan")
@click.option("--tool", "tool_id", required=True, help="Built-in tool id.")
@click.option("--param", "params", multiple=True, help="Tool parameter name=value.")
@click.option("--expect", required=True, help="Expected set in set notation.")
@click.option("--p", required=True, type=float, help="Probability the output lands there.")
@click.option("--data", "data_path", type=click.Path(exists=True), default=None,
              help="Optional CSV; sharpens data-dependent outcome sets.")
@base_option
@json_option
@precision_option
@engine_errors
def iter_plan(tool_id, params, expect, p, data_path, base, as_json, precision) -> None:
    """Expected and anomaly gain for a declaration, before touching data."""
    data = load_csv(data_path) if data_path else None
    tool = _build_tool(tool_id, params, data)
    declaration = _build_declaration(tool, expect, p)
    sess = new_session(base=LogBase.parse(base))
    plan = plan_iteration(sess, tool, declaration)
    anomaly_set = complement_within(declaration.expected_set)
    if as_json:
        _emit_json(
            {
                "tool_id": tool.tool_id,
                "space": format_set(tool.declared_space),
                "expected_set": format_set(declaration.expected_set),
                "anomaly_set": format_set(anomaly_set),
                "p": declaration.assessment.p_expected,
                "h": plan.h_expected,
                "m": plan.m_anomaly,
                "base": base,
            }
        )
        return
    unit = base
    click.echo(f"tool: {tool.tool_id}  space: {format_set(tool.declared_space)}")
    click.echo(
        f"expected: {format_set(declaration.expected_set)}  "
        f"anomaly: {format_set(anomaly_set)}  p={p}"
    )
    click.echo(
        f"H={_fmt(plan.h_expected, precision)} {unit}  "
        f"M={_fmt(plan.m_anomaly, precision)} {unit}"
    )


@iter_group.command("run")
@click.option("--tool", "tool_id", required=True)
@click.option("--param", "params", multiple=True)
@click.option("--expect", required=True)
@click.option("--p", required=True, type=float)
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--session", "session_id", default=None,
              help="Append to this stored session; omit for a one-shot run.")
@click.option("--note", default="", help="Analyst rationale for the declaration.")
@store_option
@base_option
@json_option
@precision_option
@engine_errors
def iter_run(tool_id, params, expect, p, data_path, session_id, note, store,
             base, as_json, precision) -> None:
    """Run one full iteration: apply the tool, classify, bank the gain."""
    data = load_csv(data_path)
    tool = _build_tool(tool_id, params, data)
    declaration = _build_declaration(tool, expect, p, note)
    if session_id:
        sess = SessionStore(store).load(session_id)
    else:
        sess = new_session(base=LogBase.parse(base))
    record = run_iteration(sess, tool, declaration, data)
    if as_json:
        _emit_json(
            {
                "session_id": sess.session_id if session_id else None,
                "t": record.index,
                "observed": record.observed,
                "verdict": record.verdict.value,
                "g": record.g_observed,
                "h": record.h_expected,
                "m": record.m_anomaly,
                "s_g": sess.s_g,
                "s_h": sess.s_h,
            }
        )
        return
    unit = sess.base.value
    click.echo(f"observed: {record.observed}")
    click.echo(f"verdict: {record.verdict.value}")
    click.echo(f"G={_fmt(record.g_observed, precision)} {unit}")
    if session_id:
        click.echo(
            f"session {sess.session_id}: t={sess.t_count}  "
            f"S_G={_fmt(sess.s_g, precision)}  S_H={_fmt(sess.s_h, precision)}"
        )


@main.command("choose")
@click.option("--candidates", "candidates_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="JSON list of {tool, params, expect, p}.")
@click.option("--criterion", required=True,
              help="'expected' (gain on average) or 'anomaly' (gain if surprised).")
@base_option
@json_option
@precision_option
@engine_errors
def choose(candidates_path, criterion, base, as_json, precision) -> None:
    """Rank candidate next steps by an information criterion."""
    crit = RankCriterion.parse(criterion)
    try:
        raw = json.loads(Path(candidates_path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParamError(f"candidates file is not valid JSON: {exc.msg}") from exc
    if not isinstance(raw, list):
        raise ParamError("candidates file must hold a JSON list")
    triples = []
    for j, entry in enumerate(raw):
        tool = make_tool(str(entry.get("tool")), entry.get("params"))
        declaration = _build_declaration(tool, str(entry.get("expect")), entry.get("p"))
        triples.append(CandidateTriple(tool, declaration, j))
    ranking = score_triples(triples, crit, LogBase.parse(base))
    if as_json:
        payload = ranking.to_dict()
        for row in payload["ordered"]:
            entry = raw[row["j"]]
            row.update({"tool": entry.get("tool"), "expect": entry.get("expect"),
                        "p": entry.get("p")})
        _emit_json(payload)
        return
    click.echo(f"criterion: {crit.value}")
    for rank, (j, score) in enumerate(ranking.ordered, start=1):
        entry = raw[j]
        marker = "*" if j == ranking.chosen else " "
        click.echo(
            f"{marker} {rank}. [{j}] {entry.get('tool')} expect={entry.get('expect')} "
            f"p={entry.get('p')}  score={_fmt(score, precision)}"
        )


@main.command("check-informative")
@click.option("--tool", "tool_id", required=True)
@click.option("--param", "params", multiple=True)
@click.option("--h1", required=True, help="Generator spec JSON for hypothesis 1.")
@click.option("--h2", required=True, help="Generator spec JSON for hypothesis 2.")
@click.option("--replicates", default=1000, show_default=True)
@click.option("--alpha", default=0.01, show_default=True)
@click.option("--seed", default=0, show_default=True)
@json_option
@precision_option
@engine_errors
def check_informative(tool_id, params, h1, h2, replicates, alpha, seed,
                      as_json, precision) -> None:
    """Monte Carlo test: does the tool separate two hypotheses?"""
    tool = _build_tool(tool_id, params)
    verdict = informativeness_check(
        tool, _load_generator(h1), _load_generator(h2),
        n_replicates=replicates, alpha=alpha, seed=seed,
    )
    if as_json:
        _emit_json(verdict.to_dict())
        return
    word = "informative" if verdict.informative else "not informative"
    click.echo(f"{tool.tool_id}: {word}")
    click.echo(
        f"mean under H1={_fmt(verdict.mean_h1, precision)}  "
        f"under H2={_fmt(verdict.mean_h2, precision)}  "
        f"p-value={verdict.p_value:.3g}  alpha={verdict.alpha}"
    )


@main.command("simulate")
@click.option("--scenario", "scenario_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Scenario spec JSON file.")
@click.option("--kind", default=None,
              type=click.Choice(["theorems"]),
              help="Shortcut for scenarios that need no parameters.")
@click.option("--json-out", "json_out", type=click.Path(dir_okay=False), default=None,
              help="Also write the machine-readable report here.")
@json_option
@engine_errors
def simulate_cmd(scenario_path, kind, json_out, as_json) -> None:
    """Run a verification simulation and report pass/fail per assertion."""
    if scenario_path is None and kind is None:
        raise ParamError("give --scenario FILE or --kind theorems")
    if scenario_path is not None:
        try:
            spec = json.loads(Path(scenario_path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParamError(f"scenario file is not valid JSON: {exc.msg}") from exc
    else:
        spec = {"kind": kind}
    report = run_scenario(spec)
    if json_out:
        Path(json_out).write_text(report.to_json() + "\n", encoding="utf-8")
    if as_json:
        click.echo(report.to_json())
    else:
        click.echo(report.render_text())
    if not report.all_passed:
        sys.exit(1)


@main.command("tools")
@json_option
@engine_errors
def tools_cmd(as_json: bool) -> None:
    """List built-in tools and their outcome sets."""
    info = describe_tools()
    if as_json:
        _emit_json(info)
        return
    for entry in info:
        params = ", ".join(entry["params"]) or "none"
        click.echo(f"{entry['tool_id']}  ->  {entry['default_space']}")
        click.echo(f"    {entry['description']}")
        click.echo(f"    params: {params}")


@main.command("data")
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False))
@json_option
@engine_errors
def data_cmd(csv_path: str, as_json: bool) -> None:
    """Describe a CSV: rows, column kinds, missingness."""
    data = load_csv(csv_path)
    payload = {"n_rows": data.n_rows, "columns": data.head_summary()}
    if as_json:
        _emit_json(payload)
        return
    click.echo(f"rows: {data.n_rows}")
    for col in payload["columns"]:
        click.echo(f"  {col['name']}: {col['kind']}  missing={col['missing']}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", envvar="ITERGAIN_PORT", default=8347, show_default=True, type=int)
@store_option
@click.option("--frontend", "frontend_dir", type=click.Path(file_okay=False), default=None,
              help="Static directory for the web console.")
@engine_errors
def serve(host: str, port: int, store: str, frontend_dir: str | None) -> None:
    """Start the local HTTP session API (and console, if built)."""
    import uvicorn

    from .service import create_app

    app = create_app(store_dir=store, frontend_dir=frontend_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
