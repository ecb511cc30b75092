"""Command line front end.

Thin by design: argument handling and rendering live here, everything
stateful goes through Project under the directory lock. Domain errors
exit 1 with one machine-parseable line on stderr; click keeps exit 2
for usage mistakes.
"""

from __future__ import annotations

import functools
import os
import sys

import click

from .errors import EngineError
from .project import Project, project_lock
from .relstore import _parse_value
from .report import (
    canonical_json,
    fixed_width,
    format_report_table,
    write_report_files,
)


def engine_guard(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except EngineError as exc:
            click.echo(f"error: {exc.code}: {exc.detail}", err=True)
            sys.exit(1)

    return wrapper


@click.group()
@click.option(
    "--project",
    "project_dir",
    envvar="UPSILON_PROJECT",
    default=".",
    show_default=True,
    help="Project directory (or set UPSILON_PROJECT).",
)
@click.pass_context
def main(ctx, project_dir):
    """Hypothesis management: from equations to ranked predictions."""
    ctx.obj = project_dir


def _mutate(project_dir, operation):
    """Open, run, save, all under the writer lock."""
    os.makedirs(project_dir, exist_ok=True)
    with project_lock(project_dir):
        project = Project.open(project_dir)
        result = operation(project)
        project.save()
    return project, result


def _warn(messages):
    for message in messages:
        click.echo(f"warning: {message}", err=True)


@main.command()
@click.pass_obj
@engine_guard
def init(project_dir):
    """Create an empty project directory."""
    os.makedirs(project_dir, exist_ok=True)
    with project_lock(project_dir):
        Project.init(project_dir)
    click.echo(f"initialized {project_dir}")


@main.command("add-phenomenon")
@click.argument("file", type=click.File("rb"))
@click.option("--json", "as_json", is_flag=True, help="Print canonical JSON.")
@click.pass_obj
@engine_guard
def add_phenomenon(project_dir, file, as_json):
    """Register a phenomenon from an XML or JSON declaration."""
    data = file.read()
    _, obj = _mutate(project_dir, lambda p: p.add_phenomenon(data))
    if as_json:
        click.echo(canonical_json(obj))
    else:
        click.echo(f"phenomenon {obj['id']}: {obj['description']}")


def _format_fds(fd_objs) -> str:
    lines = []
    for item in fd_objs:
        lines.append("  " + " ".join(item["determinant"]) + " -> " + item["dependent"])
    return "\n".join(lines)


def _format_schema(project, obj) -> str:
    lines = []
    for rel in obj["relations"]:
        deployed = project.store.get(rel["name"])
        keys = ", ".join(
            "(" + ", ".join(a for a in deployed.attributes if a in key) + ")"
            for key in deployed.keys
        )
        lines.append(
            f"  {rel['name']}({', '.join(deployed.attributes)}) keys: {keys}"
        )
    return "\n".join(lines)


@main.command("add-hypothesis")
@click.argument("descriptor", type=click.File("rb"))
@click.option("--phi", "phis", type=int, multiple=True,
              help="Phenomenon this hypothesis targets (repeatable).")
@click.option("--json", "as_json", is_flag=True, help="Print canonical JSON.")
@click.pass_obj
@engine_guard
def add_hypothesis(project_dir, descriptor, phis, as_json):
    """Run a descriptor through the full pipeline and deploy its schema."""
    data = descriptor.read()
    project, obj = _mutate(
        project_dir, lambda p: p.add_hypothesis(data, list(phis))
    )
    if as_json:
        click.echo(canonical_json(obj))
        return
    click.echo(f"hypothesis {obj['id']} ({obj['name']})")
    click.echo("sigma:")
    click.echo(_format_fds(obj["primitive"]))
    click.echo("folded:")
    click.echo(_format_fds(obj["folded"]))
    click.echo("schema:")
    click.echo(_format_schema(project, obj))
    _warn(obj["warnings"])


@main.command("load-trial")
@click.argument("file", type=click.File("r"))
@click.option("--phi", type=int, required=True)
@click.option("--upsilon", type=int, required=True)
@click.option("--json", "as_json", is_flag=True, help="Print canonical JSON.")
@click.pass_obj
@engine_guard
def load_trial(project_dir, file, phi, upsilon, as_json):
    """Load one trial CSV for a (phenomenon, hypothesis) pair."""
    text = file.read()
    _, obj = _mutate(
        project_dir, lambda p: p.load_trial_csv(phi, upsilon, text)
    )
    if as_json:
        click.echo(canonical_json(obj))
    else:
        click.echo(f"tid {obj['tid']}")


@main.command()
@click.argument("model", type=click.File("r"))
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the trial CSV here instead of stdout.")
@engine_guard
def sim(model, out):
    """Simulate one model JSON into a loadable trial CSV."""
    from . import simkit

    parsed = simkit.parse_model_json(model.read())
    text = simkit.trial_csv(parsed)
    if out:
        with open(out, "w", encoding="utf-8") as stream:
            stream.write(text)
    else:
        click.echo(text, nl=False)


@main.command("u-intro")
@click.option("--phi", type=int, required=True)
@click.option("--json", "as_json", is_flag=True, help="Print canonical JSON.")
@click.pass_obj
@engine_guard
def u_intro(project_dir, phi, as_json):
    """Introduce uncertainty for a phenomenon's loaded hypotheses."""
    _, obj = _mutate(project_dir, lambda p: p.u_intro(phi))
    if as_json:
        click.echo(canonical_json(obj))
        return
    for item in obj.get("theoretical", []):
        click.echo(
            f"choice variable {item['var']} for phenomenon "
            f"{item['phenomenon']} ({item['alternatives']} alternatives)"
        )
    for item in obj["introduced"]:
        clusters = " ".join("{" + ",".join(c) + "}" for c in item["clusters"])
        click.echo(
            f"hypothesis {item['upsilon']}: clusters {clusters} -> "
            f"{', '.join(item['variables'])}; "
            f"u-relations {', '.join(item['urelations'])}"
        )
    click.echo(f"worlds: {obj['worlds']}")
    _warn(obj["warnings"])


def _parse_where(pairs) -> dict:
    where = {}
    for pair in pairs:
        if "=" not in pair:
            raise click.UsageError(f"--where needs attr=value, got {pair!r}")
        attr, value = pair.split("=", 1)
        where[attr] = _parse_value(attr, value)
    return where


@main.command()
@click.argument("relation")
@click.option("--where", "wheres", multiple=True,
              help="attr=value filter (repeatable).")
@click.option("--json", "as_json", is_flag=True, help="Print canonical JSON.")
@click.pass_obj
@engine_guard
def query(project_dir, relation, wheres, as_json):
    """Print a relation, a U-relation, or the world table (name W)."""
    project = Project.open(project_dir)
    if relation == "W":
        obj = project.world_table_obj()
        if as_json:
            click.echo(canonical_json(obj))
            return
        rows = [[m["var"], m["val"], f"{m['prob']:.6g}"]
                for m in obj["marginals"]]
        click.echo(fixed_width(["var", "val", "prob"], rows), nl=False)
        return

    where = _parse_where(wheres)
    obj = project.relation_obj(relation, where)
    if as_json:
        click.echo(canonical_json(obj))
        return
    if obj["kind"] == "certain":
        columns = obj["attributes"]
        rows = [[row[a] for a in columns] for row in obj["rows"]]
        click.echo(fixed_width(columns, rows), nl=False)
    else:
        arity = max((len(t["condition"]) for t in obj["tuples"]), default=0)
        header = []
        for i in range(1, arity + 1):
            header += [f"V{i}", f"D{i}"]
        header += obj["columns"]
        rows = []
        for item in obj["tuples"]:
            cells = []
            for var, val in item["condition"]:
                cells += [var, val]
            cells += [""] * (2 * arity - len(cells))
            cells += [item["data"][c] for c in obj["columns"]]
            rows.append(cells)
        click.echo(fixed_width(header, rows), nl=False)


@main.command()
@click.option("--json", "as_json", is_flag=True, help="Print canonical JSON.")
@click.pass_obj
@engine_guard
def catalog(project_dir, as_json):
    """Show registered phenomena, hypotheses, and target pairs."""
    project = Project.open(project_dir)
    obj = project.catalog_obj()
    if as_json:
        click.echo(canonical_json(obj))
        return
    for item in obj["phenomena"]:
        click.echo(f"phenomenon {item['id']}: {item['description']}")
    for item in obj["hypotheses"]:
        relations = ", ".join(rel["name"] for rel in item["relations"])
        click.echo(
            f"hypothesis {item['id']} ({item['name']}) "
            f"targets {item['targets']}: {relations}"
        )
    for entry in obj["stages"]:
        click.echo(
            f"({entry['phi']}, {entry['upsilon']}): {entry['stage']}"
        )
    if obj["urelations"]:
        click.echo("u-relations: " + ", ".join(obj["urelations"]))


@main.command()
@click.option("--phi", type=int, required=True)
@click.option("--obs", type=click.File("r"), required=True,
              help="Observation CSV: index column plus value column.")
@click.option("--sigma", type=float, default=None,
              help="Noise scale; defaults to the sample standard deviation "
                   "of the observed values (a labeled heuristic).")
@click.option("--at", "at_index", type=float, default=None,
              help="Index value the table rows display (default: last observed).")
@click.option("--map", "mappings", multiple=True,
              help="symbol=column observation mapping (repeatable).")
@click.option("--no-write-back", is_flag=True,
              help="Rank only; leave the world table untouched.")
@click.option("--report-dir", type=click.Path(file_okay=False), default=None,
              help="Also write ranking.csv, report.json, and figures here.")
@click.option("--json", "as_json", is_flag=True, help="Print canonical JSON.")
@click.pass_obj
@engine_guard
def condition(project_dir, phi, obs, sigma, at_index, mappings, no_write_back,
              report_dir, as_json):
    """Condition a phenomenon's worlds on observations and rank them."""
    from .conditioning import parse_observations

    mapping = {}
    for pair in mappings:
        if "=" not in pair:
            raise click.UsageError(f"--map needs symbol=column, got {pair!r}")
        symbol, column = pair.split("=", 1)
        mapping[symbol] = column

    text = obs.read()

    def run(project):
        index_column, value_column, value_symbol = project.observation_mapping(
            phi, mapping
        )
        observations = parse_observations(text, index_column, value_column)
        return project.condition(
            phi, observations, sigma, at_index, value_symbol,
            write_back=not no_write_back,
        ) + (observations,)

    if no_write_back:
        project = Project.open(project_dir)
        report, series, value_symbol, used_sigma, observations = run(project)
    else:
        project, (report, series, value_symbol, used_sigma, observations) = _mutate(
            project_dir, run
        )
    if sigma is None:
        click.echo(
            f"warning: sigma {used_sigma:.6g} estimated from the sample "
            "standard deviation of the observations",
            err=True,
        )
    if as_json:
        click.echo(canonical_json(report.to_obj()))
    else:
        click.echo(format_report_table(report), nl=False)
    if report_dir:
        for path in write_report_files(report, observations, series, report_dir):
            click.echo(f"wrote {path}", err=True)


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui", "ui_dir", type=click.Path(exists=True, file_okay=False),
              help="Directory of built web client files, mounted at the root "
                   "path. The API routes keep priority over it.")
@click.pass_obj
@engine_guard
def serve(project_dir, port, host, ui_dir):
    """Serve the HTTP API (and the web client, if built) for one project."""
    import uvicorn

    from .httpapi import create_app

    app = create_app(project_dir, static_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
