import json
import os

import pytest
from click.testing import CliRunner

from hypodb.cli import main
from hypodb.project import Project
from hypodb.report import canonical_json

import helpers


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, root, *args, **kwargs):
    return runner.invoke(main, ["--project", root, *args], **kwargs)


def write_model(tmp_path, entry, name="model.json"):
    path = str(tmp_path / name)
    with open(path, "w") as stream:
        json.dump({
            "kind": entry.model.kind,
            "parameters": entry.model.parameters,
            "timeGrid": {"start": 1900, "end": 1920, "step": 1, "h": 0.1},
        }, stream)
    return path


def lynx_path():
    return str(helpers.FIXTURES / "lynx_observations.csv")


def seed_via_cli(runner, root, tmp_path, introduce=True):
    """Drive the whole flow through the CLI itself."""
    assert invoke(runner, root, "init").exit_code == 0
    for name in ("phenomenon_1.xml", "phenomenon_2.json"):
        result = invoke(runner, root, "add-phenomenon",
                        str(helpers.FIXTURES / name))
        assert result.exit_code == 0
    for name, phis in (("malthus.xml", ["1", "2"]),
                       ("logistic.xml", ["1", "2"]),
                       ("lotka_volterra.xml", ["2"])):
        args = ["add-hypothesis", str(helpers.FIXTURES / name), "--json"]
        for phi in phis:
            args += ["--phi", phi]
        assert invoke(runner, root, *args).exit_code == 0
    for i, entry in enumerate(helpers.manifest_entries()):
        model = write_model(tmp_path, entry, f"model_{i}.json")
        trial = str(tmp_path / f"trial_{i}.csv")
        assert runner.invoke(main, ["sim", model, "--out", trial]).exit_code == 0
        result = invoke(runner, root, "load-trial", trial,
                        "--phi", str(entry.phenomenon),
                        "--upsilon", str(entry.hypothesis), "--json")
        assert result.exit_code == 0
    if introduce:
        result = invoke(runner, root, "u-intro", "--phi", "2")
        assert result.exit_code == 0
        return result
    return None


def test_init_refuses_to_clobber(runner, tmp_path):
    root = str(tmp_path / "study")
    first = invoke(runner, root, "init")
    assert first.exit_code == 0
    assert first.output == f"initialized {root}\n"
    second = invoke(runner, root, "init")
    assert second.exit_code == 1
    assert second.stderr.startswith("error: ProjectExists:")


def test_add_phenomenon_formats(runner, tmp_path):
    root = str(tmp_path / "study")
    invoke(runner, root, "init")
    plain = invoke(runner, root, "add-phenomenon",
                   str(helpers.FIXTURES / "phenomenon_1.xml"))
    assert plain.output == \
        "phenomenon 1: US population from 1790 to 1990\n"
    as_json = invoke(runner, root, "add-phenomenon",
                     str(helpers.FIXTURES / "phenomenon_2.json"), "--json")
    expected = canonical_json({
        "id": 2,
        "description": "Lynx population in Hudson's Bay, Canada, "
                       "from 1900 to 1920",
    })
    assert as_json.output == expected + "\n"


def test_add_hypothesis_prints_the_pipeline_stages(runner, tmp_path):
    root = str(tmp_path / "study")
    invoke(runner, root, "init")
    invoke(runner, root, "add-phenomenon",
           str(helpers.FIXTURES / "phenomenon_1.xml"))
    result = invoke(runner, root, "add-hypothesis",
                    str(helpers.FIXTURES / "malthus.xml"), "--phi", "1")
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0] == "hypothesis 1 (malthus)"
    assert "sigma:" in lines and "folded:" in lines and "schema:" in lines
    assert any(line.endswith("-> x") for line in lines)
    assert "  H_1^1(tid, phi, x0, b) keys: (tid, phi)" in lines
    assert "  H_1^2(tid, phi, upsilon, t, x) keys: (tid, phi, upsilon, t)" \
        in lines
    assert result.stderr == ""


def test_ambiguous_ordering_warns_on_stderr(runner, tmp_path):
    root = str(tmp_path / "study")
    invoke(runner, root, "init")
    invoke(runner, root, "add-phenomenon",
           str(helpers.FIXTURES / "phenomenon_2.json"))
    result = invoke(runner, root, "add-hypothesis",
                    str(helpers.FIXTURES / "lotka_volterra.xml"), "--phi", "2")
    assert result.exit_code == 0
    assert "warning: AmbiguousOrdering" in result.stderr


def test_sim_writes_the_same_csv_to_stdout_and_file(runner, tmp_path):
    entry = helpers.manifest_entries()[0]
    model = write_model(tmp_path, entry)
    to_stdout = runner.invoke(main, ["sim", model])
    assert to_stdout.exit_code == 0
    out = str(tmp_path / "trial.csv")
    to_file = runner.invoke(main, ["sim", model, "--out", out])
    assert to_file.exit_code == 0
    assert to_file.output == ""
    assert open(out).read() == to_stdout.output
    assert to_stdout.output.startswith("param:x0,param:b\n")


def test_sim_reports_bad_model_files(runner, tmp_path):
    path = str(tmp_path / "nonsense.json")
    with open(path, "w") as stream:
        stream.write("{]")
    result = runner.invoke(main, ["sim", path])
    assert result.exit_code == 1
    assert result.stderr.startswith("error: BadInput:")


def test_load_trial_formats(runner, tmp_path):
    root = str(tmp_path / "study")
    seed_via_cli(runner, root, tmp_path, introduce=False)
    entry = helpers.manifest_entries()[0]
    model = write_model(tmp_path, entry)
    trial = str(tmp_path / "extra.csv")
    runner.invoke(main, ["sim", model, "--out", trial])
    plain = invoke(runner, root, "load-trial", trial,
                   "--phi", "2", "--upsilon", "1")
    assert plain.output == "tid 3\n"
    as_json = invoke(runner, root, "load-trial", trial,
                     "--phi", "2", "--upsilon", "1", "--json")
    assert as_json.output == \
        canonical_json({"phi": 2, "tid": 4, "upsilon": 1}) + "\n"


def test_u_intro_summarizes_factors(runner, tmp_path):
    root = str(tmp_path / "study")
    result = seed_via_cli(runner, root, tmp_path)
    lines = result.output.splitlines()
    assert lines[0] == "choice variable x0 for phenomenon 1 (2 alternatives)"
    assert lines[1] == "choice variable x1 for phenomenon 2 (3 alternatives)"
    assert lines[4] == (
        "hypothesis 3: clusters {x0,y0} {b,d} {p,r} -> x6, x7, x8; "
        "u-relations Y_3^1, Y_3^2, Y_3^3, Y_3^4, Y_3^5, Y_3^6, Y_3^7"
    )
    assert lines[5] == "worlds: 10"


def test_query_renders_the_world_table(runner, tmp_path):
    root = str(tmp_path / "study")
    seed_via_cli(runner, root, tmp_path)
    result = invoke(runner, root, "query", "W")
    lines = result.output.splitlines()
    assert lines[0].split() == ["var", "val", "prob"]
    assert len(lines) == 18  # header plus 17 marginals
    assert lines[1].split() == ["x0", "1", "0.5"]
    assert lines[3].split() == ["x1", "1", "0.333333"]

    as_json = invoke(runner, root, "query", "W", "--json")
    expected = canonical_json(Project.open(root).world_table_obj())
    assert as_json.output == expected + "\n"


def test_query_renders_certain_relations(runner, tmp_path):
    root = str(tmp_path / "study")
    seed_via_cli(runner, root, tmp_path)
    result = invoke(runner, root, "query", "H_3^1")
    lines = result.output.splitlines()
    assert lines[0].split() == \
        ["tid", "phi", "x0", "b", "p", "y0", "d", "r"]
    assert lines[1].split() == \
        ["1", "2", "30", "0.5", "0.02", "4", "0.75", "0.02"]
    assert len(lines) == 7

    filtered = invoke(runner, root, "query", "H_3^1", "--where", "b=0.4")
    assert len(filtered.output.splitlines()) == 3


def test_query_renders_urelations(runner, tmp_path):
    root = str(tmp_path / "study")
    seed_via_cli(runner, root, tmp_path)
    result = invoke(runner, root, "query", "Y_3^2", "--where", "b=0.4")
    lines = result.output.splitlines()
    assert lines[0].split() == ["V1", "D1", "phi", "b"]
    assert lines[1].split() == ["x7", "2", "2", "0.4"]
    assert len(lines) == 2


def test_query_rejects_unknown_names_and_bad_filters(runner, tmp_path):
    root = str(tmp_path / "study")
    seed_via_cli(runner, root, tmp_path, introduce=False)
    missing = invoke(runner, root, "query", "H_9^9")
    assert missing.exit_code == 1
    assert missing.stderr.startswith("error: UnknownRelation:")
    bad = invoke(runner, root, "query", "H_0", "--where", "nonsense")
    assert bad.exit_code == 2


def test_catalog_lists_everything(runner, tmp_path):
    root = str(tmp_path / "study")
    seed_via_cli(runner, root, tmp_path)
    result = invoke(runner, root, "catalog")
    lines = result.output.splitlines()
    assert lines[0] == "phenomenon 1: US population from 1790 to 1990"
    assert any(line.startswith("hypothesis 3 (lotka_volterra) targets [2]:")
               for line in lines)
    assert "(2, 3): u-introduced" in lines
    assert lines[-1].startswith("u-relations: Y_0, Y_1^1,")


def test_condition_renders_the_ranking_table(runner, tmp_path):
    root = str(tmp_path / "study")
    seed_via_cli(runner, root, tmp_path)
    result = invoke(runner, root, "condition", "--phi", "2",
                    "--obs", lynx_path(), "--sigma", "25", "--at", "1904",
                    "--no-write-back")
    assert result.exit_code == 0
    assert result.stderr == ""
    lines = result.output.splitlines()
    assert lines[0].split() == \
        ["phi", "upsilon", "tid", "Year", "Lynx", "Prior", "Posterior"]
    assert len(lines) == 14  # header, ten worlds, three aggregates
    assert lines[1].split()[:3] == ["2", "3", "4"]
    assert lines[11] == f"Pr(upsilon=1) = {0:.3f}"
    assert lines[13].startswith("Pr(upsilon=3) = ")


def test_condition_json_matches_the_report_object(runner, tmp_path):
    root = str(tmp_path / "study")
    seed_via_cli(runner, root, tmp_path)
    result = invoke(runner, root, "condition", "--phi", "2",
                    "--obs", lynx_path(), "--sigma", "25",
                    "--no-write-back", "--json")
    obj = json.loads(result.output)
    assert obj["names"] == {"index": "Year", "value": "Lynx"}
    assert obj["at"] == 1920.0
    assert obj["sigma"] == 25.0
    assert len(obj["rows"]) == 10
    assert result.output == canonical_json(obj) + "\n"


def test_condition_without_sigma_labels_the_heuristic(runner, tmp_path):
    root = str(tmp_path / "study")
    seed_via_cli(runner, root, tmp_path)
    result = invoke(runner, root, "condition", "--phi", "2",
                    "--obs", lynx_path(), "--no-write-back")
    assert result.exit_code == 0
    assert result.stderr.startswith("warning: sigma ")
    assert "estimated from the sample standard deviation" in result.stderr


def test_condition_write_back_replaces_the_factors(runner, tmp_path):
    root = str(tmp_path / "study")
    seed_via_cli(runner, root, tmp_path)
    result = invoke(runner, root, "condition", "--phi", "2",
                    "--obs", lynx_path(), "--sigma", "25")
    assert result.exit_code == 0
    table = invoke(runner, root, "query", "W").output
    variables = {line.split()[0] for line in table.splitlines()[1:]}
    assert variables == {"w2", "x0"}
    archive = os.listdir(os.path.join(root, "world", "archive"))
    assert archive == ["W.1.csv"]


def test_condition_maps_swapped_observation_columns(runner, tmp_path):
    root = str(tmp_path / "study")
    seed_via_cli(runner, root, tmp_path)
    swapped = str(tmp_path / "swapped.csv")
    rows = [line.split(",") for line in
            open(lynx_path()).read().strip().splitlines()]
    with open(swapped, "w") as stream:
        for year, lynx in rows:
            stream.write(f"{lynx},{year}\n")
    straight = invoke(runner, root, "condition", "--phi", "2",
                      "--obs", lynx_path(), "--sigma", "25",
                      "--no-write-back")
    mapped = invoke(runner, root, "condition", "--phi", "2",
                    "--obs", swapped, "--sigma", "25",
                    "--map", "t=Year", "--map", "x=Lynx",
                    "--no-write-back")
    assert mapped.exit_code == 0
    assert mapped.output == straight.output
    bad_map = invoke(runner, root, "condition", "--phi", "2",
                     "--obs", swapped, "--sigma", "25", "--map", "nonsense")
    assert bad_map.exit_code == 2


def test_condition_report_dir_materializes_files(runner, tmp_path):
    root = str(tmp_path / "study")
    seed_via_cli(runner, root, tmp_path)
    out_dir = str(tmp_path / "report")
    result = invoke(runner, root, "condition", "--phi", "2",
                    "--obs", lynx_path(), "--sigma", "25",
                    "--no-write-back", "--report-dir", out_dir)
    assert result.exit_code == 0
    assert sorted(os.listdir(out_dir)) == \
        ["posterior.png", "predictions.png", "ranking.csv", "report.json"]
    assert result.stderr.count("wrote ") == 4
    ranking = open(os.path.join(out_dir, "ranking.csv")).read()
    assert ranking.splitlines()[0] == \
        "phi,upsilon,tid,Year,Lynx,prior,posterior"


def test_domain_errors_share_one_line_format(runner, tmp_path):
    root = str(tmp_path / "study")
    seed_via_cli(runner, root, tmp_path, introduce=False)
    result = invoke(runner, root, "condition", "--phi", "2",
                    "--obs", lynx_path(), "--sigma", "25")
    assert result.exit_code == 1
    assert result.stderr == (
        "error: NotUIntroduced: phenomenon 2 has no uncertainty "
        "introduced yet\n"
    )
    gone = invoke(runner, str(tmp_path / "void"), "catalog")
    assert gone.exit_code == 1
    assert gone.stderr.startswith("error: ProjectNotFound:")


def test_project_directory_comes_from_the_environment(runner, tmp_path):
    root = str(tmp_path / "study")
    invoke(runner, root, "init")
    result = runner.invoke(main, ["catalog"],
                           env={"UPSILON_PROJECT": root})
    assert result.exit_code == 0
