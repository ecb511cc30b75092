"""Shared builders for project-level tests."""

from pathlib import Path

import hypodb
from hypodb.simkit import OdeModel, TimeGrid, parse_manifest_json, trial_csv

FIXTURES = Path(hypodb.__file__).parent / "fixtures"


def fixture_bytes(name: str) -> bytes:
    return (FIXTURES / name).read_bytes()


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


def seed_catalog(project):
    """Register both phenomena and all three hypotheses."""
    project.add_phenomenon(fixture_bytes("phenomenon_1.xml"))
    project.add_phenomenon(fixture_bytes("phenomenon_2.json"))
    project.add_hypothesis(fixture_bytes("malthus.xml"), [1, 2])
    project.add_hypothesis(fixture_bytes("logistic.xml"), [1, 2])
    project.add_hypothesis(fixture_bytes("lotka_volterra.xml"), [2])


def manifest_entries():
    return parse_manifest_json(fixture_text("trials.json"))


def load_trials(project, upsilons=(1, 2, 3), h=0.05):
    """Simulate and load the manifest trials for the chosen hypotheses.

    The coarse default substep keeps unit tests quick; value-sensitive
    tests pass a finer one.
    """
    for entry in manifest_entries():
        if entry.hypothesis not in upsilons:
            continue
        grid = entry.model.grid
        model = OdeModel(
            entry.model.kind,
            entry.model.parameters,
            TimeGrid(grid.start, grid.end, grid.step, h),
        )
        project.load_trial_csv(entry.phenomenon, entry.hypothesis,
                               trial_csv(model))


def random_fd_set(rng):
    """A dependency set over a small pool, arbitrary but well formed."""
    from hypodb.causal import FdSet, fd

    pool = [f"a{i}" for i in range(rng.randint(2, 7))] + ["phi", "upsilon"]
    fds = []
    for _ in range(rng.randint(1, 9)):
        dependent = rng.choice(pool)
        others = [s for s in pool if s != dependent]
        determinant = rng.sample(others, rng.randint(1, min(4, len(others))))
        fds.append(fd(determinant, dependent))
    return FdSet(fds, set(pool))


def random_valid_structure(rng, hid=9):
    """A structure admitting a total causal mapping, by construction.

    One index equation, one arity-1 equation per parameter, and one
    output equation apiece that mentions its variable, the index, and a
    random mix of parameters and other outputs.
    """
    from hypodb.ingest import Equation, Structure, VariableDecl

    params = [f"p{i}" for i in range(rng.randint(0, 4))]
    outputs = [f"o{i}" for i in range(rng.randint(1, 3))]
    declarations = [VariableDecl("t", "index")]
    declarations += [VariableDecl(p, "parameter") for p in params]
    declarations += [VariableDecl(o, "output") for o in outputs]

    equations = [Equation("f0", frozenset({"t"}))]
    for i, p in enumerate(params, start=1):
        equations.append(Equation(f"f{i}", frozenset({p})))
    offset = len(equations)
    for j, o in enumerate(outputs):
        mentioned = {o, "t"}
        mentioned |= set(rng.sample(params, rng.randint(0, len(params))))
        others = [x for x in outputs if x != o]
        mentioned |= set(rng.sample(others, rng.randint(0, len(others))))
        equations.append(Equation(f"f{offset + j}", frozenset(mentioned)))
    return Structure(hid, "generated", equations, declarations)
