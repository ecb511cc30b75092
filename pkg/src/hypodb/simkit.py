"""Trial generation by fixed-step numerical integration.

Three growth models are compiled in: unbounded exponential growth,
logistic growth toward a carrying capacity, and a two-species
predator-prey system. Each is integrated with the classic fourth-order
Runge-Kutta scheme at a fixed internal step. Fixed step over adaptive
on purpose: identical inputs give bit-identical series, which keeps
fixture data stable, and the instances are far too small for adaptive
stepping to pay for itself.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .errors import BadInput, NonFiniteState

STEP_SPLIT = 1000  # internal steps per output step when h is not given
_ALIGN = 1e-9


@dataclass(frozen=True)
class TimeGrid:
    """Output sampling grid plus the internal integration step."""

    start: float
    end: float
    step: float
    h: float | None = None

    def __post_init__(self):
        if self.end <= self.start:
            raise BadInput(f"grid end {self.end!r} must exceed start {self.start!r}")
        if self.step <= 0:
            raise BadInput(f"grid step must be positive, got {self.step!r}")
        span = (self.end - self.start) / self.step
        if abs(span - round(span)) > _ALIGN:
            raise BadInput("grid step must divide the interval into whole steps")
        if self.h is not None:
            if self.h <= 0:
                raise BadInput(f"internal step must be positive, got {self.h!r}")
            split = self.step / self.h
            if abs(split - round(split)) > _ALIGN or round(split) < 1:
                raise BadInput("internal step must divide the output step")

    def times(self) -> list:
        count = round((self.end - self.start) / self.step)
        return [self.start + k * self.step for k in range(count + 1)]

    def substeps(self) -> int:
        if self.h is None:
            return STEP_SPLIT
        return round(self.step / self.h)


@dataclass(frozen=True)
class ModelKind:
    name: str
    parameters: tuple  # declaration order, initial values first
    outputs: tuple
    initials: tuple  # parameter holding each output's starting value
    derivative: object = field(compare=False)

    def initial_state(self, params) -> tuple:
        return tuple(params[p] for p in self.initials)


def _malthus(state, p):
    (x,) = state
    return (p["b"] * x,)


def _logistic(state, p):
    (x,) = state
    return (p["b"] * (1.0 - x / p["K"]) * x,)


def _lotka_volterra(state, p):
    x, y = state
    return (x * (p["b"] - p["p"] * y), y * (p["r"] * x - p["d"]))


MODELS = {
    kind.name: kind
    for kind in (
        ModelKind("malthus", ("x0", "b"), ("x",), ("x0",), _malthus),
        ModelKind("logistic", ("x0", "K", "b"), ("x",), ("x0",), _logistic),
        ModelKind(
            "lotka_volterra",
            ("x0", "b", "p", "y0", "d", "r"),
            ("x", "y"),
            ("x0", "y0"),
            _lotka_volterra,
        ),
    )
}


@dataclass(frozen=True)
class OdeModel:
    kind: str
    parameters: dict
    grid: TimeGrid

    def __post_init__(self):
        if self.kind not in MODELS:
            raise BadInput(
                f"unknown model kind {self.kind!r};"
                f" expected one of {sorted(MODELS)}"
            )
        expected = set(MODELS[self.kind].parameters)
        given = set(self.parameters)
        if given != expected:
            missing = sorted(expected - given)
            extra = sorted(given - expected)
            raise BadInput(
                f"{self.kind} parameters mismatch;"
                f" missing {missing}, unexpected {extra}"
            )


def parse_model_obj(obj) -> OdeModel:
    """Build a model from its JSON object form.

    Accepts either the bare model or a wrapper carrying one under a
    ``model`` key, so manifest entries double as model files.
    """
    if not isinstance(obj, dict):
        raise BadInput("model JSON must be an object")
    if "model" in obj:
        obj = obj["model"]
    try:
        grid_obj = obj["timeGrid"]
        grid = TimeGrid(
            float(grid_obj["start"]),
            float(grid_obj["end"]),
            float(grid_obj["step"]),
            float(grid_obj["h"]) if "h" in grid_obj else None,
        )
        kind = obj["kind"]
        parameters = {k: float(v) for k, v in obj["parameters"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise BadInput(f"malformed model JSON: {exc}") from None
    return OdeModel(kind, parameters, grid)


def parse_model_json(text: str) -> OdeModel:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadInput(f"model file is not valid JSON: {exc}") from None
    return parse_model_obj(obj)


def _rk4_step(derivative, state, params, h):
    k1 = derivative(state, params)
    k2 = derivative(tuple(s + 0.5 * h * k for s, k in zip(state, k1)), params)
    k3 = derivative(tuple(s + 0.5 * h * k for s, k in zip(state, k2)), params)
    k4 = derivative(tuple(s + h * k for s, k in zip(state, k3)), params)
    return tuple(
        s + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
        for s, a, b, c, d in zip(state, k1, k2, k3, k4)
    )


def simulate(model: OdeModel) -> list:
    """Integrate and sample at the output grid.

    Returns the series as (index value, {output symbol: value}) pairs,
    the shape trial loading expects.
    """
    kind = MODELS[model.kind]
    state = kind.initial_state(model.parameters)
    substeps = model.grid.substeps()
    h = model.grid.step / substeps

    series = [(model.grid.times()[0], dict(zip(kind.outputs, state)))]
    for t in model.grid.times()[1:]:
        for _ in range(substeps):
            state = _rk4_step(kind.derivative, state, model.parameters, h)
        if not all(math.isfinite(s) for s in state):
            raise NonFiniteState(
                f"{model.kind} integration left the finite range near t={t:g}"
            )
        series.append((t, dict(zip(kind.outputs, state))))
    return series


def trial_csv(model: OdeModel, series=None) -> str:
    """Render one simulated trial in the loadable CSV layout."""
    kind = MODELS[model.kind]
    if series is None:
        series = simulate(model)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([f"param:{p}" for p in kind.parameters])
    writer.writerow([repr(model.parameters[p]) for p in kind.parameters])
    writer.writerow(["t", *kind.outputs])
    for index_value, outputs in series:
        writer.writerow(
            [repr(float(index_value))] + [repr(outputs[o]) for o in kind.outputs]
        )
    return out.getvalue()


@dataclass(frozen=True)
class ManifestEntry:
    phenomenon: int
    hypothesis: int
    model: OdeModel


def parse_manifest_json(text: str) -> list:
    """Read a trial manifest: a list of targeted model entries."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadInput(f"manifest is not valid JSON: {exc}") from None
    if not isinstance(obj, dict) or not isinstance(obj.get("trials"), list):
        raise BadInput("manifest JSON must hold a trials list")
    entries = []
    for item in obj["trials"]:
        try:
            phenomenon = int(item["phi"])
            hypothesis = int(item["upsilon"])
        except (KeyError, TypeError, ValueError):
            raise BadInput("every manifest trial needs phi and upsilon") from None
        entries.append(ManifestEntry(phenomenon, hypothesis, parse_model_obj(item)))
    return entries
