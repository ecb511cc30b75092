"""Bayesian conditioning of a phenomenon's worlds on observed data.

A world here is one joint assignment that selects a hypothesis and one
of its trials. Conditioning weighs every world's predicted series
against the observation set under independent normal measurement noise,
then renormalizes. The arithmetic runs in log space; likelihood ratios
across worlds get astronomically small long before double precision
gives out, the log-sum-exp trick keeps the normalization honest.

The write-back half collapses the phenomenon's random variables into a
single joint variable whose alternatives are the surviving worlds, so
that a later conditioning round reads its priors straight from the
world table again.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .errors import (
    BadInput,
    EmptyObservationSet,
    MissingPrediction,
    NonPositiveSigma,
)
from .uncertain import JOINT, RandomVar, URelation, UTuple, var_sort_key

LOG_SQRT_TWO_PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class World:
    """One surviving joint assignment: hypothesis choice plus trial."""

    phenomenon: int
    upsilon: int
    tid: int
    condition: tuple  # ((var, value), ...) sorted by variable id

    def to_obj(self) -> dict:
        return {
            "phenomenon": self.phenomenon,
            "upsilon": self.upsilon,
            "tid": self.tid,
            "condition": [[var, value] for var, value in self.condition],
        }

    @classmethod
    def from_obj(cls, obj) -> "World":
        return cls(
            obj["phenomenon"],
            obj["upsilon"],
            obj["tid"],
            tuple((var, value) for var, value in obj["condition"]),
        )


@dataclass
class ObservationSet:
    index_name: str
    value_name: str
    points: list  # (index value, observed value) pairs


def parse_observations(text: str, index_column=None, value_column=None) -> ObservationSet:
    """Read an observation CSV: one index column, one value column.

    By default the first column is the index and the second the value;
    either can be overridden by header name.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header or len(header) < 2:
        raise BadInput("observation file needs a header with at least two columns")

    def pick(wanted, default):
        if wanted is None:
            return default
        if wanted not in header:
            raise BadInput(f"observation file has no column {wanted!r}")
        return header.index(wanted)

    index_at = pick(index_column, 0)
    value_at = pick(value_column, 1)
    if index_at == value_at:
        raise BadInput("index and value must be different columns")

    points = []
    for row in reader:
        if not row:
            continue
        try:
            points.append((float(row[index_at]), float(row[value_at])))
        except (ValueError, IndexError):
            raise BadInput(f"bad observation row: {','.join(row)}") from None
    if not points:
        raise EmptyObservationSet("observation file has no data rows")
    indices = [index_value for index_value, _ in points]
    if len(set(indices)) != len(indices):
        raise BadInput("observation index values must be distinct")
    return ObservationSet(header[index_at], header[value_at], points)


def logsumexp(values) -> float:
    peak = max(values)
    if peak == -math.inf:
        return -math.inf
    return peak + math.log(sum(math.exp(v - peak) for v in values))


def log_normal_density(y: float, mu: float, sigma: float) -> float:
    """Log of the normal density at y with mean mu and deviation sigma."""
    if sigma <= 0:
        raise NonPositiveSigma(f"sigma must be positive, got {sigma!r}")
    residual = (y - mu) / sigma
    return -0.5 * residual * residual - math.log(sigma) - LOG_SQRT_TWO_PI


def normal_density(y: float, mu: float, sigma: float) -> float:
    return math.exp(log_normal_density(y, mu, sigma))


def log_likelihood(series: dict, observations: ObservationSet, sigma: float,
                   label="world") -> float:
    """Log density of the observations given one world's predictions.

    Measurement errors are independent normals centered on the
    predicted value. Predictions must exist at exactly the observed
    index points; nothing is interpolated.
    """
    if sigma <= 0:
        raise NonPositiveSigma(f"sigma must be positive, got {sigma!r}")
    if not observations.points:
        raise EmptyObservationSet("cannot condition on zero observations")
    total = 0.0
    for index_value, observed in observations.points:
        if index_value not in series:
            raise MissingPrediction(
                f"no prediction at {observations.index_name}={index_value:g} for {label}"
            )
        total += log_normal_density(observed, series[index_value], sigma)
    return total


def posterior_weights(priors, log_likelihoods) -> list:
    """Renormalized posterior mass per world."""
    logs = []
    for prior, loglik in zip(priors, log_likelihoods):
        logs.append(math.log(prior) + loglik if prior > 0 else -math.inf)
    normalizer = logsumexp(logs)
    if normalizer == -math.inf:
        raise BadInput("every world has zero posterior probability")
    return [math.exp(v - normalizer) for v in logs]


def default_sigma(observations: ObservationSet) -> float:
    """Sample standard deviation of the observed values.

    A convenience heuristic for when no noise scale is given, nothing
    more; it is usually generous, which keeps the conditioning mild.
    """
    values = [observed for _, observed in observations.points]
    if len(values) < 2:
        raise NonPositiveSigma(
            "cannot estimate a noise scale from fewer than two observations;"
            " supply sigma explicitly"
        )
    mean = sum(values) / len(values)
    variance = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
    sigma = math.sqrt(variance)
    if sigma <= 0:
        raise NonPositiveSigma(
            "observed values are all equal; supply sigma explicitly"
        )
    return sigma


@dataclass
class ReportRow:
    phenomenon: int
    upsilon: int
    tid: int
    index_value: float
    predicted: float
    prior: float
    posterior: float

    def to_obj(self) -> dict:
        return {
            "phi": self.phenomenon,
            "upsilon": self.upsilon,
            "tid": self.tid,
            "index": self.index_value,
            "predicted": self.predicted,
            "prior": self.prior,
            "posterior": self.posterior,
        }


@dataclass
class PosteriorReport:
    phenomenon: int
    index_name: str
    value_name: str
    at_index: float
    sigma: float
    rows: list = field(default_factory=list)
    aggregates: list = field(default_factory=list)  # (upsilon, posterior mass)

    def to_obj(self) -> dict:
        return {
            "phenomenon": self.phenomenon,
            "names": {"index": self.index_name, "value": self.value_name},
            "at": self.at_index,
            "sigma": self.sigma,
            "rows": [row.to_obj() for row in self.rows],
            "aggregates": [
                {"upsilon": upsilon, "posterior": mass}
                for upsilon, mass in self.aggregates
            ],
        }


def condition_worlds(worlds, priors, series_by_world,
                     observations: ObservationSet, sigma: float) -> list:
    """Posterior probability per world, aligned with the input order."""
    if not worlds:
        raise BadInput("there are no worlds to condition")
    log_likelihoods = []
    for world in worlds:
        series = series_by_world[(world.upsilon, world.tid)]
        log_likelihoods.append(
            log_likelihood(series, observations, sigma,
                           label=f"world ({world.upsilon}, {world.tid})")
        )
    return posterior_weights(priors, log_likelihoods)


def compute_report(worlds, priors, series_by_world, observations: ObservationSet,
                   sigma: float, at_index: float,
                   posteriors=None) -> PosteriorReport:
    """Condition the worlds on the observations and tabulate the result.

    ``series_by_world`` maps (hypothesis, trial) to the predicted
    series as an index -> value dict. Posteriors always use the full
    observation sample; ``at_index`` only selects which prediction each
    row displays. Worlds with no prediction at that index contribute
    their posterior mass to the aggregates but get no row. Rows are
    ranked by posterior, best first.
    """
    if posteriors is None:
        posteriors = condition_worlds(worlds, priors, series_by_world,
                                      observations, sigma)

    report = PosteriorReport(
        worlds[0].phenomenon, observations.index_name, observations.value_name,
        at_index, sigma,
    )
    masses = {}
    for world, prior, posterior in zip(worlds, priors, posteriors):
        masses[world.upsilon] = masses.get(world.upsilon, 0.0) + posterior
        series = series_by_world[(world.upsilon, world.tid)]
        if at_index not in series:
            continue
        report.rows.append(
            ReportRow(world.phenomenon, world.upsilon, world.tid,
                      at_index, series[at_index], prior, posterior)
        )
    report.rows.sort(key=lambda row: (-row.posterior, row.upsilon, row.tid))
    report.aggregates = sorted(masses.items())
    return report


def joint_variable(var_id: str, phenomenon: int, worlds, retired) -> RandomVar:
    """The single variable that replaces a phenomenon's variables.

    Its k-th alternative names the k-th world as a (hypothesis, trial)
    pair; the retired variable ids are kept as members for the record.
    """
    return RandomVar(
        var_id,
        JOINT,
        phenomenon,
        members=tuple(sorted(retired, key=var_sort_key)),
        alternatives=[(world.upsilon, world.tid) for world in worlds],
    )


def rewrite_relation(urelation: URelation, retired, worlds, var_id: str) -> URelation:
    """Re-express a U-relation over the collapsed world space.

    Tuples that never mention a retired variable pass through
    untouched. A tuple that does is replaced by one copy per world
    whose assignment extends the retired part of its condition, each
    conditioned on the joint variable alone (plus whatever unretired
    pairs it carried).
    """
    retired = set(retired)
    out = URelation(urelation.name, list(urelation.columns))
    for item in urelation.tuples:
        old = [(v, k) for v, k in item.condition if v in retired]
        kept = [(v, k) for v, k in item.condition if v not in retired]
        if not old:
            out.tuples.append(item)
            continue
        for index, world in enumerate(worlds, start=1):
            assignment = dict(world.condition)
            if all(assignment.get(v) == k for v, k in old):
                condition = tuple(
                    sorted(kept + [(var_id, index)], key=lambda p: var_sort_key(p[0]))
                )
                out.tuples.append(UTuple(condition, item.data))
    return out


def collapsed_worlds(worlds, var_id: str) -> list:
    """The same worlds, re-keyed to the joint variable's alternatives."""
    return [
        World(w.phenomenon, w.upsilon, w.tid, ((var_id, index),))
        for index, w in enumerate(worlds, start=1)
    ]
