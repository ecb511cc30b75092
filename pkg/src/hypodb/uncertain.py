"""U-relations, the world table, and uncertainty introduction.

Certain relations become uncertain through two moves. repair-key takes
a relation whose key is violated and turns each key group into one
discrete random variable whose alternatives are the group's rows,
yielding a U-relation of tuples tagged with (variable, value) condition
pairs and a world table of marginal probabilities. u-factorization
discovers the actual uncertainty factors hiding in a parameter relation
by clustering attributes whose values map one-to-one onto each other
across trials; each cluster is one random variable. u-propagation then
stamps every output tuple with the full assignment that identifies its
world, at which point the provisional tid can be dropped.

Probabilities here are exact: a world's probability is the product of
the marginals of its assignments (variables are independent by
construction), and tuple confidence enumerates the joint assignments of
the variables a tuple's conditions mention.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from itertools import product

from .causal import PHI
from .errors import (
    BadInput,
    NonPositiveWeight,
    NoTrials,
    UnfactorizedTrial,
    UnknownAssignment,
)

THEORETICAL = "theoretical"
EMPIRICAL = "empirical"
JOINT = "joint"


def var_sort_key(var_id: str):
    """Order variable ids by numeric suffix (x2 before x10)."""
    head = var_id.rstrip("0123456789")
    tail = var_id[len(head):]
    return (head, int(tail) if tail else -1)


@dataclass
class RandomVar:
    """One uncertainty factor realized as a discrete variable.

    ``alternatives`` holds one payload per value index (1-based by
    position): the key value of a repaired group, a tuple of cluster
    attribute values, or a (hypothesis, tid) pair for a joint
    posterior variable.
    """

    var_id: str
    kind: str
    phenomenon: int
    hypothesis: int | None = None
    members: tuple = ()
    alternatives: list = field(default_factory=list)

    def to_obj(self) -> dict:
        return {
            "id": self.var_id,
            "kind": self.kind,
            "phenomenon": self.phenomenon,
            "hypothesis": self.hypothesis,
            "members": list(self.members),
            "alternatives": [list(alt) if isinstance(alt, tuple) else alt
                             for alt in self.alternatives],
        }

    @classmethod
    def from_obj(cls, obj) -> "RandomVar":
        return cls(
            obj["id"],
            obj["kind"],
            obj["phenomenon"],
            obj.get("hypothesis"),
            tuple(obj.get("members", ())),
            [tuple(alt) if isinstance(alt, list) else alt
             for alt in obj.get("alternatives", [])],
        )


class WorldTable:
    """Marginal probabilities for every (variable, value) pair."""

    def __init__(self):
        self.entries = {}  # (var_id, value index) -> probability

    def set_marginals(self, var_id: str, probabilities):
        for index, probability in enumerate(probabilities, start=1):
            self.entries[(var_id, index)] = float(probability)

    def remove_variable(self, var_id: str):
        self.entries = {k: v for k, v in self.entries.items() if k[0] != var_id}

    def probability(self, var_id: str, value: int) -> float:
        try:
            return self.entries[(var_id, value)]
        except KeyError:
            raise UnknownAssignment(f"{var_id} -> {value} is not in the world table") from None

    def variables(self) -> list:
        return sorted({var_id for var_id, _ in self.entries}, key=var_sort_key)

    def values_of(self, var_id: str) -> list:
        values = sorted(v for var, v in self.entries if var == var_id)
        if not values:
            raise UnknownAssignment(f"{var_id} is not in the world table")
        return values

    def normalization_errors(self, tolerance: float = 1e-9) -> list:
        out = []
        for var_id in self.variables():
            total = sum(self.entries[(var_id, v)] for v in self.values_of(var_id))
            if abs(total - 1.0) > tolerance:
                out.append(f"{var_id} marginals sum to {total!r}")
        return out

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["var", "val", "prob"])
        for var_id, value in sorted(self.entries, key=lambda k: (var_sort_key(k[0]), k[1])):
            writer.writerow([var_id, value, repr(self.entries[(var_id, value)])])
        return out.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "WorldTable":
        table = cls()
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header != ["var", "val", "prob"]:
            raise BadInput("world table file must start with var,val,prob")
        for line in reader:
            if not line:
                continue
            var_id, value, probability = line
            table.entries[(var_id, int(value))] = float(probability)
        return table


@dataclass(frozen=True)
class UTuple:
    """One uncertain tuple: a condition plus its data columns.

    The condition is a tuple of (variable, value) pairs sorted by
    variable id; the tuple exists exactly in the worlds satisfying all
    of them.
    """

    condition: tuple
    data: tuple  # values aligned with the owning relation's columns

    def assignment(self) -> dict:
        return dict(self.condition)


@dataclass
class URelation:
    name: str
    columns: list
    tuples: list = field(default_factory=list)

    def data_row(self, item: UTuple) -> dict:
        return dict(zip(self.columns, item.data))

    def select(self, predicate: dict | None = None) -> list:
        predicate = predicate or {}
        from .errors import UnknownAttribute

        for attr in predicate:
            if attr not in self.columns:
                raise UnknownAttribute(f"{self.name} has no attribute {attr!r}")
        picked = [
            item
            for item in self.tuples
            if all(self.data_row(item)[a] == v for a, v in predicate.items())
        ]
        picked.sort(key=lambda item: (item.condition, item.data))
        return picked

    def to_csv(self) -> str:
        arity = max((len(t.condition) for t in self.tuples), default=0)
        header = []
        for i in range(1, arity + 1):
            header += [f"V{i}", f"D{i}"]
        header += list(self.columns)
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        from .relstore import _format_value

        for item in sorted(self.tuples, key=lambda t: (t.condition, t.data)):
            cells = []
            for var_id, value in item.condition:
                cells += [var_id, str(value)]
            cells += [""] * (2 * (arity - len(item.condition)))
            cells += [_format_value(a, v) for a, v in zip(self.columns, item.data)]
            writer.writerow(cells)
        return out.getvalue()

    @classmethod
    def from_csv(cls, name: str, text: str) -> "URelation":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None:
            raise BadInput(f"file for U-relation {name} is empty")
        arity = 0
        while 2 * arity < len(header) and header[2 * arity] == f"V{arity + 1}":
            arity += 1
        columns = header[2 * arity:]
        from .relstore import _parse_value

        relation = cls(name, columns)
        for line in reader:
            if not line:
                continue
            condition = []
            for i in range(arity):
                var_id, value = line[2 * i], line[2 * i + 1]
                if var_id:
                    condition.append((var_id, int(value)))
            data = tuple(
                _parse_value(a, cell) for a, cell in zip(columns, line[2 * arity:])
            )
            relation.tuples.append(UTuple(tuple(condition), data))
        return relation


def repair_key(name, relation, key, allocate_var, weight_attr=None):
    """Repair a violated key by lifting its groups into random variables.

    Each distinct key value gets a fresh variable with one alternative
    per row sharing it; marginals are the normalized weights (uniform
    without a weight attribute). Returns the resulting U-relation, the
    new variables and their marginal lists, aligned by position.
    """
    key = frozenset(key)
    columns = [a for a in relation.attributes if a != weight_attr]
    key_order = [a for a in relation.attributes if a in key]
    groups = {}
    for row in relation.select():
        groups.setdefault(tuple(row[a] for a in key_order), []).append(row)

    urelation = URelation(name, columns)
    variables, marginals = [], []
    for key_value in sorted(groups):
        rows = groups[key_value]
        weights = []
        for row in rows:
            weight = 1.0 if weight_attr is None else float(row[weight_attr])
            if weight <= 0:
                raise NonPositiveWeight(
                    f"weight {weight!r} in {relation.name} group {key_value}"
                )
            weights.append(weight)
        total = sum(weights)
        var_id = allocate_var()
        payloads = [tuple(row[a] for a in columns) for row in rows]
        variables.append(
            RandomVar(
                var_id,
                THEORETICAL,
                phenomenon=key_value[0] if key_order[:1] == [PHI] else -1,
                alternatives=payloads,
            )
        )
        marginals.append([w / total for w in weights])
        for index, row in enumerate(rows, start=1):
            urelation.tuples.append(
                UTuple(((var_id, index),), tuple(row[a] for a in columns))
            )
    return urelation, variables, marginals


def _bijective(left, right) -> bool:
    """Whether two equal-length value columns map one-to-one both ways."""
    forward, backward = {}, {}
    for a, b in zip(left, right):
        if forward.setdefault(a, b) != b or backward.setdefault(b, a) != a:
            return False
    return True


def u_factorize(parameter_rows, parameter_attrs, phenomenon, hypothesis,
                allocate_var, name_of):
    """Discover empirical uncertainty factors in a parameter relation.

    Attributes whose value columns are bijectively mapped across trials
    co-vary and form one cluster; all constant attributes form a single
    cluster of their own. Each cluster becomes one variable whose
    alternatives are its distinct value tuples in trial order, with
    uniform marginals. One single-attribute U-relation is emitted per
    parameter attribute (co-varying attributes stay recognizable
    through their shared variable), plus the assignment each trial's
    parameter values induce.

    ``name_of`` maps the ordinal of a parameter attribute to the name
    of its U-relation.
    """
    if not parameter_rows:
        raise NoTrials(
            f"no trials loaded for phenomenon {phenomenon}, hypothesis {hypothesis}"
        )
    rows = sorted(parameter_rows, key=lambda r: r["tid"])
    columns = {a: [row[a] for row in rows] for a in parameter_attrs}

    constants = [a for a in parameter_attrs if len(set(columns[a])) == 1]
    clusters = []
    if constants:
        clusters.append(tuple(constants))
    varying = [a for a in parameter_attrs if a not in constants]
    assigned = set()
    for attr in varying:
        if attr in assigned:
            continue
        members = [attr]
        assigned.add(attr)
        for other in varying:
            if other in assigned:
                continue
            if _bijective(columns[attr], columns[other]):
                members.append(other)
                assigned.add(other)
        clusters.append(tuple(members))
    clusters.sort(key=lambda c: parameter_attrs.index(c[0]))

    variables, marginals = [], []
    cluster_values = []  # per cluster: distinct value tuples, trial order
    for members in clusters:
        values = []
        for row in rows:
            value = tuple(row[a] for a in members)
            if value not in values:
                values.append(value)
        var_id = allocate_var()
        variables.append(
            RandomVar(var_id, EMPIRICAL, phenomenon, hypothesis,
                      members, values)
        )
        marginals.append([1.0 / len(values)] * len(values))
        cluster_values.append(values)

    by_attr = {}
    for cluster_index, members in enumerate(clusters):
        for attr in members:
            by_attr[attr] = (cluster_index, members.index(attr))

    urelations = []
    for ordinal, attr in enumerate(parameter_attrs, start=1):
        cluster_index, position = by_attr[attr]
        relation = URelation(name_of(ordinal), [PHI, attr])
        var_id = variables[cluster_index].var_id
        for index, value in enumerate(cluster_values[cluster_index], start=1):
            relation.tuples.append(
                UTuple(((var_id, index),), (phenomenon, value[position]))
            )
        urelations.append(relation)

    assignments = {}
    for row in rows:
        theta = {}
        for cluster_index, members in enumerate(clusters):
            value = tuple(row[a] for a in members)
            theta[variables[cluster_index].var_id] = (
                cluster_values[cluster_index].index(value) + 1
            )
        assignments[row["tid"]] = theta
    return clusters, variables, marginals, urelations, assignments


def u_propagate(output_rows, output_columns, theoretical_assignment,
                trial_assignments, name) -> URelation:
    """Stamp output rows with the worlds they belong to, dropping tid.

    Every row of trial tid gets the condition formed by the hypothesis
    choice plus the trial's empirical cluster assignments; tid becomes
    recoverable from the condition and is no longer a column.
    """
    columns = [a for a in output_columns if a != "tid"]
    relation = URelation(name, columns)
    for row in output_rows:
        tid = row["tid"]
        if tid not in trial_assignments:
            raise UnfactorizedTrial(
                f"trial {tid} matches no combination of factor alternatives"
            )
        pairs = [theoretical_assignment] + sorted(trial_assignments[tid].items())
        condition = tuple(sorted(pairs, key=lambda p: var_sort_key(p[0])))
        relation.tuples.append(
            UTuple(condition, tuple(row[a] for a in columns))
        )
    return relation


def world_prob(theta, world_table: WorldTable) -> float:
    """Probability of a world: the product of its assignment marginals."""
    pairs = theta.items() if isinstance(theta, dict) else theta
    probability = 1.0
    for var_id, value in pairs:
        probability *= world_table.probability(var_id, value)
    return probability


def confidence(conditions, world_table: WorldTable) -> float:
    """Exact probability that at least one condition holds.

    Enumerates the joint assignments of every variable the conditions
    mention; instances here are desk-scale, so exact enumeration beats
    approximation.
    """
    mentioned = sorted(
        {var_id for condition in conditions for var_id, _ in condition},
        key=var_sort_key,
    )
    if not mentioned:
        return 1.0 if conditions else 0.0
    domains = [world_table.values_of(var_id) for var_id in mentioned]
    total = 0.0
    for combo in product(*domains):
        assignment = dict(zip(mentioned, combo))
        if any(
            all(assignment[var_id] == value for var_id, value in condition)
            for condition in conditions
        ):
            weight = 1.0
            for var_id, value in assignment.items():
                weight *= world_table.probability(var_id, value)
            total += weight
    return total


def conf(urelation: URelation, world_table: WorldTable, predicate=None) -> list:
    """Tuple confidence per distinct data tuple of a selection.

    Duplicate data tuples under different conditions are one logical
    tuple existing in the union of their worlds.
    """
    grouped = {}
    order = []
    for item in urelation.select(predicate):
        if item.data not in grouped:
            grouped[item.data] = []
            order.append(item.data)
        grouped[item.data].append(item.condition)
    return [
        (dict(zip(urelation.columns, data)), confidence(grouped[data], world_table))
        for data in order
    ]
