"""Certain-relational storage and trial loading.

An embedded store keeps the synthesized relations as plain row lists
with enforced candidate keys. Deploying a schema prepends the reserved
``tid`` attribute to every relation and key: trial datasets violate the
extracted dependencies on purpose (that is what makes them alternative
trials), and the trial id is the provisional repair that keeps the data
relational until uncertainty is introduced properly.

Values are doubles except for the identifier attributes (tid, phi,
upsilon), which are integers. Predicates compare identifiers exactly
and doubles bit-exactly; data at this layer is loaded, never computed.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .causal import PHI, UPSILON
from .errors import (
    BadInput,
    DuplicateHypothesis,
    DuplicatePhenomenon,
    DuplicateRelation,
    DuplicateTarget,
    KeyViolation,
    UnknownAttribute,
    UnknownHypothesis,
    UnknownPhenomenon,
    UnknownRelation,
    UnknownSymbol,
)
from .ingest import (
    ROLE_INDEX,
    ROLE_OUTPUT,
    ROLE_PARAMETER,
    PhenomenonDecl,
    Structure,
)
from .synthesis import SchemaCatalog

TID = "tid"
ID_ATTRIBUTES = (TID, PHI, UPSILON)

H0_NAME = "H_0"


@dataclass
class DeployedRelation:
    name: str
    attributes: list
    keys: list  # of frozensets
    origin: object = "global"
    rows: list = field(default_factory=list)

    def __post_init__(self):
        self._indexes = {key: set() for key in self.keys}
        for row in self.rows:
            self._remember(row)

    def _key_tuple(self, key, row):
        return tuple(row[a] for a in self.attributes if a in key)

    def _remember(self, row):
        for key, index in self._indexes.items():
            index.add(self._key_tuple(key, row))

    def check_insert(self, row: dict):
        """Raise without mutating if the row cannot go in."""
        if set(row) != set(self.attributes):
            missing = set(self.attributes) - set(row)
            extra = set(row) - set(self.attributes)
            raise UnknownSymbol(
                f"row for {self.name} mismatches its attributes "
                f"(missing {sorted(missing)}, unexpected {sorted(extra)})"
            )
        for key, index in self._indexes.items():
            if self._key_tuple(key, row) in index:
                raise KeyViolation(
                    f"duplicate {sorted(key)} value in {self.name}: "
                    f"{self._key_tuple(key, row)}"
                )

    def insert(self, row: dict):
        self.check_insert(row)
        self.rows.append(dict(row))
        self._remember(row)

    def select(self, predicate: dict | None = None) -> list:
        """Rows satisfying an attribute = value conjunction, in key order."""
        predicate = predicate or {}
        for attr in predicate:
            if attr not in self.attributes:
                raise UnknownAttribute(f"{self.name} has no attribute {attr!r}")
        picked = [
            row
            for row in self.rows
            if all(row[a] == v for a, v in predicate.items())
        ]
        primary = self.keys[0] if self.keys else frozenset(self.attributes)
        order = [a for a in self.attributes if a in primary]
        order += [a for a in self.attributes if a not in primary]
        picked.sort(key=lambda row: tuple(row[a] for a in order))
        return picked

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.attributes)
        for row in self.select():
            writer.writerow([_format_value(a, row[a]) for a in self.attributes])
        return out.getvalue()

    @classmethod
    def from_csv(cls, name, text, keys, origin="global"):
        reader = csv.reader(io.StringIO(text))
        try:
            attributes = next(reader)
        except StopIteration:
            raise BadInput(f"relation file for {name} is empty") from None
        rows = [
            {a: _parse_value(a, cell) for a, cell in zip(attributes, line)}
            for line in reader
            if line
        ]
        return cls(name, attributes, keys, origin, rows)


def _format_value(attr, value) -> str:
    if attr in ID_ATTRIBUTES:
        return str(int(value))
    return repr(float(value))


def _parse_value(attr, cell):
    try:
        if attr in ID_ATTRIBUTES:
            return int(cell)
        return float(cell)
    except ValueError:
        raise BadInput(f"bad value {cell!r} for attribute {attr!r}") from None


class RelationStore:
    """Named relations with key enforcement; one instance per project."""

    def __init__(self):
        self.relations = {}

    def __contains__(self, name):
        return name in self.relations

    def get(self, name) -> DeployedRelation:
        try:
            return self.relations[name]
        except KeyError:
            raise UnknownRelation(name) from None

    def add(self, relation: DeployedRelation):
        if relation.name in self.relations:
            raise DuplicateRelation(relation.name)
        self.relations[relation.name] = relation

    def deploy_schema(self, catalog: SchemaCatalog):
        """Materialize a synthesized schema with tid-augmented keys."""
        for rel in catalog.relations:
            if rel.name in self.relations:
                raise DuplicateRelation(rel.name)
        deployed = []
        for rel in catalog.relations:
            relation = DeployedRelation(
                rel.name,
                [TID] + list(rel.attributes),
                [frozenset(key | {TID}) for key in rel.keys],
                rel.origin,
            )
            self.relations[rel.name] = relation
            deployed.append(relation)
        return deployed


@dataclass
class TrialDataset:
    """One parameter setting plus the prediction series it produced."""

    hypothesis_id: int
    phenomenon_id: int
    parameters: dict
    series: list  # of (index value, {output symbol: value})
    index_symbol: str = "t"


@dataclass
class HypothesisEntry:
    hypothesis_id: int
    name: str
    structure: Structure
    schema: SchemaCatalog

    def parameter_relation(self) -> str:
        for rel in self.schema.relations:
            if frozenset({PHI}) in rel.keys:
                return rel.name
        raise UnknownRelation(f"hypothesis {self.hypothesis_id} has no parameter relation")

    def output_relations(self) -> list:
        return [
            rel.name
            for rel in self.schema.relations
            if frozenset({PHI}) not in rel.keys
        ]


@dataclass
class Catalog:
    """Registered phenomena and hypotheses plus their target pairs."""

    phenomena: list = field(default_factory=list)
    hypotheses: list = field(default_factory=list)
    h0: list = field(default_factory=list)  # of (phi, upsilon)

    def phenomenon(self, phenomenon_id) -> PhenomenonDecl:
        for decl in self.phenomena:
            if decl.phenomenon_id == phenomenon_id:
                return decl
        raise UnknownPhenomenon(str(phenomenon_id))

    def hypothesis(self, hypothesis_id) -> HypothesisEntry:
        for entry in self.hypotheses:
            if entry.hypothesis_id == hypothesis_id:
                return entry
        raise UnknownHypothesis(str(hypothesis_id))

    def add_phenomenon(self, decl: PhenomenonDecl):
        if any(p.phenomenon_id == decl.phenomenon_id for p in self.phenomena):
            raise DuplicatePhenomenon(str(decl.phenomenon_id))
        self.phenomena.append(decl)

    def add_hypothesis(self, entry: HypothesisEntry):
        if any(h.hypothesis_id == entry.hypothesis_id for h in self.hypotheses):
            raise DuplicateHypothesis(str(entry.hypothesis_id))
        self.hypotheses.append(entry)

    def add_target(self, phenomenon_id, hypothesis_id):
        self.phenomenon(phenomenon_id)
        self.hypothesis(hypothesis_id)
        pair = (phenomenon_id, hypothesis_id)
        if pair in self.h0:
            raise DuplicateTarget(f"({phenomenon_id}, {hypothesis_id})")
        self.h0.append(pair)

    def targets_of(self, phenomenon_id) -> list:
        return [u for (p, u) in self.h0 if p == phenomenon_id]


def h0_relation() -> DeployedRelation:
    return DeployedRelation(H0_NAME, [PHI, UPSILON], [frozenset({PHI, UPSILON})])


def parse_trial_csv(text: str):
    """Split a trial file into parameters and series.

    Layout: a ``param:<symbol>`` header row with one row of values,
    then an index-plus-outputs header with the series rows.
    """
    rows = [line for line in csv.reader(io.StringIO(text))]
    rows = [line for line in rows if any(cell.strip() for cell in line)]
    if len(rows) < 4:
        raise BadInput("trial file needs parameter rows and a series")
    header = rows[0]
    if not all(cell.startswith("param:") for cell in header):
        raise BadInput("first trial header must name param:<symbol> columns")
    symbols = [cell[len("param:"):] for cell in header]
    if len(rows[1]) != len(symbols):
        raise BadInput("parameter value row does not match its header")
    try:
        parameters = {s: float(v) for s, v in zip(symbols, rows[1])}
    except ValueError:
        raise BadInput("parameter values must be numbers") from None
    series_header = rows[2]
    if len(series_header) < 2:
        raise BadInput("series header needs an index and at least one output")
    index_symbol, output_symbols = series_header[0], series_header[1:]
    series = []
    for line in rows[3:]:
        if len(line) != len(series_header):
            raise BadInput(f"series row {line!r} does not match its header")
        try:
            values = [float(cell) for cell in line]
        except ValueError:
            raise BadInput(f"series row {line!r} holds a non-number") from None
        series.append((values[0], dict(zip(output_symbols, values[1:]))))
    return parameters, series, index_symbol, output_symbols


def load_trial(store: RelationStore, entry: HypothesisEntry, dataset: TrialDataset) -> int:
    """Insert one trial dataset; returns the assigned tid.

    The tid continues the per-(phenomenon, hypothesis) sequence 1..n.
    The whole call is atomic: series keys are validated before any row
    lands, so a duplicate index value rejects the trial untouched.
    """
    structure = entry.structure
    expected_params = set(structure.variables_with_role(ROLE_PARAMETER))
    if set(dataset.parameters) != expected_params:
        raise UnknownSymbol(
            f"trial parameters {sorted(dataset.parameters)} do not match "
            f"hypothesis {entry.hypothesis_id} parameters {sorted(expected_params)}"
        )
    if dataset.index_symbol not in structure.variables_with_role(ROLE_INDEX):
        raise UnknownSymbol(f"{dataset.index_symbol!r} is not an index variable")
    expected_outputs = set(structure.variables_with_role(ROLE_OUTPUT))
    for _, outputs in dataset.series:
        if set(outputs) != expected_outputs:
            raise UnknownSymbol(
                f"series outputs {sorted(outputs)} do not match "
                f"hypothesis outputs {sorted(expected_outputs)}"
            )

    seen_index = set()
    for index_value, _ in dataset.series:
        if index_value in seen_index:
            raise KeyViolation(
                f"series index value {index_value!r} occurs twice in one trial"
            )
        seen_index.add(index_value)

    parameter_relation = store.get(entry.parameter_relation())
    existing = parameter_relation.select({PHI: dataset.phenomenon_id})
    tid = 1 + max((row[TID] for row in existing), default=0)

    parameter_row = {TID: tid, PHI: dataset.phenomenon_id}
    parameter_row.update(dataset.parameters)
    parameter_relation.insert(parameter_row)
    for name in entry.output_relations():
        relation = store.get(name)
        carried = [
            a
            for a in relation.attributes
            if a not in (TID, PHI, UPSILON, dataset.index_symbol)
        ]
        for index_value, outputs in dataset.series:
            row = {
                TID: tid,
                PHI: dataset.phenomenon_id,
                UPSILON: dataset.hypothesis_id,
                dataset.index_symbol: index_value,
            }
            for symbol in carried:
                row[symbol] = outputs[symbol]
            relation.insert(row)
    return tid
