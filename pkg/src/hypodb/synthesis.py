"""Schema synthesis over folded dependency sets.

Folding rewrites every dependency through the phenomenon scope: any
attribute functionally determined by ``phi`` alone is replaced in other
determinants by ``phi`` itself, keeping the causal ordering intact while
collapsing parameter indirection. Folding runs to a fixpoint, so
rewrites that expose new phi-determined attributes are picked up.

Synthesis first reduces determinants (dropping attributes the rest of
the determinant already reaches), then groups dependencies by
determinant equivalence (mutual containment in each other's closures)
and emits one relation per class. With one dependency per dependent the
reduction is the only minimal-cover step with any effect, but it cannot
be skipped: an unreduced determinant can drag a transitively determined
attribute into a relation where it breaks the key property. The result
is checked for BCNF and for the lossless-join property via the chase;
dependency preservation is deliberately not required (redundancy-free
schemas win over update convenience here, since loading is
append-only).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .causal import PHI, UPSILON, Fd, FdSet, fd
from .errors import EmptyFdSet


@dataclass
class RelationDef:
    """A synthesized relation: ordered attributes and its candidate keys."""

    name: str
    attributes: list
    keys: list  # of frozensets, each a candidate key
    origin: object = "global"  # hypothesis id, or "global"

    def to_obj(self) -> dict:
        return {
            "name": self.name,
            "attributes": list(self.attributes),
            "keys": sorted((sorted(k) for k in self.keys), key=lambda k: (len(k), k)),
            "origin": self.origin,
        }


@dataclass
class SchemaCatalog:
    """Synthesized relations with the dependency sets they came from."""

    relations: list
    folded: FdSet
    primitive: FdSet | None = None
    warnings: list = field(default_factory=list)

    def to_obj(self) -> dict:
        obj = {
            "relations": [rel.to_obj() for rel in self.relations],
            "folded": self.folded.to_obj(),
            "warnings": list(self.warnings),
        }
        if self.primitive is not None:
            obj["primitive"] = self.primitive.to_obj()
        return obj


def attribute_closure(attrs, sigma) -> set:
    """Smallest superset of ``attrs`` closed under the dependencies."""
    fds = sigma.fds if isinstance(sigma, FdSet) else list(sigma)
    closure = set(attrs)
    changed = True
    while changed:
        changed = False
        for item in fds:
            if item.dependent not in closure and item.determinant <= closure:
                closure.add(item.dependent)
                changed = True
    return closure


def _fold_once(fds) -> list:
    phi_only = frozenset({PHI})
    determined = {item.dependent for item in fds if item.determinant == phi_only}
    out = []
    seen = set()
    for item in fds:
        if item.determinant == phi_only or item.dependent == PHI:
            new = item
        else:
            new = Fd(frozenset((item.determinant - determined) | {PHI} - {item.dependent}), item.dependent)
        key = (new.determinant, new.dependent)
        if key not in seen:
            seen.add(key)
            out.append(new)
    return out


def fold_fds(sigma: FdSet) -> FdSet:
    """Fold a primitive dependency set, iterating to a fixpoint.

    One pass replaces phi-determined attributes by phi inside every
    non-phi determinant (and roots every such determinant at phi). A
    pass can turn a dependency into a new phi dependency, so passes
    repeat until stable; the fixpoint makes the operation idempotent.
    Mutually dependent outputs (x with y) are preserved as they are.
    """
    fds = list(sigma.fds)
    while True:
        folded = _fold_once(fds)
        if folded == fds:
            return FdSet(folded, set(sigma.attributes))
        fds = folded


def reduce_determinants(folded: FdSet) -> FdSet:
    """Drop determinant attributes the remaining ones already imply.

    A symbol is extraneous in X -> A when A sits in the closure of X
    without it, taken under the full dependency set. Symbols are tried
    in sorted order and dependencies in list order, so the reduction is
    deterministic.
    """
    fds = list(folded.fds)
    for i, item in enumerate(fds):
        determinant = set(item.determinant)
        for symbol in sorted(item.determinant):
            if symbol not in determinant:
                continue
            without = determinant - {symbol}
            if item.dependent in attribute_closure(without, fds):
                determinant = without
                fds[i] = Fd(frozenset(determinant), item.dependent)
    return FdSet(fds, set(folded.attributes))


def determinant_classes(folded: FdSet) -> list:
    """Group the distinct determinants by closure equivalence.

    Determinants X and Y land in one class iff each is contained in the
    other's closure, which is exactly equality of the closures. Classes
    keep first-appearance order.
    """
    order = []
    by_closure = {}
    for item in folded.fds:
        closure = frozenset(attribute_closure(item.determinant, folded))
        if closure not in by_closure:
            by_closure[closure] = []
            order.append(closure)
        if item.determinant not in by_closure[closure]:
            by_closure[closure].append(item.determinant)
    return [by_closure[closure] for closure in order]


def _never_determined(folded: FdSet) -> set:
    """Attributes that appear only on determinant side (index-like)."""
    dependents = {item.dependent for item in folded.fds}
    return folded.mentioned() - dependents - {PHI, UPSILON}


def _ordered_attributes(class_fds, index_attrs) -> list:
    """Stable column order: phi, upsilon, index attributes, then the rest.

    First appearance scans the class dependencies in list order, walking
    each determinant lexicographically before its dependent, which keeps
    golden schemas byte-stable.
    """
    appearance = []
    seen = set()
    for item in class_fds:
        for symbol in sorted(item.determinant) + [item.dependent]:
            if symbol not in seen:
                seen.add(symbol)
                appearance.append(symbol)
    front = [a for a in (PHI, UPSILON) if a in seen]
    middle = [a for a in appearance if a in index_attrs]
    rest = [a for a in appearance if a not in index_attrs and a not in (PHI, UPSILON)]
    return front + middle + rest


def _endogenous_cycle_warnings(folded: FdSet) -> list:
    """Flag dependency cycles among outputs longer than two attributes.

    Mutual pairs (x determines y determines x) are the documented merge
    case; anything longer is handled by the same equivalence rule but
    deserves a visible note.
    """
    dependents = {item.dependent for item in folded.fds}
    edges = {dep: set() for dep in dependents}
    for item in folded.fds:
        for symbol in item.determinant:
            if symbol in dependents:
                edges[item.dependent].add(symbol)

    warnings = []
    # Tarjan's strongly connected components, iteratively.
    index_of, low, on_stack = {}, {}, set()
    stack, counter = [], [0]
    components = []

    def strongconnect(root):
        work = [(root, iter(sorted(edges[root])))]
        index_of[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index_of:
                    index_of[nxt] = low[nxt] = counter[0]
                    counter[0] += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(sorted(edges[nxt]))))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index_of[nxt])
            if not advanced:
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[node])
                if low[node] == index_of[node]:
                    component = []
                    while True:
                        member = stack.pop()
                        on_stack.discard(member)
                        component.append(member)
                        if member == node:
                            break
                    components.append(component)

    for node in sorted(edges):
        if node not in index_of:
            strongconnect(node)
    for component in components:
        if len(component) > 2:
            warnings.append(
                "LongCycle: mutually dependent attributes "
                f"({', '.join(sorted(component))}) merged into one relation"
            )
    return warnings


def bcnf_violations(catalog: SchemaCatalog) -> list:
    """Projected dependencies whose determinant is not a relation key."""
    violations = []
    for rel in catalog.relations:
        attrs = set(rel.attributes)
        for item in catalog.folded.fds:
            if item.determinant <= attrs and item.dependent in attrs:
                if not attrs <= attribute_closure(item.determinant, catalog.folded):
                    violations.append(
                        f"{rel.name}: {sorted(item.determinant)} -> {item.dependent} "
                        "determines less than the full relation"
                    )
    return violations


def chase_lossless(catalog: SchemaCatalog) -> bool:
    """Decide the lossless-join property of the decomposition by chasing.

    The tableau holds one row per relation, a distinguished symbol in
    the relation's own columns and a unique symbol elsewhere. Each
    dependency equates symbols of rows agreeing on the determinant; the
    join is lossless iff some row ends up all-distinguished.
    """
    columns = []
    for rel in catalog.relations:
        for attr in rel.attributes:
            if attr not in columns:
                columns.append(attr)
    DISTINGUISHED = 0
    table = []
    fresh = 1
    for rel in catalog.relations:
        row = {}
        for attr in columns:
            if attr in rel.attributes:
                row[attr] = DISTINGUISHED
            else:
                row[attr] = fresh
                fresh += 1
        table.append(row)

    def substitute(old, new):
        for row in table:
            for attr, value in row.items():
                if value == old:
                    row[attr] = new

    changed = True
    while changed:
        changed = False
        for item in catalog.folded.fds:
            if not item.determinant <= set(columns) or item.dependent not in columns:
                continue
            groups = {}
            for row in table:
                key = tuple(row[a] for a in sorted(item.determinant))
                groups.setdefault(key, []).append(row)
            for rows in groups.values():
                values = {row[item.dependent] for row in rows}
                if len(values) > 1:
                    target = min(values)
                    for value in values - {target}:
                        substitute(value, target)
                    changed = True
    return any(all(v == DISTINGUISHED for v in row.values()) for row in table)


def synthesize_4c(folded: FdSet, hypothesis_id, primitive: FdSet | None = None) -> SchemaCatalog:
    """Synthesize the certain relational schema of one hypothesis.

    One relation per determinant equivalence class; its attributes are
    the union of class determinants and dependents in stable column
    order, its keys the class's distinct determinants. Relations are
    named H_<hypothesis>^<i> by ascending smallest-key size. The result
    carries warnings from the BCNF, lossless-join and long-cycle checks
    rather than failing, so unusual inputs stay inspectable.
    """
    if not folded.fds:
        raise EmptyFdSet("no dependencies to synthesize a schema from")
    folded = reduce_determinants(folded)
    index_attrs = _never_determined(folded)
    classes = determinant_classes(folded)

    entries = []
    for rank, determinants in enumerate(classes):
        class_fds = [item for item in folded.fds if item.determinant in determinants]
        attributes = _ordered_attributes(class_fds, index_attrs)
        smallest = min(len(d) for d in determinants)
        entries.append((smallest, rank, attributes, list(determinants)))
    entries.sort(key=lambda e: (e[0], e[1]))

    relations = []
    for i, (_, _, attributes, keys) in enumerate(entries, start=1):
        relations.append(
            RelationDef(f"H_{hypothesis_id}^{i}", attributes, keys, hypothesis_id)
        )
    catalog = SchemaCatalog(relations, folded, primitive)
    catalog.warnings.extend(_endogenous_cycle_warnings(folded))
    catalog.warnings.extend(bcnf_violations(catalog))
    if not chase_lossless(catalog):
        catalog.warnings.append("LossyJoin: the decomposition did not chase to a full row")
    return catalog
