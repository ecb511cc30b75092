"""Causal ordering of equation systems.

A valid structure admits a total mapping from equations to variables:
the asymmetric functional reading of a symmetric equation system. That
mapping is a perfect matching in the bipartite graph pairing every
equation with the variables it mentions. It is then encoded as a set of
functional dependencies over attribute symbols, with two reserved
symbols joining the structure's own: ``phi`` identifies the target
phenomenon and ``upsilon`` the hypothesis.

Matching is greedy seeding followed by augmenting paths, with a fixed
processing order (equations ascending by id, variables ascending
lexicographically) so results are reproducible. When several perfect
matchings exist the choice is therefore deterministic, and the
ambiguity is surfaced as a warning rather than resolved silently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NoPerfectMatching, RoleConflict
from .ingest import ROLE_INDEX, ROLE_PARAMETER, Structure

PHI = "phi"
UPSILON = "upsilon"


@dataclass(frozen=True)
class Fd:
    """A functional dependency determinant -> dependent."""

    determinant: frozenset
    dependent: str

    def __repr__(self):
        return f"Fd({sorted(self.determinant)} -> {self.dependent})"


def fd(determinant, dependent: str) -> Fd:
    det = frozenset(determinant)
    if dependent in det:
        raise ValueError(f"dependent {dependent!r} inside its own determinant")
    return Fd(det, dependent)


def fd_sort_key(item: Fd):
    """Canonical ordering: by dependent, then by sorted determinant."""
    return (item.dependent, tuple(sorted(item.determinant)))


@dataclass
class FdSet:
    """A list of dependencies plus the attribute universe they live in.

    ``attributes`` may exceed the symbols actually mentioned by the
    dependencies: index variables emit no dependency yet still belong
    to the schema (so an all-index structure yields an empty list with
    a nonempty universe).
    """

    fds: list
    attributes: set

    def mentioned(self) -> set:
        out = set()
        for item in self.fds:
            out |= item.determinant
            out.add(item.dependent)
        return out

    def as_set(self) -> frozenset:
        return frozenset(self.fds)

    def to_obj(self) -> list:
        return [
            {"determinant": sorted(item.determinant), "dependent": item.dependent}
            for item in sorted(self.fds, key=fd_sort_key)
        ]

    @classmethod
    def from_obj(cls, obj, attributes=()) -> "FdSet":
        fds = [fd(entry["determinant"], entry["dependent"]) for entry in obj]
        universe = set(attributes)
        result = cls(fds, universe)
        result.attributes |= result.mentioned()
        return result


@dataclass
class CausalMapping:
    """Bijection equation id -> variable symbol, plus analysis warnings."""

    pairs: dict
    warnings: list = field(default_factory=list)


def _ordered_adjacency(equations) -> dict:
    return {
        eq.eq_id: sorted(eq.variables)
        for eq in sorted(equations, key=lambda e: e.eq_id)
    }


def maximum_matching(equations) -> dict:
    """Maximum bipartite matching of equations to their variables.

    Two deterministic passes: greedily hand every equation the first
    free variable it mentions, then grow the matching with augmenting
    paths for the equations left over. Returns equation id -> variable;
    the matching is maximum but not necessarily perfect.
    """
    adjacency = _ordered_adjacency(equations)
    owner = {}  # variable -> equation currently holding it
    for eq_id, symbols in adjacency.items():
        for symbol in symbols:
            if symbol not in owner:
                owner[symbol] = eq_id
                break

    def augment(eq_id, visited) -> bool:
        for symbol in adjacency[eq_id]:
            if symbol in visited:
                continue
            visited.add(symbol)
            if symbol not in owner or augment(owner[symbol], visited):
                owner[symbol] = eq_id
                return True
        return False

    matched = set(owner.values())
    for eq_id in adjacency:
        if eq_id not in matched:
            augment(eq_id, set())
            matched = set(owner.values())
    return {eq_id: symbol for symbol, eq_id in owner.items()}


def _has_alternative_matching(equations, pairs) -> bool:
    """True when a second perfect matching exists.

    Any other perfect matching differs from the current one along
    alternating cycles. Those appear as directed cycles in the graph
    that links each equation's assigned variable to the equation's
    remaining variables, so a single cycle search settles the question.
    """
    edges = {}
    for eq in equations:
        assigned = pairs[eq.eq_id]
        edges.setdefault(assigned, [])
        for symbol in sorted(eq.variables):
            if symbol != assigned:
                edges[assigned].append(symbol)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {symbol: WHITE for symbol in edges}
    for start in sorted(edges):
        if color[start] != WHITE:
            continue
        stack = [(start, iter(edges[start]))]
        color[start] = GRAY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt not in color:
                    # an unassigned variable in reach: the holder of `node`
                    # could take it instead, which is a second mapping
                    return True
                if color[nxt] == GRAY:
                    return True
                if color[nxt] == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, iter(edges[nxt])))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
    return False


def total_causal_mapping(s: Structure) -> CausalMapping:
    """Compute the total causal mapping of a structure.

    Raises NoPerfectMatching when some equation cannot be assigned an
    own variable. Flags AmbiguousOrdering when the assignment is not
    unique; the returned one is the deterministic tie-break.
    """
    pairs = maximum_matching(s.equations)
    if len(pairs) < len(s.equations):
        unmatched = sorted(eq.eq_id for eq in s.equations if eq.eq_id not in pairs)
        raise NoPerfectMatching(f"equations {', '.join(unmatched)} cannot be causally ordered")
    warnings = []
    if _has_alternative_matching(s.equations, pairs):
        warnings.append(
            "AmbiguousOrdering: several total causal mappings exist; "
            "the deterministic tie-break was applied"
        )
    return CausalMapping(pairs, warnings)


def encode_fds(s: Structure, mapping: CausalMapping) -> FdSet:
    """Encode a causal mapping as the primitive dependency set.

    Per assigned pair (e -> v): index variables emit nothing; an
    arity-1 equation over a parameter emits phi -> v; any other
    equation emits (variables(e) minus v) plus upsilon -> v. The
    attribute universe is the declared symbols plus phi and upsilon.
    """
    roles = s.roles()
    fds = []
    for eq in sorted(s.equations, key=lambda e: e.eq_id):
        symbol = mapping.pairs[eq.eq_id]
        role = roles[symbol]
        if role == ROLE_INDEX:
            continue
        if eq.variables == {symbol}:
            if role != ROLE_PARAMETER:
                raise RoleConflict(
                    f"equation {eq.eq_id!r} determines {symbol!r} alone, "
                    f"but its role is {role!r} (expected parameter)"
                )
            fds.append(fd({PHI}, symbol))
        else:
            if role == ROLE_PARAMETER:
                raise RoleConflict(
                    f"equation {eq.eq_id!r} determines parameter {symbol!r} "
                    "from other variables; parameters take arity-1 equations"
                )
            fds.append(fd((eq.variables - {symbol}) | {UPSILON}, symbol))
    return FdSet(fds, s.symbols() | {PHI, UPSILON})
