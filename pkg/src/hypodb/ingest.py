"""Hypothesis descriptors and phenomenon files.

A hypothesis arrives as an XML envelope: a ``<hypothesis>`` root holding
``<variable>`` declarations followed by ``<equation>`` elements. Each
equation contains either exactly one content-MathML ``<math>`` island or
a ``vars`` attribute naming its variable set without an expression tree.
The latter form covers abstract equations (no closed form exists) and
value-free subsidiary equations whose values arrive with trial data.
Phenomena are small XML or JSON documents.

Only a deliberate subset of content MathML is accepted: ``apply`` with
``eq``, ``plus``, ``minus``, ``times``, ``divide``, ``power`` or ``diff``
(with an optional ``bvar``), plus ``ci`` and ``cn`` leaves. Anything else
raises ``UnknownElement`` so unsupported constructs fail loudly instead
of silently dropping terms.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import (
    BadInput,
    DuplicateEquationId,
    MalformedXml,
    UndeclaredVariable,
    UnknownElement,
)

ROLE_PARAMETER = "parameter"
ROLE_INDEX = "index"
ROLE_OUTPUT = "output"
ROLES = (ROLE_PARAMETER, ROLE_INDEX, ROLE_OUTPUT)

OPERATORS = frozenset({"eq", "plus", "minus", "times", "divide", "power", "diff"})


@dataclass(frozen=True)
class Cn:
    """Numeric literal leaf."""

    value: float


@dataclass(frozen=True)
class Ci:
    """Variable reference leaf."""

    symbol: str


@dataclass(frozen=True)
class Apply:
    """Operator application; ``bound`` names the bvar of a diff."""

    op: str
    args: tuple
    bound: str | None = None


@dataclass(frozen=True)
class VariableDecl:
    symbol: str
    role: str
    description: str = ""


@dataclass(frozen=True)
class Equation:
    """One equation of a structure.

    ``variables`` is the full set of variable leaves. ``expression`` is
    absent for the opaque ``vars=".."`` form. ``value`` records the
    literal of a valued subsidiary equation (``x0 = 200``); trial data
    overrides it.
    """

    eq_id: str
    variables: frozenset
    expression: Apply | None = None
    value: float | None = None


@dataclass
class Structure:
    """A hypothesis's equation system together with variable roles."""

    hypothesis_id: int
    name: str
    equations: list
    declarations: list

    def roles(self) -> dict:
        return {d.symbol: d.role for d in self.declarations}

    def symbols(self) -> set:
        return {d.symbol for d in self.declarations}

    def variables_with_role(self, role: str) -> list:
        return [d.symbol for d in self.declarations if d.role == role]


@dataclass(frozen=True)
class PhenomenonDecl:
    phenomenon_id: int
    description: str


@dataclass
class ValidityReport:
    """Outcome of structural validation; ``reasons`` lists violations."""

    reasons: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.reasons


def _local(tag: str) -> str:
    """Tag name with any XML namespace prefix stripped."""
    return tag.rsplit("}", 1)[-1]


def expression_symbols(node) -> set:
    """All variable symbols occurring in an expression tree."""
    if isinstance(node, Ci):
        return {node.symbol}
    if isinstance(node, Cn):
        return set()
    out = set()
    if node.bound is not None:
        out.add(node.bound)
    for arg in node.args:
        out |= expression_symbols(arg)
    return out


def _parse_expression(elem):
    tag = _local(elem.tag)
    if tag == "ci":
        symbol = (elem.text or "").strip()
        if not symbol:
            raise MalformedXml("empty <ci> element")
        return Ci(symbol)
    if tag == "cn":
        text = (elem.text or "").strip()
        try:
            return Cn(float(text))
        except ValueError:
            raise MalformedXml(f"non-numeric <cn> content {text!r}") from None
    if tag == "apply":
        children = list(elem)
        if not children:
            raise MalformedXml("empty <apply> element")
        op = _local(children[0].tag)
        if op not in OPERATORS:
            raise UnknownElement(f"operator <{op}> is outside the supported MathML subset")
        rest = children[1:]
        bound = None
        if op == "diff" and rest and _local(rest[0].tag) == "bvar":
            bvar_children = [c for c in rest[0] if _local(c.tag) == "ci"]
            if len(bvar_children) != 1:
                raise MalformedXml("<bvar> must contain exactly one <ci>")
            bound = (bvar_children[0].text or "").strip()
            if not bound:
                raise MalformedXml("empty <ci> element")
            rest = rest[1:]
        args = tuple(_parse_expression(child) for child in rest)
        if not args:
            raise MalformedXml(f"<apply> of <{op}> has no operands")
        return Apply(op, args, bound)
    raise UnknownElement(f"<{tag}> is outside the supported MathML subset")


def _subsidiary_value(expr):
    """The literal of ``symbol = number`` equations, else None."""
    if (
        isinstance(expr, Apply)
        and expr.op == "eq"
        and len(expr.args) == 2
        and isinstance(expr.args[0], Ci)
        and isinstance(expr.args[1], Cn)
    ):
        return expr.args[1].value
    return None


def parse_descriptor(data) -> Structure:
    """Parse descriptor XML bytes into a Structure.

    Equations appear in document order. The variable set of a MathML
    equation is the union of its ci leaves on both sides.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from None
    if _local(root.tag) != "hypothesis":
        raise MalformedXml(f"expected <hypothesis> root, got <{_local(root.tag)}>")
    try:
        hypothesis_id = int(root.get("id", ""))
    except ValueError:
        raise MalformedXml("hypothesis id must be an integer") from None
    if hypothesis_id <= 0:
        raise MalformedXml("hypothesis id must be positive")
    name = root.get("name", "")

    declarations = []
    seen_symbols = set()
    equations = []
    seen_equations = set()
    for child in root:
        tag = _local(child.tag)
        if tag == "variable":
            symbol = child.get("symbol", "").strip()
            if not symbol:
                raise MalformedXml("<variable> without a symbol")
            if symbol in seen_symbols:
                raise MalformedXml(f"duplicate variable symbol {symbol!r}")
            role = child.get("role", "")
            if role not in ROLES:
                raise MalformedXml(f"variable {symbol!r} has unknown role {role!r}")
            seen_symbols.add(symbol)
            declarations.append(VariableDecl(symbol, role, child.get("description", "")))
        elif tag == "equation":
            eq_id = child.get("id", "").strip()
            if not eq_id:
                raise MalformedXml("<equation> without an id")
            if eq_id in seen_equations:
                raise DuplicateEquationId(eq_id)
            seen_equations.add(eq_id)
            vars_attr = child.get("vars")
            math_elems = [c for c in child if _local(c.tag) == "math"]
            if vars_attr is not None and math_elems:
                raise MalformedXml(f"equation {eq_id!r} has both vars= and <math>")
            if vars_attr is not None:
                symbols = frozenset(vars_attr.split())
                expression = None
                value = None
            else:
                if len(math_elems) != 1:
                    raise MalformedXml(f"equation {eq_id!r} needs exactly one <math> or a vars=")
                exprs = list(math_elems[0])
                if len(exprs) != 1:
                    raise MalformedXml(f"<math> of equation {eq_id!r} must hold one expression")
                expression = _parse_expression(exprs[0])
                symbols = frozenset(expression_symbols(expression))
                value = _subsidiary_value(expression)
            if not symbols:
                raise MalformedXml(f"equation {eq_id!r} names no variables")
            equations.append(Equation(eq_id, symbols, expression, value))
        else:
            raise UnknownElement(f"<{tag}> is not a descriptor element")

    declared = {d.symbol for d in declarations}
    for eq in equations:
        for symbol in sorted(eq.variables):
            if symbol not in declared:
                raise UndeclaredVariable(f"{symbol!r} in equation {eq.eq_id!r}")
    return Structure(hypothesis_id, name, equations, declarations)


def _emit_expression(node, parent):
    if isinstance(node, Ci):
        ET.SubElement(parent, "ci").text = node.symbol
        return
    if isinstance(node, Cn):
        ET.SubElement(parent, "cn").text = repr(node.value)
        return
    apply_elem = ET.SubElement(parent, "apply")
    ET.SubElement(apply_elem, node.op)
    if node.bound is not None:
        bvar = ET.SubElement(apply_elem, "bvar")
        ET.SubElement(bvar, "ci").text = node.bound
    for arg in node.args:
        _emit_expression(arg, apply_elem)


def serialize_descriptor(s: Structure) -> bytes:
    """Inverse of parse_descriptor up to Structure equality."""
    root = ET.Element("hypothesis", {"id": str(s.hypothesis_id), "name": s.name})
    for decl in s.declarations:
        attrs = {"symbol": decl.symbol, "role": decl.role}
        if decl.description:
            attrs["description"] = decl.description
        ET.SubElement(root, "variable", attrs)
    for eq in s.equations:
        eq_elem = ET.SubElement(root, "equation", {"id": eq.eq_id})
        if eq.expression is None:
            eq_elem.set("vars", " ".join(sorted(eq.variables)))
        else:
            math = ET.SubElement(eq_elem, "math")
            _emit_expression(eq.expression, math)
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def validate_structure(s: Structure) -> ValidityReport:
    """Check the conditions for a structure to be causally orderable.

    The report lists every violated condition: CountMismatch when the
    equation and variable counts differ, NoPerfectMatching when some
    equations cannot be paired with distinct own variables, and
    OrphanVariable when a declared variable occurs in no equation.
    Validation results are data, not errors.
    """
    from .causal import maximum_matching  # local import, causal builds on this module

    reasons = []
    if len(s.equations) != len(s.declarations):
        reasons.append("CountMismatch")
    if len(maximum_matching(s.equations)) < len(s.equations):
        reasons.append("NoPerfectMatching")
    used = set()
    for eq in s.equations:
        used |= eq.variables
    if any(d.symbol not in used for d in s.declarations):
        reasons.append("OrphanVariable")
    return ValidityReport(reasons)


def parse_phenomenon(data) -> PhenomenonDecl:
    """Parse a phenomenon file, accepting both the XML and JSON forms."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError:
            raise BadInput("phenomenon file is not valid UTF-8") from None
    else:
        text = data
    if text.lstrip().startswith("<"):
        try:
            root = ET.fromstring(text)
        except ET.ParseError as exc:
            raise MalformedXml(str(exc)) from None
        if _local(root.tag) != "phenomenon":
            raise MalformedXml(f"expected <phenomenon> root, got <{_local(root.tag)}>")
        try:
            phenomenon_id = int(root.get("id", ""))
        except ValueError:
            raise MalformedXml("phenomenon id must be an integer") from None
        description = root.get("description") or (root.text or "").strip()
    else:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BadInput(f"phenomenon JSON: {exc}") from None
        if not isinstance(obj, dict) or not isinstance(obj.get("id"), int):
            raise BadInput("phenomenon JSON needs an integer 'id'")
        phenomenon_id = obj["id"]
        description = str(obj.get("description", ""))
    if phenomenon_id <= 0:
        raise BadInput("phenomenon id must be positive")
    return PhenomenonDecl(phenomenon_id, description)
