"""SMV description generation: one symbolic variable per node, init/next
assignment blocks encoding pulse token semantics, canonical text rendering,
and a minimal reader used to round-trip generated text.

Templates by node kind (i1..in are the incoming triggers):

    initial a     init(a) := TRUE;  next(a) := case a : FALSE; TRUE : a; esac;
    other a       init(a) := FALSE; next(a) := case i1 & ... & in : TRUE;
                  a : FALSE; TRUE : a; esac;
    decision a    init(a) := undetermined; next(a) := case
                  i1 & ... & in : {guard_a_t1, ..., guard_a_tn};
                  a != undetermined : undetermined; TRUE : a; esac;
    merge a       as "other" but with incoming triggers joined by |.

A trigger is the predecessor's variable, or an equality test
(d = guard_d_a) when the predecessor is a decision d. The trailing
TRUE : a arm totalizes every case; the earlier arms make it reachable only
when the variable is idle, so behavior matches the per-kind templates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ltl
from .model import ActivityModel, NodeKind, synthetic_guard, validate

SMV_RESERVED = frozenset(
    {
        "MODULE", "VAR", "ASSIGN", "LTLSPEC", "init", "next", "case", "esac",
        "boolean", "undetermined", "TRUE", "FALSE",
    }
)


# --- condition and value expressions -----------------------------------

class CondExpr:
    __slots__ = ()


@dataclass(frozen=True)
class VarTrue(CondExpr):
    """A boolean variable used as its own trigger."""

    name: str


@dataclass(frozen=True)
class GuardEq(CondExpr):
    var: str
    value: str


@dataclass(frozen=True)
class NotUndetermined(CondExpr):
    var: str


@dataclass(frozen=True)
class ConstTrue(CondExpr):
    pass


@dataclass(frozen=True)
class AndCond(CondExpr):
    parts: tuple[CondExpr, ...]


@dataclass(frozen=True)
class OrCond(CondExpr):
    parts: tuple[CondExpr, ...]


class ValueExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Literal(ValueExpr):
    """TRUE, FALSE, undetermined, or a guard value."""

    text: str


@dataclass(frozen=True)
class Keep(ValueExpr):
    """The variable's current value (the totalizing default)."""

    var: str


@dataclass(frozen=True)
class Choice(ValueExpr):
    """Nondeterministic pick from a value set."""

    values: tuple[str, ...]


def render_cond(cond: CondExpr) -> str:
    if isinstance(cond, VarTrue):
        return cond.name
    if isinstance(cond, GuardEq):
        return f"({cond.var} = {cond.value})"
    if isinstance(cond, NotUndetermined):
        return f"{cond.var} != undetermined"
    if isinstance(cond, ConstTrue):
        return "TRUE"
    if isinstance(cond, AndCond):
        return " & ".join(render_cond(p) for p in cond.parts)
    if isinstance(cond, OrCond):
        return " | ".join(render_cond(p) for p in cond.parts)
    raise TypeError(f"unrenderable condition {cond!r}")


def render_value(value: ValueExpr) -> str:
    if isinstance(value, Literal):
        return value.text
    if isinstance(value, Keep):
        return value.var
    if isinstance(value, Choice):
        return "{" + ", ".join(value.values) + "}"
    raise TypeError(f"unrenderable value {value!r}")


# --- module structure ---------------------------------------------------

@dataclass(frozen=True)
class SmvVarDecl:
    name: str
    scalar_values: tuple[str, ...] | None = None  # None means boolean

    @property
    def is_boolean(self) -> bool:
        return self.scalar_values is None


@dataclass(frozen=True)
class SmvAssign:
    var: str
    init: ValueExpr
    cases: tuple[tuple[CondExpr, ValueExpr], ...]


@dataclass(frozen=True)
class SmvModule:
    vars: tuple[SmvVarDecl, ...]
    assigns: tuple[SmvAssign, ...]
    specs: tuple[str, ...] = field(default=())

    def var_decl(self, name: str) -> SmvVarDecl:
        for decl in self.vars:
            if decl.name == name:
                return decl
        raise ValueError(f"unknown variable {name!r}")

    @property
    def boolean_vars(self) -> set[str]:
        return {d.name for d in self.vars if d.is_boolean}


class SmvGenerationError(Exception):
    pass


class AtomMismatchError(Exception):
    """A property names atoms that are not boolean variables of the model."""

    def __init__(self, missing: list[str]):
        super().__init__("atoms missing from the model: " + ", ".join(missing))
        self.missing = missing


def generate_smv(model: ActivityModel) -> SmvModule:
    """Compile a valid model (cycles allowed) into its SMV module."""
    problems = validate(model)
    if problems:
        raise SmvGenerationError(
            "model is not well formed: " + "; ".join(str(p) for p in problems)
        )
    bad = sorted(n.id for n in model.nodes if n.id in SMV_RESERVED)
    if bad:
        raise SmvGenerationError(
            "node ids collide with reserved SMV words: " + ", ".join(bad)
        )

    kinds = {n.id: n.kind for n in model.nodes}

    def guard_values(decision_id: str) -> tuple[str, ...]:
        return tuple(
            synthetic_guard(decision_id, e.target) for e in model.outgoing(decision_id)
        )

    def trigger(edge) -> CondExpr:
        if kinds[edge.source] is NodeKind.DECISION:
            return GuardEq(edge.source, synthetic_guard(edge.source, edge.target))
        return VarTrue(edge.source)

    var_decls: list[SmvVarDecl] = []
    assigns: list[SmvAssign] = []
    for node in model.nodes:
        incoming = model.incoming(node.id)
        triggers = [trigger(e) for e in incoming]
        if node.kind is NodeKind.INITIAL:
            var_decls.append(SmvVarDecl(node.id))
            assigns.append(
                SmvAssign(
                    node.id,
                    Literal("TRUE"),
                    (
                        (VarTrue(node.id), Literal("FALSE")),
                        (ConstTrue(), Keep(node.id)),
                    ),
                )
            )
        elif node.kind is NodeKind.DECISION:
            values = ("undetermined",) + guard_values(node.id)
            var_decls.append(SmvVarDecl(node.id, values))
            fire = triggers[0] if len(triggers) == 1 else AndCond(tuple(triggers))
            assigns.append(
                SmvAssign(
                    node.id,
                    Literal("undetermined"),
                    (
                        (fire, Choice(guard_values(node.id))),
                        (NotUndetermined(node.id), Literal("undetermined")),
                        (ConstTrue(), Keep(node.id)),
                    ),
                )
            )
        else:
            var_decls.append(SmvVarDecl(node.id))
            if node.kind is NodeKind.MERGE:
                fire = triggers[0] if len(triggers) == 1 else OrCond(tuple(triggers))
            else:
                fire = triggers[0] if len(triggers) == 1 else AndCond(tuple(triggers))
            assigns.append(
                SmvAssign(
                    node.id,
                    Literal("FALSE"),
                    (
                        (fire, Literal("TRUE")),
                        (VarTrue(node.id), Literal("FALSE")),
                        (ConstTrue(), Keep(node.id)),
                    ),
                )
            )
    return SmvModule(tuple(var_decls), tuple(assigns))


def render_smv(module: SmvModule) -> str:
    """Byte-deterministic rendering: MODULE main, VAR, ASSIGN, then any
    LTLSPEC lines. LF endings throughout."""
    lines = ["MODULE main", "VAR"]
    for decl in module.vars:
        if decl.is_boolean:
            lines.append(f"    {decl.name} : boolean;")
        else:
            lines.append(f"    {decl.name} : {{{', '.join(decl.scalar_values)}}};")
    lines.append("ASSIGN")
    for assign in module.assigns:
        lines.append(f"init({assign.var}) := {render_value(assign.init)};")
        lines.append(f"next({assign.var}) := case")
        for cond, value in assign.cases:
            lines.append(f"    {render_cond(cond)} : {render_value(value)};")
        lines.append("esac;")
    for spec in module.specs:
        lines.append(spec.rstrip("\n"))
    return "\n".join(lines) + "\n"


def bundle_check_file(low_model: ActivityModel, high_properties) -> str:
    """Single .smv text combining the low-level module with the high-level
    LTLSPEC lines; raises AtomMismatchError when a property atom names no
    boolean variable of the low-level model."""
    module = generate_smv(low_model)
    booleans = module.boolean_vars
    missing: list[str] = []
    for prop in high_properties:
        formula = prop.formula if isinstance(prop, ltl.GeneratedProperty) else prop
        for atom in sorted(ltl.atoms(formula)):
            if atom not in booleans and atom not in missing:
                missing.append(atom)
    if missing:
        raise AtomMismatchError(missing)
    spec_lines = tuple(
        line for line in ltl.render_ltlspec(high_properties).splitlines()
    )
    return render_smv(SmvModule(module.vars, module.assigns, spec_lines))


# --- minimal reader ------------------------------------------------------

class SmvParseError(Exception):
    pass


def parse_smv(text: str) -> SmvModule:
    """Reader for the generator's own output (tests round-trip through it).
    Not a general SMV front end."""
    lines = [ln.rstrip() for ln in text.splitlines()]
    pos = 0

    def current() -> str:
        return lines[pos].strip() if pos < len(lines) else ""

    if current() != "MODULE main":
        raise SmvParseError(f"expected 'MODULE main', got {current()!r}")
    pos += 1
    if current() != "VAR":
        raise SmvParseError(f"expected 'VAR', got {current()!r}")
    pos += 1

    var_decls: list[SmvVarDecl] = []
    while pos < len(lines) and current() != "ASSIGN":
        line = current()
        pos += 1
        if not line:
            continue
        if not line.endswith(";") or " : " not in line:
            raise SmvParseError(f"bad variable declaration {line!r}")
        name, _, sort = line[:-1].partition(" : ")
        if sort == "boolean":
            var_decls.append(SmvVarDecl(name.strip()))
        elif sort.startswith("{") and sort.endswith("}"):
            values = tuple(v.strip() for v in sort[1:-1].split(","))
            var_decls.append(SmvVarDecl(name.strip(), values))
        else:
            raise SmvParseError(f"bad variable sort {sort!r}")
    if current() != "ASSIGN":
        raise SmvParseError("missing ASSIGN section")
    pos += 1

    assigns: list[SmvAssign] = []
    specs: list[str] = []
    while pos < len(lines):
        line = current()
        if not line:
            pos += 1
            continue
        if line.startswith("LTLSPEC"):
            specs.append(line)
            pos += 1
            continue
        if not line.startswith("init("):
            raise SmvParseError(f"expected init(...), got {line!r}")
        var, _, init_text = line[len("init(") :].partition(") := ")
        init_value = _parse_value(init_text.rstrip(";"), var)
        pos += 1
        header = current()
        if header != f"next({var}) := case":
            raise SmvParseError(f"expected next({var}) case block, got {header!r}")
        pos += 1
        cases: list[tuple[CondExpr, ValueExpr]] = []
        while current() != "esac;":
            if pos >= len(lines):
                raise SmvParseError(f"unterminated case block for {var!r}")
            arm = current().rstrip(";")
            cond_text, _, value_text = arm.rpartition(" : ")
            cases.append((_parse_cond(cond_text.strip()), _parse_value(value_text.strip(), var)))
            pos += 1
        pos += 1
        assigns.append(SmvAssign(var, init_value, tuple(cases)))
    return SmvModule(tuple(var_decls), tuple(assigns), tuple(specs))


def _parse_value(text: str, var: str) -> ValueExpr:
    if text.startswith("{") and text.endswith("}"):
        return Choice(tuple(v.strip() for v in text[1:-1].split(",")))
    if text == var:
        return Keep(var)
    return Literal(text)


def _parse_cond(text: str) -> CondExpr:
    if " | " in text:
        return OrCond(tuple(_parse_cond(p) for p in text.split(" | ")))
    if " & " in text:
        return AndCond(tuple(_parse_cond(p) for p in text.split(" & ")))
    if text.startswith("(") and text.endswith(")") and " = " in text:
        var, _, value = text[1:-1].partition(" = ")
        return GuardEq(var.strip(), value.strip())
    if text.endswith(" != undetermined"):
        return NotUndetermined(text[: -len(" != undetermined")].strip())
    if text == "TRUE":
        return ConstTrue()
    return VarTrue(text)
