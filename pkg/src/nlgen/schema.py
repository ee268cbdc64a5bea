"""Schema files: parsing, condition evaluation, and plan construction.

A schema is a transition network interpreted against input data: nodes
select content, arcs impose rhetorical structure.  The file format is
line-oriented, UTF-8, with '#' comments:

    schema <name>
    node <id> emit subject=<expr> verb=<lemma> [modal=<m>] [tense=<t>]
                   [adverb=<expr>] [condition=<node-id>]
                   complement=<expr>[, <expr>...]
    node <id> call <schema-name>
    node <id> end
    arc <from> -> <to> [when <condition>] [rel <sequence|elaboration|contrast>]

<expr> is a quoted literal or path(<dotted.path>); paths resolve inside
the data record tables.  Complement text starting with '@' references an
entity.  Conditions combine exists/eq/gt/lt/and/or/not with parentheses.
The entry node of a schema is its first declared node, and the default
arc relation is sequence.  A file may declare several schemas; `call`
nodes may target any schema in the same file.  An emit node's optional
condition=<node-id> names another emit node in the same schema whose
instantiated message becomes the "If ..." antecedent.

Traversal walks depth-first from the entry node, instantiating emit
templates and following every arc whose guard is true, in declaration
order.  Arcs labeled sequence splice their results into the surrounding
flow; elaboration and contrast arcs group consecutive same-labeled
results under one relation node, and `call` results form a subtree.  A
per-node visit budget (default 32) turns runaway cycles into errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import (
    DataError,
    MissingPathError,
    SchemaParseError,
    TraversalError,
    TypeMismatchError,
)
from . import ir

PREPOSITIONS = frozenset({
    "to", "in", "at", "on", "of", "for", "with", "from", "by", "about",
    "into", "over", "under", "after", "before", "near",
})

_DETERMINERS = {"a": "a", "an": "a", "the": "the"}


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Expr:
    kind: str  # "literal" | "path"
    value: str


@dataclass(frozen=True)
class Condition:
    op: str  # exists | eq | gt | lt | and | or | not
    path: str | None = None
    value: Any = None
    args: tuple["Condition", ...] = ()


@dataclass(frozen=True)
class MessageTemplate:
    subject: Expr
    verb: str
    complements: tuple[Expr, ...] = ()
    tense: str = "present"
    modal: str | None = None
    adverb: Expr | None = None
    condition_node: str | None = None


@dataclass(frozen=True)
class SchemaNode:
    id: str
    kind: str  # "emit" | "call" | "end"
    template: MessageTemplate | None = None
    target: str | None = None


@dataclass(frozen=True)
class Arc:
    src: str
    dst: str
    guard: Condition | None = None
    rel: str = "sequence"


@dataclass(frozen=True)
class SchemaDef:
    name: str
    entry: str
    nodes: tuple[SchemaNode, ...]
    arcs: tuple[Arc, ...]
    # All schemas parsed from the same file, shared for call resolution.
    schema_set: dict = field(default_factory=dict, compare=False, repr=False)

    def node(self, node_id: str) -> SchemaNode:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise KeyError(node_id)


@dataclass(frozen=True)
class DataRecordSet:
    entities: dict[str, ir.Entity]
    records: dict[str, Any]


# ---------------------------------------------------------------------------
# Lexer

_SYMBOLS = ("->", "=", "(", ")", ",")


@dataclass(frozen=True)
class _Tok:
    kind: str  # ident | number | string | symbol
    value: Any
    line: int
    col: int


def _tokenize_line(text: str, line: int) -> list[_Tok]:
    toks: list[_Tok] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        if ch == "#":
            break
        col = i + 1
        if ch == '"':
            j = i + 1
            buf = []
            while j < n:
                if text[j] == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                    continue
                if text[j] == '"':
                    break
                buf.append(text[j])
                j += 1
            else:
                raise SchemaParseError("lexical error: unterminated string",
                                       line, col)
            toks.append(_Tok("string", "".join(buf), line, col))
            i = j + 1
            continue
        if text.startswith("->", i):
            toks.append(_Tok("symbol", "->", line, col))
            i += 2
            continue
        if ch in "=(),":
            toks.append(_Tok("symbol", ch, line, col))
            i += 1
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            lit = text[i:j]
            try:
                value = float(lit) if "." in lit else int(lit)
            except ValueError:
                raise SchemaParseError(
                    f"lexical error: bad number {lit!r}", line, col)
            toks.append(_Tok("number", value, line, col))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] in "_."):
                j += 1
            toks.append(_Tok("ident", text[i:j], line, col))
            i = j
            continue
        raise SchemaParseError(f"lexical error: unexpected character "
                               f"{ch!r}", line, col)
    return toks


# ---------------------------------------------------------------------------
# Parser

_REL_LABELS = set(ir.RELATION_LABELS)
_TENSES = set(ir.TENSES)
_MODALS = set(ir.MODALS)


class _LineParser:
    """Recursive-descent parser over one statement's tokens."""

    def __init__(self, toks: list[_Tok], line: int):
        self.toks = toks
        self.line = line
        self.pos = 0

    def done(self) -> bool:
        return self.pos >= len(self.toks)

    def peek(self) -> _Tok | None:
        return self.toks[self.pos] if not self.done() else None

    def _fail(self, message: str) -> SchemaParseError:
        col = self.toks[self.pos].col if not self.done() \
            else (self.toks[-1].col + 1 if self.toks else 1)
        return SchemaParseError(message, self.line, col)

    def take(self, kind: str, value: Any = None) -> _Tok:
        tok = self.peek()
        if tok is None or tok.kind != kind or \
                (value is not None and tok.value != value):
            want = value if value is not None else kind
            raise self._fail(f"expected {want!r}")
        self.pos += 1
        return tok

    def take_ident(self) -> str:
        return self.take("ident").value

    def expr(self) -> Expr:
        tok = self.peek()
        if tok is None:
            raise self._fail("expected a quoted literal or path(...)")
        if tok.kind == "string":
            self.pos += 1
            return Expr("literal", tok.value)
        if tok.kind == "ident" and tok.value == "path":
            self.pos += 1
            self.take("symbol", "(")
            path = self.take_ident()
            self.take("symbol", ")")
            return Expr("path", path)
        raise self._fail("expected a quoted literal or path(...)")

    def condition(self) -> Condition:
        op_tok = self.take("ident")
        op = op_tok.value
        if op not in ("exists", "eq", "gt", "lt", "and", "or", "not"):
            raise SchemaParseError(f"unknown condition operator {op!r}",
                                   self.line, op_tok.col)
        self.take("symbol", "(")
        if op == "exists":
            path = self.take_ident()
            self.take("symbol", ")")
            return Condition(op="exists", path=path)
        if op in ("eq", "gt", "lt"):
            path = self.take_ident()
            self.take("symbol", ",")
            value = self._literal(numeric_only=op in ("gt", "lt"))
            self.take("symbol", ")")
            return Condition(op=op, path=path, value=value)
        if op == "not":
            arg = self.condition()
            self.take("symbol", ")")
            return Condition(op="not", args=(arg,))
        args = [self.condition()]
        while self.peek() is not None and self.peek().value == ",":
            self.take("symbol", ",")
            args.append(self.condition())
        self.take("symbol", ")")
        if len(args) < 2:
            raise SchemaParseError(f"{op}(...) needs at least two arguments",
                                   self.line, op_tok.col)
        return Condition(op=op, args=tuple(args))

    def _literal(self, numeric_only: bool = False) -> Any:
        tok = self.peek()
        if tok is None:
            raise self._fail("expected a literal")
        if tok.kind == "number":
            self.pos += 1
            return tok.value
        if numeric_only:
            raise self._fail("expected a number")
        if tok.kind == "string":
            self.pos += 1
            return tok.value
        if tok.kind == "ident" and tok.value in ("true", "false"):
            self.pos += 1
            return tok.value == "true"
        raise self._fail("expected a string, number, or true/false")


def _parse_emit_fields(p: _LineParser, node_id: str) -> MessageTemplate:
    fields: dict[str, Any] = {}
    complements: list[Expr] = []
    while not p.done():
        key_tok = p.take("ident")
        key = key_tok.value
        p.take("symbol", "=")
        if key == "subject":
            fields["subject"] = p.expr()
        elif key == "verb":
            tok = p.peek()
            if tok is not None and tok.kind == "string":
                p.pos += 1
                fields["verb"] = tok.value
            else:
                fields["verb"] = p.take_ident()
        elif key == "tense":
            tense = p.take_ident()
            if tense not in _TENSES:
                raise SchemaParseError(f"unknown tense {tense!r}",
                                       p.line, key_tok.col)
            fields["tense"] = tense
        elif key == "modal":
            modal = p.take_ident()
            if modal not in _MODALS:
                raise SchemaParseError(f"unknown modal {modal!r}",
                                       p.line, key_tok.col)
            fields["modal"] = modal
        elif key == "adverb":
            fields["adverb"] = p.expr()
        elif key == "condition":
            fields["condition_node"] = p.take_ident()
        elif key == "complement":
            complements.append(p.expr())
            while p.peek() is not None and p.peek().value == ",":
                p.take("symbol", ",")
                complements.append(p.expr())
        else:
            raise SchemaParseError(
                f"unknown emit field {key!r}", p.line, key_tok.col)
    if "subject" not in fields:
        raise SchemaParseError(f"node {node_id!r}: emit needs subject=",
                               p.line, 1)
    if "verb" not in fields:
        raise SchemaParseError(f"node {node_id!r}: emit needs verb=",
                               p.line, 1)
    return MessageTemplate(complements=tuple(complements), **fields)


class _SchemaBuilder:
    def __init__(self, name: str, line: int):
        self.name = name
        self.line = line
        self.nodes: dict[str, SchemaNode] = {}
        self.arcs: list[Arc] = []


def _parse_statements(source: str) -> list[_SchemaBuilder]:
    builders: list[_SchemaBuilder] = []
    current: _SchemaBuilder | None = None
    seen_names: set[str] = set()
    for lineno, raw in enumerate(source.splitlines(), start=1):
        toks = _tokenize_line(raw, lineno)
        if not toks:
            continue
        p = _LineParser(toks, lineno)
        head = p.take("ident")
        if head.value == "schema":
            name = p.take_ident()
            if not p.done():
                raise p._fail("unexpected text after schema name")
            if name in seen_names:
                raise SchemaParseError(f"duplicate schema {name!r}",
                                       lineno, head.col)
            seen_names.add(name)
            current = _SchemaBuilder(name, lineno)
            builders.append(current)
            continue
        if current is None:
            raise SchemaParseError("expected schema header", lineno,
                                   head.col)
        if head.value == "node":
            node_id = p.take_ident()
            if node_id in current.nodes:
                raise SchemaParseError(f"duplicate node id {node_id!r}",
                                       lineno, head.col)
            kind = p.take_ident()
            if kind == "emit":
                template = _parse_emit_fields(p, node_id)
                node = SchemaNode(node_id, "emit", template=template)
            elif kind == "call":
                target = p.take_ident()
                if not p.done():
                    raise p._fail("unexpected text after call target")
                node = SchemaNode(node_id, "call", target=target)
            elif kind == "end":
                if not p.done():
                    raise p._fail("unexpected text after end")
                node = SchemaNode(node_id, "end")
            else:
                raise SchemaParseError(
                    f"unknown node kind {kind!r} (expected emit, call, "
                    f"or end)", lineno, head.col)
            current.nodes[node_id] = node
        elif head.value == "arc":
            src = p.take_ident()
            p.take("symbol", "->")
            dst = p.take_ident()
            guard = None
            rel = "sequence"
            while not p.done():
                kw = p.take("ident")
                if kw.value == "when":
                    guard = p.condition()
                elif kw.value == "rel":
                    rel = p.take_ident()
                    if rel not in _REL_LABELS:
                        raise SchemaParseError(
                            f"unknown relation label {rel!r}",
                            lineno, kw.col)
                else:
                    raise SchemaParseError(
                        f"expected 'when' or 'rel', got {kw.value!r}",
                        lineno, kw.col)
            current.arcs.append(Arc(src, dst, guard, rel))
        else:
            raise SchemaParseError(
                f"expected 'schema', 'node', or 'arc', got "
                f"{head.value!r}", lineno, head.col)
    if not builders:
        raise SchemaParseError("expected schema header", 1, 1)
    return builders


def _check_builder(b: _SchemaBuilder, all_names: set[str]) -> None:
    if not b.nodes:
        raise SchemaParseError(f"schema {b.name!r} declares no nodes",
                               b.line, 1)
    unguarded: dict[str, int] = {}
    for arc in b.arcs:
        for endpoint in (arc.src, arc.dst):
            if endpoint not in b.nodes:
                raise SchemaParseError(
                    f"arc endpoint {endpoint!r} is not a declared node",
                    b.line, 1)
        if b.nodes[arc.src].kind == "end":
            raise SchemaParseError(
                f"end node {arc.src!r} has an outgoing arc", b.line, 1)
        if arc.guard is None:
            unguarded[arc.src] = unguarded.get(arc.src, 0) + 1
            if unguarded[arc.src] > 1:
                raise SchemaParseError(
                    f"node {arc.src!r} has more than one unguarded arc",
                    b.line, 1)
    for node in b.nodes.values():
        if node.kind == "call" and node.target not in all_names:
            raise SchemaParseError(
                f"call target {node.target!r} is not a schema in this "
                f"file", b.line, 1)
        if node.kind == "emit" and node.template.condition_node:
            target = b.nodes.get(node.template.condition_node)
            if target is None:
                raise SchemaParseError(
                    f"condition node {node.template.condition_node!r} is "
                    f"not declared in schema {b.name!r}", b.line, 1)
            if target.kind != "emit":
                raise SchemaParseError(
                    f"condition node {target.id!r} must be an emit node",
                    b.line, 1)
            if target.template.condition_node:
                raise SchemaParseError(
                    f"condition node {target.id!r} has a condition of its "
                    f"own; conditions nest one level only", b.line, 1)


def parse_schema(source: str) -> SchemaDef:
    """Parse schema text; returns the first (entry) schema with the whole
    file's schema set attached for call resolution."""
    builders = _parse_statements(source)
    all_names = {b.name for b in builders}
    shared: dict[str, SchemaDef] = {}
    for b in builders:
        _check_builder(b, all_names)
        definition = SchemaDef(
            name=b.name,
            entry=next(iter(b.nodes)),
            nodes=tuple(b.nodes.values()),
            arcs=tuple(b.arcs),
            schema_set=shared,
        )
        shared[b.name] = definition
    return next(iter(shared.values()))


# ---------------------------------------------------------------------------
# Canonical pretty-printer


def _print_expr(expr: Expr) -> str:
    if expr.kind == "path":
        return f"path({expr.value})"
    escaped = expr.value.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _print_literal(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    escaped = str(value).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def print_condition(cond: Condition) -> str:
    if cond.op == "exists":
        return f"exists({cond.path})"
    if cond.op in ("eq", "gt", "lt"):
        return f"{cond.op}({cond.path}, {_print_literal(cond.value)})"
    inner = ", ".join(print_condition(a) for a in cond.args)
    return f"{cond.op}({inner})"


def _print_node(node: SchemaNode) -> str:
    if node.kind == "end":
        return f"node {node.id} end"
    if node.kind == "call":
        return f"node {node.id} call {node.target}"
    t = node.template
    parts = [f"node {node.id} emit", f"subject={_print_expr(t.subject)}",
             f"verb={t.verb}"]
    if t.modal:
        parts.append(f"modal={t.modal}")
    if t.tense != "present":
        parts.append(f"tense={t.tense}")
    if t.adverb is not None:
        parts.append(f"adverb={_print_expr(t.adverb)}")
    if t.condition_node:
        parts.append(f"condition={t.condition_node}")
    if t.complements:
        exprs = ", ".join(_print_expr(e) for e in t.complements)
        parts.append(f"complement={exprs}")
    return " ".join(parts)


def print_schema(schema: SchemaDef) -> str:
    """Canonical text for a schema and every schema in its set; parsing
    the output reproduces the same definitions."""
    blocks = []
    definitions = list(schema.schema_set.values()) \
        if schema.schema_set else [schema]
    for definition in definitions:
        lines = [f"schema {definition.name}"]
        lines += [_print_node(n) for n in definition.nodes]
        for arc in definition.arcs:
            line = f"arc {arc.src} -> {arc.dst}"
            if arc.guard is not None:
                line += f" when {print_condition(arc.guard)}"
            if arc.rel != "sequence":
                line += f" rel {arc.rel}"
            lines.append(line)
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


# ---------------------------------------------------------------------------
# Data records and condition evaluation


def load_data(text: str) -> DataRecordSet:
    """Parse a data file: JSON object with "entities" and "records"."""
    import json

    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"data file is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise DataError("data file must be a JSON object")
    unknown = set(payload) - {"entities", "records"}
    if unknown:
        raise DataError(f"unknown top-level keys: {sorted(unknown)}")
    entities: dict[str, ir.Entity] = {}
    for eid, obj in payload.get("entities", {}).items():
        try:
            entities[eid] = ir.entity_from_obj(eid, obj)
        except Exception as exc:
            raise DataError(str(exc)) from exc
    records = payload.get("records", {})
    if not isinstance(records, dict):
        raise DataError('"records" must be an object')
    _check_entity_refs(records, entities)
    return DataRecordSet(entities=entities, records=records)


def _check_entity_refs(value: Any, entities: dict[str, ir.Entity]) -> None:
    if isinstance(value, str):
        ref = ir.entity_ref(value)
        if ref is not None and ref not in entities:
            raise DataError(f"record value references unknown entity "
                            f"{ref!r}")
    elif isinstance(value, dict):
        for v in value.values():
            _check_entity_refs(v, entities)
    elif isinstance(value, list):
        for v in value:
            _check_entity_refs(v, entities)


def resolve_path(records: Mapping[str, Any], path: str) -> Any:
    value: Any = records
    for segment in path.split("."):
        if not isinstance(value, Mapping) or segment not in value:
            raise MissingPathError(path)
        value = value[segment]
    return value


def eval_condition(cond: Condition, data: DataRecordSet) -> bool:
    """Evaluate an arc guard; missing paths and type mismatches are errors
    except under exists()."""
    if cond.op == "exists":
        try:
            resolve_path(data.records, cond.path)
            return True
        except MissingPathError:
            return False
    if cond.op == "not":
        return not eval_condition(cond.args[0], data)
    if cond.op == "and":
        return all(eval_condition(a, data) for a in cond.args)
    if cond.op == "or":
        return any(eval_condition(a, data) for a in cond.args)
    value = resolve_path(data.records, cond.path)
    literal = cond.value
    if cond.op == "eq":
        if isinstance(value, bool) != isinstance(literal, bool):
            raise TypeMismatchError(
                f"eq({cond.path}, ...): cannot compare "
                f"{type(value).__name__} with {type(literal).__name__}")
        if isinstance(value, bool):
            return value == literal
        if isinstance(value, (int, float)) and \
                isinstance(literal, (int, float)):
            return value == literal
        if isinstance(value, str) and isinstance(literal, str):
            return value == literal
        raise TypeMismatchError(
            f"eq({cond.path}, ...): cannot compare "
            f"{type(value).__name__} with {type(literal).__name__}")
    # gt / lt: numbers only
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeMismatchError(
            f"{cond.op}({cond.path}, ...): path value is "
            f"{type(value).__name__}, not a number")
    if cond.op == "gt":
        return value > literal
    return value < literal


# ---------------------------------------------------------------------------
# Template instantiation and traversal


def _parse_complement_text(text: str) -> ir.ComplementPhrase:
    text = text.strip()
    if ir.entity_ref(text) is not None:
        return ir.ComplementPhrase(kind="entity-reference", head=text)
    words = text.split()
    if not words:
        raise TraversalError("empty complement text")
    preposition = None
    if len(words) > 1 and words[0].lower() in PREPOSITIONS:
        preposition = words.pop(0).lower()
    determiner = None
    if len(words) > 1 and words[0].lower() in _DETERMINERS:
        determiner = _DETERMINERS[words.pop(0).lower()]
    head = words[-1]
    premodifiers = tuple(words[:-1])
    if ir.entity_ref(head) is not None and not premodifiers:
        return ir.ComplementPhrase(
            kind="prepositional-phrase" if preposition else
            "entity-reference",
            head=head, determiner=determiner, preposition=preposition)
    kind = "prepositional-phrase" if preposition else "noun-phrase"
    return ir.ComplementPhrase(kind=kind, head=head, determiner=determiner,
                               premodifiers=premodifiers,
                               preposition=preposition)


def _resolve_expr(expr: Expr, data: DataRecordSet) -> str:
    if expr.kind == "literal":
        return expr.value
    value = resolve_path(data.records, expr.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _first_record_key(template: MessageTemplate) -> str:
    exprs = [template.subject, *template.complements]
    if template.adverb is not None:
        exprs.append(template.adverb)
    for expr in exprs:
        if expr.kind == "path":
            return expr.value.split(".")[0]
    return ""


def instantiate_template(template: MessageTemplate, data: DataRecordSet,
                         condition: ir.Message | None = None) -> ir.Message:
    """Fill a message template against the data records."""
    subject = _resolve_expr(template.subject, data)
    if subject.startswith(ir.ENTITY_MARKER):
        subject = subject[len(ir.ENTITY_MARKER):]
    complements = tuple(
        _parse_complement_text(_resolve_expr(e, data))
        for e in template.complements)
    adverb = None
    if template.adverb is not None:
        adverb = _resolve_expr(template.adverb, data)
    return ir.Message(
        subject=subject,
        verb=template.verb,
        complements=complements,
        tense=template.tense,
        modal=template.modal,
        adverb=adverb,
        condition=condition,
        source_key=_first_record_key(template),
    )


def _instantiate_node(schema: SchemaDef, node: SchemaNode,
                      data: DataRecordSet) -> ir.Message:
    template = node.template
    condition = None
    if template.condition_node:
        cond_node = schema.node(template.condition_node)
        condition = instantiate_template(cond_node.template, data)
    try:
        return instantiate_template(template, data, condition)
    except MissingPathError as exc:
        raise TraversalError(
            f"node {node.id!r}: template instantiation failed: {exc}"
        ) from exc


def traverse(schema: SchemaDef, data: DataRecordSet,
             max_visits: int = 32) -> ir.DocumentPlan:
    """Interpret a schema over the data records, producing a document plan.

    Deterministic: equal schema and data always yield a structurally
    equal plan.
    """
    visits: dict[tuple[str, str], int] = {}

    def visit(definition: SchemaDef, node_id: str) -> list[ir.PlanNode]:
        key = (definition.name, node_id)
        visits[key] = visits.get(key, 0) + 1
        if visits[key] > max_visits:
            raise TraversalError(
                f"visit limit ({max_visits}) exceeded at node "
                f"{node_id!r} in schema {definition.name!r}; probable "
                f"schema cycle")
        node = definition.node(node_id)
        pieces: list[ir.PlanNode] = []
        if node.kind == "emit":
            message = _instantiate_node(definition, node, data)
            pieces.append(ir.PlanNode(kind="leaf", message=message))
        elif node.kind == "call":
            sub = definition.schema_set.get(node.target)
            if sub is None:
                raise TraversalError(
                    f"node {node.id!r}: unresolved sub-schema "
                    f"{node.target!r}")
            sub_pieces = visit(sub, sub.entry)
            if len(sub_pieces) == 1:
                pieces.append(sub_pieces[0])
            elif sub_pieces:
                pieces.append(ir.PlanNode(kind="relation", label="sequence",
                                          children=tuple(sub_pieces)))
        # Arcs in declaration order; every true guard is taken.
        taken: list[tuple[str, list[ir.PlanNode]]] = []
        for arc in definition.arcs:
            if arc.src != node_id:
                continue
            if arc.guard is not None and not eval_condition(arc.guard, data):
                continue
            taken.append((arc.rel, visit(definition, arc.dst)))
        i = 0
        while i < len(taken):
            rel = taken[i][0]
            combined: list[ir.PlanNode] = []
            while i < len(taken) and taken[i][0] == rel:
                combined.extend(taken[i][1])
                i += 1
            if not combined:
                continue
            if rel == "sequence":
                pieces.extend(combined)
            else:
                pieces.append(ir.PlanNode(kind="relation", label=rel,
                                          children=tuple(combined)))
        return pieces

    pieces = visit(schema, schema.entry)
    root = None
    if pieces:
        root = ir.PlanNode(kind="relation", label="sequence",
                           children=tuple(pieces))
    return ir.DocumentPlan(
        root=root,
        entities=dict(data.entities),
        record_keys=tuple(sorted(data.records)),
    )
