"""Parsers for the textual model DSL and the JSON interchange format.

DSL grammar (line oriented, // comments):

    model <Name> { (node-decl | edge-decl)* }
    node-decl := (initial|final|action|fork|join|decision|merge) <Id> ;
    edge-decl := <Id> -> <Id> ('[' guard-text ']')? ;

Semicolons separate declarations; the one before the closing brace may be
omitted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .model import ActivityModel, Edge, ID_PATTERN, Node, NodeKind, validate

NODE_KEYWORDS = {k.value for k in NodeKind}


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseError:
    """One parse or validation failure, located by source span (DSL input)
    or JSON pointer (JSON input)."""

    message: str
    span: SourceSpan | None = None
    pointer: str | None = None
    expected: tuple[str, ...] | None = None

    def __str__(self) -> str:
        where = str(self.span) if self.span else (self.pointer or "?")
        return f"{where}: {self.message}"


class IngestError(Exception):
    """Raised by the convenience loaders when a parse produced errors."""

    def __init__(self, errors: list[ParseError]):
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = errors


@dataclass(frozen=True)
class _Token:
    kind: str  # 'word', 'arrow', 'punct', 'guard', 'eof'
    text: str
    line: int
    column: int


def _tokenize(text: str, origin: str) -> tuple[list[_Token], list[ParseError]]:
    tokens: list[_Token] = []
    errors: list[ParseError] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if text.startswith("->", i):
            tokens.append(_Token("arrow", "->", start_line, start_col))
            i += 2
            col += 2
            continue
        if ch in "{};":
            tokens.append(_Token("punct", ch, start_line, start_col))
            i += 1
            col += 1
            continue
        if ch == "[":
            j = text.find("]", i)
            if j == -1 or "\n" in text[i:j]:
                errors.append(
                    ParseError("unterminated guard label", SourceSpan(origin, start_line, start_col))
                )
                while i < n and text[i] != "\n":
                    i += 1
                continue
            tokens.append(_Token("guard", text[i + 1 : j].strip(), start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isalnum() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("word", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        errors.append(
            ParseError(f"unexpected character {ch!r}", SourceSpan(origin, start_line, start_col))
        )
        i += 1
        col += 1
    tokens.append(_Token("eof", "", line, col))
    return tokens, errors


class _DslParser:
    def __init__(self, tokens: list[_Token], origin: str):
        self.tokens = tokens
        self.origin = origin
        self.pos = 0
        self.errors: list[ParseError] = []
        self.nodes: list[Node] = []
        self.edges: list[Edge] = []
        self.edge_spans: list[SourceSpan] = []
        self.node_spans: dict[str, SourceSpan] = {}
        self.model_name = ""

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def span(self, tok: _Token) -> SourceSpan:
        return SourceSpan(self.origin, tok.line, tok.column)

    def fail(self, tok: _Token, message: str, expected: tuple[str, ...] | None = None) -> None:
        self.errors.append(ParseError(message, self.span(tok), expected=expected))

    def expect_word(self, what: str) -> _Token | None:
        tok = self.take()
        if tok.kind != "word":
            self.fail(tok, f"expected {what}, got {tok.text or 'end of input'!r}", (what,))
            return None
        return tok

    def expect_punct(self, text: str) -> bool:
        tok = self.peek()
        if tok.kind == "punct" and tok.text == text:
            self.take()
            return True
        self.fail(tok, f"expected {text!r}, got {tok.text or 'end of input'!r}", (text,))
        return False

    def parse(self) -> None:
        tok = self.take()
        if tok.kind != "word" or tok.text != "model":
            self.fail(tok, "expected 'model'", ("model",))
            return
        name = self.expect_word("model name")
        if name is None:
            return
        self.model_name = name.text
        if not self.expect_punct("{"):
            return
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                self.fail(tok, "expected '}' before end of input", ("}",))
                return
            if tok.kind == "punct" and tok.text == "}":
                self.take()
                break
            if tok.kind == "punct" and tok.text == ";":
                self.take()  # stray separator
                continue
            if tok.kind == "word" and tok.text in NODE_KEYWORDS:
                self.parse_node_decl()
            elif tok.kind == "word":
                self.parse_edge_decl()
            else:
                self.fail(tok, f"expected a declaration, got {tok.text!r}")
                self.take()
        tok = self.peek()
        if tok.kind != "eof":
            self.fail(tok, f"unexpected input after '}}': {tok.text!r}")

    def end_decl(self) -> None:
        tok = self.peek()
        if tok.kind == "punct" and tok.text == ";":
            self.take()
        elif not (tok.kind == "punct" and tok.text == "}"):
            self.fail(tok, f"expected ';', got {tok.text or 'end of input'!r}", (";",))

    def parse_node_decl(self) -> None:
        kind_tok = self.take()
        kind = NodeKind.from_string(kind_tok.text)
        id_tok = self.expect_word("node id")
        if id_tok is None:
            return
        if not ID_PATTERN.match(id_tok.text):
            self.fail(id_tok, f"id {id_tok.text!r} is not a legal identifier")
        elif id_tok.text in self.node_spans:
            self.fail(id_tok, f"duplicate node id {id_tok.text!r}")
        else:
            self.node_spans[id_tok.text] = self.span(id_tok)
            self.nodes.append(Node(id_tok.text, kind))
        self.end_decl()

    def parse_edge_decl(self) -> None:
        src_tok = self.take()
        tok = self.peek()
        if not (tok.kind == "arrow"):
            self.fail(tok, f"expected '->', got {tok.text or 'end of input'!r}", ("->",))
            self.end_decl()
            return
        self.take()
        dst_tok = self.expect_word("target node id")
        if dst_tok is None:
            return
        guard: str | None = None
        if self.peek().kind == "guard":
            guard = self.take().text
        for tok_ in (src_tok, dst_tok):
            if tok_.text not in self.node_spans:
                self.fail(tok_, f"unknown node reference {tok_.text!r}")
        self.edges.append(Edge(src_tok.text, dst_tok.text, guard))
        self.edge_spans.append(self.span(src_tok))
        self.end_decl()


def parse_dsl(text: str, origin: str = "<string>") -> ActivityModel | list[ParseError]:
    """Parse DSL text into a validated model, or return every error found.

    Both syntax errors and well-formedness violations are reported, each
    carrying a source span.
    """
    tokens, errors = _tokenize(text, origin)
    parser = _DslParser(tokens, origin)
    parser.parse()
    errors.extend(parser.errors)
    if errors:
        return errors
    model = ActivityModel(parser.model_name, parser.nodes, parser.edges)
    problems = validate(model)
    if problems:
        return [_locate_violation(v, parser, origin) for v in problems]
    return model


def _locate_violation(violation, parser: _DslParser, origin: str) -> ParseError:
    span = SourceSpan(origin, 1, 1)
    if violation.node_id is not None and violation.node_id in parser.node_spans:
        span = parser.node_spans[violation.node_id]
    elif violation.edge is not None:
        for e, s in zip(parser.edges, parser.edge_spans):
            if (e.source, e.target) == violation.edge:
                span = s
                break
    return ParseError(str(violation), span)


def parse_json(text: str) -> ActivityModel | list[ParseError]:
    """Parse the JSON interchange format.

    Schema: {"name", "nodes": [{"id", "kind", "name"?}],
    "edges": [{"source", "target", "guard"?}]}. Unknown fields are
    rejected; errors carry JSON-pointer locations.
    """
    errors: list[ParseError] = []
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        return [ParseError(f"invalid JSON: {exc.msg}", pointer=f"line {exc.lineno}")]
    if not isinstance(doc, dict):
        return [ParseError("top-level value must be an object", pointer="/")]

    def check_fields(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
        for key in obj:
            if key not in allowed:
                errors.append(ParseError(f"unknown field {key!r}", pointer=f"{where}/{key}"))
        for key in required:
            if key not in obj:
                errors.append(ParseError(f"missing field {key!r}", pointer=where or "/"))

    check_fields(doc, {"name", "nodes", "edges"}, {"name", "nodes", "edges"}, "")
    name = doc.get("name")
    if "name" in doc and not isinstance(name, str):
        errors.append(ParseError("'name' must be a string", pointer="/name"))

    nodes: list[Node] = []
    raw_nodes = doc.get("nodes", [])
    if not isinstance(raw_nodes, list):
        errors.append(ParseError("'nodes' must be an array", pointer="/nodes"))
        raw_nodes = []
    seen_ids: set[str] = set()
    for i, item in enumerate(raw_nodes):
        where = f"/nodes/{i}"
        if not isinstance(item, dict):
            errors.append(ParseError("node must be an object", pointer=where))
            continue
        check_fields(item, {"id", "kind", "name"}, {"id", "kind"}, where)
        node_id = item.get("id")
        kind_text = item.get("kind")
        if not isinstance(node_id, str) or not ID_PATTERN.match(node_id):
            errors.append(ParseError(f"illegal node id {node_id!r}", pointer=f"{where}/id"))
            continue
        if node_id in seen_ids:
            errors.append(ParseError(f"duplicate node id {node_id!r}", pointer=f"{where}/id"))
            continue
        seen_ids.add(node_id)
        try:
            kind = NodeKind.from_string(kind_text if isinstance(kind_text, str) else "")
        except ValueError:
            errors.append(ParseError(f"unknown node kind {kind_text!r}", pointer=f"{where}/kind"))
            continue
        display = item.get("name", "")
        if "name" in item and not isinstance(display, str):
            errors.append(ParseError("'name' must be a string", pointer=f"{where}/name"))
            display = ""
        nodes.append(Node(node_id, kind, display))

    edges: list[Edge] = []
    raw_edges = doc.get("edges", [])
    if not isinstance(raw_edges, list):
        errors.append(ParseError("'edges' must be an array", pointer="/edges"))
        raw_edges = []
    for i, item in enumerate(raw_edges):
        where = f"/edges/{i}"
        if not isinstance(item, dict):
            errors.append(ParseError("edge must be an object", pointer=where))
            continue
        check_fields(item, {"source", "target", "guard"}, {"source", "target"}, where)
        src, dst = item.get("source"), item.get("target")
        ok = True
        for key, val in (("source", src), ("target", dst)):
            if not isinstance(val, str):
                errors.append(ParseError(f"'{key}' must be a string", pointer=f"{where}/{key}"))
                ok = False
            elif val not in seen_ids:
                errors.append(ParseError(f"unknown node reference {val!r}", pointer=f"{where}/{key}"))
                ok = False
        guard = item.get("guard")
        if "guard" in item and not isinstance(guard, str):
            errors.append(ParseError("'guard' must be a string", pointer=f"{where}/guard"))
            ok = False
        if ok:
            edges.append(Edge(src, dst, guard))

    if errors:
        return errors
    model = ActivityModel(name or "", nodes, edges)
    problems = validate(model)
    if problems:
        return [
            ParseError(str(v), pointer=f"/nodes" if v.node_id else "/edges") for v in problems
        ]
    return model


def print_dsl(model: ActivityModel) -> str:
    """Render a model as canonical DSL text; reparsing yields an equal model."""
    lines = [f"model {model.name} {{"]
    for n in model.nodes:
        lines.append(f"    {n.kind.value} {n.id};")
    if model.edges:
        lines.append("")
    for e in model.edges:
        guard = f" [{e.guard}]" if e.guard is not None else ""
        lines.append(f"    {e.source} -> {e.target}{guard};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_model(path: str) -> ActivityModel:
    """Read a model from a .behavior (DSL) or .json file; raise IngestError
    with located messages when the content does not parse or validate."""
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    if path.endswith(".json"):
        result = parse_json(text)
    else:
        result = parse_dsl(text, origin=path)
    if isinstance(result, list):
        raise IngestError(result)
    return result
