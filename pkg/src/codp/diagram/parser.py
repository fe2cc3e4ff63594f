"""Parser for the .codp diagram language.

Line-oriented; ``#`` starts a comment that runs to end of line. Statement
forms:

    node NAME bind NAME fun [p:desc, ...] res [p:desc, ...]
    edge NODE.PORT -> NODE.PORT
    loop NODE.PORT -> NODE.PORT
    param NAME domain DESC kernel|fn NAME -> NODE, NODE, ...
    query NAME fix-fun [NODE.PORT=VALUE, ...]

Descriptors look like ``real(m/s)``, ``named(weather)``, or
``finite(a,b,c)``. Values are numbers or bare labels. Syntax problems raise
:class:`~codp.errors.DiagramSyntaxError` carrying line and column.
"""

from __future__ import annotations

import re
from typing import Any

from ..errors import DiagramSyntaxError
from .ast import DiagramAST, EdgeDecl, NodeDecl, ParamDecl, PortDecl, QueryDecl

_ARROW = "->"
_PUNCT = set("[](),:=.")
_WORD_RE = re.compile(r"[^\s\[\](),:=.#]+")
# Numbers may contain '.', which is otherwise ref punctuation; they win only
# when not glued to a following identifier or unit character, so "50g" and
# the ratio unit "1/s" each stay one word.
_NUM_RE = re.compile(r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?(?![A-Za-z_0-9./])")

_KEYWORDS = ("node", "edge", "loop", "param", "query")


class _Token:
    __slots__ = ("kind", "text", "col")

    def __init__(self, kind: str, text: str, col: int) -> None:
        self.kind = kind  # "word", "punct", "arrow", "end"
        self.text = text
        self.col = col


def _tokenize(line: str, lineno: int) -> list[_Token]:
    out: list[_Token] = []
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch == "#":
            break
        if ch.isspace():
            i += 1
            continue
        if line.startswith(_ARROW, i):
            out.append(_Token("arrow", _ARROW, i + 1))
            i += 2
            continue
        m = _NUM_RE.match(line, i)
        if m is not None:
            out.append(_Token("word", m.group(0), i + 1))
            i = m.end()
            continue
        if ch in _PUNCT:
            out.append(_Token("punct", ch, i + 1))
            i += 1
            continue
        m = _WORD_RE.match(line, i)
        if m is None:
            raise DiagramSyntaxError(f"unexpected character {ch!r}",
                                     line=lineno, col=i + 1)
        out.append(_Token("word", m.group(0), i + 1))
        i = m.end()
    out.append(_Token("end", "", n + 1))
    return out


class _Cursor:
    def __init__(self, tokens: list[_Token], lineno: int) -> None:
        self.tokens = tokens
        self.pos = 0
        self.lineno = lineno

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def fail(self, message: str, tok: _Token | None = None) -> None:
        tok = tok or self.peek()
        raise DiagramSyntaxError(message, line=self.lineno, col=tok.col)

    def expect_word(self, what: str) -> _Token:
        tok = self.next()
        if tok.kind != "word":
            self.fail(f"expected {what}", tok)
        return tok

    def expect_punct(self, ch: str) -> _Token:
        tok = self.next()
        if not (tok.kind == "punct" and tok.text == ch):
            self.fail(f"expected {ch!r}", tok)
        return tok

    def expect_arrow(self) -> None:
        tok = self.next()
        if tok.kind != "arrow":
            self.fail("expected '->'", tok)

    def expect_end(self) -> None:
        tok = self.peek()
        if tok.kind != "end":
            self.fail("unexpected trailing input", tok)

    def expect_keyword(self, word: str) -> None:
        tok = self.next()
        if not (tok.kind == "word" and tok.text == word):
            self.fail(f"expected {word!r}", tok)


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*\Z")


def _parse_name(cur: _Cursor, what: str) -> str:
    tok = cur.expect_word(what)
    if _NAME_RE.match(tok.text) is None:
        cur.fail(f"invalid {what} {tok.text!r}", tok)
    return tok.text


def _parse_desc(cur: _Cursor) -> str:
    kind = _parse_name(cur, "descriptor kind")
    cur.expect_punct("(")
    args: list[str] = []
    if not (cur.peek().kind == "punct" and cur.peek().text == ")"):
        while True:
            args.append(cur.expect_word("descriptor argument").text)
            tok = cur.peek()
            if tok.kind == "punct" and tok.text == ",":
                cur.next()
                continue
            break
    cur.expect_punct(")")
    return f"{kind}({','.join(args)})"


def _parse_port_list(cur: _Cursor, lineno: int) -> tuple[PortDecl, ...]:
    cur.expect_punct("[")
    ports: list[PortDecl] = []
    seen: set[str] = set()
    if not (cur.peek().kind == "punct" and cur.peek().text == "]"):
        while True:
            name_tok = cur.expect_word("port name")
            if _NAME_RE.match(name_tok.text) is None:
                cur.fail(f"invalid port name {name_tok.text!r}", name_tok)
            if name_tok.text in seen:
                cur.fail(f"duplicate port {name_tok.text!r}", name_tok)
            seen.add(name_tok.text)
            cur.expect_punct(":")
            desc = _parse_desc(cur)
            ports.append(PortDecl(name_tok.text, desc))
            tok = cur.peek()
            if tok.kind == "punct" and tok.text == ",":
                cur.next()
                continue
            break
    cur.expect_punct("]")
    return tuple(ports)


def _parse_ref(cur: _Cursor) -> tuple[str, str]:
    node = _parse_name(cur, "node name")
    cur.expect_punct(".")
    port = _parse_name(cur, "port name")
    return node, port


def _parse_value(cur: _Cursor) -> Any:
    tok = cur.next()
    if tok.kind != "word":
        cur.fail("expected a value", tok)
    try:
        return float(tok.text)
    except ValueError:
        return tok.text


def _parse_node(cur: _Cursor) -> NodeDecl:
    name = _parse_name(cur, "node name")
    cur.expect_keyword("bind")
    binding = _parse_name(cur, "binding name")
    cur.expect_keyword("fun")
    fun_ports = _parse_port_list(cur, cur.lineno)
    cur.expect_keyword("res")
    res_ports = _parse_port_list(cur, cur.lineno)
    cur.expect_end()
    return NodeDecl(name, binding, fun_ports, res_ports, line=cur.lineno)


def _parse_edge(cur: _Cursor) -> EdgeDecl:
    src_node, src_port = _parse_ref(cur)
    cur.expect_arrow()
    dst_node, dst_port = _parse_ref(cur)
    cur.expect_end()
    return EdgeDecl(src_node, src_port, dst_node, dst_port, line=cur.lineno)


def _parse_param(cur: _Cursor) -> ParamDecl:
    name = _parse_name(cur, "parameter name")
    cur.expect_keyword("domain")
    domain_desc = _parse_desc(cur)
    kind_tok = cur.expect_word("'kernel' or 'fn'")
    if kind_tok.text not in ("kernel", "fn"):
        cur.fail("expected 'kernel' or 'fn'", kind_tok)
    binding = _parse_name(cur, "binding name")
    cur.expect_arrow()
    targets = [_parse_name(cur, "target node")]
    while cur.peek().kind == "punct" and cur.peek().text == ",":
        cur.next()
        targets.append(_parse_name(cur, "target node"))
    cur.expect_end()
    if len(set(targets)) != len(targets):
        cur.fail("duplicate target node")
    return ParamDecl(name, domain_desc, kind_tok.text, binding,
                     tuple(targets), line=cur.lineno)


def _parse_query(cur: _Cursor) -> QueryDecl:
    name = _parse_name(cur, "query name")
    cur.expect_keyword("fix-fun")
    cur.expect_punct("[")
    assignments: list[tuple[str, Any]] = []
    seen: set[str] = set()
    if not (cur.peek().kind == "punct" and cur.peek().text == "]"):
        while True:
            node, port = _parse_ref(cur)
            ref = f"{node}.{port}"
            if ref in seen:
                cur.fail(f"duplicate assignment for {ref!r}")
            seen.add(ref)
            cur.expect_punct("=")
            assignments.append((ref, _parse_value(cur)))
            tok = cur.peek()
            if tok.kind == "punct" and tok.text == ",":
                cur.next()
                continue
            break
    cur.expect_punct("]")
    cur.expect_end()
    return QueryDecl(name, tuple(assignments), line=cur.lineno)


def parse_diagram(text: str) -> DiagramAST:
    """Parse diagram source text into a canonical :class:`DiagramAST`."""
    nodes: list[NodeDecl] = []
    edges: list[EdgeDecl] = []
    loops: list[EdgeDecl] = []
    params: list[ParamDecl] = []
    queries: list[QueryDecl] = []
    node_names: set[str] = set()
    param_names: set[str] = set()
    query_names: set[str] = set()
    edge_keys: set[tuple] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokenize(raw, lineno)
        cur = _Cursor(tokens, lineno)
        head = cur.peek()
        if head.kind == "end":
            continue
        if head.kind != "word" or head.text not in _KEYWORDS:
            cur.fail(f"expected one of {', '.join(_KEYWORDS)}", head)
        cur.next()
        if head.text == "node":
            decl = _parse_node(cur)
            if decl.name in node_names:
                raise DiagramSyntaxError(f"duplicate node {decl.name!r}",
                                         line=lineno, col=head.col)
            node_names.add(decl.name)
            nodes.append(decl)
        elif head.text in ("edge", "loop"):
            decl = _parse_edge(cur)
            key = (head.text, decl.src, decl.dst)
            if key in edge_keys:
                raise DiagramSyntaxError(
                    f"duplicate {head.text} {decl.src} -> {decl.dst}",
                    line=lineno, col=head.col)
            edge_keys.add(key)
            (loops if head.text == "loop" else edges).append(decl)
        elif head.text == "param":
            decl = _parse_param(cur)
            if decl.name in param_names:
                raise DiagramSyntaxError(f"duplicate param {decl.name!r}",
                                         line=lineno, col=head.col)
            param_names.add(decl.name)
            params.append(decl)
        else:
            decl = _parse_query(cur)
            if decl.name in query_names:
                raise DiagramSyntaxError(f"duplicate query {decl.name!r}",
                                         line=lineno, col=head.col)
            query_names.add(decl.name)
            queries.append(decl)

    return DiagramAST(nodes, edges, loops, params, queries)
