"""Parser for the supported XPath fragment.

Forward axes only (self, child, descendant, following-sibling), node tests
``name``, ``*``, ``text()``, ``node()``, and predicates built from paths,
``and``/``or``/``not()`` and the string tests ``=``, ``contains()`` and
``starts-with()`` against a literal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .errors import UnsupportedQueryError, XPathSyntaxError

AXES = ("self", "child", "descendant", "following-sibling")
_REJECTED_AXES = {
    "parent": "parent axis",
    "ancestor": "ancestor axis",
    "ancestor-or-self": "ancestor-or-self axis",
    "preceding": "preceding axis",
    "preceding-sibling": "preceding-sibling axis",
    "attribute": "attribute axis",
    "namespace": "namespace axis",
    "descendant-or-self": "descendant-or-self axis",
    "following": "following axis",
}
COMPARISONS = ("=", "contains", "starts-with")


@dataclass(frozen=True)
class NodeTest:
    kind: str                  # "name", "*", "text", "node"
    name: Optional[str] = None

    def __str__(self) -> str:
        if self.kind == "name":
            return self.name
        return {"*": "*", "text": "text()", "node": "node()"}[self.kind]


@dataclass(frozen=True)
class Step:
    axis: str
    test: NodeTest
    predicates: tuple = ()

    def __str__(self) -> str:
        return f"{self.axis}::{self.test}" + "".join(f"[{p}]" for p in self.predicates)


@dataclass(frozen=True)
class LocationPath:
    steps: tuple
    absolute: bool = False

    def __str__(self) -> str:
        body = "/".join(str(s) for s in self.steps)
        return ("/" + body) if self.absolute else body


@dataclass(frozen=True)
class PathExpr:
    path: LocationPath

    def __str__(self) -> str:
        return str(self.path)


@dataclass(frozen=True)
class Compare:
    op: str                    # one of COMPARISONS
    path: LocationPath
    value: bytes

    def __str__(self) -> str:
        lit = '"' + self.value.decode("utf-8", "replace") + '"'
        if self.op == "=":
            return f"{self.path} = {lit}"
        return f"{self.op}({self.path}, {lit})"


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"

    def __str__(self) -> str:
        return f"({self.left} and {self.right})"


@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"

    def __str__(self) -> str:
        return f"({self.left} or {self.right})"


@dataclass(frozen=True)
class Not:
    expr: "Expr"

    def __str__(self) -> str:
        return f"not({self.expr})"


Expr = Union[PathExpr, Compare, And, Or, Not]

SELF_NODE = Step("self", NodeTest("node"))

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<string>"[^"]*"|'[^']*')
      | (?P<number>\d+(?:\.\d*)?|\.\d+)
      | (?P<op>//|::|!=|<=|>=|\.\.|[/\[\](),=*@.<>|+\-$])
      | (?P<name>[^\W\d][\w.\-]*(?::[^\W\d][\w.\-]*)?)
    )""",
    re.VERBOSE | re.UNICODE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(query: str) -> list:
    toks, i = [], 0
    while True:
        while i < len(query) and query[i].isspace():
            i += 1
        if i >= len(query):
            break
        m = _TOKEN.match(query, i)
        if not m or m.end() == i:
            raise XPathSyntaxError(f"unexpected character {query[i]!r}", i)
        kind = m.lastgroup
        text = m.group(kind)
        toks.append(_Tok(kind, text, m.start(kind)))
        i = m.end()
    toks.append(_Tok("eof", "", len(query)))
    return toks


class _Parser:
    def __init__(self, query: str):
        self.query = query
        self.toks = _tokenize(query)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "name") and t.text == text

    def take(self) -> _Tok:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            raise XPathSyntaxError(f"expected {text!r}, found {self.tok.text or 'end of query'!r}", self.tok.pos)
        return self.take()

    # -- paths ----------------------------------------------------------------

    def query_path(self) -> LocationPath:
        if self.at("/"):
            self.take()
            if self.tok.kind == "eof":
                return LocationPath((), absolute=True)
            path = self.relative_path(absolute=True)
        elif self.at("//"):
            self.take()
            path = self.relative_path(absolute=True, first_descendant=True)
        else:
            path = self.relative_path(absolute=False)
        if self.tok.kind != "eof":
            self._reject_trailing()
        return path

    def _reject_trailing(self):
        t = self.tok
        if t.text == "|":
            raise UnsupportedQueryError("union operator")
        if t.text in ("=", "!=", "<", ">", "<=", ">="):
            raise XPathSyntaxError("comparison outside a predicate", t.pos)
        raise XPathSyntaxError(f"unexpected {t.text!r}", t.pos)

    def relative_path(self, absolute: bool, first_descendant: bool = False) -> LocationPath:
        steps = [self.step(first_descendant)]
        while self.at("/") or self.at("//"):
            sep = self.take().text
            steps.append(self.step(sep == "//"))
        return LocationPath(tuple(steps), absolute)

    def step(self, after_double_slash: bool) -> Step:
        t = self.tok
        if t.text == "@" and t.kind == "op":
            raise UnsupportedQueryError("attribute axis")
        if t.text == ".." and t.kind == "op":
            raise UnsupportedQueryError("parent axis")
        if t.text == "." and t.kind == "op":
            self.take()
            if after_double_slash:
                raise UnsupportedQueryError("'//' followed by a self step")
            if self.at("["):
                raise XPathSyntaxError("predicate after '.'", self.tok.pos)
            return SELF_NODE
        axis = "child"
        if t.kind == "name" and self.peek().text == "::":
            axis = t.text
            if axis in _REJECTED_AXES:
                raise UnsupportedQueryError(_REJECTED_AXES[axis])
            if axis not in AXES:
                raise XPathSyntaxError(f"unknown axis {axis!r}", t.pos)
            self.take()
            self.take()
        test = self.node_test()
        if after_double_slash:
            if axis in ("child", "descendant"):
                axis = "descendant"
            else:
                raise UnsupportedQueryError(f"'//' followed by the {axis} axis")
        preds = []
        while self.at("["):
            preds.append(self.predicate())
        return Step(axis, test, tuple(preds))

    def node_test(self) -> NodeTest:
        t = self.tok
        if t.kind == "op" and t.text == "*":
            self.take()
            return NodeTest("*")
        if t.kind != "name":
            raise XPathSyntaxError(f"expected a node test, found {t.text or 'end of query'!r}", t.pos)
        if self.peek().text == "(":
            if t.text in ("text", "node"):
                self.take()
                self.expect("(")
                self.expect(")")
                return NodeTest(t.text)
            if t.text in ("comment", "processing-instruction"):
                raise UnsupportedQueryError(f"{t.text}() node test")
            raise XPathSyntaxError(f"function {t.text}() is not a node test", t.pos)
        self.take()
        return NodeTest("name", t.text)

    # -- predicates -------------------------------------------------------------

    def predicate(self) -> Expr:
        self.expect("[")
        if self.tok.kind == "number":
            raise UnsupportedQueryError("positional predicate")
        e = self.or_expr()
        self.expect("]")
        return e

    def or_expr(self) -> Expr:
        e = self.and_expr()
        while self.at("or"):
            self.take()
            e = Or(e, self.and_expr())
        return e

    def and_expr(self) -> Expr:
        e = self.unary()
        while self.at("and"):
            self.take()
            e = And(e, self.unary())
        return e

    def unary(self) -> Expr:
        t = self.tok
        if t.kind == "op" and t.text == "(":
            self.take()
            e = self.or_expr()
            self.expect(")")
            return e
        if t.kind == "number":
            raise UnsupportedQueryError("numeric expression")
        if t.kind == "string":
            value = self.literal()
            self._comparison_op()
            return Compare("=", self.pred_path(), value)
        if t.kind == "name" and self.peek().text == "(" and t.text not in ("text", "node"):
            return self.function_call()
        path = self.pred_path()
        if self.at("=") or self.at("!=") or self.at("<") or self.at(">") or self.at("<=") or self.at(">="):
            self._comparison_op()
            return Compare("=", path, self.literal())
        return PathExpr(path)

    def _comparison_op(self) -> str:
        t = self.tok
        if t.kind == "op" and t.text == "=":
            self.take()
            return "="
        if t.kind == "op" and t.text in ("!=", "<", ">", "<=", ">="):
            raise UnsupportedQueryError(f"comparison operator {t.text}")
        raise XPathSyntaxError(f"expected '=', found {t.text or 'end of query'!r}", t.pos)

    def function_call(self) -> Expr:
        name = self.take()
        self.expect("(")
        if name.text == "not":
            e = self.or_expr()
            self.expect(")")
            return Not(e)
        if name.text in ("contains", "starts-with"):
            path = self.pred_path()
            self.expect(",")
            value = self.literal()
            self.expect(")")
            return Compare(name.text, path, value)
        raise UnsupportedQueryError(f"{name.text}() function")

    def literal(self) -> bytes:
        t = self.tok
        if t.kind != "string":
            if t.kind in ("name", "number") or t.text in ("/", "//", "."):
                raise UnsupportedQueryError("comparison against a non-literal")
            raise XPathSyntaxError(f"expected a string literal, found {t.text or 'end of query'!r}", t.pos)
        self.take()
        return t.text[1:-1].encode("utf-8")

    def pred_path(self) -> LocationPath:
        if self.at("/") or self.at("//"):
            raise UnsupportedQueryError("absolute path inside a predicate")
        return self.relative_path(absolute=False)


def parse_xpath(query: str) -> LocationPath:
    """Parse ``query`` into a :class:`LocationPath`.

    Raises XPathSyntaxError for malformed input and UnsupportedQueryError for
    valid XPath outside the supported fragment.
    """
    return _Parser(query).query_path()


def has_value_comparison(expr) -> bool:
    if isinstance(expr, Compare):
        return True
    if isinstance(expr, (And, Or)):
        return has_value_comparison(expr.left) or has_value_comparison(expr.right)
    if isinstance(expr, Not):
        return has_value_comparison(expr.expr)
    return any(has_value_comparison(p) for s in expr.path.steps for p in s.predicates)
