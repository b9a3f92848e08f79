import pytest

from succinctxml import UnsupportedQueryError, XPathSyntaxError, parse_xpath
from succinctxml.xpath import SELF_NODE, And, Compare, NodeTest, Not, PathExpr, Step


def test_two_descendant_steps():
    ast = parse_xpath("/descendant::listitem/descendant::keyword")
    assert ast.absolute
    assert [s.axis for s in ast.steps] == ["descendant", "descendant"]
    assert [s.test.name for s in ast.steps] == ["listitem", "keyword"]


def test_predicate_shape():
    ast = parse_xpath("//a[b and not(c)]")
    (step,) = ast.steps
    assert step.axis == "descendant" and step.test == NodeTest("name", "a")
    (pred,) = step.predicates
    assert isinstance(pred, And)
    assert isinstance(pred.left, PathExpr)
    assert pred.left.path.steps == (Step("child", NodeTest("name", "b")),)
    assert isinstance(pred.right, Not)
    assert pred.right.expr.path.steps == (Step("child", NodeTest("name", "c")),)


def test_contains_on_self():
    ast = parse_xpath('//keyword[contains(.,"Unique")]')
    (pred,) = ast.steps[0].predicates
    assert pred == Compare("contains", pred.path, b"Unique")
    assert pred.path.steps == (SELF_NODE,)


@pytest.mark.parametrize("query,axes", [
    ("a//b", ["child", "descendant"]),
    ("//a/following-sibling::b", ["descendant", "following-sibling"]),
    ("self::node()", ["self"]),
    ("/a/descendant::text()", ["child", "descendant"]),
    ("/a/.//b", ["child", "self", "descendant"]),
    ("child::a/*", ["child", "child"]),
])
def test_axes(query, axes):
    assert [s.axis for s in parse_xpath(query).steps] == axes


def test_equality_and_starts_with():
    (p,) = parse_xpath("//a[b = 'x']").steps[0].predicates
    assert (p.op, p.value) == ("=", b"x")
    (p,) = parse_xpath('//a[starts-with(b/c, "y")]').steps[0].predicates
    assert p.op == "starts-with" and len(p.path.steps) == 2


@pytest.mark.parametrize("query,construct", [
    ("//a/parent::b", "parent axis"),
    ("//a/ancestor::b", "ancestor axis"),
    ("//a/preceding-sibling::b", "preceding-sibling axis"),
    ("//a/@id", "attribute axis"),
    ("//a/attribute::id", "attribute axis"),
    ("//a[1]", "positional predicate"),
    ("//a[count(b)]", "count() function"),
    ("//a[b != 'x']", "operator !="),
    ("//a | //b", "union"),
    ("//a[//b]", "absolute path inside a predicate"),
])
def test_unsupported(query, construct):
    with pytest.raises(UnsupportedQueryError) as info:
        parse_xpath(query)
    assert construct in info.value.construct


@pytest.mark.parametrize("query", ["", "//", "/a[", "//a[b", "a/", "//a[contains(.)]", "//a[. = ]", "a b"])
def test_syntax_errors(query):
    with pytest.raises(XPathSyntaxError):
        parse_xpath(query)


def test_str_roundtrip():
    q = '//a[(b or not(c)) and contains(., "z")]/following-sibling::*'
    ast = parse_xpath(q)
    assert parse_xpath(str(ast)) == ast
