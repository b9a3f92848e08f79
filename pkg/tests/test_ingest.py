import pytest

from succinctxml import RejectedInputError, XMLSyntaxError, parse_document


def test_ex1_model(ex1_model):
    m = ex1_model
    assert m.par_string() == "((()(())))"
    assert m.preorder_labels() == ["&", "a", "b", "c", "#"]
    assert m.texts == [b"x"]
    assert [i for i, b in enumerate(m.leaf_marks) if b] == [5]
    assert (m.n, m.d) == (5, 1)


def test_empty_element():
    m = parse_document(b"<a/>")
    assert m.par_string() == "(())"
    assert m.preorder_labels() == ["&", "a"]
    assert m.texts == []
    assert m.d == 0


def test_attribute_encoding():
    m = parse_document(b'<a k="v"/>')
    assert m.par_string() == "((((()))))"
    assert m.preorder_labels() == ["&", "a", "@", "k", "%"]
    assert m.texts == [b"v"]
    assert [i for i, b in enumerate(m.leaf_marks) if b] == [4]


def test_closing_codes_offset_by_t():
    m = parse_document(b'<r><s a="1">t</s><s/></r>')
    stack = []
    for bit, code in zip(m.par_bits, m.tag_ids):
        if bit:
            assert 1 <= code <= m.t
            stack.append(code)
        else:
            assert code == stack.pop() + m.t
    assert not stack


def test_reserved_names_first():
    m = parse_document(b"<z><y/></z>")
    assert m.tag_names[:4] == ["&", "#", "@", "%"]
    assert m.tag_names[4:] == ["z", "y"]


def test_whitespace_policy():
    xml = b"<a>\n  <b> x </b>\n</a>"
    assert parse_document(xml).texts == [b" x "]
    assert parse_document(xml, keep_whitespace=True).texts == [b"\n  ", b" x ", b"\n"]


def test_comments_and_pis_skipped():
    m = parse_document(b"<a>x<!-- c --><?pi data?>y</a>")
    assert m.preorder_labels() == ["&", "a", "#"]
    assert m.texts == [b"xy"]


def test_entities_and_multibyte():
    m = parse_document("<a>&lt;é&amp;</a>".encode("utf-8"))
    assert m.texts == ["<é&".encode("utf-8")]


def test_malformed_reports_offset():
    with pytest.raises(XMLSyntaxError) as info:
        parse_document(b"<a><b></a>")
    assert info.value.offset >= 0


def test_byte_zero_rejected():
    with pytest.raises((RejectedInputError, XMLSyntaxError)):
        parse_document(b"<a>x&#0;</a>")


def test_counts_consistent():
    m = parse_document(b'<a><b q="1">t</b>u<c/></a>')
    assert len(m.par_bits) == len(m.tag_ids) == 2 * m.n
    assert int(m.leaf_marks.sum()) == m.d == len(m.texts)
