"""XML parsing into the tree/text model indexed by everything else.

The model adds a dummy root ``&``, turns every kept text node into a leaf
``#`` and encodes attributes as ``elem -> @ -> name -> %`` where the ``%``
leaf carries the attribute value. Tag codes are 1-based; the closing code of
a tag is its opening code plus ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import BinaryIO, Union
from xml.parsers import expat

import numpy as np

from .errors import RejectedInputError, XMLSyntaxError

ROOT, TEXT, ATTRS, VALUE = "&", "#", "@", "%"
RESERVED = (ROOT, TEXT, ATTRS, VALUE)
_XML_WS = " \t\n\r"


@dataclass
class DocumentModel:
    par_bits: np.ndarray      # bool, True = open
    tag_ids: np.ndarray       # int32 codes aligned with par_bits
    leaf_marks: np.ndarray    # bool, set on the open paren of text-bearing leaves
    texts: list = field(default_factory=list)
    tag_names: list = field(default_factory=list)   # tag_names[code - 1]

    @property
    def n(self) -> int:
        return len(self.par_bits) // 2

    @property
    def d(self) -> int:
        return len(self.texts)

    @property
    def t(self) -> int:
        return len(self.tag_names)

    def code(self, name: str) -> int:
        return self.tag_names.index(name) + 1

    def par_string(self) -> str:
        return "".join("(" if b else ")" for b in self.par_bits)

    def preorder_labels(self) -> list:
        return [self.tag_names[c - 1] for b, c in zip(self.par_bits, self.tag_ids) if b]


class _Builder:
    def __init__(self, keep_whitespace: bool):
        self.keep_ws = keep_whitespace
        self.codes = {name: i + 1 for i, name in enumerate(RESERVED)}
        self.par = []
        self.tags = []
        self.leaf = []
        self.texts = []
        self.buf = []
        self.depth = 0

    def code(self, name: str) -> int:
        c = self.codes.get(name)
        if c is None:
            c = self.codes[name] = len(self.codes) + 1
        return c

    def open(self, code: int, text: bytes = b"") -> None:
        self.par.append(True)
        self.tags.append(code)
        if text:
            if b"\0" in text:
                raise RejectedInputError("text contains byte 0")
            self.leaf.append(True)
            self.texts.append(text)
        else:
            self.leaf.append(False)

    def close(self, code: int) -> None:
        self.par.append(False)
        self.tags.append(-code)
        self.leaf.append(False)

    def flush(self) -> None:
        if not self.buf:
            return
        s = "".join(self.buf)
        self.buf.clear()
        if self.depth == 0 or not (self.keep_ws or s.strip(_XML_WS)):
            return
        self.open(2, s.encode("utf-8"))
        self.close(2)

    def start(self, name, attrs) -> None:
        self.flush()
        c = self.code(name)
        self.open(c)
        self.depth += 1
        if attrs:
            self.open(3)
            for k in range(0, len(attrs), 2):
                ac = self.code(attrs[k])
                self.open(ac)
                self.open(4, attrs[k + 1].encode("utf-8"))
                self.close(4)
                self.close(ac)
            self.close(3)

    def end(self, name) -> None:
        self.flush()
        self.depth -= 1
        self.close(self.codes[name])

    def chars(self, data) -> None:
        self.buf.append(data)


def parse_document(source: Union[bytes, BinaryIO], keep_whitespace: bool = False) -> DocumentModel:
    """Parse XML bytes (or a binary stream) into a :class:`DocumentModel`.

    Whitespace-only text nodes are dropped unless ``keep_whitespace``.
    Comments and processing instructions are skipped.
    """
    data = source if isinstance(source, (bytes, bytearray, memoryview)) else source.read()
    b = _Builder(keep_whitespace)
    parser = expat.ParserCreate()
    parser.ordered_attributes = True
    parser.buffer_text = True
    parser.StartElementHandler = b.start
    parser.EndElementHandler = b.end
    parser.CharacterDataHandler = b.chars
    b.open(1)
    try:
        parser.Parse(bytes(data), True)
    except expat.ExpatError as exc:
        raise XMLSyntaxError(expat.ErrorString(exc.code), parser.CurrentByteIndex) from None
    b.close(1)

    t = len(b.codes)
    tags = np.asarray(b.tags, dtype=np.int32)
    tags = np.where(tags < 0, -tags + t, tags).astype(np.int32)
    names = [None] * t
    for name, c in b.codes.items():
        names[c - 1] = name
    return DocumentModel(
        par_bits=np.asarray(b.par, dtype=bool),
        tag_ids=tags,
        leaf_marks=np.asarray(b.leaf, dtype=bool),
        texts=b.texts,
        tag_names=names,
    )
