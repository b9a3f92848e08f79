"""Index bundle (tree + text index) and its on-disk format.

Layout, little-endian, every section 8-byte aligned::

    magic "XMLIDX\\0\\0" | u32 version | u32 section count
    u64 n, d, t, u, sample_rate, flags
    section table: 16-byte name, u64 offset, u64 length, u32 crc32, u32 pad
    sections...

Sections are parsed on first use and every parse is recorded in
``load_trace``, so a query only pays for the parts it touches.
"""

from __future__ import annotations

import mmap
import os
import struct
import zlib
from dataclasses import dataclass
from typing import Optional

from .engine import PredicateEvaluator, QueryResult, plan_and_execute
from .errors import IndexFormatError, MissingSectionError
from .fmindex import DEFAULT_SAMPLE_RATE, FMIndex, build_fm_index
from .ingest import parse_document
from .tree import TreeIndex
from .xpath import parse_xpath

MAGIC = b"XMLIDX\0\0"
VERSION = 1
FLAG_PLAIN = 1
FLAG_KEEP_WS = 2

TREE_SECTIONS = ("names", "par", "tag", "leaves")
TEXT_SECTIONS = ("fm", "doc", "samples")
_HEAD = struct.Struct("<8sII6Q")
_ENTRY = struct.Struct("<16sQQII")


@dataclass(frozen=True)
class Header:
    n: int
    d: int
    t: int
    u: int
    sample_rate: int
    flags: int

    @property
    def plain_text(self) -> bool:
        return bool(self.flags & FLAG_PLAIN)


class XmlIndex:
    """Tree and text indexes of one document, loaded section by section."""

    def __init__(self, header: Header, sections: Optional[dict] = None, reader=None,
                 tree: Optional[TreeIndex] = None, fm: Optional[FMIndex] = None):
        self.header = header
        self._sections = sections or {}
        self._reader = reader
        self._tree = tree
        self._fm = fm
        self.load_trace: list = []
        self._preds = None
        if tree is not None and tree.text_source is None:
            tree.text_source = self._get_text

    # -- construction -----------------------------------------------------------

    @classmethod
    def build(cls, xml: bytes, sample_rate: int = DEFAULT_SAMPLE_RATE, plain_text: bool = False,
              keep_whitespace: bool = False) -> "XmlIndex":
        model = parse_document(xml, keep_whitespace=keep_whitespace)
        fm = build_fm_index(model.texts, sample_rate=sample_rate, store_plain=plain_text)
        tree = TreeIndex.from_model(model)
        flags = (FLAG_PLAIN if plain_text else 0) | (FLAG_KEEP_WS if keep_whitespace else 0)
        header = Header(model.n, model.d, model.t, fm.u, sample_rate, flags)
        return cls(header, tree=tree, fm=fm)

    def to_bytes(self) -> bytes:
        secs = dict(self.tree.to_sections())
        secs.update(self.fm.to_sections())
        names = [s for s in TREE_SECTIONS + TEXT_SECTIONS + ("plain",) if s in secs]
        h = self.header
        head = _HEAD.pack(MAGIC, VERSION, len(names), h.n, h.d, h.t, h.u, h.sample_rate, h.flags)
        offset = len(head) + _ENTRY.size * len(names)
        offset += -offset % 8
        table, bodies = [], []
        for name in names:
            body = secs[name]
            body += b"\0" * (-len(body) % 8)
            table.append(_ENTRY.pack(name.encode("ascii").ljust(16, b"\0"), offset, len(body),
                                     zlib.crc32(body), 0))
            bodies.append(body)
            offset += len(body)
        out = head + b"".join(table)
        out += b"\0" * (-len(out) % 8)
        return out + b"".join(bodies)

    def save(self, path) -> int:
        data = self.to_bytes()
        with open(path, "wb") as fh:
            fh.write(data)
        return len(data)

    def section_sizes(self) -> dict:
        secs = dict(self.tree.to_sections())
        secs.update(self.fm.to_sections())
        return {k: len(v) for k, v in secs.items()}

    # -- loading ------------------------------------------------------------------

    @classmethod
    def load(cls, path) -> "XmlIndex":
        try:
            fh = open(path, "rb")
        except OSError as exc:
            raise IndexFormatError(f"cannot open index {path}: {exc}") from exc
        with fh:
            size = os.fstat(fh.fileno()).st_size
            if size < _HEAD.size:
                raise IndexFormatError(f"{path}: file too short for an index header")
            buf = mmap.mmap(fh.fileno(), 0, access=mmap.ACCESS_READ)
        return cls.from_buffer(buf)

    @classmethod
    def from_buffer(cls, buf) -> "XmlIndex":
        if len(buf) < _HEAD.size:
            raise IndexFormatError("buffer too short for an index header")
        magic, version, count, n, d, t, u, rate, flags = _HEAD.unpack_from(buf, 0)
        if magic != MAGIC:
            raise IndexFormatError("not an index file (bad magic)")
        if version != VERSION:
            raise IndexFormatError(f"unsupported index version {version}")
        table = {}
        pos = _HEAD.size
        for _ in range(count):
            if pos + _ENTRY.size > len(buf):
                raise IndexFormatError("truncated section table")
            raw, off, ln, crc, _ = _ENTRY.unpack_from(buf, pos)
            pos += _ENTRY.size
            name = raw.rstrip(b"\0").decode("ascii", "replace")
            if off + ln > len(buf):
                raise IndexFormatError(f"section {name!r} runs past end of file")
            table[name] = (off, ln, crc)
        return cls(Header(n, d, t, u, rate, flags), reader=(buf, table))

    def _section(self, name: str) -> bytes:
        if name in self._sections:
            return self._sections[name]
        if self._reader is None:
            raise MissingSectionError(f"section {name!r} not available")
        buf, table = self._reader
        if name not in table:
            raise MissingSectionError(f"index has no {name!r} section")
        off, ln, crc = table[name]
        data = bytes(buf[off:off + ln])
        if zlib.crc32(data) != crc:
            raise IndexFormatError(f"checksum mismatch in section {name!r}")
        self.load_trace.append(name)
        self._sections[name] = data
        return data

    def has_section(self, name: str) -> bool:
        if self._reader is None:
            return name != "plain" or self.header.plain_text
        return name in self._reader[1]

    @property
    def tree(self) -> TreeIndex:
        if self._tree is None:
            self._tree = TreeIndex.from_sections(*(self._section(s) for s in TREE_SECTIONS),
                                                 text_source=self._get_text)
        return self._tree

    @property
    def fm(self) -> FMIndex:
        if self._fm is None:
            parts = [self._section(s) for s in TEXT_SECTIONS]
            plain = self._section("plain") if self.header.plain_text else None
            self._fm = FMIndex.from_sections(*parts, plain=plain)
        return self._fm

    @property
    def fm_loaded(self) -> bool:
        return self._fm is not None

    def _get_text(self, d: int) -> bytes:
        return self.fm.extract_text(d)

    # -- queries --------------------------------------------------------------------

    @property
    def predicates(self) -> PredicateEvaluator:
        if self._preds is None:
            self._preds = PredicateEvaluator(self.tree, lambda: self.fm)
        return self._preds

    def query(self, query: str, strategy: str = "auto") -> QueryResult:
        return plan_and_execute(parse_xpath(query), self.tree, self.predicates, strategy)

    def count(self, query: str, strategy: str = "auto") -> int:
        return self.query(query, strategy).count()

    def serialize(self, preorder_id: int) -> bytes:
        """XML (or character data, for text nodes) of the node with the given global id."""
        tree = self.tree
        return tree.get_subtree(tree.node_of_preorder(preorder_id))
