"""Succinct XML tree: parentheses, tag sequence and text-leaf bitmap.

A node is the 0-based position of its opening parenthesis. Preorder
numbers, which double as global node identifiers, and text ids are 1-based.
"""

from __future__ import annotations

import struct
from array import array
from typing import Callable, Iterator, Optional

import numpy as np

from .bits import BitVector, SparseBitSequence
from .ingest import ATTRS, ROOT, TEXT, VALUE, DocumentModel

_INF = 1 << 62


def _byte_tables():
    total, first, last = [], [], []
    for b in range(256):
        e, prefix = 0, []
        for p in range(8):
            e += 1 if (b >> p) & 1 else -1
            prefix.append(e)
        total.append(e)
        # first[b][need]: first bit whose prefix excess is <= -need, 8 if none
        first.append([next((p for p in range(8) if prefix[p] <= -need), 8) for need in range(9)])
        # last[b][key + 8]: last bit whose prefix excess is <= key, -1 if none
        last.append([max((p for p in range(8) if prefix[p] <= key), default=-1) for key in range(-8, 9)])
    return total, first, last


_TOTAL, _FIRST, _LAST = _byte_tables()


class ParSequence:
    """Balanced parentheses with forward/backward excess search.

    Search runs bit by bit inside the starting byte, byte by byte (via
    lookup tables) inside the starting 64-bit word, then jumps to the next
    word that can contain the answer with a min-excess segment tree.
    """

    def __init__(self, bits):
        self.bv = bits if isinstance(bits, BitVector) else BitVector(bits)
        self.m = len(self.bv)
        self._by = self.bv._bytes
        self._build_directory()

    def _build_directory(self) -> None:
        arr = self.bv.to_numpy()
        m = self.m
        nw = (m + 63) // 64
        exc = np.cumsum(np.where(arr, 1, -1)) if m else np.zeros(0, dtype=np.int64)
        size = 1
        while size < max(nw, 1):
            size <<= 1
        tree = [_INF] * (2 * size)
        if nw:
            mins = np.minimum.reduceat(exc, np.arange(0, m, 64)).tolist()
            tree[size:size + nw] = mins
        for v in range(size - 1, 0, -1):
            a, b = tree[2 * v], tree[2 * v + 1]
            tree[v] = a if a < b else b
        before = [0] * (nw + 1)
        if nw:
            before[1:nw] = exc[63:64 * (nw - 1):64].tolist() if nw > 1 else []
            before[nw] = int(exc[-1])
        self._size = size
        self._tree = tree
        self._before = before
        self._nw = nw

    def __len__(self) -> int:
        return self.m

    def is_open(self, i: int) -> bool:
        return bool((self._by[i >> 3] >> (i & 7)) & 1)

    def excess(self, i: int) -> int:
        """Opens minus closes in ``[0, i]``."""
        return 2 * self.bv.rank1(i + 1) - i - 1

    def _next_word(self, w: int, target: int) -> Optional[int]:
        tree, size = self._tree, self._size
        v = size + w
        while v > 1:
            if not v & 1 and tree[v + 1] <= target:
                v += 1
                break
            v >>= 1
        else:
            return None
        while v < size:
            v = 2 * v if tree[2 * v] <= target else 2 * v + 1
        return v - size

    def _prev_word(self, w: int, target: int) -> Optional[int]:
        tree, size = self._tree, self._size
        v = size + w
        while v > 1:
            if v & 1 and tree[v - 1] <= target:
                v -= 1
                break
            v >>= 1
        else:
            return None
        while v < size:
            v = 2 * v + 1 if tree[2 * v + 1] <= target else 2 * v
        return v - size

    def fwd(self, i: int, target: int, cur: Optional[int] = None) -> Optional[int]:
        """Smallest ``j > i`` with excess ``E(j) <= target``; requires ``target < E(i)``."""
        j = self._fwd(i, target, cur)
        return j if j is not None and j < self.m else None

    def _fwd(self, i: int, target: int, cur: Optional[int]) -> Optional[int]:
        by = self._by
        if cur is None:
            cur = self.excess(i)
        j = i + 1
        if j >= self.m:
            return None
        bi, s = j >> 3, j & 7
        if s:
            b = by[bi] >> s
            need = cur - target
            if need <= 8:
                p = _FIRST[b][need]
                if p < 8 - s:
                    return j + p
            cur += _TOTAL[b] + s
            bi += 1
        wj = j >> 6
        wend = min((wj + 1) << 3, len(by))
        while bi < wend:
            b = by[bi]
            need = cur - target
            if need <= 8:
                p = _FIRST[b][need]
                if p < 8:
                    return (bi << 3) + p
            cur += _TOTAL[b]
            bi += 1
        w = self._next_word(wj, target)
        if w is None:
            return None
        cur = self._before[w]
        bi = w << 3
        while True:
            b = by[bi]
            need = cur - target
            if need <= 8:
                p = _FIRST[b][need]
                if p < 8:
                    return (bi << 3) + p
            cur += _TOTAL[b]
            bi += 1

    def bwd(self, i: int, target: int, cur: Optional[int] = None) -> Optional[int]:
        """Largest ``j < i`` with ``E(j) <= target``; ``-1`` stands for the virtual ``E(-1) = 0``."""
        by = self._by
        if cur is None:
            cur = self.excess(i)
        j = i
        lo = i & ~7
        while j > lo:
            cur -= 1 if (by[j >> 3] >> (j & 7)) & 1 else -1
            j -= 1
            if cur <= target:
                return j
        if lo == 0:
            return -1 if target >= 0 else None
        # cur is E(lo); move to the end of the previous byte
        cur -= 1 if by[lo >> 3] & 1 else -1
        bi = (lo >> 3) - 1
        wstart = (lo >> 3) & ~7
        while bi >= wstart:
            b = by[bi]
            start = cur - _TOTAL[b]
            key = target - start
            if key >= -8:
                p = _LAST[b][key + 8] if key <= 8 else 7
                if p >= 0:
                    return (bi << 3) + p
            cur = start
            bi -= 1
        w = self._prev_word(wstart >> 3, target)
        if w is None:
            return -1 if target >= 0 else None
        cur = self._before[w + 1]
        bi = (w << 3) + 7
        while True:
            b = by[bi]
            start = cur - _TOTAL[b]
            key = target - start
            if key >= -8:
                p = _LAST[b][key + 8] if key <= 8 else 7
                if p >= 0:
                    return (bi << 3) + p
            cur = start
            bi -= 1

    def close(self, x: int) -> int:
        if not self.is_open(x):
            raise ValueError(f"position {x} is not an opening parenthesis")
        if x + 1 < self.m and not (self._by[(x + 1) >> 3] >> ((x + 1) & 7)) & 1:
            return x + 1
        e = self.excess(x)
        return self.fwd(x, e - 1, e)

    def open(self, y: int) -> int:
        if self.is_open(y):
            raise ValueError(f"position {y} is not a closing parenthesis")
        if y > 0 and self.is_open(y - 1):
            return y - 1
        e = self.excess(y)
        return self.bwd(y, e, e) + 1

    def enclose(self, x: int) -> Optional[int]:
        if x == 0:
            return None
        e = self.excess(x)
        j = self.bwd(x, e - 2, e)
        return None if j is None else j + 1


def _code_type(ncodes: int) -> str:
    return "B" if ncodes < 1 << 8 else "H" if ncodes < 1 << 16 else "I"


class TagSequence:
    """Tag codes per parenthesis plus one sparse position row per code."""

    def __init__(self, codes, ncodes: int):
        codes = np.asarray(codes, dtype=np.int64)
        self.ncodes = ncodes
        self.m = len(codes)
        tc = _code_type(ncodes)
        self.codes = array(tc, codes.astype(np.dtype(tc)).tobytes())
        self.rows: dict[int, SparseBitSequence] = {}
        order = np.argsort(codes, kind="stable")
        sorted_codes = codes[order]
        present, starts = np.unique(sorted_codes, return_index=True)
        bounds = list(starts) + [len(order)]
        for k, c in enumerate(present.tolist()):
            self.rows[c] = SparseBitSequence(self.m, order[bounds[k]:bounds[k + 1]])

    @classmethod
    def _empty(cls) -> "TagSequence":
        return cls.__new__(cls)

    def __getitem__(self, i: int) -> int:
        return self.codes[i]

    def rank(self, code: int, i: int) -> int:
        """Occurrences of ``code`` in positions ``[0, i)``."""
        row = self.rows.get(code)
        return 0 if row is None else row.rank1(i)

    def select(self, code: int, j: int) -> Optional[int]:
        """0-based position of the ``j``-th occurrence of ``code``."""
        row = self.rows.get(code)
        return None if row is None else row.select1(j)

    def count(self, code: int) -> int:
        row = self.rows.get(code)
        return 0 if row is None else len(row)

    def next_at_or_after(self, code: int, i: int) -> Optional[int]:
        row = self.rows.get(code)
        return None if row is None else row.select1(row.rank1(i) + 1)

    def to_bytes(self) -> bytes:
        out = [struct.pack("<QQ", self.m, self.ncodes)]
        body = np.frombuffer(self.codes, dtype=self.codes.typecode).astype(
            "<u%d" % self.codes.itemsize).tobytes()
        out.append(body + b"\0" * (-len(body) % 8))
        out.append(struct.pack("<Q", len(self.rows)))
        for c in sorted(self.rows):
            out.append(struct.pack("<Q", c))
            out.append(self.rows[c].to_bytes())
        return b"".join(out)

    @classmethod
    def from_bytes(cls, buf, offset: int = 0) -> "tuple[TagSequence, int]":
        m, ncodes = struct.unpack_from("<QQ", buf, offset)
        offset += 16
        seq = cls._empty()
        seq.m, seq.ncodes = m, ncodes
        seq.codes = array(_code_type(ncodes))
        width = seq.codes.itemsize
        raw = np.frombuffer(bytes(buf[offset:offset + width * m]), dtype="<u%d" % width)
        seq.codes.frombytes(raw.astype(seq.codes.typecode).tobytes())
        offset += width * m + (-(width * m) % 8)
        (nrows,) = struct.unpack_from("<Q", buf, offset)
        offset += 8
        seq.rows = {}
        for _ in range(nrows):
            (c,) = struct.unpack_from("<Q", buf, offset)
            seq.rows[c], offset = SparseBitSequence.from_bytes(buf, offset + 8)
        return seq, offset


def _escape_text(s: bytes) -> bytes:
    return s.replace(b"&", b"&amp;").replace(b"<", b"&lt;").replace(b">", b"&gt;")


def _escape_attr(s: bytes) -> bytes:
    return _escape_text(s).replace(b'"', b"&quot;")


class TreeIndex:
    """Navigation, tag jumping and text connection over the succinct tree."""

    def __init__(self, par: ParSequence, tags: TagSequence, leaves: BitVector, tag_names: list,
                 text_source: Optional[Callable[[int], bytes]] = None):
        self.par = par
        self.tags = tags
        self.leaves = leaves
        self.tag_names = list(tag_names)
        self.t = len(self.tag_names)
        self.n = len(par) // 2
        self.d = leaves.ones
        self.text_source = text_source
        self._codes = {name: i + 1 for i, name in enumerate(self.tag_names)}

    @classmethod
    def from_model(cls, model: DocumentModel, text_source=None) -> "TreeIndex":
        return cls(ParSequence(model.par_bits), TagSequence(model.tag_ids, 2 * model.t),
                   BitVector(model.leaf_marks), model.tag_names, text_source)

    # -- tag dictionary -------------------------------------------------------

    def code(self, name: str) -> Optional[int]:
        return self._codes.get(name)

    def name(self, code: int) -> str:
        return self.tag_names[(code - 1) % self.t]

    # -- navigation -----------------------------------------------------------

    @property
    def root(self) -> int:
        return 0

    def close(self, x: int) -> int:
        return self.par.close(x)

    def open(self, y: int) -> int:
        return self.par.open(y)

    def is_open(self, x: int) -> bool:
        return self.par.is_open(x)

    def preorder(self, x: int) -> int:
        return self.par.bv.rank1(x + 1)

    def node_of_preorder(self, k: int) -> int:
        """Inverse of :meth:`preorder`."""
        p = self.par.bv.select1(k)
        if p is None:
            raise IndexError(f"preorder {k} outside [1, {self.n}]")
        return p - 1

    def subtree_size(self, x: int) -> int:
        return (self.close(x) - x + 1) // 2

    def is_ancestor(self, x: int, y: int) -> bool:
        return x <= y <= self.close(x)

    def is_leaf(self, x: int) -> bool:
        return not self.par.is_open(x + 1)

    def first_child(self, x: int) -> Optional[int]:
        y = x + 1
        return y if y < self.par.m and self.par.is_open(y) else None

    def next_sibling(self, x: int) -> Optional[int]:
        y = self.close(x) + 1
        return y if y < self.par.m and self.par.is_open(y) else None

    def parent(self, x: int) -> Optional[int]:
        return self.par.enclose(x)

    def children(self, x: int) -> Iterator[int]:
        y = self.first_child(x)
        while y is not None:
            yield y
            y = self.next_sibling(y)

    # -- tags -----------------------------------------------------------------

    def tag(self, x: int) -> int:
        return self.tags[x]

    def tag_name(self, x: int) -> str:
        return self.name(self.tags[x])

    def subtree_tags(self, x: int, tag: int) -> int:
        return self.tags.rank(tag, self.close(x) + 1) - self.tags.rank(tag, x)

    def tagged_desc(self, x: int, tag: int) -> Optional[int]:
        p = self.tags.select(tag, self.tags.rank(tag, x + 1) + 1)
        return p if p is not None and p <= self.close(x) else None

    def tagged_foll(self, x: int, tag: int) -> Optional[int]:
        return self.tags.select(tag, self.tags.rank(tag, self.close(x) + 1) + 1)

    def tagged_prec(self, x: int, tag: int) -> Optional[int]:
        r = self.tags.rank(tag, x)
        while r >= 1:
            p = self.tags.select(tag, r)
            if self.close(p) < x:
                return p
            r -= 1
        return None

    def tagged_next(self, tag: int, i: int) -> Optional[int]:
        """First node labelled ``tag`` at position ``>= i``."""
        return self.tags.next_at_or_after(tag, i)

    # -- texts ----------------------------------------------------------------

    def leaf_number(self, x: int) -> int:
        """Text leaves among positions ``[0, x]``."""
        return self.leaves.rank1(x + 1)

    def text_ids(self, x: int) -> tuple[int, int]:
        return self.leaves.rank1(x) + 1, self.leaves.rank1(self.close(x) + 1)

    def text_id(self, x: int) -> Optional[int]:
        """Text id stored at leaf ``x``, or None when ``x`` carries no text."""
        return self.leaves.rank1(x + 1) if self.leaves.access(x) else None

    def text_node(self, d: int) -> int:
        p = self.leaves.select1(d)
        if p is None:
            raise IndexError(f"text id {d} outside [1, {self.d}]")
        return p - 1

    def xml_id_text(self, d: int) -> int:
        return self.preorder(self.text_node(d))

    def xml_id_node(self, x: int) -> int:
        return self.preorder(x)

    def get_text(self, d: int) -> bytes:
        if not 1 <= d <= self.d:
            raise IndexError(f"text id {d} outside [1, {self.d}]")
        if self.text_source is None:
            raise RuntimeError("no text source attached")
        return self.text_source(d)

    def get_subtree(self, x: int) -> bytes:
        """Serialize the subtree rooted at node ``x`` back to XML."""
        if not (0 <= x < self.par.m and self.par.is_open(x)):
            raise IndexError(f"{x} is not a node")
        code_text, code_root, code_attrs = self.code(TEXT), self.code(ROOT), self.code(ATTRS)
        name = self.tag_name(x)
        if name == TEXT or name == VALUE:
            tid = self.text_id(x)
            return _escape_text(self.get_text(tid)) if tid else b""
        if name == ATTRS:
            return b" ".join(k + b'="' + _escape_attr(v) + b'"' for k, v in self._attributes(x))
        out = bytearray()
        stack = []
        end = self.close(x)
        i = x
        while i <= end:
            if not self.par.is_open(i):
                name_b = stack.pop()
                if name_b is not None:
                    out += b"</" + name_b + b">"
                i += 1
                continue
            c = self.tags[i]
            if c == code_text:
                tid = self.text_id(i)
                if tid:
                    out += _escape_text(self.get_text(tid))
                i += 2
                continue
            if c == code_root:
                stack.append(None)
                i += 1
                continue
            name_b = self.name(c).encode("utf-8")
            out += b"<" + name_b
            j = i + 1
            if self.par.is_open(j) and self.tags[j] == code_attrs:
                for k, v in self._attributes(j):
                    out += b" " + k + b'="' + _escape_attr(v) + b'"'
                j = self.close(j) + 1
            if not self.par.is_open(j):
                out += b"/>"
                i = j + 1
                continue
            out += b">"
            stack.append(name_b)
            i = j
        return bytes(out)

    def _attributes(self, at: int):
        for k in self.children(at):
            v = self.first_child(k)
            tid = self.text_id(v) if v is not None else None
            yield self.tag_name(k).encode("utf-8"), (self.get_text(tid) if tid else b"")

    # -- serialization ----------------------------------------------------------

    def to_sections(self) -> dict:
        names = [struct.pack("<Q", len(self.tag_names))]
        for nm in self.tag_names:
            raw = nm.encode("utf-8")
            names.append(struct.pack("<Q", len(raw)) + raw + b"\0" * (-len(raw) % 8))
        return {
            "names": b"".join(names),
            "par": self.par.bv.to_bytes(),
            "tag": self.tags.to_bytes(),
            "leaves": self.leaves.to_bytes(),
        }

    @staticmethod
    def names_from_bytes(buf) -> list:
        (k,) = struct.unpack_from("<Q", buf, 0)
        off, out = 8, []
        for _ in range(k):
            (ln,) = struct.unpack_from("<Q", buf, off)
            off += 8
            out.append(bytes(buf[off:off + ln]).decode("utf-8"))
            off += ln + (-ln % 8)
        return out

    @classmethod
    def from_sections(cls, names, par, tag, leaves, text_source=None) -> "TreeIndex":
        pbv, _ = BitVector.from_bytes(par, 0)
        tseq, _ = TagSequence.from_bytes(tag, 0)
        lbv, _ = BitVector.from_bytes(leaves, 0)
        return cls(ParSequence(pbv), tseq, lbv, cls.names_from_bytes(names), text_source)
