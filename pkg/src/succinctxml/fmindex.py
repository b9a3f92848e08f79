"""FM-index over a collection of $-terminated texts.

Rows of the conceptual sorted matrix are 1-based, text identifiers are
1-based, and the terminator of text ``i`` sorts as a symbol smaller than
every byte and smaller than the terminator of text ``j > i``; row ``i``
therefore starts with the terminator of text ``i``.

``Doc`` maps the j-th terminator in the BWT (in row order) to the text that
starts right after it. It is a wavelet matrix over the permutation so a
(row range x id range) rectangle can be counted or reported.
"""

from __future__ import annotations

import struct
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .bits import _MASKS, BitVector, SparseBitSequence
from .errors import RejectedInputError

DEFAULT_SAMPLE_RATE = 64
MODES = ("exists", "count", "report")


@dataclass(frozen=True)
class SearchRange:
    sp: int
    ep: int

    @property
    def empty(self) -> bool:
        return self.sp > self.ep

    def __len__(self) -> int:
        return max(0, self.ep - self.sp + 1)


class WaveletMatrix:
    """Wavelet matrix over integers in ``[0, 2**bits)``."""

    def __init__(self, values, bits: int):
        self.bits = bits
        self.n = len(values)
        self.levels: list[BitVector] = []
        self.zeros: list[int] = []
        cur = np.asarray(values, dtype=np.int64)
        for level in range(bits):
            b = ((cur >> (bits - 1 - level)) & 1).astype(bool)
            bv = BitVector(b)
            self.levels.append(bv)
            self.zeros.append(self.n - bv.ones)
            cur = np.concatenate([cur[~b], cur[b]])
        self._starts: dict[int, int] = {}
        self._prepare()

    def _prepare(self) -> None:
        # per level: rank directory, 512-bit blocks (plus a zero sentinel) and zero count
        self._fast = [(bv._ranks, bv._blocks + [0], z) for bv, z in zip(self.levels, self.zeros)]

    def access(self, i: int) -> int:
        c = 0
        for bv, z in zip(self.levels, self.zeros):
            if bv.access(i):
                c = (c << 1) | 1
                i = z + bv.rank1(i)
            else:
                c <<= 1
                i -= bv.rank1(i)
        return c

    def _start(self, c: int) -> int:
        s = self._starts.get(c)
        if s is None:
            s = 0
            for level, (bv, z) in enumerate(zip(self.levels, self.zeros)):
                if (c >> (self.bits - 1 - level)) & 1:
                    s = z + bv.rank1(s)
                else:
                    s -= bv.rank1(s)
            self._starts[c] = s
        return s

    def rank(self, c: int, i: int) -> int:
        """Occurrences of ``c`` in positions ``[0, i)``."""
        if c >> self.bits:
            return 0
        for level, (bv, z) in enumerate(zip(self.levels, self.zeros)):
            if (c >> (self.bits - 1 - level)) & 1:
                i = z + bv.rank1(i)
            else:
                i -= bv.rank1(i)
        return i - self._start(c)

    def rank_pair(self, c: int, i: int, j: int) -> tuple[int, int]:
        """``(rank(c, i), rank(c, j))`` in a single descent."""
        if c >> self.bits:
            return 0, 0
        shift = self.bits
        for ranks, blocks, z in self._fast:
            shift -= 1
            ri = ranks[i >> 9] + (blocks[i >> 9] & _MASKS[i & 511]).bit_count()
            rj = ranks[j >> 9] + (blocks[j >> 9] & _MASKS[j & 511]).bit_count()
            if (c >> shift) & 1:
                i, j = z + ri, z + rj
            else:
                i, j = i - ri, j - rj
        s = self._start(c)
        return i - s, j - s

    def access_rank(self, i: int) -> tuple[int, int]:
        """``(value at i, occurrences of that value in [0, i))`` in one descent."""
        c = 0
        for bv, z in zip(self.levels, self.zeros):
            if bv.access(i):
                c = (c << 1) | 1
                i = z + bv.rank1(i)
            else:
                c <<= 1
                i -= bv.rank1(i)
        return c, i - self._start(c)

    def range_count(self, a: int, b: int, lo: int, hi: int) -> int:
        """Number of positions in ``[a, b)`` holding a value in ``[lo, hi]``."""
        return self._count(0, a, b, 0, lo, hi)

    def _count(self, level, a, b, prefix, lo, hi) -> int:
        if a >= b:
            return 0
        rem = self.bits - level
        span_lo = prefix << rem
        span_hi = span_lo + (1 << rem) - 1
        if span_hi < lo or span_lo > hi:
            return 0
        if lo <= span_lo and span_hi <= hi:
            return b - a
        bv, z = self.levels[level], self.zeros[level]
        ra, rb = bv.rank1(a), bv.rank1(b)
        return (self._count(level + 1, a - ra, b - rb, prefix << 1, lo, hi)
                + self._count(level + 1, z + ra, z + rb, (prefix << 1) | 1, lo, hi))

    def range_report(self, a: int, b: int, lo: int, hi: int) -> Iterator[int]:
        """Values in ``[lo, hi]`` found at positions ``[a, b)``, ascending, with multiplicity."""
        stack = [(0, a, b, 0)]
        while stack:
            level, a, b, prefix = stack.pop()
            if a >= b:
                continue
            rem = self.bits - level
            span_lo = prefix << rem
            if span_lo + (1 << rem) - 1 < lo or span_lo > hi:
                continue
            if rem == 0:
                for _ in range(b - a):
                    yield prefix
                continue
            bv, z = self.levels[level], self.zeros[level]
            ra, rb = bv.rank1(a), bv.rank1(b)
            stack.append((level + 1, z + ra, z + rb, (prefix << 1) | 1))
            stack.append((level + 1, a - ra, b - rb, prefix << 1))

    def to_bytes(self) -> bytes:
        out = [struct.pack("<QQ", self.n, self.bits)]
        out.extend(bv.to_bytes() for bv in self.levels)
        return b"".join(out)

    @classmethod
    def from_bytes(cls, buf, offset: int = 0) -> "tuple[WaveletMatrix, int]":
        n, bits = struct.unpack_from("<QQ", buf, offset)
        offset += 16
        wm = cls.__new__(cls)
        wm.n, wm.bits, wm.levels, wm.zeros, wm._starts = n, bits, [], [], {}
        for _ in range(bits):
            bv, offset = BitVector.from_bytes(buf, offset)
            wm.levels.append(bv)
            wm.zeros.append(n - bv.ones)
        wm._prepare()
        return wm, offset


def suffix_array(seq: np.ndarray) -> np.ndarray:
    """Suffix array by prefix doubling; shorter suffixes sort first on ties."""
    n = len(seq)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    _, rank = np.unique(np.asarray(seq), return_inverse=True)
    rank = rank.astype(np.int64).ravel()
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:]
        sa = np.lexsort((second, rank))
        r, s = rank[sa], second[sa]
        flags = np.empty(n, dtype=bool)
        flags[0] = True
        flags[1:] = (r[1:] != r[:-1]) | (s[1:] != s[:-1])
        ranks_sorted = np.cumsum(flags) - 1
        rank = np.empty(n, dtype=np.int64)
        rank[sa] = ranks_sorted
        if ranks_sorted[-1] == n - 1:
            return sa
        k *= 2


class PlainTextStore:
    """Texts stored verbatim with an Elias-Fano list of start offsets."""

    def __init__(self, texts: Sequence[bytes]):
        self.blob = b"".join(texts)
        starts = np.zeros(len(texts), dtype=np.int64)
        if len(texts) > 1:
            starts[1:] = np.cumsum([len(t) for t in texts[:-1]])
        self.starts = SparseBitSequence(len(self.blob) + 1, starts)

    def __len__(self) -> int:
        return len(self.starts)

    def get(self, text_id: int) -> bytes:
        d = len(self.starts)
        if not 1 <= text_id <= d:
            raise IndexError(f"text id {text_id} outside [1, {d}]")
        a = self.starts.select1(text_id)
        b = self.starts.select1(text_id + 1) if text_id < d else len(self.blob)
        return self.blob[a:b]

    def to_bytes(self) -> bytes:
        blob = self.blob + b"\0" * (-len(self.blob) % 8)
        return struct.pack("<Q", len(self.blob)) + blob + self.starts.to_bytes()

    @classmethod
    def from_bytes(cls, buf, offset: int = 0) -> "tuple[PlainTextStore, int]":
        (size,) = struct.unpack_from("<Q", buf, offset)
        offset += 8
        store = cls.__new__(cls)
        store.blob = bytes(buf[offset:offset + size])
        offset += size + (-size % 8)
        store.starts, offset = SparseBitSequence.from_bytes(buf, offset)
        return store, offset


class FMIndex:
    """Self-index over ``d`` texts supporting search, locate and extraction."""

    def __init__(self, bwt: WaveletMatrix, C: list, doc: WaveletMatrix,
                 sampled_rows: SparseBitSequence, sample_ids: np.ndarray,
                 d: int, sample_rate: int, plain: Optional[PlainTextStore] = None):
        self.bwt = bwt
        self.C = C
        self.doc = doc
        self.sampled_rows = sampled_rows
        self.sample_ids = sample_ids.tolist() if isinstance(sample_ids, np.ndarray) else list(sample_ids)
        self.d = d
        self.u = bwt.n
        self.sample_rate = sample_rate
        self.plain = plain

    # -- primitives ---------------------------------------------------------

    def L(self, row: int) -> int:
        return self.bwt.access(row - 1)

    def rank(self, c: int, i: int) -> int:
        """Occurrences of byte ``c`` in ``L[1..i]``."""
        return self.bwt.rank(c, i)

    def lf(self, row: int) -> int:
        if not 1 <= row <= self.u:
            raise IndexError(f"row {row} outside [1, {self.u}]")
        c, r = self.bwt.access_rank(row - 1)
        return self.C[c] + r + 1

    def backward_search(self, pattern: bytes, start: Optional[SearchRange] = None) -> SearchRange:
        sp, ep = (1, self.u) if start is None else (start.sp, start.ep)
        C, rank_pair = self.C, self.bwt.rank_pair
        for c in reversed(pattern):
            if sp > ep:
                break
            a, b = rank_pair(c, sp - 1, ep)
            sp = C[c] + a + 1
            ep = C[c] + b
        return SearchRange(sp, ep)

    def count(self, pattern: bytes) -> int:
        return len(self.backward_search(pattern))

    def _lt(self, pattern: bytes) -> int:
        """Number of rows whose suffix is lexicographically smaller than ``pattern``."""
        k = 0
        C, rank = self.C, self.bwt.rank
        for c in reversed(pattern):
            k = C[c] + rank(c, k)
        return k

    def locate(self, row: int) -> int:
        """Text id of the text containing the suffix at ``row`` (which must not start at a $).

        Walks LF until a sampled row, or until the preceding symbol is a
        terminator, in which case Doc names the text starting there.
        """
        sampled, access_rank, C = self.sampled_rows, self.bwt.access_rank, self.C
        while True:
            k = sampled.rank1(row - 1)
            if sampled.select1(k + 1) == row - 1:
                return self.sample_ids[k]
            c, r = access_rank(row - 1)
            if c == 0:
                return self.doc.access(r) + 1
            row = C[c] + r + 1

    def _doc_range(self, sp: int, ep: int) -> tuple[int, int]:
        """Doc positions ``[a, b)`` of the terminators in ``L[sp..ep]``."""
        if sp > ep:
            return 0, 0
        return self.bwt.rank(0, sp - 1), self.bwt.rank(0, ep)

    def _check_range(self, x, y) -> tuple[int, int]:
        x = 1 if x is None else x
        y = self.d if y is None else y
        if not (1 <= x and y <= self.d):
            raise IndexError(f"text id range [{x}, {y}] outside [1, {self.d}]")
        return x, y

    def _answer_doc(self, a: int, b: int, x: int, y: int, mode: str):
        if mode == "exists":
            return self.doc.range_count(a, b, x - 1, y - 1) > 0
        if mode == "count":
            return self.doc.range_count(a, b, x - 1, y - 1)
        if mode == "report":
            return [v + 1 for v in self.doc.range_report(a, b, x - 1, y - 1)]
        raise ValueError(f"unknown mode {mode!r}")

    # -- text predicates ----------------------------------------------------

    def starts_with(self, pattern: bytes, x: int = None, y: int = None, mode: str = "report"):
        x, y = self._check_range(x, y)
        if x > y:
            return _empty(mode)
        r = self.backward_search(pattern)
        return self._answer_doc(*self._doc_range(r.sp, r.ep), x, y, mode)

    def ends_with(self, pattern: bytes, x: int = None, y: int = None, mode: str = "report"):
        x, y = self._check_range(x, y)
        if x > y:
            return _empty(mode)
        if not pattern:
            return _from_ids(list(range(x, y + 1)), mode)
        r = self.backward_search(pattern, SearchRange(x, y))
        if mode == "exists":
            return not r.empty
        if mode == "count":
            return len(r)
        if mode != "report":
            raise ValueError(f"unknown mode {mode!r}")
        return sorted(self.locate(row) for row in range(r.sp, r.ep + 1))

    def equals(self, pattern: bytes, x: int = None, y: int = None, mode: str = "report"):
        x, y = self._check_range(x, y)
        if x > y:
            return _empty(mode)
        r = self.backward_search(pattern, SearchRange(x, y))
        return self._answer_doc(*self._doc_range(r.sp, r.ep), x, y, mode)

    def count_all_occurrences(self, pattern: bytes) -> int:
        return self.count(pattern)

    def iter_contains(self, pattern: bytes, x: int = None, y: int = None) -> Iterator[int]:
        """Distinct ids of texts in ``[x, y]`` containing ``pattern``, in discovery order."""
        x, y = self._check_range(x, y)
        r = self.backward_search(pattern)
        seen = set()
        for row in range(r.sp, r.ep + 1):
            tid = self.locate(row)
            if x <= tid <= y and tid not in seen:
                seen.add(tid)
                yield tid

    def contains(self, pattern: bytes, x: int = None, y: int = None, mode: str = "report"):
        if not pattern:
            x, y = self._check_range(x, y)
            return _from_ids(list(range(x, y + 1)), mode)
        it = self.iter_contains(pattern, x, y)
        if mode == "exists":
            return next(it, None) is not None
        ids = sorted(it)
        return _from_ids(ids, mode)

    def lex_compare(self, pattern: bytes, op: str, x: int = None, y: int = None, mode: str = "report"):
        """Texts in ``[x, y]`` comparing to ``pattern`` under ``op`` (one of <=, <, >, >=)."""
        x, y = self._check_range(x, y)
        if x > y:
            return _empty(mode)
        if op in ("<=", ">"):
            k = self._lt(bytes(pattern) + b"\x01")
        elif op in ("<", ">="):
            k = self._lt(pattern)
        else:
            raise ValueError(f"unknown comparison {op!r}")
        split = self.bwt.rank(0, k)
        a, b = (0, split) if op in ("<=", "<") else (split, self.d)
        return self._answer_doc(a, b, x, y, mode)

    # -- extraction ---------------------------------------------------------

    def extract_text(self, text_id: int) -> bytes:
        if not 1 <= text_id <= self.d:
            raise IndexError(f"text id {text_id} outside [1, {self.d}]")
        if self.plain is not None:
            return self.plain.get(text_id)
        return self.extract_by_lf(text_id)

    def extract_by_lf(self, text_id: int) -> bytes:
        out = bytearray()
        row = text_id
        access_rank, C = self.bwt.access_rank, self.C
        while True:
            c, r = access_rank(row - 1)
            if c == 0:
                break
            out.append(c)
            row = C[c] + r + 1
        out.reverse()
        return bytes(out)

    # -- serialization ------------------------------------------------------

    def to_sections(self) -> dict:
        fm = struct.pack("<QQQ", self.u, self.d, self.sample_rate)
        fm += np.asarray(self.C, dtype="<u8").tobytes() + self.bwt.to_bytes()
        samples = self.sampled_rows.to_bytes() + np.asarray(self.sample_ids, dtype="<u4").tobytes()
        out = {"fm": fm, "doc": self.doc.to_bytes(), "samples": samples}
        if self.plain is not None:
            out["plain"] = self.plain.to_bytes()
        return out

    @classmethod
    def from_sections(cls, fm, doc, samples, plain=None) -> "FMIndex":
        u, d, rate = struct.unpack_from("<QQQ", fm, 0)
        C = np.frombuffer(bytes(fm[24:24 + 257 * 8]), dtype="<u8").astype(np.int64).tolist()
        bwt, _ = WaveletMatrix.from_bytes(fm, 24 + 257 * 8)
        docwm, _ = WaveletMatrix.from_bytes(doc, 0)
        rows, off = SparseBitSequence.from_bytes(samples, 0)
        ids = np.frombuffer(bytes(samples[off:off + 4 * len(rows)]), dtype="<u4")
        store = PlainTextStore.from_bytes(plain, 0)[0] if plain is not None else None
        return cls(bwt, C, docwm, rows, ids, d, rate, store)


def _empty(mode: str):
    return _from_ids([], mode)


def _from_ids(ids: list, mode: str):
    if mode == "exists":
        return bool(ids)
    if mode == "count":
        return len(ids)
    if mode == "report":
        return ids
    raise ValueError(f"unknown mode {mode!r}")


def build_fm_index(texts: Sequence[bytes], sample_rate: int = DEFAULT_SAMPLE_RATE,
                   store_plain: bool = False) -> FMIndex:
    """Build the FM-index of ``texts`` (non-empty byte strings without byte 0)."""
    if sample_rate < 1:
        raise ValueError("sample rate must be positive")
    d = len(texts)
    for t in texts:
        if not t:
            raise RejectedInputError("empty text")
        if b"\0" in t:
            raise RejectedInputError("text contains byte 0")
    lengths = np.fromiter((len(t) + 1 for t in texts), dtype=np.int64, count=d)
    u = int(lengths.sum())
    starts = np.zeros(d, dtype=np.int64)
    if d:
        starts[1:] = np.cumsum(lengths)[:-1]
    raw = np.frombuffer(b"".join(bytes(t) + b"\0" for t in texts), dtype=np.uint8).astype(np.int64)
    # terminator of text i becomes symbol i, byte c becomes c + d - 1
    seq = raw + (d - 1)
    ends = starts + lengths - 1
    seq[ends] = np.arange(d, dtype=np.int64)

    sa = suffix_array(seq)
    prev = seq[sa - 1]          # sa == 0 wraps to the last terminator
    L = np.where(prev < d, 0, prev - (d - 1)).astype(np.int64)
    bwt = WaveletMatrix(L, 8)

    counts = np.bincount(L, minlength=256)
    C = [0] * 257
    C[1:] = np.cumsum(counts).tolist()

    text_of = np.repeat(np.arange(d, dtype=np.int64), lengths)
    dollar_rows = np.nonzero(L == 0)[0]
    doc = WaveletMatrix(text_of[sa[dollar_rows]], max(1, int(max(d - 1, 0)).bit_length()))

    offsets = np.arange(u, dtype=np.int64) - starts[text_of] if u else np.zeros(0, dtype=np.int64)
    # offset 0 is found through Doc, so only interior offsets are sampled
    is_sample = (offsets % sample_rate == 0) & (offsets > 0) & (raw != 0)
    sampled_pos = is_sample[sa]
    sampled_rows = np.nonzero(sampled_pos)[0]
    sample_ids = text_of[sa[sampled_rows]] + 1
    plain = PlainTextStore(texts) if store_plain else None
    return FMIndex(bwt, C, doc, SparseBitSequence(u, sampled_rows), sample_ids.astype(np.uint32),
                   d, sample_rate, plain)
