"""Plain rank/select bitvectors and an Elias-Fano sparse bit sequence.

Positions are 0-based. ``rank`` takes a prefix *length* (so ``rank(bit, i)``
counts occurrences in ``bits[0:i]``) and ``select`` takes a 1-based ordinal
and returns the 1-based position of that occurrence. This is the algebra
used by the tree and text formulas, where ``select(rank(p))`` round-trips.

Bits are kept as 512-bit Python integers per block, so a rank is a
directory lookup plus one masked popcount.
"""

from __future__ import annotations

import struct
from bisect import bisect_left
from typing import Iterable, Optional

import numpy as np

BLOCK = 512
_BLOCK_SHIFT = 9
_MASKS = [(1 << k) - 1 for k in range(BLOCK + 1)]
_M64 = (1 << 64) - 1

# k-th set bit (1-based k) inside a byte, indexed [byte][k-1]
_BYTE_SELECT = [[p for p in range(8) if (b >> p) & 1] for b in range(256)]


class BitVectorError(IndexError):
    pass


def _kth_one(x: int, k: int) -> int:
    """0-based offset of the k-th set bit of ``x`` (k >= 1, must exist)."""
    base = 0
    while True:
        w = x & _M64
        c = w.bit_count()
        if k <= c:
            break
        k -= c
        x >>= 64
        base += 64
    while True:
        b = w & 0xFF
        c = len(_BYTE_SELECT[b])
        if k <= c:
            return base + _BYTE_SELECT[b][k - 1]
        k -= c
        w >>= 8
        base += 8


def _as_bool_array(bits) -> np.ndarray:
    if isinstance(bits, np.ndarray):
        return bits.astype(bool, copy=False).ravel()
    if isinstance(bits, str):
        return np.frombuffer(bits.encode("ascii"), dtype=np.uint8) == ord("1")
    return np.fromiter((bool(b) for b in bits), dtype=bool)


class BitVector:
    """Static bitvector with constant-time rank and logarithmic select."""

    __slots__ = ("_m", "_bytes", "_blocks", "_ranks", "_zranks", "_ones")

    def __init__(self, bits: "Iterable[int] | np.ndarray | str" = ()):
        arr = _as_bool_array(bits)
        self._init_packed(np.packbits(arr, bitorder="little").tobytes(), len(arr))

    def _init_packed(self, packed: bytes, m: int) -> None:
        self._m = m
        nblocks = (m + BLOCK - 1) // BLOCK
        padded = packed + b"\0" * (nblocks * 64 - len(packed))
        self._bytes = padded
        self._blocks = [
            int.from_bytes(padded[k * 64:(k + 1) * 64], "little") for k in range(nblocks)
        ]
        counts = [b.bit_count() for b in self._blocks]
        ranks = [0] * (nblocks + 1)
        acc = 0
        for k, c in enumerate(counts):
            ranks[k] = acc
            acc += c
        ranks[nblocks] = acc
        self._ranks = ranks
        self._zranks = [k * BLOCK - r for k, r in enumerate(ranks)]
        self._zranks[nblocks] = m - acc
        self._ones = acc

    @classmethod
    def from_positions(cls, m: int, positions) -> "BitVector":
        arr = np.zeros(m, dtype=bool)
        if len(positions):
            arr[np.asarray(positions, dtype=np.int64)] = True
        return cls(arr)

    def __len__(self) -> int:
        return self._m

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self._m:
            raise BitVectorError(f"position {i} outside [0, {self._m})")
        return (self._bytes[i >> 3] >> (i & 7)) & 1

    def access(self, i: int) -> int:
        return (self._bytes[i >> 3] >> (i & 7)) & 1

    @property
    def ones(self) -> int:
        return self._ones

    def rank1(self, i: int) -> int:
        b = i >> _BLOCK_SHIFT
        if b >= len(self._blocks):
            return self._ones
        return self._ranks[b] + (self._blocks[b] & _MASKS[i & 511]).bit_count()

    def rank(self, bit: int, i: int) -> int:
        """Number of ``bit`` occurrences among the first ``i`` positions."""
        if not 0 <= i <= self._m:
            raise BitVectorError(f"prefix length {i} outside [0, {self._m}]")
        r = self.rank1(i)
        return r if bit else i - r

    def select1(self, j: int) -> Optional[int]:
        if j < 1 or j > self._ones:
            return None
        b = bisect_left(self._ranks, j) - 1
        return b * BLOCK + _kth_one(self._blocks[b], j - self._ranks[b]) + 1

    def select0(self, j: int) -> Optional[int]:
        zeros = self._m - self._ones
        if j < 1 or j > zeros:
            return None
        b = bisect_left(self._zranks, j) - 1
        width = min(BLOCK, self._m - b * BLOCK)
        inv = ~self._blocks[b] & _MASKS[width]
        return b * BLOCK + _kth_one(inv, j - self._zranks[b]) + 1

    def select(self, bit: int, j: int) -> Optional[int]:
        """1-based position of the ``j``-th ``bit``; ``None`` when there is none."""
        return self.select1(j) if bit else self.select0(j)

    def to_numpy(self) -> np.ndarray:
        raw = np.frombuffer(self._bytes, dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self._m].astype(bool)

    # -- serialization: u64 length, packed words, u32 rank directory --------

    def to_bytes(self) -> bytes:
        nwords = (self._m + 63) // 64
        body = self._bytes[: nwords * 8].ljust(nwords * 8, b"\0")
        ranks = np.asarray(self._ranks[:-1], dtype="<u4").tobytes()
        out = struct.pack("<Q", self._m) + body + ranks
        return out + b"\0" * (-len(out) % 8)

    @classmethod
    def from_bytes(cls, buf, offset: int = 0) -> "tuple[BitVector, int]":
        (m,) = struct.unpack_from("<Q", buf, offset)
        offset += 8
        nwords = (m + 63) // 64
        packed = bytes(buf[offset:offset + nwords * 8])
        offset += nwords * 8
        nblocks = (m + BLOCK - 1) // BLOCK
        offset += 4 * nblocks
        offset += -offset % 8
        bv = cls.__new__(cls)
        bv._init_packed(packed[: (m + 7) // 8], m)
        return bv, offset

    def __repr__(self) -> str:
        preview = "".join(str(self.access(i)) for i in range(min(self._m, 32)))
        return f"BitVector(m={self._m}, ones={self._ones}, bits={preview}{'...' if self._m > 32 else ''})"


class SparseBitSequence:
    """Elias-Fano encoding of a strictly increasing set of positions.

    Upper bits go to a unary-coded :class:`BitVector`, lower bits are kept
    verbatim. ``select1`` is one select on the upper part; ``rank1`` walks a
    single bucket.
    """

    __slots__ = ("_m", "_k", "_low_bits", "_lows", "_high")

    def __init__(self, universe: int, positions=()):
        pos = np.asarray(positions, dtype=np.int64)
        if len(pos) and (pos[0] < 0 or pos[-1] >= max(universe, 1) or np.any(np.diff(pos) <= 0)):
            raise ValueError("positions must be strictly increasing within the universe")
        self._m = universe
        self._k = k = len(pos)
        low_bits = 0
        if k and universe > k:
            low_bits = int(universe // k).bit_length() - 1
        self._low_bits = low_bits
        self._lows = (pos & ((1 << low_bits) - 1)).tolist()
        highs = pos >> low_bits
        hb = np.zeros(k + (universe >> low_bits) + 1, dtype=bool)
        hb[highs + np.arange(k)] = True
        self._high = BitVector(hb)

    def __len__(self) -> int:
        return self._k

    @property
    def universe(self) -> int:
        return self._m

    def select1(self, j: int) -> Optional[int]:
        """0-based position of the ``j``-th element (1-based), ``None`` if absent."""
        if j < 1 or j > self._k:
            return None
        hpos = self._high.select1(j) - 1
        return ((hpos - (j - 1)) << self._low_bits) | self._lows[j - 1]

    def rank1(self, p: int) -> int:
        """Number of elements strictly smaller than ``p``."""
        if p <= 0:
            return 0
        if p >= self._m:
            return self._k
        h = p >> self._low_bits
        low = p & _MASKS[self._low_bits]
        if h == 0:
            idx = 0
        else:
            z = self._high.select0(h)
            if z is None:
                return self._k
            idx = z - h
        high = self._high
        while idx < self._k and high.access(idx + h) and self._lows[idx] < low:
            idx += 1
        return idx

    def next_geq(self, p: int) -> Optional[int]:
        return self.select1(self.rank1(p) + 1)

    def __iter__(self):
        for j in range(1, self._k + 1):
            yield self.select1(j)

    def to_bytes(self) -> bytes:
        head = struct.pack("<QQB", self._m, self._k, self._low_bits) + b"\0" * 7
        lows = np.asarray(self._lows, dtype=np.uint64)
        if self._low_bits and self._k:
            shifts = np.arange(self._low_bits, dtype=np.uint64)
            mat = ((lows[:, None] >> shifts) & np.uint64(1)).astype(bool).ravel()
            packed = np.packbits(mat, bitorder="little").tobytes()
        else:
            packed = b""
        packed += b"\0" * (-len(packed) % 8)
        return head + struct.pack("<Q", len(packed)) + packed + self._high.to_bytes()

    @classmethod
    def from_bytes(cls, buf, offset: int = 0) -> "tuple[SparseBitSequence, int]":
        m, k, low_bits = struct.unpack_from("<QQB", buf, offset)
        offset += 24
        (plen,) = struct.unpack_from("<Q", buf, offset)
        offset += 8
        raw = np.frombuffer(bytes(buf[offset:offset + plen]), dtype=np.uint8)
        offset += plen
        seq = cls.__new__(cls)
        seq._m, seq._k, seq._low_bits = m, k, low_bits
        if low_bits and k:
            bits = np.unpackbits(raw, bitorder="little")[: k * low_bits].reshape(k, low_bits)
            weights = (1 << np.arange(low_bits, dtype=np.int64))
            seq._lows = (bits.astype(np.int64) * weights).sum(axis=1).tolist()
        else:
            seq._lows = [0] * k
        seq._high, offset = BitVector.from_bytes(buf, offset)
        return seq, offset
