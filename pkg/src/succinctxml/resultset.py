"""Answer set over ``[1, cap]`` with logarithmic insert and range removal."""

from __future__ import annotations

from typing import Iterator


class MarkTree:
    """Perfect binary tree of marks; an id is present iff its whole root path is marked.

    Range removal clears the O(log cap) nodes covering the range. Inserting
    below a cleared node pushes the zero down to the off-path siblings
    before re-marking the path, so other ids stay absent.
    """

    __slots__ = ("cap", "levels", "_marks", "last_touches", "max_touches")

    def __init__(self, n: int):
        if n < 1:
            n = 1
        cap, levels = 1, 0
        while cap < n:
            cap <<= 1
            levels += 1
        self.cap = cap
        self.levels = levels
        # internal nodes 1..cap-1 start marked, leaves start empty
        self._marks = bytearray((2 * cap + 7) // 8)
        if cap >= 8:
            self._marks[: cap >> 3] = b"\xff" * (cap >> 3)
        else:
            for v in range(1, cap):
                self._set(v)
        self._clear(0)
        self.last_touches = 0
        self.max_touches = 0

    def _get(self, v: int) -> int:
        return (self._marks[v >> 3] >> (v & 7)) & 1

    def _set(self, v: int) -> None:
        self._marks[v >> 3] |= 1 << (v & 7)

    def _clear(self, v: int) -> None:
        self._marks[v >> 3] &= ~(1 << (v & 7)) & 0xFF

    @property
    def nbytes(self) -> int:
        return len(self._marks)

    @property
    def touch_bound(self) -> int:
        return 2 * self.levels + 2

    def _check(self, i: int) -> None:
        if not 1 <= i <= self.cap:
            raise IndexError(f"id {i} outside [1, {self.cap}]")

    def _record(self, touches: int) -> None:
        self.last_touches = touches
        if touches > self.max_touches:
            self.max_touches = touches

    def insert(self, i: int) -> None:
        self._check(i)
        get, setm, clear = self._get, self._set, self._clear
        leaf = self.cap + i - 1
        touches = 0
        zeroed = False
        v = 1
        for depth in range(self.levels - 1, -1, -1):
            if not get(v):
                setm(v)
                touches += 1
                zeroed = True
            nxt = 2 * v + ((leaf >> depth) & 1)
            if zeroed:
                sib = nxt ^ 1
                if get(sib):
                    clear(sib)
                    touches += 1
            v = nxt
        if not get(v):
            setm(v)
            touches += 1
        self._record(touches)

    def remove_range(self, lo: int, hi: int) -> None:
        if lo > hi:
            raise ValueError(f"empty range [{lo}, {hi}]")
        self._check(lo)
        self._check(hi)
        get, clear = self._get, self._clear
        left, right = self.cap + lo - 1, self.cap + hi - 1
        touches = 0
        while left <= right:
            if left & 1:
                if get(left):
                    clear(left)
                    touches += 1
                left += 1
            if not right & 1:
                if get(right):
                    clear(right)
                    touches += 1
                right -= 1
            left >>= 1
            right >>= 1
        self._record(touches)

    def __contains__(self, i: int) -> bool:
        if not 1 <= i <= self.cap:
            return False
        v = self.cap + i - 1
        while v:
            if not self._get(v):
                return False
            v >>= 1
        return True

    def __iter__(self) -> Iterator[int]:
        get, cap = self._get, self.cap
        stack = [1]
        while stack:
            v = stack.pop()
            if not get(v):
                continue
            if v >= cap:
                yield v - cap + 1
            else:
                stack.append(2 * v + 1)
                stack.append(2 * v)

    def enumerate(self) -> list:
        return list(self)

    def size(self) -> int:
        return sum(1 for _ in self)

    def __len__(self) -> int:
        return self.size()
