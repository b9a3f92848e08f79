"""Query evaluation: top-down runs (plain, memoized, jumping) and bottom-up runs.

State sets are int bitmasks. A state mapping is a dict from state to rope
(see :mod:`.automaton`); its domain is the set of accepting states.
"""

from __future__ import annotations

import sys
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Optional

from .automaton import (
    ALL, Automaton, compile_ast, concat, eval_formula, has_value_atom, iter_rope, specialize, states_under,
)
from .fmindex import SearchRange
from .ingest import ATTRS
from .resultset import MarkTree
from .xpath import SELF_NODE, And, Compare, LocationPath, parse_xpath

STRATEGIES = ("auto", "naive", "memoized", "jumping", "topdown", "bottomup")


def _mask(states) -> int:
    m = 0
    for q in states:
        m |= 1 << q
    return m


def _bits(mask: int):
    q = 0
    while mask:
        if mask & 1:
            yield q
        mask >>= 1
        q += 1


def _dom(R: dict) -> int:
    m = 0
    for q in R:
        m |= 1 << q
    return m


class PredicateEvaluator:
    """Decides label and value atoms at a node; value atoms go through the text index.

    A value atom holds at node ``x`` when some text leaf below ``x`` (or ``x``
    itself) passes the string test.
    """

    def __init__(self, tree, fm_loader):
        self.tree = tree
        self._fm_loader = fm_loader
        self._fm = None
        self._ranges: dict = {}
        self._ids: dict = {}

    @property
    def fm(self):
        if self._fm is None:
            self._fm = self._fm_loader()
        return self._fm

    def _doc_range(self, op: str, value: bytes) -> tuple:
        key = (op, value)
        r = self._ranges.get(key)
        if r is None:
            fm = self.fm
            if op == "=":
                sr = fm.backward_search(value, SearchRange(1, fm.d))
            else:
                sr = fm.backward_search(value)
            r = self._ranges[key] = fm._doc_range(sr.sp, sr.ep)
        return r

    def matching_ids(self, op: str, value: bytes) -> list:
        key = (op, value)
        ids = self._ids.get(key)
        if ids is None:
            fm = self.fm
            if fm.d == 0:
                ids = []
            elif op == "contains":
                ids = fm.contains(value)
            else:
                a, b = self._doc_range(op, value)
                ids = sorted(v + 1 for v in fm.doc.range_report(a, b, 0, fm.d - 1))
            self._ids[key] = ids
        return ids

    def global_count(self, op: str, value: bytes) -> int:
        if op == "contains":
            return self.fm.count_all_occurrences(value) if value else self.fm.d
        a, b = self._doc_range(op, value)
        return b - a

    def __call__(self, atom, x: int) -> bool:
        if atom[0] == "label":
            return self.tree.tag_name(x) in atom[1]
        op, value = atom[1], atom[2]
        lo, hi = self.tree.text_ids(x)
        if lo > hi:
            return False
        if op == "contains":
            ids = self.matching_ids(op, value)
            i = bisect_left(ids, lo)
            return i < len(ids) and ids[i] <= hi
        a, b = self._doc_range(op, value)
        return a < b and self.fm.doc.range_count(a, b, lo - 1, hi - 1) > 0


@dataclass
class RunStats:
    visited: int = 0
    jumps: int = 0
    parent_calls: int = 0
    trans_hits: int = 0
    trans_misses: int = 0
    prog_hits: int = 0
    prog_misses: int = 0


class _Entry:
    __slots__ = ("key", "formulas", "r1", "r2", "has_value")

    def __init__(self, key, formulas, r1, r2, has_value):
        self.key = key
        self.formulas = formulas
        self.r1 = r1
        self.r2 = r2
        self.has_value = has_value


def _sym_eval(f, dom1: int, dom2: int, pred, t):
    """Like eval_formula but returns references instead of ropes.

    A reference is ``(1, q)`` or ``(2, q)`` for a child mapping entry, or
    ``0`` for the current node.
    """
    k = f[0]
    if k == "true":
        return True, ()
    if k == "false":
        return False, ()
    if k == "mark":
        return True, (0,)
    if k == "down1":
        return (True, ((1, f[1]),)) if dom1 >> f[1] & 1 else (False, ())
    if k == "down2":
        return (True, ((2, f[1]),)) if dom2 >> f[1] & 1 else (False, ())
    if k == "or":
        b1, r1 = _sym_eval(f[1], dom1, dom2, pred, t)
        b2, r2 = _sym_eval(f[2], dom1, dom2, pred, t)
        if b1 and b2:
            return True, r1 + r2
        if b1:
            return True, r1
        return (True, r2) if b2 else (False, ())
    if k == "and":
        b1, r1 = _sym_eval(f[1], dom1, dom2, pred, t)
        if not b1:
            return False, ()
        b2, r2 = _sym_eval(f[2], dom1, dom2, pred, t)
        return (True, r1 + r2) if b2 else (False, ())
    if k == "not":
        b, _ = _sym_eval(f[1], dom1, dom2, pred, t)
        return (not b), ()
    return bool(pred(f, t)), ()


class Runner:
    """Evaluates one automaton over one tree.

    ``memo`` enables the transition and formula-program caches, ``jump``
    enables tag jumping for descendant-loop state sets.
    """

    def __init__(self, automaton: Automaton, tree, preds: PredicateEvaluator,
                 memo: bool = True, jump: bool = True):
        self.A = automaton
        self.tree = tree
        self.preds = preds
        self.memo = memo
        self.jump = jump
        self.stats = RunStats()
        self._trans: dict = {}
        self._progs: dict = {}
        self._jump_info: dict = {}
        self._attr_codes = None
        self.main = _mask(automaton.marking)

    def clear_caches(self) -> None:
        self._trans.clear()
        self._progs.clear()

    # -- transition selection -----------------------------------------------------

    def select(self, code: int, r: int, drop2: int = 0) -> _Entry:
        key = (code, r, drop2)
        if self.memo:
            e = self._trans.get(key)
            if e is not None:
                self.stats.trans_hits += 1
                return e
        self.stats.trans_misses += 1
        name = self.tree.name(code)
        formulas = []
        r1 = r2 = 0
        has_value = False
        for q in _bits(r):
            f = None
            for ls, g in self.A.by_state[q]:
                if name not in ls:
                    continue
                if drop2 >> q & 1 and ls == ALL and g == ("down2", q):
                    continue
                g = specialize(g, name)
                if g[0] == "false":
                    continue
                f = g if f is None else ("or", f, g)
            if f is None:
                continue
            formulas.append((q, f))
            r1 |= _mask(states_under(f, "down1"))
            r2 |= _mask(states_under(f, "down2"))
            has_value = has_value or has_value_atom(f)
        e = _Entry(key, formulas, r1, r2, has_value)
        if self.memo:
            self._trans[key] = e
        return e

    def evaluate(self, t: int, e: _Entry, R1: dict, R2: dict) -> dict:
        R = {}
        if self.memo and not e.has_value:
            pkey = (e.key, _dom(R1), _dom(R2))
            prog = self._progs.get(pkey)
            if prog is None:
                self.stats.prog_misses += 1
                prog = []
                for q, f in e.formulas:
                    b, refs = _sym_eval(f, pkey[1], pkey[2], self.preds, t)
                    if b:
                        prog.append((q, refs))
                self._progs[pkey] = prog
            else:
                self.stats.prog_hits += 1
            for q, refs in prog:
                parts = []
                for ref in refs:
                    if ref == 0:
                        parts.append(t)
                    else:
                        v = (R1 if ref[0] == 1 else R2)[ref[1]]
                        if v is not None:
                            parts.append(v)
                R[q] = None if not parts else parts[0] if len(parts) == 1 else tuple(parts)
            return R
        for q, f in e.formulas:
            b, rope = eval_formula(f, R1, R2, t, self.preds)
            if b:
                R[q] = rope
        return R

    # -- top-down ---------------------------------------------------------------------

    def top_down_run(self, t: Optional[int], r: int, end: Optional[int] = None) -> dict:
        """Mapping of the states in ``r`` accepting the binary subtree at ``t``.

        ``t`` is a node or None for the empty tree. ``end`` bounds the region
        of ``t`` and its following siblings (the close of their parent).
        """
        tree = self.tree
        par = tree.par
        if t is None or not r:
            return {}
        chain = []
        tail: dict = {}
        while True:
            if self.jump and self._jump_codes(r) is not None:
                if end is None:
                    p = tree.parent(t)
                    end = tree.close(p) if p is not None else par.m
                tail = self._jump_run(t, r, end)
                break
            self.stats.visited += 1
            e = self.select(tree.tags[t], r)
            c = par.close(t)
            R1 = self.top_down_run(t + 1, e.r1, c) if e.r1 and t + 1 < c else {}
            chain.append((t, e, R1))
            r = e.r2
            nxt = c + 1
            if not r or nxt >= par.m or not par.is_open(nxt):
                break
            t = nxt
        R2 = tail
        for t, e, R1 in reversed(chain):
            R2 = self.evaluate(t, e, R1, R2)
        return R2

    # -- jumping ---------------------------------------------------------------------

    def _jump_codes(self, r: int):
        info = self._jump_info.get(r, False)
        if info is not False:
            return info
        info = None
        A = self.A
        names = set()
        ok = True
        for q in _bits(r):
            if q not in A.loop_states:
                ok = False
                break
            for ls, f in A.by_state[q]:
                if A.is_loop(q, ls, f):
                    continue
                if not ls.finite or _mask(states_under(f, "down2")) & r:
                    ok = False
                    break
                names |= ls.names
            if not ok:
                break
        if ok:
            codes = [self.tree.code(nm) for nm in sorted(names)]
            info = [c for c in codes if c is not None]
        self._jump_info[r] = info
        return info

    def _in_attribute(self, u: int, code: int) -> bool:
        if self._attr_codes is None:
            self._attr_codes = attribute_name_codes(self.tree)
        if code not in self._attr_codes:
            return False
        p = self.tree.parent(u)
        return p is not None and self.tree.tag_name(p) == ATTRS

    def _jump_run(self, t: int, r: int, end: int) -> dict:
        tree = self.tree
        tags = tree.tags
        codes = self._jump_codes(r)
        R: dict = {}
        pos = t
        while True:
            u = None
            for c in codes:
                v = tags.next_at_or_after(c, pos)
                if v is not None and (u is None or v < u):
                    u = v
            if u is None or u >= end:
                break
            code = tags[u]
            if self._in_attribute(u, code):
                pos = u + 1
                continue
            self.stats.jumps += 1
            self.stats.visited += 1
            e = self.select(code, r, r)
            cu = tree.par.close(u)
            R1 = self.top_down_run(u + 1, e.r1, cu) if e.r1 and u + 1 < cu else {}
            R2 = {}
            if e.r2:
                nxt = cu + 1
                if nxt < end and tree.par.is_open(nxt):
                    R2 = self.top_down_run(nxt, e.r2, end)
            for q, rope in self.evaluate(u, e, R1, R2).items():
                R[q] = concat(R[q], rope) if q in R else rope
            pos = cu + 1
        return R

    # -- bottom-up ---------------------------------------------------------------------

    def bottom_up_run(self, seeds) -> dict:
        """Root mapping for the marking states, computed from the seed nodes upwards.

        ``seeds`` must be in ascending preorder. Only the nodes on the root
        paths of the seeds are climbed, each through one Parent call.
        """
        seeds = list(seeds)
        if not seeds:
            return {}
        for a, b in zip(seeds, seeds[1:]):
            if not a < b:
                raise ValueError("seeds must be strictly increasing")
        tree = self.tree
        stack = [0]
        kids = [[]]
        for s in seeds:
            while not tree.is_ancestor(stack[-1], s):
                y = stack.pop()
                contrib = self._local(y, kids.pop())
                kids[-1].append(contrib)
            path = []
            x = s
            while x != stack[-1]:
                path.append(x)
                x = tree.parent(x)
                self.stats.parent_calls += 1
            for x in reversed(path):
                stack.append(x)
                kids.append([])
        while len(stack) > 1:
            y = stack.pop()
            contrib = self._local(y, kids.pop())
            kids[-1].append(contrib)
        return self._local(0, kids.pop())

    def _local(self, y: int, contribs: list) -> dict:
        tree = self.tree
        code = tree.tags[y]
        if tree.name(code) == ATTRS:
            return {}
        self.stats.visited += 1
        main = self.main
        e = self.select(code, main, main)
        R1: dict = {}
        for c in contribs:
            for q, rope in c.items():
                R1[q] = concat(R1[q], rope) if q in R1 else rope
        cy = tree.par.close(y)
        extra1 = e.r1 & ~main
        if extra1 and y + 1 < cy:
            R1.update(self.top_down_run(y + 1, extra1, cy))
        R2 = {}
        extra2 = e.r2 & ~main
        if extra2:
            nxt = cy + 1
            if nxt < tree.par.m and tree.par.is_open(nxt):
                R2 = self.top_down_run(nxt, extra2)
        return self.evaluate(y, e, R1, R2)


def attribute_name_codes(tree) -> set:
    """Tag codes used for attribute names somewhere in the document."""
    cached = getattr(tree, "_attr_codes_cache", None)
    if cached is not None:
        return cached
    out = set()
    at = tree.code(ATTRS)
    if at is not None:
        x = tree.tagged_next(at, 0)
        while x is not None:
            for k in tree.children(x):
                out.add(tree.tags[k])
            x = tree.tagged_next(at, x + 1)
    tree._attr_codes_cache = out
    return out


def seed_atom(ast: LocationPath) -> Optional[tuple]:
    """``(op, literal)`` when the query can be run bottom-up from text matches.

    The main path must use child/descendant steps only and the last step
    must carry a comparison on ``.`` as a top-level conjunct.
    """
    steps = ast.steps
    if not steps or any(s.axis not in ("child", "descendant") for s in steps):
        return None
    for p in steps[-1].predicates:
        stack = [p]
        while stack:
            e = stack.pop()
            if isinstance(e, And):
                stack.extend((e.right, e.left))
            elif isinstance(e, Compare) and e.path.steps == (SELF_NODE,):
                return e.op, e.value
    return None


@dataclass
class QueryResult:
    results: MarkTree
    strategy: str
    stats: RunStats
    automaton: Automaton = field(repr=False, default=None)

    def ids(self) -> list:
        return self.results.enumerate()

    def count(self) -> int:
        return self.results.size()


def _ensure_recursion(limit: int = 100000) -> None:
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)


def plan(ast: LocationPath, tree, preds: PredicateEvaluator) -> str:
    """Pick "bottomup" when the text predicate is rarer than the rarest named step."""
    atom = seed_atom(ast)
    if atom is None:
        return "jumping"
    counts = []
    for s in ast.steps:
        if s.test.kind == "name":
            c = tree.code(s.test.name)
            counts.append(0 if c is None else tree.subtree_tags(0, c))
    rarest = min(counts) if counts else tree.n
    return "bottomup" if preds.global_count(*atom) < rarest else "jumping"


def plan_and_execute(ast: LocationPath, tree, preds: PredicateEvaluator, strategy: str = "auto",
                     automaton: Optional[Automaton] = None) -> QueryResult:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    A = automaton if automaton is not None else compile_ast(ast)
    if strategy == "auto":
        strategy = plan(ast, tree, preds)
    elif strategy == "topdown":
        strategy = "jumping"
    if strategy == "bottomup" and seed_atom(ast) is None:
        raise ValueError("query has no text predicate to seed a bottom-up run")
    _ensure_recursion()
    runner = Runner(A, tree, preds, memo=strategy != "naive", jump=strategy in ("jumping", "bottomup"))
    if strategy == "bottomup":
        op, value = seed_atom(ast)
        seeds = [tree.text_node(d) for d in preds.matching_ids(op, value)]
        R = runner.bottom_up_run(seeds)
    else:
        R = runner.top_down_run(0, 1 << A.initial, tree.par.m)
    out = MarkTree(tree.n)
    rope = R.get(A.initial)
    for x in iter_rope(rope):
        out.insert(tree.preorder(x))
    return QueryResult(out, strategy, runner.stats, A)


def run_query(query: str, tree, preds: PredicateEvaluator, strategy: str = "auto") -> QueryResult:
    return plan_and_execute(parse_xpath(query), tree, preds, strategy)
