"""Alternating marking automata over the first-child/next-sibling view.

Formulas are tuples tagged by their first element:

    ("true",) ("false",) ("mark",)
    ("or", a, b) ("and", a, b) ("not", a)
    ("down1", q) ("down2", q)
    ("label", LabelSet)              test on the current node's tag
    ("value", op, literal)           string test on the texts below the node

A result sequence ("rope") is None when empty, an int node for a single
mark, or a tuple of ropes for a concatenation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .ingest import ATTRS, ROOT, TEXT, VALUE
from .xpath import And, Compare, LocationPath, Not, Or, PathExpr, Step, parse_xpath


@dataclass(frozen=True)
class LabelSet:
    """A finite set of labels, or the complement of one when ``cofinite``."""

    names: frozenset = frozenset()
    cofinite: bool = False

    def __contains__(self, name: str) -> bool:
        return (name in self.names) != self.cofinite

    @property
    def finite(self) -> bool:
        return not self.cofinite

    def __and__(self, other: "LabelSet") -> "LabelSet":
        if self.cofinite and other.cofinite:
            return LabelSet(self.names | other.names, True)
        if self.cofinite:
            return LabelSet(other.names - self.names)
        if other.cofinite:
            return LabelSet(self.names - other.names)
        return LabelSet(self.names & other.names)

    def __str__(self) -> str:
        inner = ",".join(sorted(self.names))
        if self.cofinite:
            return "L" if not self.names else f"L-{{{inner}}}"
        return "{" + inner + "}"


def labels(*names: str) -> LabelSet:
    return LabelSet(frozenset(names))


def all_but(*names: str) -> LabelSet:
    return LabelSet(frozenset(names), True)


ALL = all_but()
DESCEND = all_but(ATTRS, TEXT)
ELEMENTS = all_but(ATTRS, TEXT, VALUE, ROOT)
NODES = all_but(ATTRS, VALUE, ROOT)
TEXTS = labels(TEXT)

TRUE = ("true",)
FALSE = ("false",)
MARK = ("mark",)


def f_and(a, b):
    if a is FALSE or b is FALSE:
        return FALSE
    if a is TRUE:
        return b
    if b is TRUE:
        return a
    return ("and", a, b)


def f_or(a, b):
    # TRUE absorbs nothing here: the other branch may still carry marks
    if a is FALSE:
        return b
    if b is FALSE:
        return a
    return ("or", a, b)


def f_not(a):
    if a is TRUE:
        return FALSE
    if a is FALSE:
        return TRUE
    return ("not", a)


def f_label(ls: LabelSet):
    return TRUE if ls == ALL else ("label", ls)


def formula_str(f) -> str:
    k = f[0]
    if k in ("true", "false"):
        return "T" if k == "true" else "F"
    if k == "mark":
        return "mark"
    if k == "or":
        return f"({formula_str(f[1])} | {formula_str(f[2])})"
    if k == "and":
        return f"({formula_str(f[1])} & {formula_str(f[2])})"
    if k == "not":
        return f"!{formula_str(f[1])}"
    if k == "down1":
        return f"d1 q{f[1]}"
    if k == "down2":
        return f"d2 q{f[1]}"
    if k == "label":
        return f"label{f[1]}"
    return f"{f[1]}({f[2]!r})"


def states_under(f, which: str, acc: Optional[set] = None) -> set:
    """States appearing under ``down1`` or ``down2`` (``which``) in ``f``."""
    if acc is None:
        acc = set()
    k = f[0]
    if k == which:
        acc.add(f[1])
    elif k in ("and", "or"):
        states_under(f[1], which, acc)
        states_under(f[2], which, acc)
    elif k == "not":
        states_under(f[1], which, acc)
    return acc


def has_value_atom(f) -> bool:
    k = f[0]
    if k == "value":
        return True
    if k in ("and", "or"):
        return has_value_atom(f[1]) or has_value_atom(f[2])
    if k == "not":
        return has_value_atom(f[1])
    return False


def specialize(f, name: str):
    """Resolve label atoms against ``name`` and simplify."""
    k = f[0]
    if k == "label":
        return TRUE if name in f[1] else FALSE
    if k == "and":
        return f_and(specialize(f[1], name), specialize(f[2], name))
    if k == "or":
        return f_or(specialize(f[1], name), specialize(f[2], name))
    if k == "not":
        return f_not(specialize(f[1], name))
    return f


def concat(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return (a, b)


def iter_rope(rope) -> Iterator[int]:
    """Nodes of a rope in order; shared sub-ropes are walked once."""
    if rope is None:
        return
    seen = set()
    stack = [rope]
    while stack:
        r = stack.pop()
        if type(r) is int:
            yield r
            continue
        key = id(r)
        if key in seen:
            continue
        seen.add(key)
        stack.extend(reversed(r))


def eval_formula(f, R1: dict, R2: dict, t, pred: Callable) -> tuple:
    """Evaluate ``f`` at node ``t`` given the mappings of its two binary children.

    Returns ``(accepted, rope)``. ``pred(atom, t)`` decides label and value atoms.
    """
    k = f[0]
    if k == "true":
        return True, None
    if k == "false":
        return False, None
    if k == "mark":
        return True, t
    if k == "down1":
        q = f[1]
        return (True, R1[q]) if q in R1 else (False, None)
    if k == "down2":
        q = f[1]
        return (True, R2[q]) if q in R2 else (False, None)
    if k == "or":
        b1, r1 = eval_formula(f[1], R1, R2, t, pred)
        b2, r2 = eval_formula(f[2], R1, R2, t, pred)
        if b1 and b2:
            return True, concat(r1, r2)
        if b1:
            return True, r1
        if b2:
            return True, r2
        return False, None
    if k == "and":
        b1, r1 = eval_formula(f[1], R1, R2, t, pred)
        if not b1:
            return False, None
        b2, r2 = eval_formula(f[2], R1, R2, t, pred)
        if not b2:
            return False, None
        return True, concat(r1, r2)
    if k == "not":
        b, _ = eval_formula(f[1], R1, R2, t, pred)
        return (not b), None
    return bool(pred(f, t)), None


@dataclass
class Automaton:
    nstates: int
    initial: int
    marking: frozenset
    transitions: list            # (state, LabelSet, formula)
    by_state: dict = field(default_factory=dict)
    loop_states: frozenset = frozenset()

    def __post_init__(self):
        by = {q: [] for q in range(self.nstates)}
        for q, ls, f in self.transitions:
            by[q].append((ls, f))
        self.by_state = by
        self.loop_states = frozenset(q for q in range(self.nstates) if self._is_descendant_loop(q))

    def _is_descendant_loop(self, q: int) -> bool:
        trans = self.by_state[q]
        return ((DESCEND, ("down1", q)) in trans) and ((ALL, ("down2", q)) in trans)

    def is_loop(self, q: int, ls: LabelSet, f) -> bool:
        """True for the self-loops that only move state ``q`` along the tree."""
        return (ls == DESCEND and f == ("down1", q)) or (ls == ALL and f == ("down2", q))

    @property
    def has_value_predicates(self) -> bool:
        return any(has_value_atom(f) for _, _, f in self.transitions)

    def describe(self) -> str:
        lines = [f"initial q{self.initial}; marking {{{', '.join(f'q{q}' for q in sorted(self.marking))}}}"]
        for q, ls, f in self.transitions:
            lines.append(f"q{q}, {ls} -> {formula_str(f)}")
        return "\n".join(lines)


def test_set(step: Step) -> LabelSet:
    kind = step.test.kind
    if kind == "name":
        return labels(step.test.name)
    if kind == "text":
        return TEXTS
    if kind == "*":
        return ELEMENTS
    return ALL if step.axis == "self" else NODES


class _Compiler:
    def __init__(self):
        self.trans: dict = {}
        self.marking: set = set()
        self.count = 0

    def new_state(self, marking: bool) -> int:
        q = self.count
        self.count += 1
        self.trans[q] = []
        if marking:
            self.marking.add(q)
        return q

    def path(self, steps, final, marking: bool):
        """Formula holding at a context node when ``steps`` lead to a node where ``final`` holds."""
        if not steps:
            return final
        step, rest = steps[0], steps[1:]
        body = f_and(self.path(rest, final, marking), self.predicates(step.predicates))
        if step.axis == "self":
            return f_and(f_label(test_set(step)), body)
        q = self.new_state(marking)
        self.trans[q].append((test_set(step), body))
        if step.axis == "descendant":
            self.trans[q].append((DESCEND, ("down1", q)))
        self.trans[q].append((ALL, ("down2", q)))
        return ("down2", q) if step.axis == "following-sibling" else ("down1", q)

    def predicates(self, preds):
        f = TRUE
        for p in preds:
            f = f_and(f, self.expr(p))
        return f

    def expr(self, e):
        if isinstance(e, And):
            return f_and(self.expr(e.left), self.expr(e.right))
        if isinstance(e, Or):
            return f_or(self.expr(e.left), self.expr(e.right))
        if isinstance(e, Not):
            return f_not(self.expr(e.expr))
        if isinstance(e, PathExpr):
            return self.path(e.path.steps, TRUE, False)
        if isinstance(e, Compare):
            return self.path(e.path.steps, ("value", e.op, e.value), False)
        raise TypeError(f"unexpected predicate node {e!r}")

    def build(self, ast: LocationPath) -> Automaton:
        steps = ast.steps
        if steps and steps[0].axis == "descendant":
            f = self.path(steps, MARK, True)
            initial = f[1]
        else:
            initial = self.new_state(True)
            self.trans[initial].append((ALL, self.path(steps, MARK, True)))
        return _renumber(initial, self.trans, self.marking)


def _rename(f, ren):
    k = f[0]
    if k in ("down1", "down2"):
        return (k, ren[f[1]])
    if k in ("and", "or"):
        return (k, _rename(f[1], ren), _rename(f[2], ren))
    if k == "not":
        return (k, _rename(f[1], ren))
    return f


def _renumber(initial: int, trans: dict, marking: set) -> Automaton:
    order, seen = [initial], {initial}
    i = 0
    while i < len(order):
        q = order[i]
        i += 1
        for _, f in trans[q]:
            for nxt in sorted(states_under(f, "down1") | states_under(f, "down2")):
                if nxt not in seen:
                    seen.add(nxt)
                    order.append(nxt)
    ren = {q: k for k, q in enumerate(order)}
    flat = [(ren[q], ls, _rename(f, ren)) for q in order for ls, f in trans[q]]
    return Automaton(len(order), 0, frozenset(ren[q] for q in marking if q in ren), flat)


def compile_ast(ast: LocationPath) -> Automaton:
    return _Compiler().build(ast)


def compile_query(query: str) -> Automaton:
    return compile_ast(parse_xpath(query))
