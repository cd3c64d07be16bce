"""Split-based derivability oracle.

The declarative system distributes a context between the threads of a
parallel composition instead of threading it: unrestricted entries are
copied to both sides, linear entries go to exactly one side, and a pair of
linear ends may be divided between the two sides.  Derivability is decided
by a memoized backtracking search over rule choices and splits, bounded by a
node budget; exceeding the budget yields INCONCLUSIVE rather than a verdict.

This module exists to cross-check the deterministic checker: everything the
checker accepts must be derivable here, while the converse fails on known
self-deadlocking shapes.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from .contexts import DeclContext, is_safe_type, is_un_decl_context
from .equality import head_qual, type_equal, unfold
from .syntax import (
    ChanType,
    Endpoint,
    Input,
    New,
    Output,
    Par,
    Process,
    Qual,
    Recv,
    Repl,
    Send,
    Type,
    Zero,
    is_endpoint,
)


@dataclass(frozen=True)
class Split:
    left: DeclContext
    right: DeclContext
    origin: DeclContext


class Verdict(enum.Enum):
    DERIVABLE = "derivable"
    NOT_DERIVABLE = "not_derivable"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class OracleResult:
    verdict: Verdict
    bound: int
    spent: int

    def __bool__(self) -> bool:
        return self.verdict is Verdict.DERIVABLE


class _BudgetExceeded(Exception):
    pass


def _entry_options(name: str, t: Type) -> list[tuple[Optional[Type], Optional[Type]]]:
    """Ways one entry may be divided; ``None`` means absent from that side."""
    if is_endpoint(t):
        if head_qual(t) is Qual.UN:
            return [(t, t)]
        return [(t, None), (None, t)]
    lq, rq = head_qual(t.left), head_qual(t.right)
    if lq is Qual.UN and rq is Qual.UN:
        return [(t, t)]
    if lq is Qual.LIN and rq is Qual.LIN:
        return [
            (t, None),
            (None, t),
            (t.left, t.right),
            (t.right, t.left),
        ]
    # One linear end, one unrestricted end: the whole pair goes to one side,
    # the unrestricted end alone is copied to the other.
    un_side: Endpoint = t.left if lq is Qual.UN else t.right
    return [(t, un_side), (un_side, t)]


def enumerate_splits(i: DeclContext) -> Iterator[Split]:
    """All divisions of ``i`` licensed by the splitting rules, without duplicates."""
    names = sorted(i.names())
    options = [_entry_options(name, i.get(name)) for name in names]
    seen = set()
    for combo in itertools.product(*options):
        left = [(n, t) for n, (t, _) in zip(names, combo) if t is not None]
        right = [(n, t) for n, (_, t) in zip(names, combo) if t is not None]
        key = (tuple(left), tuple(right))
        if key in seen:
            continue
        seen.add(key)
        yield Split(DeclContext(left), DeclContext(right), i)


def derivable_value(i: DeclContext, v: str, t: Type) -> bool:
    """Can ``v : t`` be derived?  The axiom needs everything else unrestricted;
    an endpoint goal may also strip an unrestricted partner end off a pair."""
    bound = i.get(v)
    if bound is None:
        return False
    rest = i.remove(v)
    if not is_un_decl_context(rest):
        return False
    if type_equal(bound, t):
        return True
    if is_endpoint(t) and isinstance(bound, ChanType):
        for mine, other in ((bound.left, bound.right), (bound.right, bound.left)):
            if head_qual(other) is Qual.UN and type_equal(mine, t):
                return True
    return False


def derivable(i: DeclContext, p: Process, bound: int = 200_000) -> OracleResult:
    """Search for a derivation of ``i ⊢ p``; the process must be renamed apart."""
    state = {"left": bound}
    memo: dict[tuple, bool] = {}
    try:
        ok = _derivable(i, p, state, memo)
    except _BudgetExceeded:
        return OracleResult(Verdict.INCONCLUSIVE, bound, bound)
    verdict = Verdict.DERIVABLE if ok else Verdict.NOT_DERIVABLE
    return OracleResult(verdict, bound, bound - state["left"])


def _spend(state: dict):
    state["left"] -= 1
    if state["left"] < 0:
        raise _BudgetExceeded


def _derivable(i: DeclContext, p: Process, state: dict, memo: dict) -> bool:
    key = (i.canonical(), p)
    if key in memo:
        return memo[key]
    _spend(state)
    result = _derive(i, p, state, memo)
    memo[key] = result
    return result


def _derive(i: DeclContext, p: Process, state: dict, memo: dict) -> bool:
    match p:
        case Zero():
            return is_un_decl_context(i)
        case Repl(body):
            return is_un_decl_context(i) and _derivable(i, body, state, memo)
        case Par(left, right):
            for split in enumerate_splits(i):
                if _derivable(split.left, left, state, memo) and _derivable(
                    split.right, right, state, memo
                ):
                    return True
            return False
        case New(binder, annot, body):
            if not is_safe_type(annot) or binder in i:
                return False
            return _derivable(i.add(binder, annot), body, state, memo)
        case Input(chan, binder, body):
            t = i.get(chan)
            if t is None or binder in i:
                return False
            for t2, payload in _receive_shapes(t):
                if _derivable(i.set(chan, t2).add(binder, payload), body, state, memo):
                    return True
            return False
        case Output(chan, arg, body):
            for split in enumerate_splits(i):
                t = split.right.get(chan)
                if t is None:
                    continue
                for t2, payload in _send_shapes(t):
                    if not derivable_value(split.left, arg, payload):
                        continue
                    if _derivable(split.right.set(chan, t2), body, state, memo):
                        return True
            return False
    raise TypeError(f"not a process: {p!r}")


def _io_step(s: Endpoint, ctor) -> Optional[tuple[Type, Endpoint]]:
    """Payload and continuation of a receive/send head, subject to the
    unrestricted side condition (an ``un`` prefix must repeat itself)."""
    h = unfold(s)
    if not isinstance(h.pre, ctor):
        return None
    if h.qual is Qual.UN and not type_equal(s, h.pre.cont):
        return None
    return h.pre.payload, h.pre.cont


def _receive_shapes(t: Type) -> Iterator[tuple[Type, Type]]:
    """(context type after the step, payload type) for each way to read ``t``."""
    yield from _shapes(t, Recv)


def _send_shapes(t: Type) -> Iterator[tuple[Type, Type]]:
    yield from _shapes(t, Send)


def _shapes(t: Type, ctor) -> Iterator[tuple[Type, Type]]:
    if is_endpoint(t):
        step = _io_step(t, ctor)
        if step is not None:
            payload, cont = step
            yield cont, payload
        return
    step = _io_step(t.left, ctor)
    if step is not None:
        payload, cont = step
        yield ChanType(cont, t.right), payload
    step = _io_step(t.right, ctor)
    if step is not None:
        payload, cont = step
        yield ChanType(t.left, cont), payload
