"""Abstract syntax for processes and session types, plus the binding toolkit.

Types describe one end of a channel (an endpoint type) or both ends at once
(a channel pair type ``<S1, S2>``).  Endpoint behaviours are pre-types
(receive, send, end) qualified as ``lin`` (used by exactly one thread) or
``un`` (freely shareable); recursion is written ``rec a. S``.

Processes are the synchronous unary pi calculus: output ``x!y.P``, input
``x?(y).P``, parallel composition, annotated restriction ``new x: T. P``,
replication ``!P`` and inaction ``0``.

All nodes are immutable; every operation here is a pure function.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


class Qual(enum.Enum):
    LIN = "lin"
    UN = "un"

    def __str__(self) -> str:
        return self.value


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Recv:
    """Pre-type ``?(T).S``: receive a name of type ``payload``, go on as ``cont``."""

    payload: "Type"
    cont: "Endpoint"

    def __str__(self) -> str:
        return f"?({self.payload}).{self.cont}"


@dataclass(frozen=True)
class Send:
    """Pre-type ``!(T).S``: send a name of type ``payload``, go on as ``cont``."""

    payload: "Type"
    cont: "Endpoint"

    def __str__(self) -> str:
        return f"!({self.payload}).{self.cont}"


@dataclass(frozen=True)
class End:
    """Pre-type ``end``: no further interaction on this endpoint."""

    def __str__(self) -> str:
        return "end"


PreType = Union[Recv, Send, End]


@dataclass(frozen=True)
class Qualified:
    """Endpoint type ``q p``: a pre-type under a lin/un qualifier."""

    qual: Qual
    pre: PreType

    def __str__(self) -> str:
        return f"{self.qual} {self.pre}"


@dataclass(frozen=True)
class TypeVar:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Rec:
    """Recursive endpoint type ``rec a. S``; must be contractive."""

    var: str
    body: "Endpoint"

    def __str__(self) -> str:
        return f"rec {self.var}. {self.body}"


Endpoint = Union[Qualified, TypeVar, Rec]


@dataclass(frozen=True)
class ChanType:
    """Channel pair type ``<S1, S2>``: the two ends of one channel."""

    left: Endpoint
    right: Endpoint

    def __str__(self) -> str:
        return f"<{self.left}, {self.right}>"


Type = Union[Endpoint, ChanType]

UN_END = Qualified(Qual.UN, End())
LIN_END = Qualified(Qual.LIN, End())


def is_endpoint(t: Type) -> bool:
    return not isinstance(t, ChanType)


# ---------------------------------------------------------------------------
# Processes
# ---------------------------------------------------------------------------

Pos = tuple  # (line, column), recorded for diagnostics only


@dataclass(frozen=True)
class Zero:
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class Par:
    left: "Process"
    right: "Process"
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        # '|' is the loosest operator and associates to the left.
        right = f"({self.right})" if isinstance(self.right, Par) else str(self.right)
        return f"{self.left} | {right}"


@dataclass(frozen=True)
class Repl:
    body: "Process"
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return f"!{_factor(self.body)}"


@dataclass(frozen=True)
class Output:
    """``chan!arg.cont``: send the variable ``arg`` on ``chan``."""

    chan: str
    arg: str
    cont: "Process"
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return f"{self.chan}!{self.arg}.{_factor(self.cont)}"


@dataclass(frozen=True)
class Input:
    """``chan?(binder).cont``: receive on ``chan``, binding ``binder`` in ``cont``."""

    chan: str
    binder: str
    cont: "Process"
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return f"{self.chan}?({self.binder}).{_factor(self.cont)}"


@dataclass(frozen=True)
class New:
    """``new binder: annot. cont``: restriction with a type annotation."""

    binder: str
    annot: Type
    cont: "Process"
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return f"new {self.binder}: {self.annot}. {_factor(self.cont)}"


Process = Union[Zero, Par, Repl, Output, Input, New]


def _factor(p: Process) -> str:
    # Continuations and replication bodies sit above '|' in the grammar.
    return f"({p})" if isinstance(p, Par) else str(p)


def pretty(value) -> str:
    """Concrete syntax for any process, type, entry or context value."""
    return str(value)


# ---------------------------------------------------------------------------
# Binding
# ---------------------------------------------------------------------------

def free_vars(p: Process) -> frozenset[str]:
    match p:
        case Zero():
            return frozenset()
        case Par(left, right):
            return free_vars(left) | free_vars(right)
        case Repl(body):
            return free_vars(body)
        case Output(chan, arg, cont):
            return frozenset((chan, arg)) | free_vars(cont)
        case Input(chan, binder, cont):
            return frozenset((chan,)) | (free_vars(cont) - {binder})
        case New(binder, _, cont):
            return free_vars(cont) - {binder}
    raise TypeError(f"not a process: {p!r}")


def all_names(p: Process) -> frozenset[str]:
    """Every variable occurring in ``p``, free or bound."""
    match p:
        case Zero():
            return frozenset()
        case Par(left, right):
            return all_names(left) | all_names(right)
        case Repl(body):
            return all_names(body)
        case Output(chan, arg, cont):
            return frozenset((chan, arg)) | all_names(cont)
        case Input(chan, binder, cont):
            return frozenset((chan, binder)) | all_names(cont)
        case New(binder, _, cont):
            return frozenset((binder,)) | all_names(cont)
    raise TypeError(f"not a process: {p!r}")


class CaptureError(Exception):
    """A substitution would capture a free name; signals a renaming bug upstream."""


def substitute(p: Process, replacement: str, target: str) -> Process:
    """Replace every free occurrence of ``target`` by ``replacement`` (P{z/x})."""
    if replacement == target:
        return p

    def sub(q: Process) -> Process:
        match q:
            case Zero():
                return q
            case Par(left, right):
                return Par(sub(left), sub(right), pos=q.pos)
            case Repl(body):
                return Repl(sub(body), pos=q.pos)
            case Output(chan, arg, cont):
                return Output(
                    replacement if chan == target else chan,
                    replacement if arg == target else arg,
                    sub(cont),
                    pos=q.pos,
                )
            case Input(chan, binder, cont):
                chan2 = replacement if chan == target else chan
                if binder == target:
                    return Input(chan2, binder, cont, pos=q.pos)
                if binder == replacement and target in free_vars(cont):
                    raise CaptureError(
                        f"substituting {replacement} for {target} would be captured by {binder}"
                    )
                return Input(chan2, binder, sub(cont), pos=q.pos)
            case New(binder, annot, cont):
                if binder == target:
                    return q
                if binder == replacement and target in free_vars(cont):
                    raise CaptureError(
                        f"substituting {replacement} for {target} would be captured by {binder}"
                    )
                return New(binder, annot, sub(cont), pos=q.pos)
        raise TypeError(f"not a process: {q!r}")

    return sub(p)


def barendregt_rename(p: Process, avoid: frozenset[str] | set[str] = frozenset()) -> Process:
    """Alpha-rename so all binders are distinct from each other and from free names.

    Fresh names are the original name with a numeric suffix; counters never
    reuse a name, so the scheme is deterministic and idempotent.
    """
    used = set(free_vars(p)) | set(avoid)
    present = set(all_names(p)) | set(avoid)
    counters: dict[str, int] = {}

    def fresh(base: str) -> str:
        n = counters.get(base, 0)
        while True:
            n += 1
            candidate = f"{base}{n}"
            if candidate not in used and candidate not in present:
                counters[base] = n
                return candidate

    def rename(q: Process, env: dict[str, str]) -> Process:
        match q:
            case Zero():
                return q
            case Par(left, right):
                return Par(rename(left, env), rename(right, env), pos=q.pos)
            case Repl(body):
                return Repl(rename(body, env), pos=q.pos)
            case Output(chan, arg, cont):
                return Output(env.get(chan, chan), env.get(arg, arg), rename(cont, env), pos=q.pos)
            case Input(chan, binder, cont):
                new_binder = bind(binder)
                env2 = dict(env)
                env2[binder] = new_binder
                return Input(env.get(chan, chan), new_binder, rename(cont, env2), pos=q.pos)
            case New(binder, annot, cont):
                new_binder = bind(binder)
                env2 = dict(env)
                env2[binder] = new_binder
                return New(new_binder, annot, rename(cont, env2), pos=q.pos)
        raise TypeError(f"not a process: {q!r}")

    def bind(binder: str) -> str:
        name = binder if binder not in used else fresh(binder)
        used.add(name)
        return name

    return rename(p, {})


def process_size(p: Process) -> int:
    match p:
        case Zero():
            return 1
        case Par(left, right):
            return 1 + process_size(left) + process_size(right)
        case Repl(body) | Output(_, _, body) | Input(_, _, body) | New(_, _, body):
            return 1 + process_size(body)
    raise TypeError(f"not a process: {p!r}")


def subprocesses(p: Process) -> Iterator[Process]:
    """Preorder traversal of a process tree."""
    yield p
    match p:
        case Par(left, right):
            yield from subprocesses(left)
            yield from subprocesses(right)
        case Repl(body) | Output(_, _, body) | Input(_, _, body) | New(_, _, body):
            yield from subprocesses(body)
