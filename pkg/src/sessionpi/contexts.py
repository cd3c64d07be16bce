"""Typing contexts: entries with a consumed-endpoint marker, and their algebra.

An entry is either a single endpoint slot or a pair of slots (the two ends
of one channel).  A slot holds an endpoint type or the void marker ``◦``,
which records that a linear end has been used up and is no longer available.

The algebra on contexts:

* ``closure`` (``g1 ▷ g2``)  — the portion of ``g1`` consumed in producing
  ``g2`` (pointwise, partial);
* ``used_map``               — projects a context to a void-free declarative
  context, reading consumed slots as ``un end``;
* ``nabla``                  — the fully-consumed shape of a context (every
  linear slot voided);
* ``update_context`` (``⊎``) — pointwise combination filling void slots,
  defined only when no linear capability would be duplicated.

Everything here is immutable and pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .equality import head_qual, is_un_end, type_equal, unfold
from .syntax import ChanType, Endpoint, Qual, Recv, Send, Type, UN_END


@dataclass(frozen=True)
class Void:
    """Marker for a consumed, unusable endpoint slot."""

    def __str__(self) -> str:
        return "◦"


VOID = Void()

Item = Union[Endpoint, Void]


@dataclass(frozen=True)
class Single:
    item: Item

    def __str__(self) -> str:
        return str(self.item)


@dataclass(frozen=True)
class Pair:
    left: Item
    right: Item

    def __str__(self) -> str:
        return f"<{self.left}, {self.right}>"


Entry = Union[Single, Pair]


class ContextAlgebraError(Exception):
    """A partial operation (closure, update) was applied outside its domain."""


def entry_of_type(t: Type) -> Entry:
    if isinstance(t, ChanType):
        return Pair(t.left, t.right)
    return Single(t)


def type_of_entry(e: Entry) -> Type:
    """Inverse of ``entry_of_type``; defined on void-free entries only."""
    match e:
        case Single(item) if not isinstance(item, Void):
            return item
        case Pair(left, right) if not isinstance(left, Void) and not isinstance(right, Void):
            return ChanType(left, right)
    raise ContextAlgebraError(f"entry {e} contains a void slot")


def item_equal(m1: Item, m2: Item) -> bool:
    if isinstance(m1, Void) or isinstance(m2, Void):
        return isinstance(m1, Void) and isinstance(m2, Void)
    return type_equal(m1, m2)


def entry_equal(e1: Entry, e2: Entry) -> bool:
    """Slot-by-slot equality; pair sides are positional, not commuted."""
    match (e1, e2):
        case (Single(a), Single(b)):
            return item_equal(a, b)
        case (Pair(a, b), Pair(c, d)):
            return item_equal(a, c) and item_equal(b, d)
    return False


class Context:
    """Immutable finite map from names to entries."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[tuple[str, Entry]] = ()):
        self._entries = dict(entries)

    def get(self, name: str) -> Entry | None:
        return self._entries.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def names(self) -> frozenset[str]:
        return frozenset(self._entries)

    def items(self) -> Iterator[tuple[str, Entry]]:
        return iter(self._entries.items())

    def set(self, name: str, entry: Entry) -> "Context":
        if name not in self._entries:
            raise KeyError(name)
        new = dict(self._entries)
        new[name] = entry
        return Context(new.items())

    def add(self, name: str, entry: Entry) -> "Context":
        if name in self._entries:
            raise KeyError(f"{name} already bound")
        new = dict(self._entries)
        new[name] = entry
        return Context(new.items())

    def remove(self, name: str) -> "Context":
        new = dict(self._entries)
        del new[name]
        return Context(new.items())

    def __eq__(self, other) -> bool:
        return isinstance(other, Context) and self._entries == other._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __str__(self) -> str:
        return ", ".join(f"{name}: {entry}" for name, entry in self._entries.items()) or "∅"

    def __repr__(self) -> str:
        return f"Context({self._entries!r})"


def context_equal(g1: Context, g2: Context) -> bool:
    """Entrywise equality up to equi-recursive type equality."""
    if g1.names() != g2.names():
        return False
    return all(entry_equal(e, g2.get(name)) for name, e in g1.items())


class DeclContext:
    """Immutable finite map from names to (void-free) types."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[tuple[str, Type]] = ()):
        self._entries = dict(entries)

    def get(self, name: str) -> Type | None:
        return self._entries.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def names(self) -> frozenset[str]:
        return frozenset(self._entries)

    def items(self) -> Iterator[tuple[str, Type]]:
        return iter(self._entries.items())

    def set(self, name: str, t: Type) -> "DeclContext":
        new = dict(self._entries)
        new[name] = t
        return DeclContext(new.items())

    def add(self, name: str, t: Type) -> "DeclContext":
        if name in self._entries:
            raise KeyError(f"{name} already bound")
        new = dict(self._entries)
        new[name] = t
        return DeclContext(new.items())

    def remove(self, name: str) -> "DeclContext":
        new = dict(self._entries)
        del new[name]
        return DeclContext(new.items())

    def canonical(self) -> tuple:
        """Hashable, order-independent form, for memo tables."""
        return tuple(sorted(self._entries.items(), key=lambda kv: kv[0]))

    def __eq__(self, other) -> bool:
        return isinstance(other, DeclContext) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(self.canonical())

    def __len__(self) -> int:
        return len(self._entries)

    def __str__(self) -> str:
        return ", ".join(f"{name}: {t}" for name, t in self._entries.items()) or "∅"

    def __repr__(self) -> str:
        return f"DeclContext({self._entries!r})"


def context_file_text(g: Context) -> str:
    """Serialize in context-file form (one ``name : entry`` per line)."""
    return "\n".join(f"{name} : {entry}" for name, entry in g.items())


def to_decl_context(g: Context) -> DeclContext:
    """Strict conversion; rejects any context containing a void slot."""
    return DeclContext((name, type_of_entry(e)) for name, e in g.items())


def decl_to_context(i: DeclContext) -> Context:
    return Context((name, entry_of_type(t)) for name, t in i.items())


# ---------------------------------------------------------------------------
# safe / un predicates
# ---------------------------------------------------------------------------

def is_safe_entry(e: Entry) -> bool:
    """Well-pairedness of an entry.

    Single slots are always safe.  A pair is safe when one side is void or
    ``un end``, or when the two sides offer matching receive/send behaviours
    (payloads equal, and for linear pairs a safe continuation pair).  The
    check is coinductive: a pair under inspection is assumed safe while its
    continuations are examined.
    """
    return _safe_entry(e, frozenset())


def _safe_entry(e: Entry, assumed: frozenset) -> bool:
    if isinstance(e, Single):
        return True
    key = (e.left, e.right)
    if key in assumed:
        return True
    assumed = assumed | {key}
    for side in key:
        if isinstance(side, Void) or is_un_end(side):
            return True
    a, b = unfold(e.left), unfold(e.right)
    for one, other in ((a, b), (b, a)):
        match (one.pre, other.pre):
            case (Recv(tp_in, cont_in), Send(tp_out, cont_out)):
                if one.qual is not other.qual:
                    continue
                if not type_equal(tp_in, tp_out):
                    continue
                if not _safe_type(tp_in, assumed):
                    continue
                if one.qual is Qual.UN:
                    return True
                if _safe_entry(Pair(cont_in, cont_out), assumed):
                    return True
    return False


def _safe_type(t: Type, assumed: frozenset) -> bool:
    if isinstance(t, ChanType):
        return _safe_entry(Pair(t.left, t.right), assumed)
    return True


def is_safe_type(t: Type) -> bool:
    return _safe_type(t, frozenset())


def is_safe_context(g: Context) -> bool:
    return all(is_safe_entry(e) for _, e in g.items())


def is_un_item(m: Item) -> bool:
    if isinstance(m, Void):
        return True
    return head_qual(m) is Qual.UN


def is_un_entry(e: Entry) -> bool:
    match e:
        case Single(item):
            return is_un_item(item)
        case Pair(left, right):
            return is_un_item(left) and is_un_item(right)
    raise TypeError(f"not an entry: {e!r}")


def is_un_context(g: Context) -> bool:
    return all(is_un_entry(e) for _, e in g.items())


def is_un_type(t: Type) -> bool:
    """Unrestrictedness of a (void-free) declarative type."""
    if isinstance(t, ChanType):
        return head_qual(t.left) is Qual.UN and head_qual(t.right) is Qual.UN
    return head_qual(t) is Qual.UN


def is_un_decl_context(i: DeclContext) -> bool:
    return all(is_un_type(t) for _, t in i.items())


# ---------------------------------------------------------------------------
# Entry update (⊎ seed: fill a void slot)
# ---------------------------------------------------------------------------

def update_entry(g: Context, x: str, m: Endpoint, side: str | None = None) -> Context:
    """Replace the void slot of ``x`` by the endpoint type ``m``.

    For a pair entry the caller selects the slot with ``side`` ('left' or
    'right').  Updating a non-void slot is a contract violation.
    """
    entry = g.get(x)
    if entry is None:
        raise ContextAlgebraError(f"{x} is not in the context")
    match entry:
        case Single(item):
            if not isinstance(item, Void):
                raise ContextAlgebraError(f"slot for {x} is {entry}, not ◦")
            return g.set(x, Single(m))
        case Pair(left, right):
            if side == "left":
                if not isinstance(left, Void):
                    raise ContextAlgebraError(f"left slot for {x} is {left}, not ◦")
                return g.set(x, Pair(m, right))
            if side == "right":
                if not isinstance(right, Void):
                    raise ContextAlgebraError(f"right slot for {x} is {right}, not ◦")
                return g.set(x, Pair(left, m))
            raise ContextAlgebraError(f"pair entry for {x} needs side='left' or 'right'")
    raise TypeError(f"not an entry: {entry!r}")


# ---------------------------------------------------------------------------
# Used closure (▷), used projection, ∇, context update (⊎)
# ---------------------------------------------------------------------------

def _close_item(m1: Item, m2: Item) -> Item:
    if isinstance(m1, Void) and isinstance(m2, Void):
        return VOID
    if isinstance(m1, Void) or isinstance(m2, Void):
        if not isinstance(m1, Void) and head_qual(m1) is Qual.LIN:
            return m1  # lin p ▷ ◦ = lin p
        raise ContextAlgebraError(f"{m1} ▷ {m2} is undefined")
    if not type_equal(m1, m2):
        raise ContextAlgebraError(f"{m1} ▷ {m2} is undefined")
    if head_qual(m1) is Qual.LIN:
        return VOID  # lin p ▷ lin p = ◦
    return m1  # un p ▷ un p = un p


def closure(g1: Context, g2: Context) -> Context:
    """``g1 ▷ g2``: what ``g1`` spent to become ``g2``.  Pointwise, partial."""
    if g1.names() != g2.names():
        raise ContextAlgebraError("closure needs contexts with equal domains")
    out = []
    for name, e1 in g1.items():
        e2 = g2.get(name)
        match (e1, e2):
            case (Single(a), Single(b)):
                out.append((name, Single(_close_item(a, b))))
            case (Pair(a, b), Pair(c, d)):
                out.append((name, Pair(_close_item(a, c), _close_item(b, d))))
            case _:
                raise ContextAlgebraError(f"entry shapes for {name} differ: {e1} vs {e2}")
    return Context(out)


def _used_item(m: Item) -> Endpoint:
    return UN_END if isinstance(m, Void) else m


def used_map(g: Context) -> DeclContext:
    """Project a context to a declarative one; consumed slots become ``un end``."""
    out = []
    for name, e in g.items():
        match e:
            case Single(item):
                out.append((name, _used_item(item)))
            case Pair(left, right):
                out.append((name, ChanType(_used_item(left), _used_item(right))))
    return DeclContext(out)


def _nabla_item(m: Item) -> Item:
    if isinstance(m, Void):
        return m
    return VOID if head_qual(m) is Qual.LIN else m


def nabla(g: Context) -> Context:
    """The fully-consumed shape of ``g``: every linear slot set to ◦."""
    out = []
    for name, e in g.items():
        match e:
            case Single(item):
                out.append((name, Single(_nabla_item(item))))
            case Pair(left, right):
                out.append((name, Pair(_nabla_item(left), _nabla_item(right))))
    return Context(out)


def _update_item(m1: Item, m2: Item) -> Item:
    if isinstance(m1, Void):
        return m2
    if isinstance(m2, Void):
        return m1
    if head_qual(m1) is Qual.UN and head_qual(m2) is Qual.UN and type_equal(m1, m2):
        return m2
    raise ContextAlgebraError(f"{m1} ⊎ {m2} is undefined")


def update_context(g1: Context, g2: Context) -> Context:
    """``g1 ⊎ g2``: pointwise combination; linear slots must not collide."""
    if g1.names() != g2.names():
        raise ContextAlgebraError("update needs contexts with equal domains")
    out = []
    for name, e1 in g1.items():
        e2 = g2.get(name)
        match (e1, e2):
            case (Single(a), Single(b)):
                out.append((name, Single(_update_item(a, b))))
            case (Pair(a, b), Pair(c, d)):
                out.append((name, Pair(_update_item(a, c), _update_item(b, d))))
            case _:
                raise ContextAlgebraError(f"entry shapes for {name} differ: {e1} vs {e2}")
    return Context(out)
