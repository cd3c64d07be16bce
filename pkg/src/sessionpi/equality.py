"""Equi-recursive type equality, unfolding, and duality.

Two types are equal when their infinite unfoldings are equal as regular
trees, with channel pair types compared modulo commutation of the two
components.  The decision procedure is the usual coinductive one: unfold
both sides to a head constructor and compare, assuming equal any pair of
types already under comparison.  Contractiveness (checked at parse time)
bounds unfolding, and the set of distinct subterm pairs is finite, so the
procedure terminates.
"""

from __future__ import annotations

from .syntax import (
    ChanType,
    End,
    Endpoint,
    Qual,
    Qualified,
    Rec,
    Recv,
    Send,
    Type,
    TypeVar,
)


def subst_type(s: Endpoint, name: str, replacement: Endpoint) -> Endpoint:
    """Substitute ``replacement`` for the type variable ``name`` in ``s``.

    The replacement is always a closed type here, so capture cannot occur;
    substitution just stops at a shadowing binder.
    """
    match s:
        case TypeVar(n):
            return replacement if n == name else s
        case Rec(var, body):
            if var == name:
                return s
            return Rec(var, subst_type(body, name, replacement))
        case Qualified(q, Recv(payload, cont)):
            return Qualified(q, Recv(_subst_in_type(payload, name, replacement),
                                     subst_type(cont, name, replacement)))
        case Qualified(q, Send(payload, cont)):
            return Qualified(q, Send(_subst_in_type(payload, name, replacement),
                                     subst_type(cont, name, replacement)))
        case Qualified(_, End()):
            return s
    raise TypeError(f"not an endpoint type: {s!r}")


def _subst_in_type(t: Type, name: str, replacement: Endpoint) -> Type:
    if isinstance(t, ChanType):
        return ChanType(subst_type(t.left, name, replacement),
                        subst_type(t.right, name, replacement))
    return subst_type(t, name, replacement)


def unfold(s: Endpoint) -> Qualified:
    """Unfold a closed endpoint type until the head is a qualified pre-type."""
    while isinstance(s, Rec):
        s = subst_type(s.body, s.var, s)
    if not isinstance(s, Qualified):
        raise ValueError(f"cannot unfold open type {s}")
    return s


def type_equal(t1: Type, t2: Type) -> bool:
    """Equality of infinite unfoldings, modulo pair commutation."""
    return _type_eq(t1, t2, frozenset())


def endpoint_equal(s1: Endpoint, s2: Endpoint) -> bool:
    return _ep_eq(s1, s2, frozenset())


def _type_eq(t1: Type, t2: Type, assumed: frozenset) -> bool:
    if isinstance(t1, ChanType) and isinstance(t2, ChanType):
        return (_ep_eq(t1.left, t2.left, assumed) and _ep_eq(t1.right, t2.right, assumed)) or (
            _ep_eq(t1.left, t2.right, assumed) and _ep_eq(t1.right, t2.left, assumed)
        )
    if isinstance(t1, ChanType) or isinstance(t2, ChanType):
        return False
    return _ep_eq(t1, t2, assumed)


def _ep_eq(s1: Endpoint, s2: Endpoint, assumed: frozenset) -> bool:
    key = (s1, s2)
    if key in assumed:
        return True
    a, b = unfold(s1), unfold(s2)
    if a.qual is not b.qual:
        return False
    assumed = assumed | {key}
    match (a.pre, b.pre):
        case (End(), End()):
            return True
        case (Recv(p1, c1), Recv(p2, c2)) | (Send(p1, c1), Send(p2, c2)):
            return _type_eq(p1, p2, assumed) and _ep_eq(c1, c2, assumed)
        case _:
            return False


def dual(s: Endpoint) -> Endpoint:
    """Swap send/receive at every level, keeping qualifiers and payloads."""
    match s:
        case Qualified(q, Recv(payload, cont)):
            return Qualified(q, Send(payload, dual(cont)))
        case Qualified(q, Send(payload, cont)):
            return Qualified(q, Recv(payload, dual(cont)))
        case Qualified(_, End()):
            return s
        case TypeVar(_):
            return s
        case Rec(var, body):
            return Rec(var, dual(body))
    raise TypeError(f"not an endpoint type: {s!r}")


def head_qual(s: Endpoint) -> Qual:
    return unfold(s).qual


def is_un_end(s: Endpoint) -> bool:
    u = unfold(s)
    return u.qual is Qual.UN and isinstance(u.pre, End)
