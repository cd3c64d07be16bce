"""Shared test machinery: independent oracles and the retyping search."""

from __future__ import annotations

import itertools

from sessionpi import ChanType, Type, barendregt_rename, type_check
from sessionpi.contexts import DeclContext, is_safe_type
from sessionpi.declarative import Verdict, derivable
from sessionpi.equality import unfold
from sessionpi.semantics import advance_type
from sessionpi.syntax import End, Recv, Send

# ---------------------------------------------------------------------------
# Bounded tree expansion: an equality oracle independent of type_equal
# ---------------------------------------------------------------------------

def expand_endpoint(s, depth: int):
    if depth == 0:
        return "*"
    h = unfold(s)
    match h.pre:
        case End():
            return (h.qual.value, "end")
        case Recv(payload, cont):
            return (h.qual.value, "?", expand_type(payload, depth - 1), expand_endpoint(cont, depth - 1))
        case Send(payload, cont):
            return (h.qual.value, "!", expand_type(payload, depth - 1), expand_endpoint(cont, depth - 1))


def expand_type(t, depth: int):
    if isinstance(t, ChanType):
        return ("chan", expand_endpoint(t.left, depth), expand_endpoint(t.right, depth))
    return expand_endpoint(t, depth)


def trees_equal(a, b) -> bool:
    """Equality of expansion trees, commuting the two sides of channel nodes."""
    if a == "*" or b == "*":
        return True
    if isinstance(a, tuple) and a[0] == "chan":
        if not (isinstance(b, tuple) and b[0] == "chan"):
            return False
        return (trees_equal(a[1], b[1]) and trees_equal(a[2], b[2])) or (
            trees_equal(a[1], b[2]) and trees_equal(a[2], b[1])
        )
    if isinstance(b, tuple) and b[0] == "chan":
        return False
    if not (isinstance(a, tuple) and isinstance(b, tuple)):
        return a == b
    if len(a) != len(b) or a[:2] != b[:2]:
        return False
    return all(trees_equal(x, y) for x, y in zip(a[2:], b[2:]))


def expansion_equal(t1: Type, t2: Type, depth: int = 12) -> bool:
    return trees_equal(expand_type(t1, depth), expand_type(t2, depth))


# ---------------------------------------------------------------------------
# Retyping search for subject-reduction suites
# ---------------------------------------------------------------------------

def advancement_candidates(t: Type, max_steps: int = 3) -> list[Type]:
    """The type plus its first few one-communication advancements."""
    out = [t]
    current = t
    for _ in range(max_steps):
        stepped = advance_type(current)
        if stepped == current or stepped in out:
            break
        out.append(stepped)
        current = stepped
    return out


def find_retyping(i: DeclContext, reduct, max_steps: int = 3, bound: int = 200_000):
    """Search safe same-domain contexts (entrywise advancements of ``i``)
    for one that makes ``reduct`` derivable.

    Returns (context, result) on success, (None, result-or-None) otherwise;
    an INCONCLUSIVE oracle verdict is passed through for reporting.
    """
    names = sorted(i.names())
    per_name = [advancement_candidates(i.get(name), max_steps) for name in names]
    renamed = barendregt_rename(reduct, avoid=i.names())
    combos = sorted(
        itertools.product(*(range(len(c)) for c in per_name)), key=sum
    )
    saw_inconclusive = None
    for combo in combos:
        candidate = DeclContext(
            (name, per_name[k][idx]) for k, (name, idx) in enumerate(zip(names, combo))
        )
        if not all(is_safe_type(t) for _, t in candidate.items()):
            continue
        result = derivable(candidate, renamed, bound=bound)
        if result.verdict is Verdict.DERIVABLE:
            return candidate, result
        if result.verdict is Verdict.INCONCLUSIVE:
            saw_inconclusive = result
    return None, saw_inconclusive


def accepted(ctx, p) -> bool:
    return type_check(ctx, p, trace=False).accepted
