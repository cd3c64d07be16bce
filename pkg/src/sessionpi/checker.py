"""The deterministic pattern-based type checker.

``check`` threads a context through a process: each rule receives a context,
consumes the capabilities the process uses, and returns the residue.  Rules
are selected by the shape of the subject's context entry and the head of the
process; on a safe context at most one pattern applies, so there is no
backtracking.  Consumed linear slots are marked ``◦`` so later threads
cannot reuse them.

Rule names carried in traces:

* variables: A-V-L, A-V-U, A-V-LL-l/r, A-V-L-l/r, A-V-UU-l/r, A-V-U-l/r,
  A-V-EE.  The ``-l``/``-r`` suffix names the pair side being read or
  consumed (note: some presentations attach the suffixes of the two
  singleton linear rules the other way around).
* processes: A-Inact, A-Par, A-Repl, A-Res, A-Out-L(-l/-r), A-Out-Un(-l/-r),
  A-In-L(-l/-r), A-In-Un(-l/-r).

The pair variants unwrap one side, rerun the checker on the resulting
single-slot entry, and rewrap, which mirrors their premises exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

from .contexts import (
    VOID,
    Context,
    ContextAlgebraError,
    Item,
    Pair,
    Single,
    Void,
    closure,
    context_equal,
    entry_of_type,
    is_safe_context,
    is_safe_entry,
    is_safe_type,
    is_un_context,
    is_un_entry,
    update_entry,
    used_map,
)
from .equality import is_un_end, type_equal, unfold
from .syntax import (
    ChanType,
    Endpoint,
    Input,
    New,
    Output,
    Par,
    Process,
    Qual,
    Qualified,
    Recv,
    Repl,
    Send,
    Type,
    Zero,
    barendregt_rename,
    is_endpoint,
)


class ErrorKind(enum.Enum):
    NO_PATTERN = "NoPattern"
    UNSAFE_ANNOTATION = "UnsafeAnnotation"
    LINEAR_RESIDUAL = "LinearResidual"
    NON_UNRESTRICTED_RESULT = "NonUnrestrictedResult"
    PARTIAL_ALGEBRA = "PartialAlgebra"


class CheckError(Exception):
    """Structured rejection raised while checking; surfaced in CheckResult."""

    def __init__(self, kind: ErrorKind, location: str, detail: str):
        super().__init__(f"{kind.value} at {location}: {detail}")
        self.kind = kind
        self.location = location
        self.detail = detail


class AuditViolation(Exception):
    """A runtime invariant audit failed; indicates a checker bug."""


@dataclass
class TraceStep:
    rule: str
    input_ctx: Context
    subject: str
    output_ctx: Optional[Context] = None


@dataclass(frozen=True)
class AuditRecord:
    """Number of independently matching patterns at one recursive call."""

    site: str
    count: int


@dataclass
class CheckResult:
    accepted: bool
    residual: Optional[Context]
    error: Optional[CheckError]
    trace: list[TraceStep] = field(default_factory=list)
    audits: Optional[list[AuditRecord]] = None
    process: Optional[Process] = None  # the renamed process that was checked


def _loc(p: Process) -> str:
    text = str(p)
    if len(text) > 60:
        text = text[:57] + "..."
    if getattr(p, "pos", None):
        return f"{text} (line {p.pos[0]}, col {p.pos[1]})"
    return text


def _head(item: Item) -> Optional[Qualified]:
    return None if isinstance(item, Void) else unfold(item)


def _is_recursive_io(item: Item, ctor) -> Optional[tuple[Type, Endpoint]]:
    """Match an unrestricted ``ctor`` pre-type whose continuation is the whole type."""
    h = _head(item)
    if h is None or h.qual is not Qual.UN or not isinstance(h.pre, ctor):
        return None
    if not type_equal(h.pre.cont, item):
        return None
    return h.pre.payload, h.pre.cont


class _Checker:
    def __init__(self, trace: bool = True, audit: bool = False, runtime_audits: bool = False):
        self.trace: Optional[list[TraceStep]] = [] if trace else None
        self.audits: Optional[list[AuditRecord]] = [] if audit else None
        self.runtime_audits = runtime_audits

    # -- plumbing ------------------------------------------------------------

    def _record(self, rule: str, g: Context, subject: str) -> Optional[TraceStep]:
        if self.trace is None:
            return None
        step = TraceStep(rule, g, subject)
        self.trace.append(step)
        return step

    def _audit(self, site: str, count: int):
        if self.audits is not None:
            self.audits.append(AuditRecord(site, count))

    # -- variables -----------------------------------------------------------

    def _var_matches(
        self, g: Context, x: str, t: Type
    ) -> list[tuple[str, Callable[[], Context]]]:
        entry = g.get(x)
        if entry is None:
            return []
        matches: list[tuple[str, Callable[[], Context]]] = []

        if isinstance(entry, Single) and is_endpoint(t):
            h = _head(entry.item)
            th = unfold(t)
            if h is not None and h.qual is th.qual and type_equal(entry.item, t):
                if h.qual is Qual.LIN:
                    matches.append(("A-V-L", lambda: g.set(x, Single(VOID))))
                else:
                    matches.append(("A-V-U", lambda: g))

        if isinstance(entry, Pair):
            left, right = entry.left, entry.right
            hl, hr = _head(left), _head(right)
            if isinstance(t, ChanType) and hl is not None and hr is not None:
                if hl.qual is Qual.LIN and hr.qual is Qual.LIN:
                    if type_equal(left, t.left) and type_equal(right, t.right):
                        matches.append(("A-V-LL-l", lambda: g.set(x, Pair(VOID, VOID))))
                    elif type_equal(left, t.right) and type_equal(right, t.left):
                        matches.append(("A-V-LL-r", lambda: g.set(x, Pair(VOID, VOID))))
                if hl.qual is Qual.UN and hr.qual is Qual.UN:
                    if type_equal(left, t.left) and type_equal(right, t.right):
                        matches.append(("A-V-UU-l", lambda: g))
                    elif type_equal(left, t.right) and type_equal(right, t.left):
                        matches.append(("A-V-UU-r", lambda: g))
            if is_endpoint(t):
                th = unfold(t)
                if hl is not None and hl.qual is Qual.LIN and th.qual is Qual.LIN and type_equal(left, t):
                    matches.append(("A-V-L-l", lambda: g.set(x, Pair(VOID, right))))
                if hr is not None and hr.qual is Qual.LIN and th.qual is Qual.LIN and type_equal(right, t):
                    matches.append(("A-V-L-r", lambda: g.set(x, Pair(left, VOID))))
                if (
                    hl is not None
                    and hl.qual is Qual.UN
                    and th.qual is Qual.UN
                    and type_equal(left, t)
                    and not (not isinstance(right, Void) and type_equal(left, right))
                ):
                    matches.append(("A-V-U-l", lambda: g))
                if (
                    hr is not None
                    and hr.qual is Qual.UN
                    and th.qual is Qual.UN
                    and type_equal(right, t)
                    and not (not isinstance(left, Void) and type_equal(right, left))
                ):
                    matches.append(("A-V-U-r", lambda: g))
                if (
                    not isinstance(left, Void)
                    and not isinstance(right, Void)
                    and is_un_end(left)
                    and is_un_end(right)
                    and is_un_end(t)
                ):
                    matches.append(("A-V-EE", lambda: g))
        return matches

    def check_var(self, g: Context, x: str, t: Type) -> Context:
        site = f"{x} : {t}"
        matches = self._var_matches(g, x, t)
        self._audit(site, len(matches))
        if not matches:
            entry = g.get(x)
            detail = (
                f"{x} is not in the context"
                if entry is None
                else f"cannot use {x} (entry {entry}) at type {t}"
            )
            raise CheckError(ErrorKind.NO_PATTERN, site, detail)
        rule, apply = matches[0]
        step = self._record(rule, g, site)
        out = apply()
        if step is not None:
            step.output_ctx = out
        return out

    # -- processes -----------------------------------------------------------

    def _process_matches(
        self, g: Context, p: Process
    ) -> list[tuple[str, Callable[[], Context]]]:
        matches: list[tuple[str, Callable[[], Context]]] = []
        match p:
            case Zero():
                matches.append(("A-Inact", lambda: g))
            case Repl(_):
                matches.append(("A-Repl", lambda: self._rule_repl(g, p)))
            case Par(_, _):
                matches.append(("A-Par", lambda: self._rule_par(g, p)))
            case New(_, _, _):
                matches.append(("A-Res", lambda: self._rule_res(g, p)))
            case Output(chan, _, _):
                entry = g.get(chan)
                if isinstance(entry, Single):
                    h = _head(entry.item)
                    if h is not None and h.qual is Qual.LIN and isinstance(h.pre, Send):
                        matches.append(("A-Out-L", lambda: self._rule_out_lin(g, p)))
                    if _is_recursive_io(entry.item, Send):
                        matches.append(
                            ("A-Out-Un", lambda: self._rule_out_un(g, p, entry.item))
                        )
                elif isinstance(entry, Pair):
                    hl, hr = _head(entry.left), _head(entry.right)
                    if hl is not None and hl.qual is Qual.LIN and isinstance(hl.pre, Send):
                        matches.append(
                            ("A-Out-L-l", lambda: self._rule_pair_side(g, p, "left", "lin-out"))
                        )
                    if hr is not None and hr.qual is Qual.LIN and isinstance(hr.pre, Send):
                        matches.append(
                            ("A-Out-L-r", lambda: self._rule_pair_side(g, p, "right", "lin-out"))
                        )
                    if _is_recursive_io(entry.left, Send):
                        matches.append(
                            ("A-Out-Un-l", lambda: self._rule_out_un(g, p, entry.left))
                        )
                    if _is_recursive_io(entry.right, Send):
                        matches.append(
                            ("A-Out-Un-r", lambda: self._rule_out_un(g, p, entry.right))
                        )
            case Input(chan, _, _):
                entry = g.get(chan)
                if isinstance(entry, Single):
                    h = _head(entry.item)
                    if h is not None and h.qual is Qual.LIN and isinstance(h.pre, Recv):
                        matches.append(("A-In-L", lambda: self._rule_in_lin(g, p)))
                    if _is_recursive_io(entry.item, Recv):
                        matches.append(
                            ("A-In-Un", lambda: self._rule_in_un(g, p, entry.item))
                        )
                elif isinstance(entry, Pair):
                    hl, hr = _head(entry.left), _head(entry.right)
                    if hl is not None and hl.qual is Qual.LIN and isinstance(hl.pre, Recv):
                        matches.append(
                            ("A-In-L-l", lambda: self._rule_pair_side(g, p, "left", "lin-in"))
                        )
                    if hr is not None and hr.qual is Qual.LIN and isinstance(hr.pre, Recv):
                        matches.append(
                            ("A-In-L-r", lambda: self._rule_pair_side(g, p, "right", "lin-in"))
                        )
                    if _is_recursive_io(entry.left, Recv):
                        matches.append(
                            ("A-In-Un-l", lambda: self._rule_in_un(g, p, entry.left))
                        )
                    if _is_recursive_io(entry.right, Recv):
                        matches.append(
                            ("A-In-Un-r", lambda: self._rule_in_un(g, p, entry.right))
                        )
        return matches

    def check(self, g: Context, p: Process) -> Context:
        matches = self._process_matches(g, p)
        self._audit(_loc(p), len(matches))
        if not matches:
            detail = "no pattern applies"
            if isinstance(p, (Output, Input)):
                entry = g.get(p.chan)
                detail = (
                    f"{p.chan} is not in the context"
                    if entry is None
                    else f"no pattern for {type(p).__name__.lower()} on {p.chan} with entry {entry}"
                )
            raise CheckError(ErrorKind.NO_PATTERN, _loc(p), detail)
        rule, apply = matches[0]
        step = self._record(rule, g, str(p))
        out = apply()
        if step is not None:
            step.output_ctx = out
        if self.runtime_audits:
            self._check_invariants(g, out, p)
        return out

    def _check_invariants(self, g: Context, out: Context, p: Process):
        # Domain preservation and safety of every successful return, and
        # definedness of the used projection of the consumption closure.
        if g.names() != out.names():
            raise AuditViolation(f"domain changed while checking {_loc(p)}")
        if not is_safe_context(out):
            raise AuditViolation(f"unsafe output context after {_loc(p)}")
        try:
            used_map(closure(g, out))
        except ContextAlgebraError as err:
            raise AuditViolation(f"used closure undefined after {_loc(p)}: {err}") from err

    # -- rule bodies ----------------------------------------------------------

    def _rule_out_lin(self, g: Context, p: Output) -> Context:
        # Send on a linear endpoint: type the argument with the channel slot
        # voided, resume the continuation at the continuation type, demand an
        # unrestricted residue for the channel, and hand back a voided slot.
        entry = g.get(p.chan)
        h = unfold(entry.item)
        payload, cont_t = h.pre.payload, h.pre.cont
        g1 = g.set(p.chan, Single(VOID))
        g2 = self.check_var(g1, p.arg, payload)
        g3 = self.check(update_entry(g2, p.chan, cont_t), p.cont)
        residue = g3.get(p.chan)
        if not is_un_entry(residue):
            raise CheckError(
                ErrorKind.LINEAR_RESIDUAL,
                _loc(p),
                f"linear usage of {p.chan} not finished in the continuation (residue {residue})",
            )
        return g3.set(p.chan, Single(VOID))

    def _rule_in_lin(self, g: Context, p: Input) -> Context:
        # Receive on a linear endpoint: bind the payload, resume at the
        # continuation type, demand unrestricted residues for both the channel
        # and the binder, then drop the binder and void the channel slot.
        entry = g.get(p.chan)
        h = unfold(entry.item)
        payload, cont_t = h.pre.payload, h.pre.cont
        if p.binder in g:
            raise CheckError(
                ErrorKind.PARTIAL_ALGEBRA, _loc(p), f"binder {p.binder} shadows a context entry"
            )
        g1 = g.set(p.chan, Single(cont_t)).add(p.binder, entry_of_type(payload))
        g2 = self.check(g1, p.cont)
        for name in (p.chan, p.binder):
            if not is_un_entry(g2.get(name)):
                raise CheckError(
                    ErrorKind.LINEAR_RESIDUAL,
                    _loc(p),
                    f"linear usage of {name} not finished in the continuation "
                    f"(residue {g2.get(name)})",
                )
        return g2.remove(p.binder).set(p.chan, Single(VOID))

    def _rule_pair_side(self, g: Context, p: Process, side: str, kind: str) -> Context:
        # Pair variants: unwrap one side, run the endpoint rule on it, rewrap.
        entry = g.get(p.chan)
        inner_item = entry.left if side == "left" else entry.right
        other = entry.right if side == "left" else entry.left
        inner_out = self.check(g.set(p.chan, Single(inner_item)), p)
        got = inner_out.get(p.chan)
        if kind in ("lin-out", "lin-in"):
            if got != Single(VOID):
                raise AuditViolation(f"endpoint rule left {p.chan} at {got}, expected ◦")
            rewrapped = Pair(VOID, other) if side == "left" else Pair(other, VOID)
            return inner_out.set(p.chan, rewrapped)
        raise AuditViolation(f"unknown pair-side kind {kind}")

    def _rule_out_un(self, g: Context, p: Output, item: Item) -> Context:
        # Send on an unrestricted endpoint: the type repeats itself, so the
        # argument is typed under the unchanged context.
        payload, _ = _is_recursive_io(item, Send)
        g2 = self.check_var(g, p.arg, payload)
        return self.check(g2, p.cont)

    def _rule_in_un(self, g: Context, p: Input, item: Item) -> Context:
        payload, _ = _is_recursive_io(item, Recv)
        if p.binder in g:
            raise CheckError(
                ErrorKind.PARTIAL_ALGEBRA, _loc(p), f"binder {p.binder} shadows a context entry"
            )
        g1 = g.add(p.binder, entry_of_type(payload))
        g2 = self.check(g1, p.cont)
        if not is_un_entry(g2.get(p.binder)):
            raise CheckError(
                ErrorKind.LINEAR_RESIDUAL,
                _loc(p),
                f"linear usage of {p.binder} not finished in its scope "
                f"(residue {g2.get(p.binder)})",
            )
        return g2.remove(p.binder)

    def _rule_res(self, g: Context, p: New) -> Context:
        if not is_safe_type(p.annot):
            raise CheckError(
                ErrorKind.UNSAFE_ANNOTATION, _loc(p), f"annotation {p.annot} is not safe"
            )
        if p.binder in g:
            raise CheckError(
                ErrorKind.PARTIAL_ALGEBRA, _loc(p), f"binder {p.binder} shadows a context entry"
            )
        g1 = g.add(p.binder, entry_of_type(p.annot))
        g2 = self.check(g1, p.cont)
        if not is_un_entry(g2.get(p.binder)):
            raise CheckError(
                ErrorKind.LINEAR_RESIDUAL,
                _loc(p),
                f"linear usage of {p.binder} not finished in its scope "
                f"(residue {g2.get(p.binder)})",
            )
        return g2.remove(p.binder)

    def _rule_par(self, g: Context, p: Par) -> Context:
        return self.check(self.check(g, p.left), p.right)

    def _rule_repl(self, g: Context, p: Repl) -> Context:
        g2 = self.check(g, p.body)
        if not context_equal(g2, g):
            raise CheckError(
                ErrorKind.LINEAR_RESIDUAL,
                _loc(p),
                "a linear resource was consumed under replication",
            )
        return g2


def type_check(
    g: Context,
    p: Process,
    *,
    rename: bool = True,
    trace: bool = True,
    audit: bool = False,
    runtime_audits: bool = False,
) -> CheckResult:
    """Check ``p`` against ``g``; accept when the residue is unrestricted.

    Rejects immediately on an unsafe context.  The process is alpha-renamed
    to the Barendregt convention (binders distinct from each other, from free
    variables, and from context names) before checking; traces show the
    renamed term.
    """
    if not is_safe_context(g):
        offending = [name for name, e in g.items() if not is_safe_entry(e)]
        return CheckResult(
            accepted=False,
            residual=None,
            error=CheckError(
                ErrorKind.UNSAFE_ANNOTATION,
                "initial context",
                f"context is not safe at {', '.join(offending)}",
            ),
        )
    q = barendregt_rename(p, avoid=g.names()) if rename else p
    run = _Checker(trace=trace, audit=audit, runtime_audits=runtime_audits)
    try:
        out = run.check(g, q)
    except CheckError as err:
        return CheckResult(False, None, err, _completed(run), run.audits, q)
    except ContextAlgebraError as err:
        wrapped = CheckError(ErrorKind.PARTIAL_ALGEBRA, str(q), str(err))
        return CheckResult(False, None, wrapped, _completed(run), run.audits, q)
    if not is_un_context(out):
        offending = [name for name, e in out.items() if not is_un_entry(e)]
        err = CheckError(
            ErrorKind.NON_UNRESTRICTED_RESULT,
            ", ".join(offending),
            f"linear entries survive at top level: {', '.join(offending)}",
        )
        return CheckResult(False, None, err, _completed(run), run.audits, q)
    return CheckResult(True, out, None, _completed(run), run.audits, q)


def _completed(run: _Checker) -> list[TraceStep]:
    if run.trace is None:
        return []
    return [s for s in run.trace if s.output_ctx is not None]


def check(g: Context, p: Process) -> Context:
    """Bare checking kernel: returns the residual context or raises CheckError."""
    return _Checker(trace=False).check(g, p)


def check_var(g: Context, x: str, t: Type) -> Context:
    """Bare variable rule application: residual context or CheckError."""
    return _Checker(trace=False).check_var(g, x, t)


def audit_pattern_matches(g: Context, p: Process, *, rename: bool = True) -> list[AuditRecord]:
    """Match counts for every recursive call reached while checking (g, p).

    Counts the patterns whose guards hold, evaluated independently of which
    one runs; the run itself proceeds normally and may reject.  On a safe
    context every record's count is at most one.
    """
    if rename:
        p = barendregt_rename(p, avoid=g.names())
    run = _Checker(trace=False, audit=True)
    try:
        run.check(g, p)
    except (CheckError, ContextAlgebraError):
        pass
    return run.audits or []
