"""Session-typed pi calculus: deterministic type checker, split-based
derivability oracle, and operational semantics."""

from .checker import (
    AuditRecord,
    AuditViolation,
    CheckError,
    CheckResult,
    ErrorKind,
    TraceStep,
    audit_pattern_matches,
    check,
    check_var,
    type_check,
)
from .contexts import (
    VOID,
    Context,
    ContextAlgebraError,
    DeclContext,
    Pair,
    Single,
    Void,
    closure,
    context_equal,
    decl_to_context,
    entry_of_type,
    is_safe_context,
    is_safe_entry,
    is_safe_type,
    is_un_context,
    is_un_entry,
    nabla,
    to_decl_context,
    type_of_entry,
    update_context,
    update_entry,
    used_map,
)
from .declarative import OracleResult, Split, Verdict, derivable, derivable_value, enumerate_splits
from .equality import dual, endpoint_equal, type_equal, unfold
from .parser import ParseError, parse_context, parse_entry, parse_process, parse_type
from .semantics import (
    RewriteStep,
    congruence_steps,
    reduce_step,
    reduce_trace,
)
from .contexts import context_file_text
from .syntax import (
    ChanType,
    End,
    Input,
    New,
    Output,
    Par,
    Process,
    Qual,
    Qualified,
    Rec,
    Recv,
    Repl,
    Send,
    Type,
    TypeVar,
    UN_END,
    Zero,
    barendregt_rename,
    free_vars,
    substitute,
)


def pretty(value) -> str:
    """Concrete syntax for a process, type, entry or context.

    Parsing the result with the matching parser gives the value back;
    contexts print in context-file form (one binding per line).
    """
    if isinstance(value, Context):
        return context_file_text(value)
    return str(value)


__all__ = [name for name in dir() if not name.startswith("_")]
