import random

import pytest

from sessionpi import (
    VOID,
    CheckError,
    Context,
    ErrorKind,
    Pair,
    Single,
    audit_pattern_matches,
    barendregt_rename,
    check,
    check_var,
    context_equal,
    parse_context,
    parse_process,
    parse_type,
    type_check,
)
from sessionpi.gen import (
    accepted_family,
    delegation,
    gen_process,
    gen_safe_context,
    lin_pingpong,
    poll_system,
    un_server,
)
from tests.conftest import load_fixture

LIN_IN = parse_type("lin ?(un end).un end")
LIN_OUT = parse_type("lin !(un end).un end")
E = parse_type("un end")
UN_PAIR = parse_type("<rec a. un ?(un end).a, rec b. un !(un end).b>")


# ---------------------------------------------------------------------------
# Variable rules
# ---------------------------------------------------------------------------

def test_var_consumes_linear_endpoint():
    g = Context([("x", Single(LIN_OUT))])
    assert check_var(g, "x", LIN_OUT) == Context([("x", Single(VOID))])


def test_var_unrestricted_lookup_keeps_context():
    g = Context([("x", Single(E))])
    assert check_var(g, "x", E) == g


def test_var_consumes_whole_linear_pair_commuted():
    g = Context([("x", Pair(LIN_IN, LIN_OUT))])
    requested = parse_type("<lin !(un end).un end, lin ?(un end).un end>")
    assert check_var(g, "x", requested) == Context([("x", Pair(VOID, VOID))])


def test_var_consumed_slot_has_no_pattern():
    g = Context([("x", Single(VOID))])
    with pytest.raises(CheckError) as err:
        check_var(g, "x", parse_type("lin end"))
    assert err.value.kind is ErrorKind.NO_PATTERN


def test_var_pair_side_consumption():
    g = Context([("x", Pair(LIN_OUT, E))])
    assert check_var(g, "x", LIN_OUT) == Context([("x", Pair(VOID, E))])
    g2 = Context([("x", Pair(E, LIN_OUT))])
    assert check_var(g2, "x", LIN_OUT) == Context([("x", Pair(E, VOID))])


def test_var_unrestricted_side_needs_disequality():
    # <un end, un end> read at un end resolves through the dedicated
    # end/end rule, not the one-sided unrestricted rules.
    g = Context([("x", Pair(E, E))])
    assert check_var(g, "x", E) == g
    un_in = parse_type("rec a. un ?(un end).a")
    g2 = Context([("x", Pair(un_in, E))])
    assert check_var(g2, "x", un_in) == g2


def test_var_requesting_linear_from_unrestricted_fails():
    g = Context([("x", Single(E))])
    with pytest.raises(CheckError) as err:
        check_var(g, "x", parse_type("lin end"))
    assert err.value.kind is ErrorKind.NO_PATTERN


def test_var_missing_name():
    with pytest.raises(CheckError) as err:
        check_var(Context(), "x", E)
    assert err.value.kind is ErrorKind.NO_PATTERN


# ---------------------------------------------------------------------------
# Process rules
# ---------------------------------------------------------------------------

def test_inaction_returns_context_unchanged():
    g = Context([("x", Single(LIN_OUT)), ("y", Single(VOID))])
    assert check(g, parse_process("0")) == g


def test_output_on_linear_endpoint():
    g = Context([("x", Single(LIN_OUT)), ("v", Single(E))])
    out = check(g, parse_process("x!v.0"))
    assert out == Context([("x", Single(VOID)), ("v", Single(E))])


def test_linear_residual_detected_under_replication():
    ctx = parse_context("x : <lin ?(un end).un end, lin !(un end).un end>\nv : un end")
    result = type_check(ctx, parse_process("!x!v.0"))
    assert not result.accepted
    assert result.error.kind is ErrorKind.LINEAR_RESIDUAL


def test_unsafe_restriction_annotation():
    p = parse_process("new c: <lin !(un end).un end, lin !(un end).un end>. 0")
    result = type_check(Context(), p)
    assert not result.accepted
    assert result.error.kind is ErrorKind.UNSAFE_ANNOTATION


def test_unsafe_initial_context_rejected_immediately():
    g = Context([("x", Pair(LIN_OUT, LIN_OUT))])
    result = type_check(g, parse_process("0"))
    assert not result.accepted
    assert result.error.kind is ErrorKind.UNSAFE_ANNOTATION
    assert result.trace == []


def test_leftover_linear_entry_rejected():
    g = Context([("x", Single(LIN_OUT))])
    result = type_check(g, parse_process("0"))
    assert not result.accepted
    assert result.error.kind is ErrorKind.NON_UNRESTRICTED_RESULT
    assert "x" in result.error.location


def test_restriction_requires_finished_linear_usage():
    p = parse_process("new c: <lin ?(un end).un end, lin !(un end).un end>. c?(u).0")
    result = type_check(parse_context("v : un end"), p)
    assert not result.accepted
    assert result.error.kind is ErrorKind.LINEAR_RESIDUAL


# ---------------------------------------------------------------------------
# Protocol fixtures
# ---------------------------------------------------------------------------

def test_poll_system_accepted_in_both_orders():
    for swapped in (False, True):
        ctx, p = poll_system(2, swapped=swapped)
        result = type_check(ctx, p, runtime_audits=True)
        assert result.accepted
        from sessionpi import is_un_context

        assert is_un_context(result.residual)


def test_poll_trace_shows_session_delegation():
    ctx, p = poll_system(1)
    result = type_check(ctx, p, runtime_audits=True)
    rules = [step.rule for step in result.trace]
    assert "A-Res" in rules
    assert "A-Out-L" in rules
    assert "A-In-Un-l" in rules and "A-Out-Un-r" in rules
    assert rules.count("A-Repl") >= 2  # the service and its inner date loop

    # Delegating the send end voids the right slot of the poll entry while
    # the service keeps receiving on the left.
    delegated = [
        step
        for step in result.trace
        if step.rule == "A-V-L-r" and isinstance(step.input_ctx.get("p"), Pair)
    ]
    assert delegated, "expected the poll send end to be consumed by name lookup"
    after = delegated[0].output_ctx.get("p")
    assert after.right == VOID and after.left != VOID


def test_poll_replication_keeps_context_fixed():
    ctx, p = poll_system(1)
    result = type_check(ctx, p)
    repl_steps = [s for s in result.trace if s.rule == "A-Repl"]
    assert repl_steps
    for step in repl_steps:
        assert context_equal(step.input_ctx, step.output_ctx)


def test_remark_misuse_rejected_on_second_thread():
    ctx, p, expected = load_fixture("lin_then_un_misuse")
    result = type_check(ctx, p)
    assert not result.accepted
    assert result.error.kind.value == expected["error_kind"]
    assert "x?(y)" in result.error.location


def test_remark_unrestricted_channel_accepted():
    ctx, p, _ = load_fixture("unrestricted_channel")
    result = type_check(ctx, p, runtime_audits=True)
    assert result.accepted
    assert context_equal(result.residual, ctx)


def test_witnesses_rejected():
    for name in ("witness_input_then_output", "witness_self_delegation"):
        ctx, p, expected = load_fixture(name)
        result = type_check(ctx, p)
        assert not result.accepted
        assert result.error.kind.value == expected["error_kind"]


def test_accepted_family_all_accepted_with_audits():
    for ctx, p in accepted_family(12):
        result = type_check(ctx, p, runtime_audits=True)
        assert result.accepted, result.error


# ---------------------------------------------------------------------------
# Pattern audit
# ---------------------------------------------------------------------------

def test_audit_reports_zero_on_consumed_channel():
    g = Context([("x", Single(VOID)), ("y", Single(E))])
    records = audit_pattern_matches(g, parse_process("x!y.0"))
    assert records[-1].count == 0


def test_audit_poll_run_is_deterministic():
    ctx, p = poll_system(2)
    records = audit_pattern_matches(ctx, p)
    assert records and all(r.count <= 1 for r in records)


def test_audit_on_random_safe_pairs():
    rng = random.Random(31)
    for _ in range(200):
        ctx = gen_safe_context(rng, ["x", "y", "z"])
        p = gen_process(rng, list(ctx.names()), size=7)
        assert all(r.count <= 1 for r in audit_pattern_matches(ctx, p))


# ---------------------------------------------------------------------------
# Trace structure
# ---------------------------------------------------------------------------

def test_trace_steps_preserve_domains():
    # Binders are added and pruned inside a rule, so at the judgment level
    # every recorded step has equal input and output domains.
    for builder in (lin_pingpong, delegation, lambda: un_server(2)):
        ctx, p = builder()
        result = type_check(ctx, p)
        assert result.accepted
        for step in result.trace:
            assert step.input_ctx.names() == step.output_ctx.names()


def test_trace_serializes_renamed_process():
    ctx, p = lin_pingpong()
    result = type_check(ctx, p)
    assert result.process is not None
    assert result.process == barendregt_rename(p, avoid=ctx.names())
