import random

import pytest

from sessionpi import (
    ChanType,
    Input,
    New,
    Output,
    Par,
    ParseError,
    Qual,
    Qualified,
    Rec,
    Recv,
    TypeVar,
    UN_END,
    Zero,
    barendregt_rename,
    free_vars,
    parse_context,
    parse_process,
    parse_type,
    pretty,
    substitute,
)
from sessionpi.gen import gen_process, gen_safe_context, poll_client_text, poll_service_text
from sessionpi.syntax import all_names


def test_parse_zero():
    assert parse_process("0") == Zero()


def test_parse_par_of_prefixes():
    p = parse_process("x!y.0 | x?(z).0")
    assert p == Par(Output("x", "y", Zero()), Input("x", "z", Zero()))


def test_parse_restriction_with_channel_annotation():
    p = parse_process("new p: <lin ?(un end).un end, lin !(un end).un end>. 0")
    lin_in = Qualified(Qual.LIN, Recv(UN_END, UN_END))
    assert isinstance(p, New)
    assert p.binder == "p"
    assert isinstance(p.annot, ChanType)
    assert p.annot.left == lin_in
    assert p.cont == Zero()


def test_parse_positions_recorded():
    p = parse_process("0 |\n x!y.0")
    assert isinstance(p, Par)
    assert p.right.pos == (2, 2)


def test_parse_errors_carry_line_and_column():
    with pytest.raises(ParseError) as err:
        parse_process("x!y.0 |\n| 0")
    assert err.value.line == 2


def test_parse_type_base():
    assert parse_type("un end") == UN_END


def test_parse_type_recursive():
    t = parse_type("rec a. un ?(un end).a")
    assert t == Rec("a", Qualified(Qual.UN, Recv(UN_END, TypeVar("a"))))


def test_parse_type_rejects_non_contractive():
    with pytest.raises(ParseError, match="non-contractive"):
        parse_type("rec a. a")
    with pytest.raises(ParseError, match="non-contractive"):
        parse_type("rec a. rec b. a")


def test_parse_type_rejects_free_variable():
    with pytest.raises(ParseError, match="unbound"):
        parse_type("rec a. un ?(un end).b")


def test_parse_process_checks_annotations():
    with pytest.raises(ParseError, match="non-contractive"):
        parse_process("new x: rec a. a. 0")


def test_parse_context_single_binding():
    ctx = parse_context("x : un end")
    assert ctx.names() == {"x"}
    assert ctx.get("x").item == UN_END


def test_parse_context_empty():
    assert len(parse_context("")) == 0
    assert len(parse_context("# just a comment\n\n")) == 0


def test_parse_context_duplicate_name():
    with pytest.raises(ParseError, match="duplicate"):
        parse_context("x : un end\nx : un end")


def test_pretty_zero():
    assert pretty(Zero()) == "0"


def test_pretty_round_trip_poll_processes():
    for text in (poll_service_text(), poll_client_text(3)):
        p = parse_process(text)
        assert parse_process(pretty(p)) == p


def test_pretty_round_trip_random_processes():
    rng = random.Random(7)
    for _ in range(100):
        ctx = gen_safe_context(rng, ["x", "y", "z"])
        p = gen_process(rng, list(ctx.names()), size=8)
        assert parse_process(pretty(p)) == p


def test_pretty_round_trip_random_types():
    from sessionpi.gen import gen_type

    rng = random.Random(8)
    for _ in range(100):
        t = gen_type(rng)
        assert parse_type(pretty(t)) == t


def test_free_vars():
    assert free_vars(Zero()) == frozenset()
    assert free_vars(parse_process("x!y.0")) == {"x", "y"}
    assert free_vars(parse_process("new x: un end. x!y.0")) == {"y"}
    assert free_vars(parse_process("x?(y).y!z.0")) == {"x", "z"}


def test_substitute_free_occurrences():
    p = parse_process("x!y.0")
    assert substitute(p, "z", "y") == parse_process("x!z.0")


def test_substitute_respects_binders():
    p = parse_process("x?(y).y!w.0")
    assert substitute(p, "z", "y") == p


def test_substitute_com_instance():
    # The input side of a communication: y(w).0 with z replacing y.
    q = parse_process("y?(w).0")
    assert substitute(q, "z", "y") == parse_process("z?(w).0")


def test_substitute_channel_and_argument():
    p = parse_process("x!x.0")
    assert substitute(p, "z", "x") == parse_process("z!z.0")


def test_barendregt_forces_distinct_binders():
    p = parse_process("x?(y).0 | x?(y).0")
    renamed = barendregt_rename(p)
    assert renamed == parse_process("x?(y).0 | x?(y1).0")


def test_barendregt_no_binders_unchanged():
    p = parse_process("x!y.0 | y!x.0")
    assert barendregt_rename(p) == p


def test_barendregt_avoids_given_names():
    p = parse_process("x?(y).0")
    renamed = barendregt_rename(p, avoid={"y"})
    assert renamed == parse_process("x?(y1).0")


def test_barendregt_invariants_and_idempotence():
    rng = random.Random(11)
    for _ in range(100):
        p = gen_process(rng, ["x", "y"], size=9)
        renamed = barendregt_rename(p)
        binders = _binders(renamed)
        assert len(binders) == len(set(binders))
        assert not set(binders) & free_vars(p)
        assert free_vars(renamed) == free_vars(p)
        assert barendregt_rename(renamed) == renamed


def _binders(p):
    out = []
    match p:
        case Par(left, right):
            out += _binders(left) + _binders(right)
        case Input(_, binder, cont):
            out += [binder] + _binders(cont)
        case New(binder, _, cont):
            out += [binder] + _binders(cont)
        case Output(_, _, cont):
            out += _binders(cont)
        case _:
            pass
    if hasattr(p, "body"):
        out += _binders(p.body)
    return out


def test_substitute_free_variable_law():
    rng = random.Random(13)
    for _ in range(50):
        p = barendregt_rename(gen_process(rng, ["x", "y"], size=8))
        if "x" not in free_vars(p) or "z" in all_names(p):
            continue
        q = substitute(p, "z", "x")
        assert free_vars(q) == (free_vars(p) - {"x"}) | {"z"}
