from itertools import product

import pytest

from fastsram.logic import (ALU_KINDS, BIT_AND, FULL_ADDER, PASS_THROUGH, AluKind, TriBit, X,
                            alu_by_name, majority, tri_and, tri_eval, tri_or, tri_xor, tribit)


def test_tribit_parsing():
    assert tribit("x") is X and tribit(1) is TriBit.ONE and str(X) == "x"
    with pytest.raises(ValueError):
        tribit(3)


def test_known_inputs_decide():
    assert tri_and(0, X) == 0
    assert tri_or(1, X) == 1
    assert tri_xor(1, X) == X
    assert majority(1, 1, X) == 1
    assert majority(0, 1, X) == X


@pytest.mark.parametrize("fn", [lambda a, b: a & b, lambda a, b: a | b, lambda a, b: a ^ b])
def test_tri_eval_matches_completion_oracle(fn):
    for a, b in product((0, 1, 2), repeat=2):
        outs = {fn(x, y) for x in ((0, 1) if a == 2 else (a,)) for y in ((0, 1) if b == 2 else (b,))}
        expect = outs.pop() if len(outs) == 1 else 2
        assert tri_eval(fn, a, b) == expect


def test_full_adder_tables():
    for m, o, s in product((0, 1), repeat=3):
        out, nxt = FULL_ADDER.evaluate(m, o, s)
        assert out == (m ^ o ^ s)
        assert nxt == (m + o + s >= 2)


def test_pass_through_keeps_state():
    for m, o, s in product((0, 1), repeat=3):
        assert PASS_THROUGH.evaluate(m, o, s) == (m, s)


def test_unknown_state_propagates_only_where_needed():
    assert FULL_ADDER.evaluate(1, 1, X) == (X, 1)
    assert BIT_AND.evaluate(0, X, X) == (0, X)


def test_run_word_reference():
    assert FULL_ADDER.run_word(11, 6, 4) == (1, 1)
    assert ALU_KINDS["xor"].run_word(0b1100, 0b1010, 4) == (0b0110, 0)


def test_custom_and_lookup():
    sub = AluKind.custom(lambda m, o, s: m ^ o ^ s, lambda m, o, s: int((1 - m) & (o | s) | (o & s)),
                         "sub")
    assert sub.run_word(5, 3, 4) == (2, 0)
    assert alu_by_name("ADD") is FULL_ADDER
    with pytest.raises(ValueError):
        alu_by_name("mul")
    with pytest.raises(ValueError):
        AluKind("bad", (0,) * 7, (0,) * 8)
