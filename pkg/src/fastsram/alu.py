"""Bit-serial word operations through the per-row ALU sites."""

from __future__ import annotations

from typing import Iterator

from .errors import CorruptedRowError, OperandError, RoutingError
from .logic import FULL_ADDER, PASS_THROUGH, AluKind, TriBit
from .phase import CANONICAL_CYCLE, _apply
from .row import Loop, RowState, WordRouting


def configure_routing(row: RowState, routing: WordRouting) -> RowState:
    routing.validate(row.width)
    if routing.segments != row.routing.segments:
        raise RoutingError(
            f"row has {row.routing.segments} ALU sites, routing uses {routing.segments}")
    row = row.copy()
    row.routing = routing
    n = routing.segments
    row.t1 = [0] * n
    row.cin = [0] * n
    row.sites = [PASS_THROUGH] * n
    row.feed = [None] * n
    return row


def clocked_loops(loops: list[Loop], selected: int, width: int) -> list[Loop]:
    """Loops that rotate during an op on ``selected``: every loop whose width divides
    the cycle count comes back to its start position; wider loops hold."""
    return [lp for i, lp in enumerate(loops) if i == selected or width % lp.width == 0]


def iter_serial_op(row: RowState, word_index: int, operand: int, alu: AluKind = FULL_ADDER,
                   carry_in: int = 0) -> Iterator[RowState]:
    """Run ``serial_op`` cycle by cycle, yielding the row after each completed cycle.

    The same row object is yielded every time; copy it to keep a snapshot.
    """
    if row.corrupted:
        raise CorruptedRowError("<row>", "corruption flag set")
    loops = row.routing.loops(row.width)
    if not 0 <= word_index < len(loops):
        raise OperandError(f"word index {word_index} out of range 0..{len(loops) - 1}")
    sel = loops[word_index]
    q = sel.width
    if operand < 0 or operand >> q:
        raise OperandError(f"operand {operand} does not fit in {q} bits")
    if carry_in not in (0, 1):
        raise OperandError("carry_in must be 0 or 1")
    row = row.copy()
    clocked = clocked_loops(loops, word_index, q)
    for lp in clocked:
        row.sites[lp.site] = PASS_THROUGH
        row.feed[lp.site] = None
    row.sites[sel.site] = alu
    row.feed[sel.site] = [(operand >> t) & 1 for t in range(q)]
    row.cin[sel.site] = carry_in
    row.t1[sel.site] = carry_in
    row.cycle = 0
    row.timeline = []
    row.trace_site = sel.site
    for _ in range(q):
        for pv in CANONICAL_CYCLE:
            _apply(row, pv, clocked, None)
        yield row


def serial_op(row: RowState, word_index: int, operand: int, alu: AluKind = FULL_ADDER,
              carry_in: int = 0) -> tuple[RowState, TriBit]:
    """Apply ``alu`` between word ``word_index`` and ``operand`` over q shift cycles.

    Returns the updated row and the final carry-latch value.
    """
    last = row
    for last in iter_serial_op(row, word_index, operand, alu, carry_in):
        pass
    site = last.routing.loops(last.width)[word_index].site
    return last, TriBit(last.cin[site])


def carry_timeline(row: RowState, cycle: int) -> tuple[TriBit, TriBit]:
    """Carry captured on node T1 in phase 1 and released in phase 3 of ``cycle``."""
    captured, released = row.timeline[cycle]
    return TriBit(captured), TriBit(released)
