"""Three-phase shift protocol of the shiftable cell.

Phase 1 opens the intra-cell loops and connects every cell's node X to the output of
its left neighbour. Phases 2 and 3 close the loops again so each cell latches node X.
The ALU at the end of a loop captures its carry on node T1 during phase 1 and
releases it through the delayed switch during phase 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import CorruptedRowError
from .logic import TriBit, X
from .row import Loop, RowState


class PhaseVector(NamedTuple):
    phi1: int
    phi2: int
    phi2d: int

    @property
    def legal(self) -> bool:
        return not (self.phi1 and (self.phi2 or self.phi2d))

    def __str__(self) -> str:
        return f"{self.phi1} {self.phi2} {self.phi2d}"


P1 = PhaseVector(1, 0, 0)
P2 = PhaseVector(0, 1, 0)
P3 = PhaseVector(0, 1, 1)
IDLE = PhaseVector(0, 0, 0)
CANONICAL_CYCLE = (P1, P2, P3)


@dataclass(frozen=True)
class Violation:
    step: int
    kind: str  # "overlap", "phi2d-order" or "retention"
    vector: PhaseVector

    def __str__(self) -> str:
        return f"step {self.step}: {self.kind} ({self.vector})"


def _violation(pv: PhaseVector, prev: PhaseVector, pending: bool) -> str | None:
    if not pv.legal:
        return "overlap"
    if pv.phi2d and not prev.phi2d and not pv.phi2:
        return "phi2d-order"
    if pv.phi1 and pending:
        return "retention"
    return None


def _pending_after(pv: PhaseVector, pending: bool) -> bool:
    if pv.phi1:
        return True
    if pv.phi2 or pv.phi2d:
        return False
    return pending


def check_schedule(steps: Iterable[Sequence[int]],
                   prev: Sequence[int] = IDLE) -> list[Violation]:
    """Return every step that breaks non-overlap, phi2d ordering, or retention.

    ``retention`` flags a phase 1 issued while node X still waits for restoration.
    The switches are assumed all-off before the first step.
    """
    report = []
    prev = PhaseVector(*prev)
    pending = False
    for i, raw in enumerate(steps):
        pv = PhaseVector(*(int(bool(v)) for v in raw))
        kind = _violation(pv, prev, pending)
        if kind:
            report.append(Violation(i, kind, pv))
        pending = _pending_after(pv, pending)
        prev = pv
    return report


def parse_schedule(text: str) -> list[PhaseVector]:
    """One ``phi1 phi2 phi2d`` triple per line; ``#`` starts a comment."""
    steps = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 3 or any(p not in ("0", "1") for p in parts):
            raise ValueError(f"line {n}: expected three 0/1 values, got {line!r}")
        steps.append(PhaseVector(*map(int, parts)))
    return steps


def _line_loop(row: RowState) -> Loop:
    return Loop(0, row.width - 1, 0, row.width)


def _poison(row: RowState, loops: Sequence[Loop]) -> None:
    for lp in loops:
        for i in range(lp.head, lp.tail + 1):
            row.loop[i] = X
            row.node_x[i] = X
        for s in range(lp.site, lp.site + lp.width // row.routing.base_width):
            row.t1[s] = X
            row.cin[s] = X
    row.corrupted = True


def _apply(row: RowState, pv: PhaseVector, loops: Sequence[Loop],
           inject: Mapping[int, int] | None) -> None:
    """In-place phase application on the given loops (the clock-enabled part of the row)."""
    prev = PhaseVector(*row.last_pv)
    row.last_pv = tuple(pv)
    if _violation(pv, prev, row.pending):
        _poison(row, loops)
        row.pending = False
        return
    loop, node_x = row.loop, row.node_x
    if pv.phi1:
        for lp in loops:
            if inject is not None and lp.head in inject:
                incoming = TriBit(inject[lp.head])
            else:
                feed = row.feed[lp.site]
                op = feed[row.cycle] if feed is not None and row.cycle < len(feed) else 0
                incoming, row.t1[lp.site] = row.sites[lp.site].evaluate(
                    loop[lp.tail], op, row.cin[lp.site])
            node_x[lp.head + 1:lp.tail + 1] = loop[lp.head:lp.tail]
            node_x[lp.head] = int(incoming)
        row.pending = True
    elif pv.phi2 or pv.phi2d:
        for lp in loops:
            loop[lp.head:lp.tail + 1] = node_x[lp.head:lp.tail + 1]
        if pv.phi2d and not prev.phi2d:
            for lp in loops:
                row.cin[lp.site] = row.t1[lp.site]
            ts = row.trace_site
            row.timeline.append((row.t1[ts], row.cin[ts]))
            row.cycle += 1
        row.pending = False


def apply_phase(row: RowState, pv: Sequence[int], inject=None,
                loops: Sequence[Loop] | None = None) -> RowState:
    """Apply one switch configuration and return the new row.

    ``inject`` given as a single bit treats the whole row as one open shift line whose
    leftmost cell receives that bit. A mapping ``{head_cell: bit}`` overrides the ALU
    output for the listed loop heads. With ``inject=None`` each loop's active ALU
    computes the incoming bit. ``loops`` restricts clocking to part of the row; the
    rest holds in its closed-loop state.
    """
    row = row.copy()
    pv = PhaseVector(*(int(bool(v)) for v in pv))
    if inject is not None and not isinstance(inject, Mapping):
        _apply(row, pv, [_line_loop(row)], {0: inject})
    else:
        _apply(row, pv, row.routing.loops(row.width) if loops is None else loops, inject)
    return row


def step_cycle(row: RowState, injected_bit: int) -> tuple[RowState, TriBit]:
    """One full shift-right cycle of the row seen as an open line."""
    if row.corrupted:
        raise CorruptedRowError("<row>", "corruption flag set")
    row = row.copy()
    ejected = TriBit(row.loop[-1])
    line = [_line_loop(row)]
    inject = {0: injected_bit}
    for pv in CANONICAL_CYCLE:
        _apply(row, pv, line, inject)
    return row, ejected


def run_schedule(row: RowState, steps: Iterable[Sequence[int]],
                 inject=None) -> RowState:
    for pv in steps:
        row = apply_phase(row, pv, inject)
    return row
