"""The full array: rows sharing one global phase clock, driven by the control decoder.

Two stepping strategies share one state representation:

* ``mode="phase"`` steps every enabled row through the three phases with the
  three-valued phase engine (the reference path);
* ``mode="cycle"`` runs whole shift cycles through the compiled (or numpy) kernel.

Both produce the same image, carries, event log and waveform dump.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import CorruptedRowError, OperandError, RoutingError
from .events import EventLog
from .logic import FULL_ADDER, PASS_THROUGH, AluKind, X
from .phase import CANONICAL_CYCLE, P3, PhaseVector, _apply
from .row import RowState, WordRouting, int_to_bits
from .vcd import WaveRecorder


@dataclass(frozen=True)
class ArrayGeometry:
    rows: int = 128
    cols: int = 16
    alu_sites: int = 1

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or self.alu_sites < 1:
            raise ValueError("geometry values must be positive")
        if self.cols % self.alu_sites:
            raise ValueError(f"{self.cols} columns not divisible by {self.alu_sites} ALU sites")

    @property
    def base_width(self) -> int:
        return self.cols // self.alu_sites


SHOWCASE = ArrayGeometry(128, 16, 1)


def _unpack(values: Sequence[int], width: int) -> np.ndarray:
    """Row-wide integers to an MSB-first bit matrix."""
    if width <= 64:
        v = np.asarray(values, dtype=np.uint64)[:, None]
        shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
        return ((v >> shifts) & np.uint64(1)).astype(np.uint8)
    return np.array([int_to_bits(v, width) for v in values], dtype=np.uint8)


class FastArray:
    def __init__(self, geometry: ArrayGeometry = SHOWCASE, mode: str = "cycle",
                 recorder: WaveRecorder | None = None):
        if mode not in ("cycle", "phase"):
            raise ValueError(f"mode must be 'cycle' or 'phase', not {mode!r}")
        self.geometry = geometry
        self.mode = mode
        self.recorder = recorder
        R, C, A = geometry.rows, geometry.cols, geometry.alu_sites
        self.image = np.zeros((R, C), dtype=np.uint8)
        self.t1 = np.zeros((R, A), dtype=np.uint8)
        self.cin = np.zeros((R, A), dtype=np.uint8)
        self.corrupted = np.zeros(R, dtype=bool)
        self.pending = np.zeros(R, dtype=bool)
        self.last_pv = np.zeros((R, 3), dtype=np.uint8)
        self.routing = WordRouting.uniform(geometry.base_width, A)
        self.log = EventLog(R, C, A)
        self.time = 0
        if recorder is not None:
            for r in range(R):
                self._record_row(r)

    # ---- helpers -------------------------------------------------------------

    def _row_index(self, row: int) -> int:
        if not 0 <= row < self.geometry.rows:
            raise IndexError(f"row {row} out of range 0..{self.geometry.rows - 1}")
        return int(row)

    def rows_from_mask(self, mask) -> list[int]:
        """``mask`` is an int bitmask (bit r selects row r), a boolean array, or row indices."""
        R = self.geometry.rows
        if isinstance(mask, (int, np.integer)):
            if mask < 0 or mask >> R:
                raise IndexError(f"mask {mask:#x} selects rows beyond {R}")
            return [r for r in range(R) if (mask >> r) & 1]
        arr = np.asarray(mask)
        if arr.dtype == bool:
            if arr.shape != (R,):
                raise IndexError(f"boolean mask must have {R} entries")
            return [int(r) for r in np.flatnonzero(arr)]
        rows = sorted({self._row_index(int(r)) for r in arr.ravel()})
        return rows

    def _bits(self, data) -> np.ndarray:
        C = self.geometry.cols
        if isinstance(data, (int, np.integer)):
            return np.array(int_to_bits(int(data), C), dtype=np.uint8)
        bits = np.asarray(list(data), dtype=np.uint8)
        if bits.shape != (C,) or (bits > 1).any():
            raise ValueError(f"row data must be {C} plain bits")
        return bits

    def row_state(self, row: int) -> RowState:
        r = self._row_index(row)
        st = RowState.from_bits(self.image[r].tolist(), self.routing)
        st.t1 = self.t1[r].tolist()
        st.cin = self.cin[r].tolist()
        st.corrupted = bool(self.corrupted[r])
        st.pending = bool(self.pending[r])
        st.last_pv = tuple(int(v) for v in self.last_pv[r])
        return st

    def _store(self, r: int, st: RowState) -> None:
        self.image[r] = st.loop
        self.t1[r] = st.t1
        self.cin[r] = st.cin
        self.corrupted[r] = st.corrupted
        self.pending[r] = st.pending
        self.last_pv[r] = st.last_pv

    def _record_row(self, r: int, data: bool = True) -> None:
        rec = self.recorder
        if rec is not None and rec.wants(r):
            bits = self.image[r]
            rec.row(self.time, r, bits, bits, self.t1[r], self.cin[r])
            if data:
                rec.data(self.time, r, bits)

    def row_hex(self, row: int) -> str:
        digits = (self.geometry.cols + 3) // 4
        bits = self.image[row]
        if (bits == X).any():
            return "x" * digits
        return format(int("".join(map(str, bits.tolist())), 2), f"0{digits}x")

    def image_text(self) -> str:
        return "".join(self.row_hex(r) + "\n" for r in range(self.geometry.rows))

    def values(self) -> list[int | None]:
        out = []
        for r in range(self.geometry.rows):
            bits = self.image[r]
            out.append(None if (bits == X).any() else int("".join(map(str, bits.tolist())), 2))
        return out

    # ---- conventional access -------------------------------------------------

    def load(self, image: Sequence[int]) -> None:
        """Set the initial contents without logging or advancing time."""
        if len(image) != self.geometry.rows:
            raise ValueError("image must hold one value per row")
        for r, v in enumerate(image):
            self.image[r] = self._bits(v)
        self.corrupted[:] = False
        if self.recorder is not None:
            for r in range(self.geometry.rows):
                self._record_row(r)

    def write_row(self, row: int, data) -> None:
        r = self._row_index(row)
        self.image[r] = self._bits(data)
        if self.corrupted[r]:
            self.t1[r][self.t1[r] == X] = 0
            self.cin[r][self.cin[r] == X] = 0
        self.corrupted[r] = False
        self.pending[r] = False
        self.log.add("write", 1, self.geometry.cols, 0)
        self.time += 1
        self._record_row(r)

    def read_row(self, row: int) -> int:
        r = self._row_index(row)
        if self.corrupted[r] or (self.image[r] == X).any():
            raise CorruptedRowError(r, "corrupted read")
        self.log.add("read", 1, self.geometry.cols, 0)
        return int("".join(map(str, self.image[r].tolist())), 2)

    def configure(self, routing: WordRouting) -> None:
        routing.validate(self.geometry.cols)
        if routing.segments != self.geometry.alu_sites:
            raise RoutingError(f"routing uses {routing.segments} segments, "
                               f"array has {self.geometry.alu_sites} ALU sites per row")
        self.routing = routing
        self.t1[:] = 0
        self.cin[:] = 0
        self.log.add("config", self.geometry.rows, 0, 0)
        self.time += 1
        if self.recorder is not None:
            for r in self.recorder.rows:
                self.recorder.row(self.time, r, t1=self.t1[r], cin=self.cin[r])

    # ---- concurrent operations -----------------------------------------------

    def _require_clean(self, rows: Iterable[int]) -> None:
        rows = np.asarray(list(rows), dtype=np.intp)
        bad = rows[self.corrupted[rows] | self.pending[rows]]
        if len(bad):
            r = int(bad[0])
            raise CorruptedRowError(r, "corruption flag set" if self.corrupted[r]
                                    else "interrupted shift cycle")

    def batch_op(self, mask, alu: AluKind = FULL_ADDER, operands: Sequence[int] = ()) -> np.ndarray:
        """Apply ``alu`` to every word of every selected row in q global cycles.

        ``operands`` holds one row-wide value per selected row (ascending row order);
        word ``k`` of a row receives the operand bits at the word's cell positions.
        Returns the final carry per selected row and word, shape ``(rows, words)``.
        """
        rows = self.rows_from_mask(mask)
        operands = [int(v) for v in operands]
        if len(operands) != len(rows):
            raise OperandError(f"{len(operands)} operands for {len(rows)} selected rows")
        widths = set(self.routing.word_widths)
        if len(widths) != 1:
            raise OperandError(f"mixed word widths {sorted(widths)} in one batch")
        (q,) = widths
        C = self.geometry.cols
        for v in operands:
            if v < 0 or v >> C:
                raise OperandError(f"operand {v} does not fit the {C}-bit row")
        self._require_clean(rows)
        opsig = np.zeros_like(self.image)
        if rows:
            opsig[rows] = _unpack(operands, C)
        G = len(self.routing.groups)
        self._run(rows, [kernels.ALU] * G, alu, opsig, q, carry_in=0)
        self.log.add("batch", len(rows), C, q)
        sites = [lp.site for lp in self.routing.loops(C)]
        return self.cin[np.ix_(rows, sites)].copy() if rows else np.zeros((0, G), np.uint8)

    def shift(self, mask, cycles: int) -> None:
        """Rotate every loop of the selected rows by ``cycles`` pass-through cycles."""
        if cycles < 0:
            raise ValueError("cycle count must be non-negative")
        rows = self.rows_from_mask(mask)
        self._require_clean(rows)
        G = len(self.routing.groups)
        self._run(rows, [kernels.PASS] * G, PASS_THROUGH, np.zeros_like(self.image), cycles)
        self.log.add("shift", len(rows), self.geometry.cols, cycles)

    def _run(self, rows, modes, alu, opsig, ncycles, carry_in=None) -> None:
        if not rows or ncycles == 0:
            return
        if self.mode == "phase":
            self._run_phase(rows, modes, alu, opsig, ncycles, carry_in)
        else:
            self._run_cycle(rows, modes, alu, opsig, ncycles, carry_in)

    def _run_phase(self, rows, modes, alu, opsig, ncycles, carry_in) -> None:
        C = self.geometry.cols
        loops = self.routing.loops(C)
        clocked = [lp for lp, m in zip(loops, modes) if m != kernels.HOLD]
        states = {}
        for r in rows:
            st = self.row_state(r)
            for lp, m in zip(loops, modes):
                if m == kernels.ALU:
                    st.sites[lp.site] = alu
                    st.feed[lp.site] = [int(opsig[r, lp.tail - t]) for t in range(lp.width)]
                    if carry_in is not None:
                        st.t1[lp.site] = st.cin[lp.site] = carry_in
                elif m == kernels.PASS:
                    st.sites[lp.site] = PASS_THROUGH
            states[r] = st
        rec = self.recorder
        for _ in range(ncycles):
            for pv in CANONICAL_CYCLE:
                self.time += 1
                if rec is not None:
                    rec.phases(self.time, pv)
                for r, st in states.items():
                    _apply(st, pv, clocked, None)
                    if rec is not None and rec.wants(r):
                        rec.row(self.time, r, st.loop, st.node_x, st.t1, st.cin)
                        if pv == P3:
                            rec.data(self.time, r, st.loop)
        for r, st in states.items():
            self._store(r, st)

    def _run_cycle(self, rows, modes, alu, opsig, ncycles, carry_in) -> None:
        C = self.geometry.cols
        loops = self.routing.loops(C)
        sites = [lp.site for lp in loops]
        rows_arr = np.asarray(rows, dtype=np.intp)
        heads = np.array([lp.head for lp in loops], dtype=np.intp)
        tails = np.array([lp.tail for lp in loops], dtype=np.intp)
        modes_arr = np.asarray(modes, dtype=np.uint8)
        carry = np.ascontiguousarray(self.cin[:, sites])
        if carry_in is not None:
            for g, m in enumerate(modes):
                if m == kernels.ALU:
                    carry[rows_arr, g] = carry_in
                    self.cin[rows_arr, sites[g]] = carry_in
        rec = self.recorder
        snap_cells = snap_carry = None
        if rec is not None:
            snap_cells = np.zeros((ncycles,) + self.image.shape, dtype=np.uint8)
            snap_carry = np.zeros((ncycles,) + carry.shape, dtype=np.uint8)
        kernels.run_cycles(self.image, np.ascontiguousarray(opsig), rows_arr, heads, tails,
                           modes_arr, np.array(alu.out_table, dtype=np.uint8),
                           np.array(alu.state_table, dtype=np.uint8), carry, ncycles,
                           snap_cells, snap_carry)
        clocked_sites = [s for s, m in zip(sites, modes) if m != kernels.HOLD]
        clocked_groups = [g for g, m in enumerate(modes) if m != kernels.HOLD]
        if rec is not None:
            self._emit_cycles(rows, snap_cells, snap_carry, clocked_sites, clocked_groups)
        else:
            self.time += 3 * ncycles
        for s, g in zip(clocked_sites, clocked_groups):
            self.cin[rows_arr, s] = carry[rows_arr, g]
            self.t1[rows_arr, s] = carry[rows_arr, g]
        self.pending[rows_arr] = False
        self.last_pv[rows_arr] = P3

    def _emit_cycles(self, rows, snap_cells, snap_carry, clocked_sites, clocked_groups) -> None:
        rec = self.recorder
        watched = [r for r in rows if rec.wants(r)]
        t1 = {r: self.t1[r].copy() for r in watched}
        for c in range(snap_cells.shape[0]):
            for r in watched:
                t1[r][clocked_sites] = snap_carry[c, r, clocked_groups]
            rec.phases(self.time + 1, CANONICAL_CYCLE[0])
            for r in watched:
                # the carry latch preset shows up with the first transfer phase
                rec.row(self.time + 1, r, node_x=snap_cells[c, r], t1=t1[r],
                        cin=self.cin[r] if c == 0 else None)
            rec.phases(self.time + 2, CANONICAL_CYCLE[1])
            for r in watched:
                rec.row(self.time + 2, r, loop=snap_cells[c, r])
            rec.phases(self.time + 3, CANONICAL_CYCLE[2])
            for r in watched:
                rec.row(self.time + 3, r, cin=t1[r])
                rec.data(self.time + 3, r, snap_cells[c, r])
            self.time += 3

    def apply_schedule(self, mask, steps: Iterable[Sequence[int]]) -> None:
        """Drive the selected rows through an arbitrary switch sequence, legal or not.

        Always uses the phase engine: there is no fast path for illegal clocking.
        Loop inputs come from pass-through ALUs.
        """
        rows = self.rows_from_mask(mask)
        states = {r: self.row_state(r) for r in rows}
        loops = self.routing.loops(self.geometry.cols)
        for st in states.values():
            st.sites = [PASS_THROUGH] * len(st.sites)
            st.feed = [None] * len(st.feed)
        n = 0
        rec = self.recorder
        for raw in steps:
            pv = PhaseVector(*(int(bool(v)) for v in raw))
            n += 1
            self.time += 1
            if rec is not None:
                rec.phases(self.time, pv)
            for r, st in states.items():
                _apply(st, pv, loops, None)
                if rec is not None and rec.wants(r):
                    rec.row(self.time, r, st.loop, st.node_x, st.t1, st.cin)
                    rec.data(self.time, r, st.loop)
        for r, st in states.items():
            self._store(r, st)
        self.log.add("phase", len(rows), self.geometry.cols, n)
