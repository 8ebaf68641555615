"""Command traces for the control decoder.

One command per line::

    WRITE <row> <hex>            conventional row write, row image MSB first
    READ <row>
    CONFIG <w>:<g,g,...>          segment group sizes from the LSB side
    BATCHADD <mask-hex> <op,...> full-adder batch, one operand per selected row
    BATCHOP <alu> <mask-hex> <op,...>
    SHIFT <mask-hex> <n>
    NOP

``<mask-hex>`` may be ``*`` for all rows. Operands are decimal unless prefixed
with ``0x``; ``-`` is the empty list (zero mask). ``#`` starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .array import FastArray
from .errors import CorruptedRowError, FastSramError, TraceError
from .events import EventLog
from .logic import alu_by_name
from .row import WordRouting


@dataclass(frozen=True)
class Write:
    row: int
    value: int
    line: int = 0


@dataclass(frozen=True)
class Read:
    row: int
    line: int = 0


@dataclass(frozen=True)
class Config:
    base_width: int
    groups: tuple[int, ...]
    line: int = 0


@dataclass(frozen=True)
class BatchOp:
    mask: Union[int, str]  # int bitmask or "*"
    alu: str
    operands: tuple[int, ...]
    line: int = 0


@dataclass(frozen=True)
class Shift:
    mask: Union[int, str]
    cycles: int
    line: int = 0


@dataclass(frozen=True)
class Nop:
    line: int = 0


Command = Union[Write, Read, Config, BatchOp, Shift, Nop]


def _int(tok: str, base: int = 10) -> int:
    tok = tok.strip()
    if tok.lower().startswith("0x"):
        return int(tok, 16)
    return int(tok, base)


def _mask(tok: str):
    return "*" if tok == "*" else _int(tok, 16)


def _ops(tok: str) -> tuple[int, ...]:
    if tok == "-":
        return ()
    return tuple(_int(t) for t in tok.split(",") if t.strip())


def parse_line(text: str, line: int = 0) -> Command | None:
    text = text.split("#", 1)[0].strip()
    if not text:
        return None
    parts = text.split()
    op, args = parts[0].upper(), parts[1:]
    arity = {"WRITE": 2, "READ": 1, "CONFIG": 1, "BATCHADD": 2, "BATCHOP": 3, "SHIFT": 2, "NOP": 0}
    if op not in arity:
        raise TraceError(line, f"unknown command {parts[0]!r}")
    if len(args) != arity[op]:
        raise TraceError(line, f"{op} takes {arity[op]} argument(s), got {len(args)}")
    try:
        if op == "WRITE":
            return Write(_int(args[0]), _int(args[1], 16), line)
        if op == "READ":
            return Read(_int(args[0]), line)
        if op == "CONFIG":
            w, _, groups = args[0].partition(":")
            return Config(_int(w), tuple(_int(g) for g in groups.split(",")), line)
        if op == "BATCHADD":
            return BatchOp(_mask(args[0]), "add", _ops(args[1]), line)
        if op == "BATCHOP":
            alu_by_name(args[0])
            return BatchOp(_mask(args[1]), args[0].lower(), _ops(args[2]), line)
        if op == "SHIFT":
            return Shift(_mask(args[0]), _int(args[1]), line)
        return Nop(line)
    except ValueError as exc:
        raise TraceError(line, f"{op}: {exc}") from None


def parse_trace(text: str) -> list[Command]:
    cmds = []
    for n, raw in enumerate(text.splitlines(), 1):
        cmd = parse_line(raw, n)
        if cmd is not None:
            cmds.append(cmd)
    return cmds


def format_command(cmd: Command) -> str:
    mask = lambda m: "*" if m == "*" else format(m, "x")  # noqa: E731
    if isinstance(cmd, Write):
        return f"WRITE {cmd.row} {cmd.value:x}"
    if isinstance(cmd, Read):
        return f"READ {cmd.row}"
    if isinstance(cmd, Config):
        return f"CONFIG {cmd.base_width}:" + ",".join(map(str, cmd.groups))
    if isinstance(cmd, BatchOp):
        ops = ",".join(map(str, cmd.operands)) or "-"
        if cmd.alu == "add":
            return f"BATCHADD {mask(cmd.mask)} {ops}"
        return f"BATCHOP {cmd.alu} {mask(cmd.mask)} {ops}"
    if isinstance(cmd, Shift):
        return f"SHIFT {mask(cmd.mask)} {cmd.cycles}"
    return "NOP"


def format_trace(cmds) -> str:
    return "".join(format_command(c) + "\n" for c in cmds)


@dataclass
class RunResult:
    reads: list[tuple[int, int]] = field(default_factory=list)  # (row, value)
    carries: list[np.ndarray] = field(default_factory=list)  # one per batch
    log: EventLog | None = None


def execute(arr: FastArray, cmd: Command, result: RunResult) -> None:
    R = arr.geometry.rows
    all_rows = (1 << R) - 1
    if isinstance(cmd, Write):
        arr.write_row(cmd.row, cmd.value)
    elif isinstance(cmd, Read):
        result.reads.append((cmd.row, arr.read_row(cmd.row)))
    elif isinstance(cmd, Config):
        arr.configure(WordRouting(cmd.base_width, cmd.groups))
    elif isinstance(cmd, BatchOp):
        mask = all_rows if cmd.mask == "*" else cmd.mask
        result.carries.append(arr.batch_op(mask, alu_by_name(cmd.alu), cmd.operands))
    elif isinstance(cmd, Shift):
        arr.shift(all_rows if cmd.mask == "*" else cmd.mask, cmd.cycles)


def run_trace(arr: FastArray, commands) -> RunResult:
    """Execute in order. The first failing command aborts with its line (or index)."""
    result = RunResult(log=arr.log)
    for i, cmd in enumerate(commands):
        where = cmd.line or i + 1
        try:
            execute(arr, cmd, result)
        except CorruptedRowError as exc:
            exc.line = where
            raise
        except (FastSramError, ValueError, IndexError) as exc:
            raise TraceError(where, str(exc)) from exc
    return result
