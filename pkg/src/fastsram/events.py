"""Accounting stream produced by the array and consumed by the cost model.

Text form::

    # fastsram event log rows=128 cols=16 alu_sites=1
    kind,rows,bits,cycles
    write,1,16,0
    batch,128,16,16
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

KINDS = ("write", "read", "config", "batch", "shift", "phase")


class Event(NamedTuple):
    kind: str
    rows: int  # rows touched
    bits: int  # bits per row (operand bits for a batch, cells clocked for a shift)
    cycles: int


@dataclass
class EventLog:
    rows: int
    cols: int
    alu_sites: int = 1
    events: list[Event] = field(default_factory=list)

    def add(self, kind: str, rows: int, bits: int, cycles: int) -> None:
        if kind not in KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        self.events.append(Event(kind, int(rows), int(bits), int(cycles)))

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __add__(self, other: "EventLog") -> "EventLog":
        if (self.rows, self.cols, self.alu_sites) != (other.rows, other.cols, other.alu_sites):
            raise ValueError("cannot concatenate logs of different geometries")
        return EventLog(self.rows, self.cols, self.alu_sites, self.events + other.events)

    def to_text(self) -> str:
        lines = [f"# fastsram event log rows={self.rows} cols={self.cols} "
                 f"alu_sites={self.alu_sites}", "kind,rows,bits,cycles"]
        lines += [f"{e.kind},{e.rows},{e.bits},{e.cycles}" for e in self.events]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "EventLog":
        geo = {}
        events = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        geo[k] = int(v)
                continue
            if line.startswith("kind,"):
                continue
            kind, rows, bits, cycles = line.split(",")
            events.append(Event(kind, int(rows), int(bits), int(cycles)))
        return cls(geo["rows"], geo["cols"], geo.get("alu_sites", 1), events)
