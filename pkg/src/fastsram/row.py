"""Row state shared by the phase engine and the row ALU.

Cells are indexed left to right. A row of ``C`` cells is split into ``A`` base
segments of ``w = C // A`` cells; segment 0 is the rightmost one and holds the least
significant bits. ALU site ``s`` sits at the right end of segment ``s`` and feeds
back into the leftmost cell of its loop. Merged segments form one wider loop with
only the lowest site active.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .errors import RoutingError
from .logic import PASS_THROUGH, AluKind, TriBit, X


class CellState(NamedTuple):
    loop_bit: TriBit
    node_x: TriBit


class Loop(NamedTuple):
    head: int  # leftmost cell
    tail: int  # rightmost cell, feeds the active ALU
    site: int  # active ALU site
    width: int


@dataclass(frozen=True)
class WordRouting:
    """Partition of the segments into contiguous power-of-two groups, LSB side first."""

    base_width: int
    groups: tuple[int, ...]

    def __post_init__(self):
        if self.base_width < 1:
            raise RoutingError("base width must be positive")
        if not self.groups:
            raise RoutingError("routing needs at least one group")
        for g in self.groups:
            if g < 1 or g & (g - 1):
                raise RoutingError(f"group size {g} is not a power of two")

    @classmethod
    def uniform(cls, base_width: int, segments: int) -> "WordRouting":
        return cls(base_width, (1,) * segments)

    @classmethod
    def from_merge_map(cls, base_width: int, segments: int,
                       merge_map: Iterable[Iterable[int]]) -> "WordRouting":
        """Build from explicit segment sets such as ``[{0, 1}]``; unlisted segments stay alone."""
        owner = {}
        for gi, grp in enumerate(merge_map):
            grp = sorted(set(grp))
            if not grp:
                raise RoutingError("empty group")
            if grp != list(range(grp[0], grp[0] + len(grp))):
                raise RoutingError(f"group {grp} is not contiguous")
            for s in grp:
                if not 0 <= s < segments:
                    raise RoutingError(f"segment {s} out of range 0..{segments - 1}")
                if s in owner:
                    raise RoutingError(f"segment {s} appears in two groups")
                owner[s] = gi
        sizes = []
        s = 0
        while s < segments:
            if s in owner:
                n = sum(1 for v in owner.values() if v == owner[s])
            else:
                n = 1
            sizes.append(n)
            s += n
        return cls(base_width, tuple(sizes))

    @property
    def segments(self) -> int:
        return sum(self.groups)

    def validate(self, cols: int) -> None:
        if self.base_width * self.segments != cols:
            raise RoutingError(
                f"routing covers {self.base_width * self.segments} cells, row has {cols}")

    def loops(self, cols: int) -> list[Loop]:
        self.validate(cols)
        out = []
        seg = 0
        for g in self.groups:
            tail = cols - seg * self.base_width - 1
            width = g * self.base_width
            out.append(Loop(tail - width + 1, tail, seg, width))
            seg += g
        return out

    def active_sites(self) -> list[bool]:
        flags = []
        for g in self.groups:
            flags += [True] + [False] * (g - 1)
        return flags

    @property
    def word_widths(self) -> tuple[int, ...]:
        return tuple(g * self.base_width for g in self.groups)

    def __str__(self) -> str:
        return f"{self.base_width}:" + ",".join(map(str, self.groups))


@dataclass
class RowState:
    loop: list[int]
    node_x: list[int]
    routing: WordRouting
    t1: list[int]  # carry captured by each ALU site during phase 1
    cin: list[int]  # carry released to each site during phase 3
    corrupted: bool = False
    pending: bool = False  # phase 1 seen, restoration not yet
    last_pv: tuple[int, int, int] = (0, 0, 0)
    sites: list[AluKind] = field(default_factory=list)
    feed: list[list[int] | None] = field(default_factory=list)
    cycle: int = 0
    timeline: list[tuple[int, int]] = field(default_factory=list)
    trace_site: int = 0

    @classmethod
    def from_bits(cls, bits: Sequence[int], routing: WordRouting | None = None) -> "RowState":
        bits = [int(TriBit(b)) for b in bits]
        if not bits:
            raise ValueError("a row needs at least one cell")
        if routing is None:
            routing = WordRouting.uniform(len(bits), 1)
        routing.validate(len(bits))
        n = routing.segments
        return cls(list(bits), list(bits), routing, [0] * n, [0] * n,
                   sites=[PASS_THROUGH] * n, feed=[None] * n)

    @classmethod
    def from_value(cls, value: int, width: int, routing: WordRouting | None = None) -> "RowState":
        return cls.from_bits(int_to_bits(value, width), routing)

    @property
    def width(self) -> int:
        return len(self.loop)

    @property
    def cells(self) -> list[CellState]:
        return [CellState(TriBit(a), TriBit(b)) for a, b in zip(self.loop, self.node_x)]

    @property
    def clean(self) -> bool:
        return not self.corrupted and X not in self.loop

    def value(self) -> int:
        return bits_to_int(self.loop)

    def word(self, index: int) -> int:
        lp = self.routing.loops(self.width)[index]
        return bits_to_int(self.loop[lp.head:lp.tail + 1])

    def copy(self) -> "RowState":
        return RowState(list(self.loop), list(self.node_x), self.routing, list(self.t1),
                        list(self.cin), self.corrupted, self.pending, self.last_pv,
                        list(self.sites), [None if f is None else list(f) for f in self.feed],
                        self.cycle, list(self.timeline), self.trace_site)


def int_to_bits(value: int, width: int) -> list[int]:
    if value < 0 or value >> width:
        raise ValueError(f"value {value} does not fit in {width} bits")
    return [(value >> (width - 1 - i)) & 1 for i in range(width)]


def bits_to_int(bits: Sequence[int]) -> int:
    v = 0
    for b in bits:
        if b == X:
            raise ValueError("cannot convert unknown bits to an integer")
        v = (v << 1) | int(b)
    return v
