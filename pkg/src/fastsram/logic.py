"""Three-valued signal values and the 1-bit ALU kinds that sit at the end of each row.

Dynamic nodes are modeled as ``TriBit`` values. ``UNKNOWN`` stands for charge that
cannot be resolved functionally (contention, lost restoration). Every ALU kind is a
1-bit Mealy machine stored as two 8-entry tables indexed by ``mem*4 + op*2 + state``,
which is also the layout the compiled kernels consume.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from itertools import product
from typing import Callable, Sequence


class TriBit(IntEnum):
    ZERO = 0
    ONE = 1
    UNKNOWN = 2

    def __str__(self) -> str:
        return "01x"[self]

    @property
    def known(self) -> bool:
        return self is not TriBit.UNKNOWN


ZERO, ONE, X = TriBit.ZERO, TriBit.ONE, TriBit.UNKNOWN


def tribit(value) -> TriBit:
    if isinstance(value, TriBit):
        return value
    if isinstance(value, str):
        return {"0": ZERO, "1": ONE, "x": X, "X": X}[value]
    if value in (0, 1, 2):
        return TriBit(int(value))
    raise ValueError(f"not a three-valued bit: {value!r}")


def _completions(v: int) -> tuple[int, ...]:
    return (0, 1) if v == X else (v,)


def tri_eval(fn: Callable[..., int], *inputs: int) -> TriBit:
    """Evaluate a boolean function on three-valued inputs.

    The result is known only if every completion of the unknown inputs agrees, so
    ``AND(0, x) == 0`` while ``XOR(1, x) == x``.
    """
    results = {fn(*combo) & 1 for combo in product(*(_completions(v) for v in inputs))}
    return TriBit(results.pop()) if len(results) == 1 else X


def tri_not(a: int) -> TriBit:
    return tri_eval(lambda p: 1 - p, a)


def tri_and(a: int, b: int) -> TriBit:
    return tri_eval(lambda p, q: p & q, a, b)


def tri_or(a: int, b: int) -> TriBit:
    return tri_eval(lambda p, q: p | q, a, b)


def tri_xor(a: int, b: int) -> TriBit:
    return tri_eval(lambda p, q: p ^ q, a, b)


def majority(a: int, b: int, c: int) -> TriBit:
    return tri_eval(lambda p, q, r: (p & q) | (p & r) | (q & r), a, b, c)


def _table(fn: Callable[[int, int, int], int]) -> tuple[int, ...]:
    return tuple(fn(m, o, s) & 1 for m in (0, 1) for o in (0, 1) for s in (0, 1))


@dataclass(frozen=True)
class AluKind:
    """A 1-bit ALU: ``out = out_table[m, o, s]``, ``next_state = state_table[m, o, s]``.

    ``m`` is the bit ejected from the row, ``o`` the operand bit of the same
    significance and ``s`` the value released by the carry latch.
    """

    name: str
    out_table: tuple[int, ...]
    state_table: tuple[int, ...]

    def __post_init__(self):
        if len(self.out_table) != 8 or len(self.state_table) != 8:
            raise ValueError("ALU tables must have 8 entries")
        if any(v not in (0, 1) for v in self.out_table + self.state_table):
            raise ValueError("ALU tables hold plain bits")

    @classmethod
    def custom(cls, out_fn: Callable[[int, int, int], int],
               state_fn: Callable[[int, int, int], int], name: str = "custom") -> "AluKind":
        return cls(name, _table(out_fn), _table(state_fn))

    def evaluate(self, mem: int, op: int, state: int) -> tuple[TriBit, TriBit]:
        if mem != X and op != X and state != X:
            i = mem * 4 + op * 2 + state
            return TriBit(self.out_table[i]), TriBit(self.state_table[i])
        tab = lambda t: lambda m, o, s: t[m * 4 + o * 2 + s]  # noqa: E731
        return (tri_eval(tab(self.out_table), mem, op, state),
                tri_eval(tab(self.state_table), mem, op, state))

    def run_word(self, word: int, operand: int, width: int, state: int = 0) -> tuple[int, int]:
        """Apply the machine LSB-first to a plain integer word. Used as a reference."""
        out = 0
        for t in range(width):
            i = ((word >> t) & 1) * 4 + ((operand >> t) & 1) * 2 + state
            out |= self.out_table[i] << t
            state = self.state_table[i]
        return out, state


PASS_THROUGH = AluKind.custom(lambda m, o, s: m, lambda m, o, s: s, "pass")
FULL_ADDER = AluKind.custom(lambda m, o, s: m ^ o ^ s,
                            lambda m, o, s: (m & o) | (m & s) | (o & s), "add")
BIT_XOR = AluKind.custom(lambda m, o, s: m ^ o, lambda m, o, s: s, "xor")
BIT_AND = AluKind.custom(lambda m, o, s: m & o, lambda m, o, s: s, "and")
BIT_OR = AluKind.custom(lambda m, o, s: m | o, lambda m, o, s: s, "or")

ALU_KINDS = {k.name: k for k in (PASS_THROUGH, FULL_ADDER, BIT_XOR, BIT_AND, BIT_OR)}


def alu_by_name(name: str) -> AluKind:
    try:
        return ALU_KINDS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown ALU kind {name!r}; expected one of {sorted(ALU_KINDS)}") from None


def bits_to_str(bits: Sequence[int]) -> str:
    return "".join("01x"[b] for b in bits)
