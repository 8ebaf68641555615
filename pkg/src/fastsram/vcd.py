"""VCD waveform dump of the switch phases and the per-row dynamic nodes.

One time unit is one phase step. Each row gets a scope with one wire per cell loop
bit (``q<i>``), per node X (``x<i>``), per ALU site carry node (``t1_<s>``, ``cin_<s>``)
and a ``data`` vector holding the row image, MSB first.
"""

from __future__ import annotations

import io
from typing import Iterable, Sequence, TextIO

from vcd import VCDWriter
from vcd.reader import TokenKind, VCDParseError, tokenize

_CH = "01x"


def _bits(seq: Iterable[int]) -> str:
    return "".join(_CH[int(b)] for b in seq)


class WaveRecorder:
    def __init__(self, stream: TextIO, rows: int, cols: int, alu_sites: int,
                 record_rows: Sequence[int] | None = None):
        self._w = VCDWriter(stream, timescale="1 ns", date="fastsram", version="fastsram")
        self.cols = cols
        self.rows = list(range(rows)) if record_rows is None else sorted(set(record_rows))
        reg = self._w.register_var
        self._phi = [reg("fast", name, "wire", size=1, init=0) for name in ("phi1", "phi2", "phi2d")]
        self._q, self._x, self._t1, self._cin, self._data = {}, {}, {}, {}, {}
        for r in self.rows:
            scope = f"fast.row{r}"
            self._q[r] = [reg(scope, f"q{i}", "wire", size=1, init="x") for i in range(cols)]
            self._x[r] = [reg(scope, f"x{i}", "wire", size=1, init="x") for i in range(cols)]
            self._t1[r] = [reg(scope, f"t1_{s}", "wire", size=1, init=0) for s in range(alu_sites)]
            self._cin[r] = [reg(scope, f"cin_{s}", "wire", size=1, init=0) for s in range(alu_sites)]
            self._data[r] = reg(scope, "data", "wire", size=cols, init="x" * cols)

    def wants(self, r: int) -> bool:
        return r in self._q

    def phases(self, t: int, pv: Sequence[int]) -> None:
        for var, v in zip(self._phi, pv):
            self._w.change(var, t, int(v))

    def _vec(self, t, vars_, values):
        change = self._w.change
        for var, v in zip(vars_, values):
            change(var, t, _CH[int(v)])

    def row(self, t: int, r: int, loop=None, node_x=None, t1=None, cin=None) -> None:
        if r not in self._q:
            return
        if loop is not None:
            self._vec(t, self._q[r], loop)
        if node_x is not None:
            self._vec(t, self._x[r], node_x)
        if t1 is not None:
            self._vec(t, self._t1[r], t1)
        if cin is not None:
            self._vec(t, self._cin[r], cin)

    def data(self, t: int, r: int, bits) -> None:
        if r in self._data:
            self._w.change(self._data[r], t, _bits(bits))

    def close(self, t: int | None = None) -> None:
        self._w.close(t)


def check_vcd(text: str) -> list[str]:
    """Grammar and consistency check with pyvcd's tokenizer. Returns a list of problems."""
    problems = []
    declared: dict[str, int] = {}
    depth = 0
    last_time = -1
    seen_end = False
    try:
        for tok in tokenize(io.BytesIO(text.encode())):
            k = tok.kind
            if k is TokenKind.SCOPE:
                depth += 1
            elif k is TokenKind.UPSCOPE:
                depth -= 1
                if depth < 0:
                    problems.append("unbalanced $upscope")
            elif k is TokenKind.VAR:
                if seen_end:
                    problems.append("$var after $enddefinitions")
                declared[tok.var.id_code] = tok.var.size
            elif k is TokenKind.ENDDEFINITIONS:
                seen_end = True
                if depth != 0:
                    problems.append("unclosed scope at $enddefinitions")
            elif k is TokenKind.CHANGE_TIME:
                if tok.time_change < last_time:
                    problems.append(f"time goes backwards at #{tok.time_change}")
                last_time = tok.time_change
            elif k is TokenKind.CHANGE_SCALAR:
                if tok.scalar_change.id_code not in declared:
                    problems.append(f"undeclared id {tok.scalar_change.id_code!r}")
            elif k is TokenKind.CHANGE_VECTOR:
                ch = tok.vector_change
                if ch.id_code not in declared:
                    problems.append(f"undeclared id {ch.id_code!r}")
                elif isinstance(ch.value, str) and len(ch.value) > declared[ch.id_code]:
                    problems.append(f"vector too wide for {ch.id_code!r}")
    except VCDParseError as exc:
        problems.append(f"parse error: {exc}")
    if not seen_end:
        problems.append("missing $enddefinitions")
    return problems
