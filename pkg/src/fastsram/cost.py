"""Energy, latency and area accounting for the shiftable array and the near-memory baseline.

Per-bit access figures and the 16-bit / 128-row operation figures come from the
measured comparison table. The shape parameters spread those operation figures over
word width ``q`` and row count ``R``:

* shiftable array, per row and word: ``q`` cycles with ``q`` cells toggling,
  energy ``q**2 * e_cell_shift_fj``, batch latency ``q * t_shift_cycle_ns``;
* baseline, per row and word: read and write of ``q`` bits over bitlines of length
  ``R`` plus ``q`` bits of logic, energy ``2q (e_fixed + e_bl * R) + q * e_logic``,
  latency ``t_row_op_ns`` per row, rows processed one after another.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Iterable, NamedTuple

import numpy as np
from scipy.optimize import brentq, least_squares

from .errors import CalibrationInfeasible
from .events import EventLog

TABLE_Q = 16
TABLE_ROWS = 128


@dataclass(frozen=True)
class CostParams:
    fast_write_fj_per_bit: float = 76.2
    fast_read_fj_per_bit: float = 74.8
    fast_access_ns: float = 0.94
    fast_op_pj: float = 0.38
    fast_op_ns: float = 0.025
    base_write_fj_per_bit: float = 219.7
    base_access_ns: float = 0.09
    base_op_pj: float = 2.09
    base_op_ns: float = 0.68
    sram6t_write_fj_per_bit: float = 72.4
    sram6t_read_fj_per_bit: float = 68.4
    # shape: defaults reproduce the operation figures at q=16, R=128
    e_cell_shift_fj: float = 380.0 / TABLE_Q**2
    e_bl_fj_per_row: float = 2090.0 / (2 * TABLE_Q * TABLE_ROWS)
    e_fixed_fj_per_bit: float = 0.0
    e_logic_fj_per_bit: float = 0.0
    t_shift_cycle_ns: float = 0.025 * TABLE_ROWS / TABLE_Q
    t_row_op_ns: float = 0.68

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be non-negative")

    @classmethod
    def from_text(cls, text: str) -> "CostParams":
        """Flat ``key = value`` lines; unknown keys are an error, missing keys keep defaults."""
        known = {f.name for f in fields(cls)}
        values = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            key = key.strip()
            if not sep or key not in known:
                raise ValueError(f"line {n}: bad parameter line {line!r}")
            values[key] = float(val)
        return cls(**values)

    def to_text(self) -> str:
        return "".join(f"{k} = {v!r}\n" for k, v in asdict(self).items())

    @property
    def table_energy_ratio(self) -> float:
        return self.base_op_pj / self.fast_op_pj

    @property
    def table_speed_ratio(self) -> float:
        return self.base_op_ns / self.fast_op_ns


def load_params(path) -> CostParams:
    with open(path) as fh:
        return CostParams.from_text(fh.read())


# ---- per-operation model ------------------------------------------------------

def fast_op_energy_fj(q: int, p: CostParams) -> float:
    return q * q * p.e_cell_shift_fj


def base_bit_energy_fj(rows: float, p: CostParams) -> float:
    """Energy of one bitline access of one bit in an array of ``rows`` rows."""
    return p.e_fixed_fj_per_bit + p.e_bl_fj_per_row * rows


def base_op_energy_fj(q: int, rows: float, p: CostParams) -> float:
    return 2 * q * base_bit_energy_fj(rows, p) + q * p.e_logic_fj_per_bit


def energy_ratio(q: int, rows: float, p: CostParams) -> float:
    """Baseline energy over shiftable-array energy for one q-bit word update."""
    return base_op_energy_fj(q, rows, p) / fast_op_energy_fj(q, p)


def speed_ratio(q: int, rows: int, active: int, p: CostParams) -> float:
    return active * p.t_row_op_ns / (q * p.t_shift_cycle_ns)


def crossover_rows(q: int, p: CostParams, hi: float = 1e7) -> float | None:
    """Row count where the energy ratio reaches 1, or None if it never does."""
    f = lambda r: energy_ratio(q, r, p) - 1.0  # noqa: E731
    lo = 1e-9
    if f(lo) >= 0:
        return 0.0
    if f(hi) < 0:
        return None
    return brentq(f, lo, hi, xtol=1e-9)


# ---- log accounting -----------------------------------------------------------

class Cost(NamedTuple):
    energy_fj: float
    latency_ns: float


@dataclass
class CostReport:
    total_energy_fj: float = 0.0
    batch_latency_ns: float = 0.0
    ops: int = 0
    breakdown: dict[str, Cost] = field(default_factory=dict)

    def _add(self, kind: str, energy: float, latency: float) -> None:
        e, t = self.breakdown.get(kind, Cost(0.0, 0.0))
        self.breakdown[kind] = Cost(e + energy, t + latency)
        self.total_energy_fj += energy
        self.batch_latency_ns += latency

    @property
    def per_op_energy_pj(self) -> float:
        if not self.ops:
            return 0.0
        return self.breakdown.get("batch", Cost(0.0, 0.0)).energy_fj / self.ops / 1000.0

    @property
    def per_op_latency_ns(self) -> float:
        if not self.ops:
            return 0.0
        return self.breakdown.get("batch", Cost(0.0, 0.0)).latency_ns / self.ops

    def __add__(self, other: "CostReport") -> "CostReport":
        out = CostReport(ops=self.ops + other.ops)
        for rep in (self, other):
            for kind, c in rep.breakdown.items():
                out._add(kind, c.energy_fj, c.latency_ns)
        return out


def account_fast(log: EventLog, params: CostParams = CostParams()) -> CostReport:
    rep = CostReport()
    for ev in log:
        if ev.kind == "write":
            rep._add("write", ev.rows * ev.bits * params.fast_write_fj_per_bit,
                     ev.rows * params.fast_access_ns)
        elif ev.kind == "read":
            rep._add("read", ev.rows * ev.bits * params.fast_read_fj_per_bit,
                     ev.rows * params.fast_access_ns)
        elif ev.kind in ("batch", "shift"):
            # all selected rows shift together: latency is independent of ev.rows
            rep._add(ev.kind, ev.rows * ev.cycles * ev.bits * params.e_cell_shift_fj,
                     ev.cycles * params.t_shift_cycle_ns)
            if ev.kind == "batch":
                rep.ops += ev.rows * (ev.bits // ev.cycles)
    return rep


def account_baseline(log: EventLog, params: CostParams = CostParams()) -> CostReport:
    R = log.rows
    rep = CostReport()
    for ev in log:
        if ev.kind == "write":
            rep._add("write", ev.rows * ev.bits * params.base_write_fj_per_bit,
                     ev.rows * params.base_access_ns)
        elif ev.kind == "read":
            rep._add("read", ev.rows * ev.bits * params.sram6t_read_fj_per_bit,
                     ev.rows * params.base_access_ns)
        elif ev.kind == "batch":
            words = ev.bits // ev.cycles
            rep._add("batch", ev.rows * words * base_op_energy_fj(ev.cycles, R, params),
                     ev.rows * words * params.t_row_op_ns)
            rep.ops += ev.rows * words
        elif ev.kind == "shift" and ev.cycles:
            # read, rotate and write back each row
            rep._add("shift", ev.rows * base_op_energy_fj(ev.bits, R, params),
                     ev.rows * params.t_row_op_ns)
    return rep


@dataclass(frozen=True)
class Comparison:
    config: str
    q: int
    rows: int
    fast: CostReport
    base: CostReport

    @property
    def energy_ratio(self) -> float:
        return _ratio(self.base.total_energy_fj, self.fast.total_energy_fj)

    @property
    def speed_ratio(self) -> float:
        return _ratio(self.base.batch_latency_ns, self.fast.batch_latency_ns)


def _ratio(a: float, b: float) -> float:
    if b == 0:
        return 0.0 if a == 0 else math.inf
    return a / b


def compare(log: EventLog, params: CostParams = CostParams(), config: str = "trace",
            q: int = 0) -> Comparison:
    return Comparison(config, q, log.rows, account_fast(log, params), account_baseline(log, params))


CSV_COLUMNS = ("config", "q", "R", "fast_energy_fj", "fast_latency_ns", "base_energy_fj",
               "base_latency_ns", "energy_ratio", "speed_ratio")


def _fmt(v) -> str:
    return format(v, ".10g") if isinstance(v, float) else str(v)


def report_row(c: Comparison) -> list:
    return [c.config, c.q, c.rows, c.fast.total_energy_fj, c.fast.batch_latency_ns,
            c.base.total_energy_fj, c.base.batch_latency_ns, c.energy_ratio, c.speed_ratio]


def reports_to_csv(rows: Iterable[list], extra_columns: tuple[str, ...] = ()) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS + tuple(extra_columns))
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


# ---- calibration --------------------------------------------------------------

class Anchor(NamedTuple):
    q: int
    rows: int
    ratio: float


class CrossoverAnchor(NamedTuple):
    q: int
    rows_per_bit: float = 2.0  # crossover expected at R = rows_per_bit * q
    factor: float = 2.0


DEFAULT_ANCHORS = (
    Anchor(16, 128, 5.5),
    Anchor(8, 512, 4.4),
    CrossoverAnchor(4), CrossoverAnchor(8), CrossoverAnchor(16), CrossoverAnchor(32),
)


@dataclass
class CalibrationResult:
    params: CostParams
    residuals: list[tuple[str, float, float, float]]  # (anchor, target, model, rel. error)
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_text(self) -> str:
        lines = ["anchor,target,model,residual"]
        lines += [f"{a},{_fmt(t)},{_fmt(m)},{_fmt(r)}" for a, t, m, r in self.residuals]
        return "\n".join(lines) + "\n"


def _describe(a) -> str:
    if isinstance(a, Anchor):
        return f"ratio(q={a.q},R={a.rows})"
    return f"crossover(q={a.q})"


def evaluate_anchors(params: CostParams, anchors=DEFAULT_ANCHORS, tol: float = 0.15):
    residuals, failures = [], []
    for a in anchors:
        if isinstance(a, Anchor):
            model = energy_ratio(a.q, a.rows, params)
            rel = model / a.ratio - 1.0
            residuals.append((_describe(a), a.ratio, model, rel))
            if abs(rel) > tol:
                failures.append(f"{_describe(a)}={model:.4g}, target {a.ratio} +/-{tol:.0%}")
        else:
            target = a.rows_per_bit * a.q
            r = crossover_rows(a.q, params)
            model = math.inf if r is None else r
            rel = model / target - 1.0 if r is not None else math.inf
            residuals.append((_describe(a), target, model, rel))
            if r is None or not target / a.factor <= r <= target * a.factor:
                failures.append(f"{_describe(a)}={model:.4g} rows, target {target:g} "
                                f"within x{a.factor:g}")
    return residuals, failures


def _crossover_closed(q: int, p: CostParams) -> float:
    # energy_ratio(q, R) == 1 solved for R; the model is affine in R
    num = q * p.e_cell_shift_fj - 2 * p.e_fixed_fj_per_bit - p.e_logic_fj_per_bit
    return num / (2 * p.e_bl_fj_per_row) if p.e_bl_fj_per_row > 0 else math.inf


def calibrate_shape(anchors=DEFAULT_ANCHORS, params: CostParams = CostParams(),
                    tol: float = 0.15, strict: bool = True) -> CalibrationResult:
    """Fit the baseline shape (fixed and bitline energy per bit) to the anchors.

    The shiftable-array energy per cell-cycle stays pinned to the measured operation
    figure. Each residual is a log error divided by the log of its tolerance band, so
    every anchor sits on its band edge at 1. Non-negativity is enforced by bounds.
    The starting parameters are kept if they fit better than the optimum found.
    Raises ``CalibrationInfeasible`` when an anchor misses its tolerance, unless
    ``strict`` is false.
    """
    def model(x):
        return replace(params, e_fixed_fj_per_bit=x[0], e_bl_fj_per_row=x[1])

    def resid(x):
        p = model(x)
        out = []
        for a in anchors:
            if isinstance(a, Anchor):
                out.append(math.log(energy_ratio(a.q, a.rows, p) / a.ratio) / math.log1p(tol))
            else:
                r = min(max(_crossover_closed(a.q, p), 1e-6), 1e12)
                out.append(math.log(r / (a.rows_per_bit * a.q)) / math.log(a.factor))
        return np.array(out)

    x0 = np.array([params.e_fixed_fj_per_bit, max(params.e_bl_fj_per_row, 1e-3)])
    fit = least_squares(resid, x0, bounds=([0.0, 1e-9], [np.inf, np.inf]), method="trf",
                        xtol=1e-12, ftol=1e-12, gtol=1e-12)
    x = fit.x if np.abs(fit.fun).max() <= np.abs(resid(x0)).max() else x0
    p = model(x)
    residuals, failures = evaluate_anchors(p, anchors, tol)
    result = CalibrationResult(p, residuals, failures)
    if failures and strict:
        raise CalibrationInfeasible(result, failures)
    return result


# ---- area ---------------------------------------------------------------------

CELL_TRANSISTORS = {"fast": 10, "sram": 6, "digital": 20}
CELL_OVERHEAD = 0.70  # reported cell-level area overhead
CONTROL_OVERHEAD_16COL = 0.10  # shift-control generation, 16 columns
MACRO_OVERHEAD = 0.417  # whole macro vs. general-purpose SRAM, 128 x 16
_REF_ROWS, _REF_COLS = 128, 16


@dataclass(frozen=True)
class AreaFigure:
    name: str
    value: float
    source: str  # "reported" or "extrapolated"


@dataclass(frozen=True)
class AreaReport:
    rows: int
    cols: int
    figures: tuple[AreaFigure, ...]

    def __getitem__(self, name: str) -> AreaFigure:
        for f in self.figures:
            if f.name == name:
                return f
        raise KeyError(name)

    @property
    def extrapolated(self) -> bool:
        return any(f.source == "extrapolated" for f in self.figures)

    def to_text(self) -> str:
        lines = [f"geometry {self.rows}x{self.cols}"]
        for f in self.figures:
            val = f"{f.value:g}" if f.name.endswith("_transistors") else f"{f.value * 100:.1f}%"
            lines.append(f"{f.name:<24} {val:>8}  [{f.source}]")
        return "\n".join(lines) + "\n"


def area_report(rows: int, cols: int) -> AreaReport:
    """Area summary in units of one 6T cell.

    At 128 x 16 the figures are the reported ones. Elsewhere, control generation is a
    fixed per-row block (its share scales as 16 / cols) and the periphery, shared by
    both designs, scales with the row count; both are solved from the reported point.
    """
    if rows < 1 or cols < 1:
        raise ValueError("geometry values must be positive")
    fast_cell = 1.0 + CELL_OVERHEAD
    ctrl_per_row = CONTROL_OVERHEAD_16COL * _REF_COLS * fast_cell
    # periphery P at the reference point from (cells*1.7 + ctrl + P) / (cells + P) = 1.417
    ref_cells = _REF_ROWS * _REF_COLS
    periph_ref = (ref_cells * fast_cell + _REF_ROWS * ctrl_per_row
                  - (1 + MACRO_OVERHEAD) * ref_cells) / MACRO_OVERHEAD
    periph = periph_ref * rows / _REF_ROWS
    ctrl = ctrl_per_row / (cols * fast_cell)
    fast_total = rows * cols * fast_cell + rows * ctrl_per_row + periph
    sram_total = rows * cols + periph
    macro = fast_total / sram_total - 1.0
    at_ref = (rows, cols) == (_REF_ROWS, _REF_COLS)
    figs = [AreaFigure(f"{k}_transistors", v, "reported") for k, v in CELL_TRANSISTORS.items()]
    figs.append(AreaFigure("cell_overhead", CELL_OVERHEAD, "reported"))
    figs.append(AreaFigure("control_overhead", CONTROL_OVERHEAD_16COL if cols == _REF_COLS else ctrl,
                           "reported" if cols == _REF_COLS else "extrapolated"))
    figs.append(AreaFigure("macro_overhead", MACRO_OVERHEAD if at_ref else macro,
                           "reported" if at_ref else "extrapolated"))
    return AreaReport(rows, cols, tuple(figs))
