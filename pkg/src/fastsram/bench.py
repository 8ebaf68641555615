"""Synthetic workloads, paired functional runs and (q, R) sweeps.

The update-stream shapes are constructions of this package, not published traces:
``table`` updates every row each step (dense delta update), ``graph`` draws the
number of updated rows from a truncated power law P(k) ~ k**-alpha and picks that
many distinct rows uniformly, ``random`` selects each row with probability
``density``.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .array import ArrayGeometry, FastArray
from .cost import MACRO_OVERHEAD, Comparison, CostParams, compare, report_row, reports_to_csv
from .errors import ModelDivergence

KINDS = ("table", "graph", "random")
_ALIASES = {"tabledeltaupdate": "table", "graphfeatureupdate": "graph", "randombatch": "random"}


def normalize_kind(kind: str) -> str:
    k = kind.strip().lower()
    k = _ALIASES.get(k, k)
    if k not in KINDS:
        raise ValueError(f"unknown workload kind {kind!r}")
    return k


@dataclass(frozen=True)
class WorkloadSpec:
    kind: str = "table"
    q: int = 16
    rows: int = 128
    steps: int = 100
    seed: int = 0
    alpha: float = 2.0
    density: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "kind", normalize_kind(self.kind))
        if self.q < 1 or self.rows < 1 or self.steps < 0:
            raise ValueError("q and rows must be positive, steps non-negative")

    @classmethod
    def from_text(cls, text: str) -> "WorkloadSpec":
        types = {f.name: f.type for f in fields(cls)}
        conv = {"int": int, "float": float, "str": str}
        values = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            key = key.strip()
            if not sep or key not in types:
                raise ValueError(f"line {n}: bad workload line {line!r}")
            values[key] = conv[types[key]](val.strip())
        return cls(**values)


@dataclass
class Workload:
    spec: WorkloadSpec
    initial: list[int]
    updates: list[tuple[np.ndarray, list[int]]]  # (row indices, operands)

    @property
    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry(self.spec.rows, self.spec.q, 1)


def graph_popcount_pmf(rows: int, alpha: float) -> np.ndarray:
    """P(k) for k = 1..rows, index 0 holds k = 1."""
    k = np.arange(1, rows + 1, dtype=float)
    w = k ** -alpha
    return w / w.sum()


def gen_workload(spec: WorkloadSpec) -> Workload:
    rng = np.random.default_rng(spec.seed)
    R, q = spec.rows, spec.q
    initial = [int(v) for v in rng.integers(0, 1 << q, size=R, dtype=np.uint64)]
    pmf = graph_popcount_pmf(R, spec.alpha) if spec.kind == "graph" else None
    updates = []
    for _ in range(spec.steps):
        if spec.kind == "table":
            rows = np.arange(R)
        elif spec.kind == "graph":
            k = int(rng.choice(R, p=pmf)) + 1
            rows = np.sort(rng.choice(R, size=k, replace=False))
        else:
            rows = np.flatnonzero(rng.random(R) < spec.density)
        ops = [int(v) for v in rng.integers(0, 1 << q, size=len(rows), dtype=np.uint64)]
        updates.append((rows, ops))
    return Workload(spec, initial, updates)


def reference_run(workload: Workload) -> list[int]:
    """Row-by-row read, integer add, write back."""
    mem = list(workload.initial)
    mod = 1 << workload.spec.q
    for rows, ops in workload.updates:
        for r, v in zip(rows, ops):
            mem[r] = (mem[r] + v) % mod
    return mem


@dataclass
class ComparisonResult:
    comparison: Comparison
    image: list[int]

    @property
    def energy_ratio(self) -> float:
        return self.comparison.energy_ratio

    @property
    def speed_ratio(self) -> float:
        return self.comparison.speed_ratio


def run_comparison(workload: Workload, params: CostParams = CostParams(),
                   mode: str = "cycle") -> ComparisonResult:
    arr = FastArray(workload.geometry, mode=mode)
    arr.load(workload.initial)
    for rows, ops in workload.updates:
        if len(rows):
            arr.batch_op(rows, operands=ops)
    image = arr.values()
    expected = reference_run(workload)
    if image != expected:
        bad = next(i for i, (a, b) in enumerate(zip(image, expected)) if a != b)
        raise ModelDivergence(f"row {bad}: array {image[bad]} != reference {expected[bad]}")
    cmp = compare(arr.log, params, config=workload.spec.kind, q=workload.spec.q)
    return ComparisonResult(cmp, image)


@dataclass(frozen=True)
class SweepGrid:
    q_values: tuple[int, ...]
    row_values: tuple[int, ...]
    kind: str = "table"
    steps: int = 1
    seed: int = 0

    def __post_init__(self):
        if not self.q_values or not self.row_values:
            raise ValueError("sweep axes must be non-empty")

    def points(self):
        return [(q, r) for q in self.q_values for r in sorted(self.row_values)]


def _sweep_point(args):
    grid, params, q, rows = args
    wl = gen_workload(WorkloadSpec(grid.kind, q, rows, grid.steps, grid.seed))
    return run_comparison(wl, params).comparison


def run_sweep(grid: SweepGrid, params: CostParams = CostParams(), area_normalized: bool = False,
              jobs: int = 1) -> str:
    """CSV, one row per grid point; ``crossover`` marks the first R per q where the
    energy ratio reaches 1 after being below it."""
    tasks = [(grid, params, q, r) for q, r in grid.points()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_sweep_point, tasks))
    else:
        results = [_sweep_point(t) for t in tasks]
    rows = []
    prev = {}
    for c in results:
        row = report_row(c)
        if area_normalized:
            # efficiency per unit area: divide by the macro area factor
            factor = 1.0 + MACRO_OVERHEAD
            row[7] /= factor
            row[8] /= factor
        below = prev.get(c.q)
        row.append(int(below is not None and below < 1.0 <= row[7]))
        prev[c.q] = row[7]
        rows.append(row)
    return reports_to_csv(rows, ("crossover",))
