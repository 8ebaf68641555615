"""Command-line front end.

Exit codes: 0 ok, 2 bad flags, 3 malformed trace or input file, 4 corrupted-row read,
5 calibration infeasible, 6 model divergence. Errors are a single line on stderr:
``error: <kind>: <message>``.

Relative output paths are resolved against ``$FASTSRAM_OUTDIR`` when it is set.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import kernels
from .array import ArrayGeometry, FastArray
from .bench import KINDS, SweepGrid, run_sweep
from .cost import CostParams, area_report, calibrate_shape, compare
from .errors import CalibrationInfeasible, CorruptedRowError, ModelDivergence, TraceError
from .phase import check_schedule, parse_schedule
from .trace import parse_trace, run_trace
from .vcd import WaveRecorder

EXIT_OK, EXIT_FLAGS, EXIT_TRACE, EXIT_CORRUPT, EXIT_CALIB, EXIT_DIVERGE = 0, 2, 3, 4, 5, 6


class _Fail(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code, self.kind = code, kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Fail(EXIT_FLAGS, "flags", message)


def _out(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get("FASTSRAM_OUTDIR")
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _Fail(EXIT_FLAGS, "flags", f"cannot read {path}: {exc.strerror}") from None


def _ints(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _params(args) -> CostParams:
    if not getattr(args, "params", None):
        return CostParams()
    try:
        return CostParams.from_text(_read(args.params))
    except ValueError as exc:
        raise _Fail(EXIT_TRACE, "params", f"{args.params}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fastsram", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sim", help="run a command trace")
    s.add_argument("--rows", type=int, default=128, help="array rows")
    s.add_argument("--cols", type=int, default=16, help="cells per row")
    s.add_argument("--alu-sites", type=int, default=1, help="ALU sites per row")
    s.add_argument("--trace", required=True, help="command trace file")
    s.add_argument("--mode", choices=("cycle", "phase"), default="cycle",
                   help="cycle-level kernel or phase-level engine")
    s.add_argument("--backend", choices=("auto", "compiled", "python"), default="auto",
                   help="cycle kernel implementation")
    s.add_argument("--vcd", help="write a waveform dump here")
    s.add_argument("--image", help="write the final image here (one hex row per line)")
    s.add_argument("--log", help="write the event log here")
    s.add_argument("--params", help="cost parameter file (key = value)")

    s = sub.add_parser("sweep", help="sweep word width and row count to CSV")
    s.add_argument("--q", type=_ints, default=(4, 8, 16, 32), help="word widths, e.g. 8,16")
    s.add_argument("--rows", type=_ints, default=(16, 32, 64, 128, 256, 512), help="row counts")
    s.add_argument("--workload", choices=KINDS, default="table", help="update stream shape")
    s.add_argument("--steps", type=int, default=1, help="update steps per grid point")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--params", help="cost parameter file (key = value)")
    s.add_argument("--area-normalized", action="store_true",
                   help="divide ratios by the macro area factor")
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s.add_argument("--out", help="CSV path (default stdout)")

    s = sub.add_parser("calibrate", help="fit the baseline shape to the scaling anchors")
    s.add_argument("--params", help="starting cost parameter file")
    s.add_argument("--out", help="write fitted parameters here")

    s = sub.add_parser("area", help="print the area report")
    s.add_argument("--rows", type=int, default=128)
    s.add_argument("--cols", type=int, default=16)

    s = sub.add_parser("check-schedule", help="validate a phase schedule file")
    s.add_argument("schedule", help="one 'phi1 phi2 phi2d' triple per line")
    return p


def _sim(args) -> int:
    try:
        geo = ArrayGeometry(args.rows, args.cols, args.alu_sites)
    except ValueError as exc:
        raise _Fail(EXIT_FLAGS, "flags", str(exc)) from None
    if args.backend == "compiled" and "compiled" not in kernels.available():
        raise _Fail(EXIT_FLAGS, "flags", "compiled kernel not built")
    kernels.use_backend(args.backend)
    params = _params(args)
    commands = parse_trace(_read(args.trace))
    vcd_path = _out(args.vcd)
    fh = open(vcd_path, "w") if vcd_path else None
    try:
        rec = WaveRecorder(fh, geo.rows, geo.cols, geo.alu_sites) if fh else None
        arr = FastArray(geo, mode=args.mode, recorder=rec)
        result = run_trace(arr, commands)
        if rec is not None:
            rec.close(arr.time)
    finally:
        if fh:
            fh.close()
    for row, value in result.reads:
        print(f"READ {row} {value:0{(geo.cols + 3) // 4}x}")
    for i, carries in enumerate(result.carries):
        print(f"CARRY {i} " + ",".join("".join(map(str, c)) for c in carries.tolist()))
    cmp = compare(arr.log, params, config="trace")
    print(f"ENERGY fast_fj={cmp.fast.total_energy_fj:.10g} base_fj={cmp.base.total_energy_fj:.10g}")
    print(f"LATENCY fast_ns={cmp.fast.batch_latency_ns:.10g} base_ns={cmp.base.batch_latency_ns:.10g}")
    if args.image:
        _out(args.image).write_text(arr.image_text())
    if args.log:
        _out(args.log).write_text(arr.log.to_text())
    return EXIT_OK


def _sweep(args) -> int:
    grid = SweepGrid(tuple(args.q), tuple(args.rows), args.workload, args.steps, args.seed)
    text = run_sweep(grid, _params(args), area_normalized=args.area_normalized, jobs=args.jobs)
    if args.out:
        _out(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _calibrate(args) -> int:
    try:
        result = calibrate_shape(params=_params(args))
    except CalibrationInfeasible as exc:
        sys.stdout.write(exc.result.to_text())
        if args.out:
            _out(args.out).write_text(exc.result.params.to_text())
        raise
    sys.stdout.write(result.to_text())
    if args.out:
        _out(args.out).write_text(result.params.to_text())
    return EXIT_OK


def _area(args) -> int:
    try:
        sys.stdout.write(area_report(args.rows, args.cols).to_text())
    except ValueError as exc:
        raise _Fail(EXIT_FLAGS, "flags", str(exc)) from None
    return EXIT_OK


def _check_schedule(args) -> int:
    try:
        steps = parse_schedule(_read(args.schedule))
    except ValueError as exc:
        raise _Fail(EXIT_TRACE, "schedule", str(exc)) from None
    report = check_schedule(steps)
    for v in report:
        print(v)
    if report:
        raise _Fail(EXIT_TRACE, "schedule", f"{len(report)} violation(s)")
    print("ok")
    return EXIT_OK


def main(argv=None) -> int:
    handlers = {"sim": _sim, "sweep": _sweep, "calibrate": _calibrate, "area": _area,
                "check-schedule": _check_schedule}
    try:
        args = build_parser().parse_args(argv)
        code = handlers[args.command](args)
    except _Fail as exc:
        code, kind, msg = exc.code, exc.kind, str(exc)
    except TraceError as exc:
        code, kind, msg = EXIT_TRACE, "trace", str(exc)
    except CorruptedRowError as exc:
        line = getattr(exc, "line", None)
        code, kind = EXIT_CORRUPT, "corrupted"
        msg = f"line {line}: {exc}" if line else str(exc)
    except CalibrationInfeasible as exc:
        code, kind, msg = EXIT_CALIB, "calibration", str(exc)
    except ModelDivergence as exc:
        code, kind, msg = EXIT_DIVERGE, "divergence", str(exc)
    except ValueError as exc:
        code, kind, msg = EXIT_FLAGS, "flags", str(exc)
    else:
        return code
    print(f"error: {kind}: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
