import pytest

from fastsram.cli import main
from fastsram.vcd import check_vcd

TRACE = "WRITE 0 b\nCONFIG 4:1\nBATCHADD 1 6\nREAD 0\n"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def trace(tmp_path):
    p = tmp_path / "t.txt"
    p.write_text(TRACE)
    return p


def test_sim_happy_path(tmp_path, trace, capsys):
    vcd = tmp_path / "out.vcd"
    code, out, err = run(capsys, "sim", "--rows", "128", "--cols", "16", "--trace", str(trace),
                         "--vcd", str(vcd), "--image", str(tmp_path / "img"), "--log",
                         str(tmp_path / "log"))
    # CONFIG 4:1 does not cover 16 columns
    assert code == 3 and "line 2" in err
    trace.write_text(TRACE.replace("CONFIG 4:1", "CONFIG 16:1"))
    code, out, err = run(capsys, "sim", "--rows", "128", "--cols", "16", "--trace", str(trace),
                         "--vcd", str(vcd), "--image", str(tmp_path / "img"), "--log",
                         str(tmp_path / "log"))
    assert code == 0 and err == ""
    assert "READ 0 0011" in out and "CARRY 0 0" in out
    assert check_vcd(vcd.read_text()) == []
    assert (tmp_path / "img").read_text().splitlines()[0] == "0011"
    assert (tmp_path / "log").read_text().startswith("# fastsram event log")


def test_sim_small_word(tmp_path, trace, capsys):
    code, out, _ = run(capsys, "sim", "--rows", "2", "--cols", "4", "--trace", str(trace))
    assert code == 0 and "READ 0 1" in out and "CARRY 0 1" in out


def test_sim_outputs_are_byte_identical(tmp_path, trace, capsys, monkeypatch):
    outs = []
    for d in ("a", "b"):
        monkeypatch.setenv("FASTSRAM_OUTDIR", str(tmp_path / d))
        assert run(capsys, "sim", "--rows", "4", "--cols", "4", "--trace", str(trace),
                   "--vcd", "w.vcd", "--mode", "phase")[0] == 0
        outs.append((tmp_path / d / "w.vcd").read_bytes())
    assert outs[0] == outs[1]


def test_malformed_trace_line_7(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("WRITE 0 1\n" + "NOP\n" * 5 + "BATCHADD zz 1\n")
    code, _, err = run(capsys, "sim", "--rows", "2", "--cols", "4", "--trace", str(p))
    assert code == 3
    assert err.count("\n") == 1 and err.startswith("error: trace: line 7")


def test_corrupted_read_exit(tmp_path, capsys, monkeypatch):
    from fastsram import cli
    from fastsram.array import FastArray

    # traces cannot clock illegally, so poison row 0 as the array is built
    real_init = FastArray.__init__

    def poisoned(self, *a, **kw):
        real_init(self, *a, **kw)
        self.apply_schedule(1, [(1, 1, 0)])

    monkeypatch.setattr(FastArray, "__init__", poisoned)
    p = tmp_path / "t.txt"
    p.write_text("NOP\nREAD 0\n")
    code, _, err = run(capsys, "sim", "--rows", "2", "--cols", "4", "--trace", str(p))
    assert code == cli.EXIT_CORRUPT == 4
    assert err.startswith("error: corrupted: line 2")


@pytest.mark.parametrize("argv", [["sim"], ["sweep", "--q", "a,b"], ["nosuch"], ["sim", "--trace"],
                                  ["sim", "--rows", "3", "--cols", "16", "--alu-sites", "3",
                                   "--trace", "x"]])
def test_bad_flags(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error: flags:")


def test_sweep_table_point(tmp_path, capsys):
    code, out, _ = run(capsys, "sweep", "--q", "16", "--rows", "128")
    assert code == 0
    head, row = out.splitlines()
    assert head.endswith("energy_ratio,speed_ratio,crossover")
    assert float(row.split(",")[7]) == pytest.approx(5.5, rel=0.02)
    out_file = tmp_path / "s.csv"
    for _ in range(2):
        run(capsys, "sweep", "--q", "4,8", "--rows", "8,32", "--out", str(out_file))
    assert out_file.read_text() == run(capsys, "sweep", "--q", "4,8", "--rows", "8,32")[1]


def test_calibrate_exit(tmp_path, capsys):
    code, out, err = run(capsys, "calibrate", "--out", str(tmp_path / "p.txt"))
    assert code == 5 and out.startswith("anchor,target,model,residual")
    assert err.startswith("error: calibration:")
    assert "e_bl_fj_per_row" in (tmp_path / "p.txt").read_text()


def test_bad_params_file(tmp_path, capsys):
    p = tmp_path / "p.txt"
    p.write_text("bogus = 1\n")
    code, _, err = run(capsys, "calibrate", "--params", str(p))
    assert code == 3 and "params" in err


def test_area(capsys):
    code, out, _ = run(capsys, "area")
    assert code == 0 and "41.7%" in out and "[reported]" in out
    code, out, _ = run(capsys, "area", "--rows", "256", "--cols", "32")
    assert "[extrapolated]" in out


def test_check_schedule(tmp_path, capsys):
    good, bad = tmp_path / "g", tmp_path / "b"
    good.write_text("1 0 0\n0 1 0\n0 1 1\n")
    bad.write_text("1 0 0\n1 1 0\n")
    assert run(capsys, "check-schedule", str(good))[:2] == (0, "ok\n")
    code, out, err = run(capsys, "check-schedule", str(bad))
    assert code == 3 and "step 1: overlap" in out
    bad.write_text("1 0\n")
    assert run(capsys, "check-schedule", str(bad))[0] == 3


@pytest.mark.parametrize("sub", ["sim", "sweep", "calibrate", "area", "check-schedule"])
def test_help_lists_flags(sub, capsys):
    with pytest.raises(SystemExit) as exc:
        main([sub, "--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    from fastsram.cli import build_parser
    parser = build_parser()
    subparser = parser._subparsers._group_actions[0].choices[sub]
    for action in subparser._actions:
        for flag in action.option_strings:
            assert flag in out
