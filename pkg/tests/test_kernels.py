import subprocess
import sys

import numpy as np
import pytest

from fastsram import kernels
from fastsram.logic import ALU_KINDS

needs_compiled = pytest.mark.skipif("compiled" not in kernels.available(),
                                    reason="compiled kernel not built")


def random_case(rng, R=16, C=16, G=4, n=20, snap=True):
    w = C // G
    cells = rng.integers(0, 2, (R, C), dtype=np.uint8)
    opsig = rng.integers(0, 2, (R, C), dtype=np.uint8)
    rows = np.sort(rng.choice(R, size=rng.integers(1, R + 1), replace=False)).astype(np.intp)
    heads = np.array([C - (g + 1) * w for g in range(G)], dtype=np.intp)
    tails = heads + w - 1
    modes = rng.integers(0, 3, G).astype(np.uint8)
    alu = ALU_KINDS[rng.choice(sorted(ALU_KINDS))]
    carry = rng.integers(0, 2, (R, G), dtype=np.uint8)
    args = [cells, opsig, rows, heads, tails, modes, np.array(alu.out_table, np.uint8),
            np.array(alu.state_table, np.uint8), carry, n]
    if snap:
        args += [np.zeros((n, R, C), np.uint8), np.zeros((n, R, G), np.uint8)]
    return args


def run(name, args):
    args = [a.copy() if isinstance(a, np.ndarray) else a for a in args]
    kernels.get(name)(*args)
    return [a for a in args if isinstance(a, np.ndarray)]


@needs_compiled
def test_backends_agree():
    rng = np.random.default_rng(0)
    for _ in range(200):
        args = random_case(rng, snap=bool(rng.integers(0, 2)))
        for a, b in zip(run("python", args), run("compiled", args)):
            assert (a == b).all()


def test_python_backend_adds():
    # one 4-bit loop, ALU mode, full adder: 5 + 3
    cells = np.array([[0, 1, 0, 1]], np.uint8)
    opsig = np.array([[0, 0, 1, 1]], np.uint8)
    fa = ALU_KINDS["add"]
    carry = np.zeros((1, 1), np.uint8)
    kernels.get("python")(cells, opsig, np.array([0], np.intp), np.array([0], np.intp),
                          np.array([3], np.intp), np.array([kernels.ALU], np.uint8),
                          np.array(fa.out_table, np.uint8), np.array(fa.state_table, np.uint8),
                          carry, 4)
    assert cells.tolist() == [[1, 0, 0, 0]] and carry.tolist() == [[0]]


def test_backend_switch():
    active = kernels.backend()
    try:
        assert kernels.use_backend("python") == "python"
        assert kernels.backend() == "python"
        with pytest.raises(ValueError):
            kernels.use_backend("gpu")
    finally:
        kernels.use_backend(active)


def test_fallback_selected_without_extension():
    code = ("import sys; sys.modules['fastsram._kernels'] = None\n"
            "from fastsram import kernels; print(kernels.backend(), kernels.available())")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python ['python']"
