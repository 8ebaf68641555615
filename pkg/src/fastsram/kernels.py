"""Backend selection for the cycle kernel.

The compiled extension is used when it was built; otherwise the numpy fallback.
``use_backend`` switches explicitly (benchmarks, equivalence tests, ``--backend``).
"""

from __future__ import annotations

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

HOLD, PASS, ALU = _kernels_py.HOLD, _kernels_py.PASS, _kernels_py.ALU

_BACKENDS = {"python": _kernels_py.run_cycles}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled.run_cycles

_active = "compiled" if _compiled is not None else "python"


def available() -> list[str]:
    return sorted(_BACKENDS)


def use_backend(name: str) -> str:
    global _active
    if name == "auto":
        name = "compiled" if "compiled" in _BACKENDS else "python"
    if name not in _BACKENDS:
        raise ValueError(f"kernel backend {name!r} not available (have {available()})")
    _active = name
    return name


def backend() -> str:
    return _active


def get(name: str | None = None):
    return _BACKENDS[name or _active]


def run_cycles(*args, **kwargs):
    return _BACKENDS[_active](*args, **kwargs)
