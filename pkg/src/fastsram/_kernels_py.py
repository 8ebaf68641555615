"""Pure-Python/numpy cycle kernel. Same contract as the compiled ``_kernels`` module."""

import numpy as np

HOLD, PASS, ALU = 0, 1, 2


def run_cycles(cells, opsig, rows, heads, tails, modes, out_tab, st_tab, carry, ncycles,
               snap_cells=None, snap_carry=None):
    """Advance ``ncycles`` canonical shift cycles on the listed rows, in place.

    cells      uint8[R, C]  loop bits
    opsig      uint8[R, C]  operand bits aligned with the cells they are added to
    rows       intp[M]      clocked rows
    heads/tails intp[G]     loop boundaries
    modes      uint8[G]     HOLD, PASS or ALU per loop
    out_tab/st_tab uint8[8] ALU tables indexed mem*4 + op*2 + state
    carry      uint8[R, G]  released carry per loop, updated
    snap_cells uint8[ncycles, R, C] and snap_carry uint8[ncycles, R, G], optional
    """
    rows = np.asarray(rows, dtype=np.intp)
    out_tab = np.asarray(out_tab, dtype=np.uint8)
    st_tab = np.asarray(st_tab, dtype=np.uint8)
    for t in range(ncycles):
        for g in range(len(heads)):
            mode = modes[g]
            if mode == HOLD:
                continue
            h, e = heads[g], tails[g]
            ej = cells[rows, e]
            if mode == ALU:
                pos = e - t % (e - h + 1)
                idx = ej * 4 + opsig[rows, pos] * 2 + carry[rows, g]
                out = out_tab[idx]
                carry[rows, g] = st_tab[idx]
            else:
                out = ej
            block = cells[rows, h:e]
            cells[rows, h + 1:e + 1] = block
            cells[rows, h] = out
        if snap_cells is not None:
            snap_cells[t, rows] = cells[rows]
            snap_carry[t, rows] = carry[rows]
