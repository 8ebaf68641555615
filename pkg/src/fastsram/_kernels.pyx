# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cycle kernel. Same contract as ``_kernels_py.run_cycles``."""

cimport cython
from libc.string cimport memmove
import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef unsigned char u8


def run_cycles(u8[:, ::1] cells, const u8[:, ::1] opsig, const cnp.intp_t[::1] rows,
               const cnp.intp_t[::1] heads, const cnp.intp_t[::1] tails,
               const u8[::1] modes, const u8[::1] out_tab, const u8[::1] st_tab,
               u8[:, ::1] carry, int ncycles, snap_cells=None, snap_carry=None):
    cdef Py_ssize_t m, g, r, h, e, pos
    cdef Py_ssize_t nrows = rows.shape[0], ngroups = heads.shape[0]
    cdef int t, idx
    cdef u8 ej, out, mode
    cdef bint record = snap_cells is not None
    cdef u8[:, :, ::1] sc
    cdef u8[:, :, ::1] sk
    if record:
        sc = snap_cells
        sk = snap_carry
    with nogil:
        for m in range(nrows):
            r = rows[m]
            for t in range(ncycles):
                for g in range(ngroups):
                    mode = modes[g]
                    if mode == 0:
                        continue
                    h = heads[g]
                    e = tails[g]
                    ej = cells[r, e]
                    if mode == 2:
                        pos = e - t % (e - h + 1)
                        idx = ej * 4 + opsig[r, pos] * 2 + carry[r, g]
                        out = out_tab[idx]
                        carry[r, g] = st_tab[idx]
                    else:
                        out = ej
                    if e > h:
                        memmove(&cells[r, h + 1], &cells[r, h], e - h)
                    cells[r, h] = out
                if record:
                    for g in range(cells.shape[1]):
                        sc[t, r, g] = cells[r, g]
                    for g in range(ngroups):
                        sk[t, r, g] = carry[r, g]
