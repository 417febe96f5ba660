# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tape executor.

Runs the register program from ``_tape`` point by point with libc math.
No domain checking here: invalid points surface as nan/inf and the python
layer re-runs the checked interpreter to raise a precise error.
"""

import numpy as np

from libc.math cimport exp as c_exp, log as c_log, sqrt as c_sqrt
from libc.math cimport pow as c_pow, erfc as c_erfc, fabs


def run_tape(int[::1] ops, int[::1] dst, int[::1] arg_a, int[::1] arg_b,
             double[::1] init_regs, int[::1] var_regs,
             double[:, ::1] var_values, int result_reg):
    cdef Py_ssize_t n_instr = ops.shape[0]
    cdef Py_ssize_t n_regs = init_regs.shape[0]
    cdef Py_ssize_t n_vars = var_regs.shape[0]
    cdef Py_ssize_t n_pts = var_values.shape[1]

    out = np.empty(n_pts, dtype=np.float64)
    cdef double[::1] out_v = out
    scratch = np.empty(n_regs, dtype=np.float64)
    cdef double[::1] regs = scratch

    cdef Py_ssize_t p, i, j
    cdef int op
    cdef double x, v

    for p in range(n_pts):
        for i in range(n_regs):
            regs[i] = init_regs[i]
        for j in range(n_vars):
            regs[var_regs[j]] = var_values[j, p]
        for i in range(n_instr):
            op = ops[i]
            x = regs[arg_a[i]]
            if op == 0:
                v = x + regs[arg_b[i]]
            elif op == 1:
                v = x * regs[arg_b[i]]
            elif op == 2:
                v = x / regs[arg_b[i]]
            elif op == 3:
                v = c_pow(x, regs[arg_b[i]])
            elif op == 4:
                v = c_exp(x)
            elif op == 5:
                v = c_log(x)
            elif op == 6:
                v = c_sqrt(x)
            elif op == 7:
                v = fabs(x)
            elif op == 8:
                v = 1.0 if x > 0.0 else (-1.0 if x < 0.0 else 0.0)
            elif op == 9:
                v = 0.3989422804014327 * c_exp(-0.5 * x * x)
            else:
                v = 0.5 * c_erfc(-x * 0.7071067811865476)
            regs[dst[i]] = v
        out_v[p] = regs[result_reg]
    return out
