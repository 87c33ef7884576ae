# cython: boundscheck=False, wraparound=False
"""Compiled versions of the hot loops, operating on gmpy2 objects in place.

Each routine mirrors ``_pykernels`` operation by operation (same rounding,
same order), so results are bit-identical to the fallback.
"""

import gmpy2
from gmpy2 cimport *

cdef extern from "mpfr.h":
    int mpfr_cmp_ui(mpfr_t, unsigned long)
    int mpfr_sgn(mpfr_t)

cdef extern from "mpc.h":
    int mpc_sub_fr(mpc_t, mpc_t, mpfr_t, mpc_rnd_t)
    int mpc_mul(mpc_t, mpc_t, mpc_t, mpc_rnd_t)
    int mpc_mul_fr(mpc_t, mpc_t, mpfr_t, mpc_rnd_t)
    int mpc_sub(mpc_t, mpc_t, mpc_t, mpc_rnd_t)
    int mpc_add(mpc_t, mpc_t, mpc_t, mpc_rnd_t)
    int mpc_div(mpc_t, mpc_t, mpc_t, mpc_rnd_t)
    int mpc_div_fr(mpc_t, mpc_t, mpfr_t, mpc_rnd_t)
    void mpc_init2(mpc_t, mpfr_prec_t)
    void mpc_clear(mpc_t)

import_gmpy2()

cdef mpfr_prec_t _prec():
    return gmpy2.get_context().precision

cdef inline mpc _new(mpfr_prec_t p):
    return GMPy_MPC_New(p, p, NULL)


def forward_recurrence(list a, list b, mpc z, mpc f_prev, mpc f_cur, mpfr a_m1, Py_ssize_t n_end):
    cdef mpfr_prec_t p = _prec()
    cdef mpc_t t, u
    cdef mpc nxt
    cdef mpfr prev_a = a_m1
    cdef mpfr an, bn
    cdef Py_ssize_t n
    out = []
    mpc_init2(t, p)
    mpc_init2(u, p)
    try:
        for n in range(n_end):
            an = <mpfr>a[n]
            bn = <mpfr>b[n]
            mpc_sub_fr(t, z.c, bn.f, MPC_RNDNN)
            mpc_mul(t, t, f_cur.c, MPC_RNDNN)
            mpc_mul_fr(u, f_prev.c, prev_a.f, MPC_RNDNN)
            mpc_sub(t, t, u, MPC_RNDNN)
            nxt = _new(p)
            mpc_div_fr(nxt.c, t, an.f, MPC_RNDNN)
            out.append(nxt)
            f_prev = f_cur
            f_cur = nxt
            prev_a = an
    finally:
        mpc_clear(t)
        mpc_clear(u)
    return out


def backward_recurrence(list a, list b, mpc z, mpc f_top, mpc f_top1, Py_ssize_t M, mpfr a_m1):
    cdef mpfr_prec_t p = _prec()
    cdef mpc_t t, u
    cdef mpc f_cur = f_top, f_next = f_top1, f_prev
    cdef mpfr an, bn, below
    cdef Py_ssize_t n
    vals = [None] * (M + 3)
    vals[M + 2] = f_top1
    vals[M + 1] = f_top
    mpc_init2(t, p)
    mpc_init2(u, p)
    try:
        for n in range(M, -1, -1):
            an = <mpfr>a[n]
            bn = <mpfr>b[n]
            mpc_sub_fr(t, z.c, bn.f, MPC_RNDNN)
            mpc_mul(t, t, f_cur.c, MPC_RNDNN)
            mpc_mul_fr(u, f_next.c, an.f, MPC_RNDNN)
            mpc_sub(t, t, u, MPC_RNDNN)
            below = <mpfr>a[n - 1] if n > 0 else a_m1
            f_prev = _new(p)
            mpc_div_fr(f_prev.c, t, below.f, MPC_RNDNN)
            vals[n] = f_prev
            f_next = f_cur
            f_cur = f_prev
    finally:
        mpc_clear(t)
        mpc_clear(u)
    return vals


def volterra_suffix(list X, list R, mpc u_next, mpc S, Py_ssize_t M):
    cdef mpfr_prec_t p = _prec()
    cdef mpc_t s, t
    cdef mpc un, xn, xm, rn
    cdef Py_ssize_t n
    u = [None] * (M + 2)
    u[M + 1] = u_next
    mpc_init2(s, p)
    mpc_init2(t, p)
    try:
        mpc_set(s, S.c, MPC_RNDNN)
        for n in range(M, -1, -1):
            xn = <mpc>X[n]
            mpc_div(t, s, xn.c, MPC_RNDNN)
            un = _new(p)
            mpc_add(un.c, u_next.c, t, MPC_RNDNN)
            u[n] = un
            if n > 0:
                xm = <mpc>X[n - 1]
                rn = <mpc>R[n]
                mpc_mul(t, xm.c, rn.c, MPC_RNDNN)
                mpc_mul(t, t, un.c, MPC_RNDNN)
                mpc_add(s, s, t, MPC_RNDNN)
            u_next = un
    finally:
        mpc_clear(s)
        mpc_clear(t)
    return u


def sturm_count(diag, off2, x):
    if isinstance(x, float):
        return _sturm_double(list(diag), list(off2), x)
    from ._pykernels import sturm_count as slow
    return slow(diag, off2, x)


cdef Py_ssize_t _sturm_double(list diag, list off2, double x):
    cdef Py_ssize_t i, count = 0, n = len(diag)
    cdef double q = 1.0
    for i in range(n):
        if i == 0:
            q = <double>diag[0] - x
        else:
            q = (<double>diag[i] - x) - <double>off2[i - 1] / q
        if q == 0.0:
            q = 1e-300
        if q < 0.0:
            count += 1
    return count
