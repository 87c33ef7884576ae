"""Pure-Python versions of the hot loops.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and the same sequence of correctly rounded gmpy2 operations, so both
backends produce bit-identical results at a given context precision.
"""

import gmpy2


def forward_recurrence(a, b, z, f_prev, f_cur, a_m1, n_end):
    """Run f_{n+1} = ((z - b_n) f_n - a_{n-1} f_{n-1}) / a_n for n = 0..n_end-1.

    ``a_m1`` stands in for a_{-1}. Returns [f_1, ..., f_{n_end}].
    """
    out = []
    prev_a = a_m1
    for n in range(n_end):
        t = (z - b[n]) * f_cur
        t = t - f_prev * prev_a
        nxt = t / a[n]
        out.append(nxt)
        f_prev, f_cur = f_cur, nxt
        prev_a = a[n]
    return out


def backward_recurrence(a, b, z, f_top, f_top1, M, a_m1):
    """Run f_{n-1} = ((z - b_n) f_n - a_n f_{n+1}) / a_{n-1} for n = M..0.

    Returns [f_{-1}, f_0, ..., f_{M+1}].
    """
    vals = [None] * (M + 3)
    vals[M + 2] = f_top1
    vals[M + 1] = f_top
    f_cur, f_next = f_top, f_top1
    for n in range(M, -1, -1):
        t = (z - b[n]) * f_cur
        t = t - f_next * a[n]
        below = a[n - 1] if n > 0 else a_m1
        f_prev = t / below
        vals[n] = f_prev
        f_cur, f_next = f_prev, f_cur
    return vals


def volterra_suffix(X, R, u_next, S, M):
    """Backward suffix recursion for u_n = 1 + sum_{m>n} G_{n,m} R_m u_m.

    Starts from u_{M+1} = ``u_next`` and S_M = ``S`` and iterates
    u_n = u_{n+1} + S_n / X_n,  S_{n-1} = S_n + X_{n-1} R_n u_n.
    ``X`` and ``R`` are indexed from 0. Returns [u_0, ..., u_{M+1}].
    """
    u = [None] * (M + 2)
    u[M + 1] = u_next
    for n in range(M, -1, -1):
        un = u_next + S / X[n]
        u[n] = un
        if n > 0:
            S = S + (X[n - 1] * R[n]) * un
        u_next = un
    return u


def sturm_count(diag, off2, x):
    """Number of eigenvalues below ``x`` of a symmetric tridiagonal matrix.

    ``diag`` holds the diagonal, ``off2`` the squared off-diagonal entries.
    Plain floats or mpfr values both work.
    """
    count = 0
    q = 1
    tiny = 1e-300 if isinstance(x, float) else gmpy2.mpfr(2) ** (-4 * gmpy2.get_context().precision)
    for i in range(len(diag)):
        if i == 0:
            q = diag[0] - x
        else:
            q = (diag[i] - x) - off2[i - 1] / q
        if q == 0:
            q = tiny
        if q < 0:
            count += 1
    return count
