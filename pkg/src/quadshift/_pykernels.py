"""Reference (pure Python / numpy) versions of the hot kernels.

A Hermitian banded operator is stored as ``diag`` (real, length n) and
``upper`` (complex, shape (m, n)) with ``upper[s-1, j] = H[j, j+s]`` for
``j < n - s``; entries past ``n - s`` are ignored. The lower bands are the
conjugates, never stored.
"""
import numpy as np

from .errors import SolverBreakdown

BACKEND = "python"


def band_matvec(diag, upper, v):
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=complex)
    v = np.asarray(v, dtype=complex)
    n = v.shape[0]
    out = diag * v
    for s in range(1, upper.shape[0] + 1):
        u = upper[s - 1, : n - s]
        out[: n - s] += u * v[s:]
        out[s:] += np.conj(u) * v[: n - s]
    return out


def chebyshev_apply(diag, upper, v, center, halfwidth, coeffs):
    """Sum of ``coeffs[k] * T_k((H - center)/halfwidth) v``."""
    v = np.asarray(v, dtype=complex)
    coeffs = np.asarray(coeffs, dtype=complex)

    def scaled(w):
        return (band_matvec(diag, upper, w) - center * w) / halfwidth

    t_prev = v
    out = coeffs[0] * t_prev
    if coeffs.shape[0] == 1:
        return out
    t_cur = scaled(v)
    out = out + coeffs[1] * t_cur
    for k in range(2, coeffs.shape[0]):
        t_next = 2.0 * scaled(t_cur) - t_prev
        out += coeffs[k] * t_next
        t_prev, t_cur = t_cur, t_next
    return out


def cayley_solve(diag, upper, v, tau, pivot_tol=1e-14):
    """Solve ``(1 + i tau H) y = (1 - i tau H) v`` by banded elimination without pivoting.

    For one off-diagonal band this is the Thomas algorithm. The matrix has
    Hermitian part equal to the identity, so elimination without row
    exchanges is stable; a collapsing pivot still raises SolverBreakdown.
    """
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=complex)
    v = np.asarray(v, dtype=complex)
    n = v.shape[0]
    m = upper.shape[0]
    itau = 1j * tau
    rhs = (v - itau * band_matvec(diag, upper, v)).tolist()

    # rows[i][m + j - i] = A[i, j] for |i - j| <= m
    width = 2 * m + 1
    rows = [[0j] * width for _ in range(n)]
    for i in range(n):
        rows[i][m] = 1.0 + itau * diag[i]
    for s in range(1, m + 1):
        band = (itau * upper[s - 1]).tolist()
        lband = (itau * np.conj(upper[s - 1])).tolist()
        for j in range(n - s):
            rows[j][m + s] = band[j]
            rows[j + s][m - s] = lband[j]
    scale = [max(abs(z) for z in r) for r in rows]

    for k in range(n):
        rk = rows[k]
        piv = rk[m]
        if not abs(piv) > pivot_tol * scale[k]:
            raise SolverBreakdown(f"pivot {abs(piv):.3e} at row {k} below {pivot_tol:g} x row scale")
        last = min(k + m, n - 1)
        for i in range(k + 1, last + 1):
            ri = rows[i]
            off = m + k - i
            lik = ri[off] / piv
            if lik == 0:
                continue
            ri[off] = lik
            for j in range(k + 1, last + 1):
                ri[m + j - i] -= lik * rk[m + j - k]
            rhs[i] -= lik * rhs[k]

    y = [0j] * n
    for k in range(n - 1, -1, -1):
        rk = rows[k]
        acc = rhs[k]
        for j in range(k + 1, min(k + m, n - 1) + 1):
            acc -= rk[m + j - k] * y[j]
        y[k] = acc / rk[m]
    return np.array(y, dtype=complex)
