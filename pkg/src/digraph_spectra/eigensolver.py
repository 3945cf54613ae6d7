"""Eigenvalues of dense real nonsymmetric matrices.

Two independent routes are available:

* ``"lapack"`` -- :func:`numpy.linalg.eigvals` (balance, Hessenberg
  reduction and shifted QR inside LAPACK ``geev``);
* ``"francis"`` -- a self-contained implementation: Parlett-Reinsch
  balancing, Householder reduction to upper Hessenberg form, then the
  Francis implicit double-shift QR iteration with small-subdiagonal
  deflation and exceptional shifts.

Both routes first split the matrix along the strong components of its
off-diagonal nonzero pattern. The eigenvalues of a reducible matrix are the
union of those of the diagonal blocks of its block-triangular form, and
singleton blocks are exact, so nilpotent or triangular parts never go
through an iterative solver.
"""
from __future__ import annotations

import math

import numpy as np

from .digraph import Digraph, strong_components

METHODS = ("lapack", "francis")

_EPS = np.finfo(float).eps


class EigensolverError(RuntimeError):
    """The iteration failed to converge or produced an unverifiable result."""

    def __init__(self, message: str, matrix: np.ndarray | None = None):
        if matrix is not None:
            message = (
                f"{message} [n={matrix.shape[0]}, "
                f"frobenius={np.linalg.norm(matrix):.6g}, "
                f"max|a_ij|={np.abs(matrix).max(initial=0.0):.6g}]"
            )
        super().__init__(message)
        self.matrix = matrix


def balance(a: np.ndarray) -> np.ndarray:
    """Parlett-Reinsch diagonal similarity scaling by powers of two (in place)."""
    radix = 2.0
    sqrdx = radix * radix
    n = a.shape[0]
    done = False
    while not done:
        done = True
        for i in range(n):
            c = np.abs(a[:, i]).sum() - abs(a[i, i])
            r = np.abs(a[i, :]).sum() - abs(a[i, i])
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g:
                f *= radix
                c *= sqrdx
            g = r * radix
            while c > g:
                f /= radix
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                a[i, :] /= f
                a[:, i] *= f
    return a


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Reduce to upper Hessenberg form with Householder reflectors (in place)."""
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        if x[0] > 0:
            alpha = -alpha
        v = x
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        # H = I - 2 v v^T applied from the left and right
        a[k + 1:, k:] -= 2.0 * np.outer(v, v @ a[k + 1:, k:])
        a[:, k + 1:] -= 2.0 * np.outer(a[:, k + 1:] @ v, v)
        a[k + 2:, k] = 0.0
    return a


def hqr(h: np.ndarray, max_iter: int = 60) -> np.ndarray:
    """Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.

    ``h`` is overwritten. Raises :class:`EigensolverError` when a single
    eigenvalue needs more than ``max_iter`` sweeps.
    """
    a = h
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = sum(abs(a[i, j]) for i in range(n) for j in range(max(i - 1, 0), n))
    nn = n - 1
    t = 0.0
    while nn >= 0:
        its = 0
        while True:
            # look for a single small subdiagonal element
            l = nn
            while l > 0:
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) <= _EPS * s:
                    a[l, l - 1] = 0.0
                    break
                l -= 1
            x = a[nn, nn]
            if l == nn:
                # one root found
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                # two roots found
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + math.copysign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = z
                    wi[nn] = -z
                nn -= 2
                break
            if its == max_iter:
                raise EigensolverError(f"QR iteration did not converge after {its} sweeps at row {nn}", h)
            if its and its % 10 == 0:
                # exceptional shift
                t += x
                for i in range(nn + 1):
                    a[i, i] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                y = x = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u <= _EPS * v:
                    break
                m -= 1
            for i in range(m, nn - 1):
                a[i + 2, i] = 0.0
                if i != m:
                    a[i + 2, i - 1] = 0.0
            # double-shift QR sweep on rows/columns l..nn
            k = m
            while k < nn:
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k + 1 != nn else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s != 0.0:
                    if k == m:
                        if l != m:
                            a[k, k - 1] = -a[k, k - 1]
                    else:
                        a[k, k - 1] = -s * x
                    p += s
                    x = p / s
                    y = q / s
                    z = r / s
                    q /= p
                    r /= p
                    row = slice(k, nn + 1)
                    pv = a[k, row] + q * a[k + 1, row]
                    if k + 1 != nn:
                        pv += r * a[k + 2, row]
                        a[k + 2, row] -= pv * z
                    a[k + 1, row] -= pv * y
                    a[k, row] -= pv * x
                    col = slice(l, min(nn, k + 3) + 1)
                    pc = x * a[col, k] + y * a[col, k + 1]
                    if k + 1 != nn:
                        pc += z * a[col, k + 2]
                        a[col, k + 2] -= pc * r
                    a[col, k + 1] -= pc * q
                    a[col, k] -= pc
                k += 1
    return wr + 1j * wi


def francis_eigvals(a: np.ndarray, max_iter: int = 60) -> np.ndarray:
    """Full pipeline of the self-contained route on a dense block."""
    work = np.array(a, dtype=float, copy=True)
    if work.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    if work.shape[0] == 1:
        return work[0].astype(complex)
    balance(work)
    hessenberg(work)
    return hqr(work, max_iter=max_iter)


def pattern_blocks(a: np.ndarray) -> list[list[int]]:
    """Strong components of the off-diagonal nonzero pattern of ``a``."""
    mask = a != 0
    np.fill_diagonal(mask, False)
    return strong_components(Digraph.from_adjacency(mask))


def eigvals(a: np.ndarray, method: str = "lapack", blocks: list[list[int]] | None = None) -> np.ndarray:
    """Eigenvalues of a real square matrix, solved block by block.

    ``blocks`` is a partition of the indices whose induced principal
    submatrices are the diagonal blocks of a block-triangular permutation of
    ``a`` (for example the strong components of a digraph). It is computed
    from the nonzero pattern when omitted.
    """
    if method not in METHODS:
        raise ValueError(f"unknown eigensolver method {method!r}; expected one of {METHODS}")
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise EigensolverError("matrix has non-finite entries", a)
    if blocks is None:
        blocks = pattern_blocks(a)
    out = []
    for block in blocks:
        if len(block) == 1:
            i = block[0]
            out.append(np.array([a[i, i]], dtype=complex))
            continue
        sub = a[np.ix_(block, block)]
        if method == "lapack":
            try:
                vals = np.linalg.eigvals(sub)
            except np.linalg.LinAlgError as exc:
                raise EigensolverError(f"LAPACK eigenvalue iteration failed: {exc}", sub) from exc
        else:
            vals = francis_eigvals(sub)
        out.append(np.asarray(vals, dtype=complex))
    if not out:
        return np.zeros(0, dtype=complex)
    vals = np.concatenate(out)
    if not np.all(np.isfinite(vals)):
        raise EigensolverError("eigensolver returned non-finite values", a)
    return vals


def eigen_residual(a: np.ndarray, lam: complex) -> float:
    """Smallest residual ``min ||(A - lam I) v||`` over unit vectors ``v``.

    This is the smallest singular value of ``A - lam I``; the minimising
    right singular vector is the best approximate eigenvector.
    """
    n = a.shape[0]
    shifted = np.asarray(a, dtype=complex) - lam * np.eye(n)
    return float(np.linalg.svd(shifted, compute_uv=False)[-1])
