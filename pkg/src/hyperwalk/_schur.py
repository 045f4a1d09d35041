"""Complex Schur decomposition kernels (Householder Hessenberg + shifted QR).

Compiled with numba; the matrices handled here are at most a few dozen rows,
so explicit loops beat calls into LAPACK-backed numpy routines.
"""
import numba
import numpy as np

_EPS = np.finfo(np.float64).eps


@numba.njit(cache=True)
def _hessenberg(a, q):
    N = a.shape[0]
    v = np.empty(N, dtype=np.complex128)
    for k in range(N - 2):
        alpha = 0.0
        for i in range(k + 1, N):
            alpha += a[i, k].real ** 2 + a[i, k].imag ** 2
        alpha = np.sqrt(alpha)
        if alpha == 0.0:
            continue
        x0 = a[k + 1, k]
        phase = x0 / abs(x0) if abs(x0) > 0.0 else 1.0 + 0j
        vnorm = 0.0
        for i in range(k + 1, N):
            v[i] = a[i, k]
        v[k + 1] += phase * alpha
        for i in range(k + 1, N):
            vnorm += v[i].real ** 2 + v[i].imag ** 2
        vnorm = np.sqrt(vnorm)
        for i in range(k + 1, N):
            v[i] /= vnorm
        # a <- (I - 2vv*) a
        for j in range(N):
            t = 0j
            for i in range(k + 1, N):
                t += np.conj(v[i]) * a[i, j]
            t *= 2.0
            for i in range(k + 1, N):
                a[i, j] -= v[i] * t
        # a <- a (I - 2vv*), q <- q (I - 2vv*)
        for i in range(N):
            t = 0j
            u = 0j
            for j in range(k + 1, N):
                t += a[i, j] * v[j]
                u += q[i, j] * v[j]
            t *= 2.0
            u *= 2.0
            for j in range(k + 1, N):
                a[i, j] -= t * np.conj(v[j])
                q[i, j] -= u * np.conj(v[j])
        for i in range(k + 2, N):
            a[i, k] = 0.0


@numba.njit(cache=True)
def _qr_iterate(h, q, maxit):
    """Reduce Hessenberg ``h`` to upper triangular form in place; returns iteration count or -1."""
    N = h.shape[0]
    cs = np.empty(N, dtype=np.complex128)
    sn = np.empty(N, dtype=np.complex128)
    hi = N - 1
    its = 0
    total = 0
    while hi > 0:
        l = hi
        while l > 0:
            scale = abs(h[l - 1, l - 1]) + abs(h[l, l])
            if scale == 0.0:
                scale = 1.0
            if abs(h[l, l - 1]) <= _EPS * scale:
                h[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            hi -= 1
            its = 0
            continue
        its += 1
        total += 1
        if its > maxit:
            return -1
        # Wilkinson shift from the trailing 2x2 block
        a = h[hi - 1, hi - 1]
        b = h[hi - 1, hi]
        c = h[hi, hi - 1]
        d = h[hi, hi]
        if its % 11 == 0:
            mu = d + abs(h[hi, hi - 1])
        else:
            half = 0.5 * (a - d)
            disc = np.sqrt(half * half + b * c)
            mu1 = d - b * c / (half + disc) if abs(half + disc) > 0.0 else d
            mu2 = d - b * c / (half - disc) if abs(half - disc) > 0.0 else d
            mu = mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2
        for k in range(l, hi + 1):
            h[k, k] -= mu
        for k in range(l, hi):
            x = h[k, k]
            y = h[k + 1, k]
            r = np.sqrt(x.real ** 2 + x.imag ** 2 + y.real ** 2 + y.imag ** 2)
            if r == 0.0:
                cs[k] = 1.0
                sn[k] = 0.0
                continue
            ck = x / r
            sk = y / r
            cs[k] = ck
            sn[k] = sk
            for j in range(k, N):
                t1 = h[k, j]
                t2 = h[k + 1, j]
                h[k, j] = np.conj(ck) * t1 + np.conj(sk) * t2
                h[k + 1, j] = -sk * t1 + ck * t2
        for k in range(l, hi):
            ck = cs[k]
            sk = sn[k]
            top = min(k + 2, hi)
            for i in range(top + 1):
                t1 = h[i, k]
                t2 = h[i, k + 1]
                h[i, k] = t1 * ck + t2 * sk
                h[i, k + 1] = -t1 * np.conj(sk) + t2 * np.conj(ck)
            for i in range(N):
                t1 = q[i, k]
                t2 = q[i, k + 1]
                q[i, k] = t1 * ck + t2 * sk
                q[i, k + 1] = -t1 * np.conj(sk) + t2 * np.conj(ck)
        for k in range(l, hi + 1):
            h[k, k] += mu
    return total


def schur(M, maxit=60):
    """Complex Schur form ``M = Q T Q*``; returns ``(T, Q, iterations)`` (``iterations < 0`` on failure)."""
    T = np.array(M, dtype=np.complex128, order="C", copy=True)
    Q = np.eye(T.shape[0], dtype=np.complex128)
    if T.shape[0] > 1:
        _hessenberg(T, Q)
        its = _qr_iterate(T, Q, maxit)
    else:
        its = 0
    return T, Q, its
