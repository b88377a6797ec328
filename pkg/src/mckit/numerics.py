"""Deterministic RNG streams, small dense linear algebra, and scalar special functions.

Everything stochastic in this package draws its randomness from an RngStream,
so a run is reproducible from a single 64-bit seed.  The linear-algebra
routines are deliberately small: a pivot-checked Cholesky and a
symmetric-tridiagonal eigensolver that tracks only the first eigenvector
components, which is all the Golub-Welsch quadrature construction needs.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _special

from .errors import DomainError, NotPositiveDefinite

__all__ = [
    "RngStream",
    "cholesky_lower",
    "symtridiag_eigen",
    "std_normal_pdf",
    "std_normal_cdf",
    "std_normal_ppf",
    "log_gamma",
    "bessel_k",
]

_MASK64 = (1 << 64) - 1
# 53-bit dyadic midpoints: (i + 0.5) / 2^53 is never 0.0 or 1.0.
_INV53 = 1.0 / (1 << 53)


class RngStream:
    """Seedable uniform(0,1) source; all draws come off one counter-based stream.

    Uniform outputs are strictly inside (0,1) so downstream inverse-CDF
    transforms never see 0 or 1.  Parallel work should derive independent
    streams with ``split``; two streams with the same seed are bitwise equal.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._gen = np.random.Generator(np.random.Philox(key=self.seed))

    def split(self, i: int) -> "RngStream":
        """Independent stream for worker i (seed XOR i)."""
        return RngStream(self.seed ^ int(i))

    def uniform(self, size=None):
        """Uniform draws strictly in (0,1)."""
        raw = self._gen.integers(0, 1 << 53, size=size)
        return (raw + 0.5) * _INV53

    def normal(self, size=None):
        """Standard normal draws by inversion of the uniform stream."""
        return std_normal_ppf(self.uniform(size=size))

    def exponential(self, size=None):
        """Unit-rate exponential draws by inversion."""
        return -np.log(self.uniform(size=size))

    # Ambient gamma/poisson draws are plumbing (conjugate updates, mixing
    # variables); they consume the same underlying counter stream.
    def gamma(self, shape, scale=1.0, size=None):
        return self._gen.gamma(shape, scale, size=size)

    def poisson(self, lam, size=None):
        return self._gen.poisson(lam, size=size)

    def integers(self, low, high, size=None):
        return self._gen.integers(low, high, size=size)

    def permutation(self, n):
        return self._gen.permutation(n)

    def choice(self, n, size, replace=True):
        return self._gen.choice(n, size=size, replace=replace)


def cholesky_lower(S, tol: float = 1e-12):
    """Lower-triangular L with L@L.T == S.

    Raises NotPositiveDefinite as soon as a pivot falls below a relative
    tolerance, which is the definiteness check the samplers rely on.
    """
    A = np.asarray(S, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("matrix must be square")
    if not np.allclose(A, A.T, rtol=1e-8, atol=1e-8):
        raise DomainError("matrix must be symmetric")
    n = A.shape[0]
    L = np.zeros_like(A)
    floor = tol * max(1.0, float(np.max(np.abs(np.diag(A)))))
    for j in range(n):
        d = A[j, j] - L[j, :j] @ L[j, :j]
        if d <= floor:
            raise NotPositiveDefinite(f"pivot {d:.3e} at index {j}")
        L[j, j] = math.sqrt(d)
        if j + 1 < n:
            L[j + 1 :, j] = (A[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def symtridiag_eigen(diag, offdiag):
    """Eigenvalues and first eigenvector components of a symmetric tridiagonal matrix.

    Implicit-shift QL with Wilkinson shifts.  Only the first row of the
    accumulated rotation is carried, since quadrature weights need just the
    first component of each unit eigenvector.  Returns (eigenvalues ascending,
    matching first components).
    """
    d = np.asarray(diag, dtype=float).copy()
    n = d.size
    off = np.asarray(offdiag, dtype=float)
    if off.size != max(n - 1, 0):
        raise DomainError("offdiag length must be diag length - 1")
    if n == 0:
        return np.empty(0), np.empty(0)
    e = np.zeros(n)
    e[: n - 1] = off
    z = np.zeros(n)
    z[0] = 1.0

    eps = np.finfo(float).eps
    for l in range(n):
        iters = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            iters += 1
            if iters > 50:
                raise DomainError("tridiagonal QL failed to converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0

    order = np.argsort(d, kind="stable")
    return d[order], z[order]


def std_normal_pdf(x):
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    return out if out.ndim else float(out)


def std_normal_cdf(x):
    """Phi(x) via the complementary error function (good to ~1 ulp)."""
    x = np.asarray(x, dtype=float)
    out = 0.5 * _special.erfc(-x / math.sqrt(2.0))
    return out if out.ndim else float(out)


# Acklam rational approximation for the normal quantile (|rel err| < 1.15e-9),
# finished with one Newton step off the erfc-based CDF.
_PPF_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
          1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_PPF_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
          6.680131188771972e+01, -1.328068155288572e+01)
_PPF_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
          -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_PPF_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
          3.754408661907416e+00)
_PPF_PLOW = 0.02425


def _acklam(p):
    p = np.asarray(p, dtype=float)
    x = np.empty_like(p)

    lo = p < _PPF_PLOW
    hi = p > 1.0 - _PPF_PLOW
    mid = ~(lo | hi)

    if np.any(mid):
        q = p[mid] - 0.5
        r = q * q
        a, b = _PPF_A, _PPF_B
        num = ((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]
        den = ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
        x[mid] = num * q / den

    c, dd = _PPF_C, _PPF_D
    if np.any(lo):
        q = np.sqrt(-2.0 * np.log(p[lo]))
        num = ((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]
        den = (((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0
        x[lo] = num / den
    if np.any(hi):
        q = np.sqrt(-2.0 * np.log(1.0 - p[hi]))
        num = ((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]
        den = (((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0
        x[hi] = -num / den
    return x


def std_normal_ppf(p):
    """Inverse of std_normal_cdf; |cdf(ppf(p)) - p| <= 1e-12 away from the tails."""
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("probability must lie strictly in (0,1)")
    x = _acklam(arr)
    err = 0.5 * _special.erfc(-x / math.sqrt(2.0)) - arr
    x = x - err / np.maximum(std_normal_pdf(x), 1e-300)
    return x if x.ndim else float(x)


def log_gamma(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0):
        raise DomainError("log_gamma requires x > 0")
    out = _special.gammaln(arr)
    return out if out.ndim else float(out)


def bessel_k(nu, x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0):
        raise DomainError("bessel_k requires x > 0")
    out = _special.kv(nu, arr)
    return out if out.ndim else float(out)
