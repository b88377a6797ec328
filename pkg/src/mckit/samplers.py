"""Generic sampling schemes driven by user-supplied densities.

Metropolis-Hastings, rejection, adaptive rejection (ARS), ratio-of-uniforms
(plain and generalized), inverse transform, and piecewise-CDF inversion.
Every sampler takes an explicit RngStream and is deterministic given its seed.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    BoundViolation,
    DomainError,
    InvalidPieces,
    InvalidStart,
    NotLogConcave,
)
from .numerics import RngStream

__all__ = [
    "TargetDensity",
    "Chain",
    "PiecewiseCdf",
    "RouRegion",
    "ArsHull",
    "metropolis_hastings",
    "rejection_sample",
    "ars_sample",
    "ratio_of_uniforms",
    "generalized_ratio_of_uniforms",
    "inverse_transform",
    "piecewise_cdf_sample",
]


@dataclass
class TargetDensity:
    """Unnormalized log-density with its support interval (±inf allowed)."""

    log_pdf: Callable[[float], float]
    support: tuple = (-math.inf, math.inf)

    def log_at(self, x: float) -> float:
        lo, hi = self.support
        if x < lo or x > hi:
            return -math.inf
        v = self.log_pdf(x)
        return v if np.isfinite(v) else -math.inf


@dataclass
class Chain:
    """MCMC output: all states are kept, consumers slice at the burn-in index."""

    samples: np.ndarray
    burn_in: int = 0

    def __post_init__(self):
        self.samples = np.asarray(self.samples)
        if not 0 <= self.burn_in < len(self.samples):
            raise DomainError("burn-in must satisfy 0 <= M < N")

    @property
    def retained(self) -> np.ndarray:
        return self.samples[self.burn_in :]


@dataclass
class RouRegion:
    """Bounding box for the (generalized) ratio-of-uniforms acceptance region."""

    a: float
    b: float
    c: float
    r: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.b <= 0 <= self.c):
            raise DomainError("region requires a > 0 and b <= 0 <= c")


def metropolis_hastings(
    target: TargetDensity,
    proposal_sample: Callable[[float, RngStream], float],
    proposal_logpdf: Callable[[float, float], float],
    x0: float,
    n_iter: int,
    burn_in: int,
    rng: RngStream,
) -> Chain:
    """Metropolis-Hastings chain of length ``n_iter`` started at x0.

    ``proposal_logpdf(to, from)`` is the proposal's log-density of moving to
    ``to`` from ``from``.  One chain state is recorded per iteration whether
    or not the proposal was accepted.
    """
    if not burn_in < n_iter:
        raise DomainError("burn-in must be smaller than the iteration count")
    lx = target.log_at(x0)
    if not np.isfinite(lx):
        raise InvalidStart("starting point has zero target density")
    x = float(x0)
    out = np.empty(n_iter)
    for t in range(n_iter):
        y = proposal_sample(x, rng)
        ly = target.log_at(y)
        if np.isfinite(ly):
            log_acc = ly - lx + proposal_logpdf(x, y) - proposal_logpdf(y, x)
            if math.log(rng.uniform()) < log_acc:
                x, lx = y, ly
        out[t] = x
    return Chain(out, burn_in)


def rejection_sample(
    target_pdf: Callable[[float], float],
    proposal_pdf: Callable[[float], float],
    proposal_sample: Callable[[RngStream], float],
    m_bound: float,
    n: int,
    rng: RngStream,
):
    """Accept-reject with envelope constant m_bound; returns (samples, acceptance_rate).

    The envelope contract target <= m_bound * proposal is the caller's; a drawn
    point violating it beyond 1e-9 raises BoundViolation instead of silently
    producing a biased sample.
    """
    if m_bound < 1.0:
        raise DomainError("the envelope constant is at least 1")
    out = np.empty(n)
    got = 0
    trials = 0
    while got < n:
        y = proposal_sample(rng)
        trials += 1
        ratio = target_pdf(y) / (m_bound * proposal_pdf(y))
        if ratio > 1.0 + 1e-9:
            raise BoundViolation(f"density ratio {ratio:.6f} exceeds 1 at y={y!r}")
        if rng.uniform() < ratio:
            out[got] = y
            got += 1
    return out, n / trials


class ArsHull:
    """Piecewise-exponential upper hull and chord lower hull for ARS.

    Tangents at the abscissae define the upper hull; chords between adjacent
    abscissae define the squeeze.  Segment masses are kept normalized by the
    running maximum of h so hull sampling never overflows.
    """

    SLOPE_TOL = 1e-8
    TIE_TOL = 1e-12

    def __init__(self, x, h, hp, lo, hi):
        order = np.argsort(x)
        self.x = list(np.asarray(x, float)[order])
        self.h = list(np.asarray(h, float)[order])
        self.hp = list(np.asarray(hp, float)[order])
        self.lo = float(lo)
        self.hi = float(hi)
        if len(self.x) < 2:
            raise DomainError("at least two abscissae are required")
        for i in range(len(self.x) - 1):
            if self.hp[i + 1] - self.hp[i] > self.SLOPE_TOL:
                raise NotLogConcave("derivatives must be nonincreasing across abscissae")
        if math.isinf(self.lo) and self.hp[0] <= 0:
            raise DomainError("unbounded left support needs h'(leftmost) > 0")
        if math.isinf(self.hi) and self.hp[-1] >= 0:
            raise DomainError("unbounded right support needs h'(rightmost) < 0")
        self._rebuild()

    def __len__(self):
        return len(self.x)

    def _rebuild(self):
        x, h, hp = self.x, self.h, self.hp
        k = len(x)
        z = [self.lo]
        for i in range(k - 1):
            if abs(hp[i] - hp[i + 1]) < self.TIE_TOL:
                z.append(0.5 * (x[i] + x[i + 1]))
            else:
                z.append(
                    (h[i + 1] - h[i] - x[i + 1] * hp[i + 1] + x[i] * hp[i])
                    / (hp[i] - hp[i + 1])
                )
        z.append(self.hi)
        self.z = z
        self.offset = max(h)
        masses = []
        for j in range(k):
            s = hp[j]
            amp = math.exp(h[j] - self.offset)
            zl, zr = z[j], z[j + 1]
            if abs(s) < self.TIE_TOL:
                masses.append(amp * (zr - zl))
            else:
                # exp(h_j - C) * (exp(s(zr-x_j)) - exp(s(zl-x_j))) / s, kept stable
                t = h[j] - self.offset - s * x[j]
                hi_term = math.exp(t + s * zr) if np.isfinite(zr) or s < 0 else math.inf
                lo_term = math.exp(t + s * zl) if np.isfinite(zl) or s > 0 else math.inf
                if s > 0 and math.isinf(zl):
                    lo_term = 0.0
                if s < 0 and math.isinf(zr):
                    hi_term = 0.0
                masses.append((hi_term - lo_term) / s)
        self.masses = masses
        self.total = sum(masses)

    def upper(self, xq: float) -> float:
        j = min(bisect.bisect_right(self.z, xq) - 1, len(self.x) - 1)
        j = max(j, 0)
        return self.h[j] + (xq - self.x[j]) * self.hp[j]

    def squeeze(self, xq: float) -> float:
        if xq < self.x[0] or xq > self.x[-1]:
            return -math.inf
        j = min(bisect.bisect_right(self.x, xq) - 1, len(self.x) - 2)
        x0, x1 = self.x[j], self.x[j + 1]
        if x1 == x0:
            return self.h[j]
        w = (xq - x0) / (x1 - x0)
        return (1.0 - w) * self.h[j] + w * self.h[j + 1]

    def draw(self, rng: RngStream) -> float:
        u = rng.uniform() * self.total
        acc = 0.0
        j = len(self.masses) - 1
        for i, m in enumerate(self.masses):
            acc += m
            if u <= acc:
                j = i
                break
        zl, zr = self.z[j], self.z[j + 1]
        s = self.hp[j]
        u2 = rng.uniform()
        if abs(s) < self.TIE_TOL:
            return zl + u2 * (zr - zl)
        width = zr - zl
        if s > 0:
            # invert from the right end so the exponent stays nonpositive
            tail = math.exp(-s * width) if np.isfinite(width) else 0.0
            return zr + math.log(u2 + (1.0 - u2) * tail) / s
        tail = math.exp(s * width) if np.isfinite(width) else 0.0
        return zl + math.log(1.0 - u2 + u2 * tail) / s

    def insert(self, xq: float, hx: float, hpx: float):
        j = bisect.bisect_left(self.x, xq)
        if j > 0 and hpx - self.hp[j - 1] > self.SLOPE_TOL:
            raise NotLogConcave("inserted derivative breaks monotonicity")
        if j < len(self.hp) and self.hp[j] - hpx > self.SLOPE_TOL:
            raise NotLogConcave("inserted derivative breaks monotonicity")
        self.x.insert(j, xq)
        self.h.insert(j, hx)
        self.hp.insert(j, hpx)
        self._rebuild()


def ars_sample(
    h: Callable[[float], float],
    h_prime: Callable[[float], float],
    initial_abscissae: Sequence[float],
    support: tuple,
    n: int,
    rng: RngStream,
) -> np.ndarray:
    """Adaptive rejection sampling from a log-concave density exp(h).

    The hull is refined only when the squeeze test forces an evaluation of h,
    and the accepted stream is exact (no hull-induced bias).
    """
    xs = list(initial_abscissae)
    hull = ArsHull(xs, [h(x) for x in xs], [h_prime(x) for x in xs], *support)
    out = np.empty(n)
    got = 0
    while got < n:
        xq = hull.draw(rng)
        uq = hull.upper(xq)
        lq = hull.squeeze(xq)
        logu = math.log(rng.uniform())
        if logu <= lq - uq:
            out[got] = xq
            got += 1
            continue
        hx = h(xq)
        if hx - uq > 1e-8:
            raise NotLogConcave("log-density exceeds its tangent hull")
        if logu <= hx - uq:
            out[got] = xq
            got += 1
        hull.insert(xq, hx, h_prime(xq))
    return out


def _rou_core(h, r, a, b, c, n, rng, batch=4096):
    if a <= 0 or b > 0 or c < 0:
        raise DomainError("bounding box requires a > 0 and b <= 0 <= c")
    out = np.empty(n)
    got = 0
    trials = 0
    accepted = 0
    while got < n:
        u = rng.uniform(batch) * a
        v = b + rng.uniform(batch) * (c - b)
        x = v / u**r
        hx = np.asarray(h(x), dtype=float)
        keep = u ** (r + 1.0) <= hx
        trials += batch
        accepted += int(keep.sum())
        take = x[keep][: n - got]
        out[got : got + take.size] = take
        got += take.size
    return out, accepted / trials


def ratio_of_uniforms(h, a, b, c, n, rng):
    """Plain ratio-of-uniforms on the box [0,a]x[b,c]; returns (samples, rate)."""
    return _rou_core(h, 1.0, a, b, c, n, rng)


def generalized_ratio_of_uniforms(h, r, region: RouRegion, n, rng):
    """Accept x = V/U^r over region's box; r=1 recovers the plain method."""
    return _rou_core(h, float(r), region.a, region.b, region.c, n, rng)


def inverse_transform(quantile, n, rng):
    """Samples quantile(u) for u uniform; the quantile may be vectorized or scalar."""
    u = rng.uniform(n)
    try:
        vals = np.asarray(quantile(u), dtype=float)
        if vals.shape != u.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.fromiter((quantile(ui) for ui in u), dtype=float, count=n)
    return vals


@dataclass
class PiecewiseCdf:
    """CDF split at breakpoints a0<...<am with per-piece inverses.

    ``cdf_values`` are F(a0)..F(am); piece i (1-based in the usual notation)
    inverts F on [a_{i-1}, a_i] and receives the global uniform draw.
    """

    breakpoints: Sequence[float]
    inverses: Sequence[Callable]
    cdf_values: Sequence[float] = field(default=None)

    def __post_init__(self):
        br = np.asarray(self.breakpoints, float)
        cv = np.asarray(self.cdf_values, float)
        m = len(self.inverses)
        if br.size != m + 1 or cv.size != m + 1:
            raise InvalidPieces("need m inverses with m+1 breakpoints and CDF values")
        if np.any(np.diff(br) <= 0):
            raise InvalidPieces("breakpoints must be strictly increasing")
        if abs(cv[0]) > 1e-12 or abs(cv[-1] - 1.0) > 1e-12:
            raise InvalidPieces("CDF must run from 0 to 1")
        if np.any(np.diff(cv) < -1e-12):
            raise InvalidPieces("CDF values must be nondecreasing")
        self.breakpoints = br
        self.cdf_values = cv


def piecewise_cdf_sample(cdf: PiecewiseCdf, n, rng):
    """Routes each uniform to its piece and applies that piece's inverse."""
    u = rng.uniform(n)
    idx = np.searchsorted(cdf.cdf_values, u, side="left") - 1
    idx = np.clip(idx, 0, len(cdf.inverses) - 1)
    out = np.empty(n)
    for i in range(len(cdf.inverses)):
        mask = idx == i
        if np.any(mask):
            inv = cdf.inverses[i]
            try:
                vals = np.asarray(inv(u[mask]), dtype=float)
                if vals.shape != u[mask].shape:
                    raise TypeError
            except (TypeError, ValueError):
                vals = np.fromiter((inv(ui) for ui in u[mask]), dtype=float)
            out[mask] = vals
    return out
