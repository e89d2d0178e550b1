"""The quadratic family p_t(x) = x^2 + c_t with multiplier (1+t)lambda at the fixed point.

Covers the Green function and its equipotentials, the branch-continued
pullback operator whose iterates converge to the Caratheodory loop, the
one-dimensional normal form at the fixed point, and the attracting/repelling
sector classification in normalized coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NumericalError, PreconditionError
from .series import TruncSeries1, compose1, invert1

# Sector geometry constants: the repelling sector maps to an opening of
# 5*pi/9 under x -> x^q.
EPS0 = math.tan(2 * math.pi / 9)
EPS1 = EPS0 / math.sqrt(1 + EPS0**2)

BASE_RADIUS = 4.0      # equipotential level exp(G) = R used for seeding loops
ESCAPE_RADIUS = 10.0   # |z| beyond this certifies escape for every family member
_FAR = 1e100           # continue iterating to here so Green values saturate


def _normalize_pq(p_over_q) -> Fraction:
    if isinstance(p_over_q, Fraction):
        frac = p_over_q
    elif isinstance(p_over_q, tuple):
        frac = Fraction(p_over_q[0], p_over_q[1])
    elif isinstance(p_over_q, str):
        frac = Fraction(p_over_q)
    else:
        frac = Fraction(p_over_q)
    if frac.denominator < 1:
        raise PreconditionError("rotation number must have positive denominator")
    return frac


@dataclass(frozen=True)
class PolyParams:
    """One member of the family, with the derived quantities cached."""

    p: int
    q: int
    t: float
    lam: complex     # (1+t) e^{2 pi i p/q}
    c: complex       # lam/2 - lam^2/4
    alpha: complex   # fixed point lam/2

    def map(self, z):
        return z * z + self.c

    def dmap(self, z):
        return 2.0 * z


def poly_params(p_over_q, t: float) -> PolyParams:
    frac = _normalize_pq(p_over_q)
    p, q = frac.numerator % frac.denominator, frac.denominator
    lam = (1.0 + t) * np.exp(2j * math.pi * p / q)
    c = lam / 2.0 - lam * lam / 4.0
    return PolyParams(p=p, q=q, t=float(t), lam=complex(lam), c=complex(c), alpha=complex(lam / 2.0))


@dataclass(frozen=True)
class LoopSample:
    """A closed curve sampled at s = k/N, cyclic indexing, N a power of two."""

    values: np.ndarray
    level: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        n = len(v)
        if n < 2 or (n & (n - 1)) != 0:
            raise PreconditionError("loop sample count must be a power of two")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def N(self):
        return len(self.values)

    def angles(self):
        return np.arange(self.N) / self.N


def green(params: PolyParams, z, iters: int = 60):
    """Green function estimate 2^{-n} log|p^n(z)|; 0 on the non-escaping set.

    Iteration continues past the escape radius until |z| is astronomically
    large, so the returned value is stable in `iters` once the orbit escapes.
    """
    if iters < 1:
        raise PreconditionError("iters must be >= 1")
    z0 = np.asarray(z, dtype=complex)
    scalar = z0.ndim == 0
    w = np.atleast_1d(z0).copy()
    out = np.zeros(w.shape, dtype=float)
    active = np.ones(w.shape, dtype=bool)
    for n in range(1, iters + 1):
        w[active] = w[active] ** 2 + params.c
        far = active & (np.abs(w) > _FAR)
        if np.any(far):
            out[far] = np.log(np.abs(w[far])) / 2.0**n
            active &= ~far
        if not active.any():
            break
    tail = active & (np.abs(w) > ESCAPE_RADIUS)
    out[tail] = np.log(np.abs(w[tail])) / 2.0**iters
    return float(out[0]) if scalar else out.reshape(z0.shape)


def pullback_loop(params: PolyParams, loop: LoopSample) -> LoopSample:
    """One inverse step: output w with p_t(w[k]) = loop.values[2k mod N].

    The branch at s=0 is the preimage of larger real part; the rest of the
    loop is continued by proximity to the previous sample.  The output keeps
    N samples and sits at half the Green level.
    """
    if loop.level <= 0:
        raise PreconditionError("pullback requires a positive Green level")
    n = loop.N
    if n < 2 * params.q:
        raise PreconditionError("need at least 2q samples per loop")
    targets = loop.values[(2 * np.arange(n)) % n]
    roots = np.sqrt(targets - params.c)
    out = np.empty(n, dtype=complex)

    r0 = roots[0]
    cand = (r0, -r0)
    out[0] = max(cand, key=lambda v: (v.real, v.imag))
    prev = out[0]
    for k in range(1, n):
        r = roots[k]
        d_plus = abs(r - prev)
        d_minus = abs(r + prev)
        if min(d_plus, d_minus) > 2.0 * abs(r):
            raise NumericalError(
                f"resolution too coarse: ambiguous branch at sample {k}"
            )
        prev = r if d_plus <= d_minus else -r
        out[k] = prev
    # closing the loop must land back on the seed branch
    if abs(roots[0] - prev) > abs(roots[0] + prev) and abs(out[0] - (-roots[0])) > 1e-12:
        raise NumericalError("resolution too coarse: loop failed to close")
    return LoopSample(values=out, level=loop.level / 2.0)


def equipotential_loop(params: PolyParams, N: int, level: float | None = None) -> LoopSample:
    """Sample the equipotential at the given Green level (default log(R)/2).

    Seeds a circle far out, where the inverse Boettcher chart is the identity
    to machine precision, and pulls back until the requested level is reached.
    """
    if level is None:
        level = math.log(BASE_RADIUS) / 2.0
    if level <= 0:
        raise PreconditionError("equipotential level must be positive")
    m = max(0, math.ceil(math.log2(math.log(1e40) / level)))
    start = level * 2.0**m
    s = np.arange(N) / N
    loop = LoopSample(values=np.exp(start) * np.exp(2j * math.pi * s), level=start)
    for _ in range(m):
        loop = pullback_loop(params, loop)
    return loop


@dataclass(frozen=True)
class CaratheodoryResult:
    loop: LoopSample
    gaps: np.ndarray  # sup_k |gamma_n - gamma_{n-1}| per pullback

    @property
    def final_gap(self):
        return float(self.gaps[-1])


def caratheodory(params: PolyParams, N: int, n_iters: int) -> CaratheodoryResult:
    """n_iters pullbacks of the level-log(sqrt R) equipotential, with certificate."""
    if N < 1024 or (N & (N - 1)) != 0:
        raise PreconditionError("N must be a power of two >= 1024")
    if n_iters < 1:
        raise PreconditionError("n_iters must be >= 1")
    loop = equipotential_loop(params, N)
    gaps = np.empty(n_iters, dtype=float)
    for i in range(n_iters):
        nxt = pullback_loop(params, loop)
        gaps[i] = float(np.max(np.abs(nxt.values - loop.values)))
        loop = nxt
    return CaratheodoryResult(loop=loop, gaps=gaps)


def recentered_map(params: PolyParams, D: int) -> TruncSeries1:
    """p_t written at the fixed point: u -> lam u + u^2."""
    out = np.zeros(D + 1, dtype=complex)
    out[1] = params.lam
    out[2] = 1.0
    return TruncSeries1(out, D=D)


def normal_form_1d(params: PolyParams, D: int | None = None):
    """Reduce p_t at alpha_t to lam (x + x^{q+1} + C_t x^{2q+1} + tail).

    Returns (change, normal, C_t): `change` conjugates the recentered map to
    `normal`, i.e. change o p_recentered o change^{-1} = normal through D.
    """
    q = params.q
    if D is None:
        D = 2 * q + 4
    if D < 2 * q + 2:
        raise PreconditionError("truncation order must be at least 2q+2")
    lam = params.lam
    f = recentered_map(params, D)
    change = TruncSeries1.identity(D)
    for k in range(2, 2 * q + 2):
        a_k = f.coeffs[k]
        if k == q + 1:
            # rescale so the first resonant coefficient becomes lam itself
            A = (a_k / lam) ** (1.0 / q)
            T = TruncSeries1([0.0, A], D=D)
        elif k % q == 1 % q:
            continue  # resonant: 2q+1 carries C_t and stays
        else:
            denom = lam - lam**k
            if abs(denom) < 1e-8:
                raise NumericalError(f"resonance too close: |lam - lam^{k}| = {abs(denom):.2e}")
            b = a_k / denom
            coeffs = np.zeros(D + 1, dtype=complex)
            coeffs[1] = 1.0
            coeffs[k] = b
            T = TruncSeries1(coeffs, D=D)
        f = compose1(compose1(T, f), invert1(T))
        change = compose1(T, change)
    C_t = f.coeffs[2 * q + 1] / lam
    return change, f, complex(C_t)


def conjugacy_residual_1d(params: PolyParams, change: TruncSeries1, normal: TruncSeries1) -> float:
    """Max coefficient error of change o p o change^{-1} - normal through D-1."""
    lhs = compose1(compose1(change, recentered_map(params, change.D)), invert1(change))
    return float(np.max(np.abs((lhs - normal).coeffs[: change.D])))


def repelling_inner_radius(params: PolyParams) -> float:
    """For t < 0, |x^q| must exceed R_t = |t|/((q+1/3) eps1) to stay repelling."""
    if params.t >= 0:
        return 0.0
    return abs(params.t) / ((params.q + 1.0 / 3.0) * EPS1)


def sector_1d(params: PolyParams, x: complex, rho: float = 0.15) -> str:
    """Classify a point of normalized coordinates: attracting/repelling/outside."""
    if abs(x) > rho:
        return "outside"
    w = x**params.q
    if w.real > EPS0 * abs(w.imag):
        if params.t < 0 and abs(w) <= repelling_inner_radius(params):
            return "attracting"
        return "repelling"
    return "attracting"
