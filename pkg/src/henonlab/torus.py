"""Solid tori of vertical-like disks and the graph transform acting on them.

A torus is a family of holomorphic disks phi_s: D_r -> C indexed by dyadic
angles; the transform sends a torus to the vertical-like preimage components
of its fibers, producing f_n -> f* whose image parametrizes J+ inside the
bidisk.  The semiconjugacy sigma(s,z) = (2s, a phi_s(z)) and the polynomial
model psi live here too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, PreconditionError
from .henon import FILTRATION_RADIUS, HenonParams, PointCloud, henon
from .poly1d import LoopSample, equipotential_loop

NODE_FRACTION = 0.9  # collocation radius as a fraction of the disk radius


@dataclass(frozen=True)
class SolidTorus:
    coeffs: np.ndarray      # (n_angles, disk_degree+1) Taylor coefficients
    level: int              # iteration index
    r: float = FILTRATION_RADIUS

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        n = c.shape[0]
        if c.ndim != 2 or n < 2 or (n & (n - 1)) != 0:
            raise PreconditionError("torus needs a power-of-two number of angle fibers")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n_angles(self):
        return self.coeffs.shape[0]

    @property
    def disk_degree(self):
        return self.coeffs.shape[1] - 1

    @property
    def centers(self):
        return self.coeffs[:, 0]

    def nodes(self):
        m = 2 * self.disk_degree
        return NODE_FRACTION * self.r * np.exp(2j * math.pi * np.arange(m) / m)

    def eval(self, k, z):
        """phi at angle index k (array ok) and points z (broadcast)."""
        c = self.coeffs[np.asarray(k) % self.n_angles]
        acc = np.zeros(np.broadcast(np.asarray(k), np.asarray(z)).shape, dtype=complex)
        for m in range(self.disk_degree, -1, -1):
            acc = acc * z + (c[..., m] if c.ndim > 1 else c[m])
        return acc

    def node_values(self):
        """(n_angles, 2d) matrix of phi_s at the collocation nodes."""
        z = self.nodes()[None, :]
        acc = np.zeros((self.n_angles, z.shape[1]), dtype=complex)
        for m in range(self.disk_degree, -1, -1):
            acc = acc * z + self.coeffs[:, m][:, None]
        return acc

    def max_slope(self):
        """Upper bound for sup |phi_s'| on the collocation circle."""
        m = np.arange(1, self.disk_degree + 1)
        radii = (NODE_FRACTION * self.r) ** (m - 1)
        return float(np.max(np.sum(np.abs(self.coeffs[:, 1:]) * m * radii, axis=1)))

    def separation(self):
        """min over s of the sup-distance between fibers at s and s + 1/2."""
        vals = self.node_values()
        half = self.n_angles // 2
        d = np.max(np.abs(vals - np.roll(vals, -half, axis=0)), axis=1)
        return float(np.min(d))


def torus_seed(params: HenonParams, loop0: LoopSample, disk_degree: int = 8,
               n_angles: int | None = None) -> SolidTorus:
    """Constant-in-z disks over the seed equipotential: phi_s = gamma_0(s)."""
    if n_angles is not None and n_angles != loop0.N:
        raise PreconditionError("n_angles does not match the seed loop")
    if loop0.level <= 0:
        raise PreconditionError("seed loop must sit at a positive Green level")
    coeffs = np.zeros((loop0.N, disk_degree + 1), dtype=complex)
    coeffs[:, 0] = loop0.values
    return SolidTorus(coeffs=coeffs, level=0)


def _branch_seeds(params: HenonParams, centers: np.ndarray) -> np.ndarray:
    """Continuity-in-s preimages of the center loop, the Newton seeds.

    Same branch rule as the polynomial pullback: larger real part at s = 0,
    proximity to the previous sample afterwards.
    """
    n = len(centers)
    targets = centers[(2 * np.arange(n)) % n]
    roots = np.sqrt(targets - params.c)
    out = np.empty(n, dtype=complex)
    out[0] = max((roots[0], -roots[0]), key=lambda v: (v.real, v.imag))
    prev = out[0]
    for k in range(1, n):
        r = roots[k]
        if min(abs(r - prev), abs(r + prev)) > 2.0 * abs(r):
            raise NumericalError(f"resolution too coarse: ambiguous branch at angle {k}")
        prev = r if abs(r - prev) <= abs(r + prev) else -r
        out[k] = prev
    return out


def graph_transform(params: HenonParams, torus: SolidTorus,
                    newton_tol: float = 1e-13, max_newton: int = 50) -> SolidTorus:
    """One application of the operator: solve, per angle s and node z_j,

        x^2 + c + a z_j = phi_{2s}(a x)

    for x by Newton seeded at the 1-D pullback branch, then refit the degree-d
    Taylor coefficients on the collocation circle (least squares = truncated
    DFT on the uniform node grid)."""
    if params.a == 0:
        raise PreconditionError("graph transform requires a != 0")
    n, d = torus.n_angles, torus.disk_degree
    a, c = params.a, params.c
    seeds = _branch_seeds(params, torus.centers)
    z = torus.nodes()[None, :]
    tcoeffs = torus.coeffs[(2 * np.arange(n)) % n]

    def target(xa):
        acc = np.zeros_like(xa)
        for m in range(d, -1, -1):
            acc = acc * xa + tcoeffs[:, m][:, None]
        return acc

    def target_deriv(xa):
        acc = np.zeros_like(xa)
        for m in range(d, 0, -1):
            acc = acc * xa + m * tcoeffs[:, m][:, None]
        return acc

    X = np.broadcast_to(seeds[:, None], (n, z.shape[1])).copy()
    converged = np.zeros(X.shape, dtype=bool)
    for _ in range(max_newton):
        g = X * X + c + a * z - target(a * X)
        gp = 2.0 * X - a * a * target_deriv(a * X)
        step = g / gp
        X = X - step
        converged = np.abs(step) <= newton_tol * (1.0 + np.abs(X))
        if converged.all():
            break
    if not converged.all():
        k, j = np.argwhere(~converged)[0]
        raise NumericalError(f"Newton stalled at angle {k}/{n}, node {j}")
    # the two preimage labels must follow the seeded branches
    if np.any(np.abs(X - seeds[:, None]) > np.abs(X + seeds[:, None])):
        raise NumericalError("resolution too coarse: node left its branch")

    m2 = 2 * d
    dft = np.fft.fft(X, axis=1)[:, : d + 1] / m2
    scale = (NODE_FRACTION * torus.r) ** np.arange(d + 1)
    return SolidTorus(coeffs=dft / scale, level=torus.level + 1)


@dataclass(frozen=True)
class TorusResult:
    torus: SolidTorus
    gaps: np.ndarray          # sup-norm Cauchy gaps per iteration
    separations: np.ndarray   # fiber separation per iteration

    @property
    def final_gap(self):
        return float(self.gaps[-1])


def torus_fixed_point(params: HenonParams, n_iters: int, n_angles: int,
                      disk_degree: int = 8) -> TorusResult:
    """n_iters-fold graph transform of the seed torus, with certificates."""
    if n_iters < 1:
        raise PreconditionError("n_iters must be >= 1")
    loop0 = equipotential_loop(params.poly, n_angles)
    torus = torus_seed(params, loop0, disk_degree)
    gaps = np.empty(n_iters)
    seps = np.empty(n_iters)
    vals = torus.node_values()
    for i in range(n_iters):
        torus = graph_transform(params, torus)
        nxt = torus.node_values()
        gaps[i] = float(np.max(np.abs(nxt - vals)))
        seps[i] = torus.separation()
        vals = nxt
    return TorusResult(torus=torus, gaps=gaps, separations=seps)


def phi_oa2_residual(params: HenonParams, torus: SolidTorus,
                     loop: LoopSample) -> float:
    """sup over fibers and nodes of |phi_s(z) - gamma(s) + a z / (2 gamma(s))|.

    The loop must be the Caratheodory loop sampled on the same angle grid;
    the residual is the order-a^2 tail of the disk expansion.
    """
    if loop.N != torus.n_angles:
        raise PreconditionError("loop and torus angle grids differ")
    g = loop.values[:, None]
    z = torus.nodes()[None, :]
    resid = torus.node_values() - g + params.a * z / (2.0 * g)
    return float(np.max(np.abs(resid)))


def sigma(params: HenonParams, fstar: SolidTorus, point):
    """The semiconjugate model map (s, z) -> (2s mod 1, a phi_s(z)).

    Angles are snapped to the torus grid (dyadic angles are exact under
    doubling).  Requires a converged torus to mean anything.
    """
    s, z = point
    k = int(round(s * fstar.n_angles)) % fstar.n_angles
    zp = params.a * complex(fstar.eval(k, z))
    if abs(zp) >= fstar.r:
        raise NumericalError("image left D_r: sigma is not into")
    return ((2.0 * s) % 1.0, zp)


def julia_from_sigma(params: HenonParams, fstar: SolidTorus, depth: int = 12,
                     z_seeds=(0.0, 0.5, 0.5j, -0.5, -0.5j)) -> PointCloud:
    """J sampled as f* of deep sigma-orbits of a seed grid.

    The nested intersection of sigma-images is realized by forward orbits:
    sigma contracts the disk coordinate geometrically, so depth iterations
    land within machine precision of the attractor.  Seed angles are taken
    at k / (N 2^depth) so that the doubled angles sweep the whole fiber grid
    instead of collapsing onto angle zero (doubling is nilpotent on the
    dyadic grid itself); off-grid ancestors snap to the nearest fiber, an
    error the z-contraction wipes out.
    """
    n = fstar.n_angles
    if depth < 1:
        raise PreconditionError("depth must be >= 1")
    s = np.tile(np.arange(n) / (n * 2.0**depth), len(z_seeds))
    z = np.repeat(np.asarray(z_seeds, dtype=complex) * fstar.r, n)
    for _ in range(depth):
        k = np.rint(s * n).astype(int) % n
        z = params.a * fstar.eval(k, z)
        if np.max(np.abs(z)) >= fstar.r:
            raise NumericalError("image left D_r: sigma is not into")
        s = (2.0 * s) % 1.0
    k = np.rint(s * n).astype(int) % n
    x = fstar.eval(k, z)
    pts = np.column_stack([x, z])
    return PointCloud(points=np.unique(pts, axis=0),
                      meta=f"julia-from-sigma depth={depth} n_angles={n}")


def semiconjugacy_residual(params: HenonParams, fstar: SolidTorus,
                           sample_count: int = 4096, seed: int = 0) -> float:
    """sup over samples of dist(H(f*(s,z)), f*(sigma(s,z))), max-norm on C^2."""
    rng = np.random.default_rng(seed)
    n = fstar.n_angles
    k = rng.integers(0, n, sample_count)
    z = NODE_FRACTION * fstar.r * np.sqrt(rng.uniform(0, 1, sample_count)) \
        * np.exp(2j * math.pi * rng.uniform(0, 1, sample_count))
    x = fstar.eval(k, z)
    hx, hy = henon(params, (x, z))
    z1 = params.a * x
    x1 = fstar.eval((2 * k) % n, z1)
    return float(np.max(np.maximum(np.abs(hx - x1), np.abs(hy - z1))))


def model_psi(params: HenonParams, eps: float, point):
    """The quotient model map psi(zeta, z) = (p_t(zeta), eps zeta - eps^2 z / (2 zeta))."""
    zeta, z = point
    if zeta == 0:
        raise PreconditionError("model map undefined at zeta = 0")
    return (zeta * zeta + params.c_t, eps * zeta - eps * eps * z / (2.0 * zeta))


def model_attractor(params: HenonParams, loop: LoopSample, eps: float,
                    depth: int = 12, z_seeds=(0.0, 0.5, -0.5)) -> PointCloud:
    """Iterate psi on J_{p_t} x D_r samples, tracking the base point by angle
    doubling on the loop grid (stable, unlike iterating p_t on J directly).
    Seed angles are staggered below the grid as in julia_from_sigma."""
    n = loop.N
    s = np.tile(np.arange(n) / (n * 2.0**depth), len(z_seeds))
    z = np.repeat(np.asarray(z_seeds, dtype=complex) * FILTRATION_RADIUS, n)
    for _ in range(depth):
        zeta = loop.values[np.rint(s * n).astype(int) % n]
        if np.min(np.abs(zeta)) == 0:
            raise PreconditionError("model map undefined at zeta = 0")
        z = eps * zeta - eps * eps * z / (2.0 * zeta)
        s = (2.0 * s) % 1.0
    pts = np.column_stack([loop.values[np.rint(s * n).astype(int) % n], z])
    return PointCloud(points=np.unique(pts, axis=0), meta=f"model-psi eps={eps} depth={depth}")
