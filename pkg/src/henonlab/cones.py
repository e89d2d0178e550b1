"""Sampled cone-field hyperbolicity checks, local (normalized) and global.

Local checks run in the normal-form chart against the Euclidean metric and
the sector bounds.  Global checks run on the neighborhood V of the Julia set
with a distance-to-boundary weighted surrogate for the hyperbolic density;
every verdict records which metric certified it and the language is always
"verified at samples", never "proven".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import NumericalError, PreconditionError
from .henon import FILTRATION_RADIUS, HenonParams, henon
from .normalform2d import NormalForm2D, reduce
from .poly1d import (
    BASE_RADIUS,
    EPS0,
    EPS1,
    caratheodory,
    equipotential_loop,
    green,
    repelling_inner_radius,
)

VERTICAL_SENTINEL = 1e15  # reported when DH is singular (a = 0)
N_DIRECTIONS = 16


def eps2(q: int) -> float:
    """Constant in the t<0 expansion estimate."""
    return 1.0 / (16.0 * (q + 1))


def expansion_estimate_margin(q: int, t: float, xq_abs):
    """LHS - RHS of the sector expansion estimate at |x|^q = xq_abs.

    LHS is the horizontal-cone factor |lambda_t| (1 + (q+1/2) eps1 |x|^q);
    RHS is (1 + eps2 |t|)(1 + eps1/16 |x|^q).  Positive margin means the
    estimate holds at the sample.
    """
    xq_abs = np.asarray(xq_abs, dtype=float)
    lam_abs = abs(1.0 + t)
    lhs = lam_abs * (1.0 + (q + 0.5) * EPS1 * xq_abs)
    rhs = (1.0 + eps2(q) * abs(t)) * (1.0 + (EPS1 / 16.0) * xq_abs)
    return lhs - rhs


def in_repelling_sector(params, x, rho: float = 0.15):
    """Sector membership in normalized coordinates (annular for t < 0)."""
    x = np.asarray(x, dtype=complex)
    w = x**params.q
    ok = (w.real > EPS0 * np.abs(w.imag)) & (np.abs(w) < rho**params.q)
    if params.t < 0:
        ok &= np.abs(w) > repelling_inner_radius(params)
    return ok


def sector_samples(params: HenonParams, n: int, rho: float = 0.15,
                   r_loc: float = 0.1, seed: int = 0) -> np.ndarray:
    """n normalized-coordinate points of W^- = sector x D_{r_loc}."""
    rng = np.random.default_rng(seed)
    out = np.empty((n, 2), dtype=complex)
    got = 0
    while got < n:
        m = 4 * (n - got) + 32
        x = rho * np.sqrt(rng.uniform(0, 1, m)) * np.exp(2j * math.pi * rng.uniform(0, 1, m))
        x = x[in_repelling_sector(params, x, rho)][: n - got]
        z = r_loc * np.sqrt(rng.uniform(0, 1, len(x))) * np.exp(2j * math.pi * rng.uniform(0, 1, len(x)))
        out[got : got + len(x), 0] = x
        out[got : got + len(x), 1] = z
        got += len(x)
    return out


@dataclass(frozen=True)
class ConeReport:
    region: str
    samples: int
    worst_h_expansion: float
    worst_v_expansion: float
    invariance_failures: list
    worst_h_margin: float          # min measured/required over samples
    n_directions: int = N_DIRECTIONS
    metric: str = "euclidean (normalized chart)"
    extras: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        if self.invariance_failures or self.worst_h_expansion <= 1.0 or self.worst_v_expansion <= 1.0:
            return "FAIL"
        return "PASS"


def _direction_frame():
    beta = 2.0 * math.pi * np.arange(N_DIRECTIONS) / N_DIRECTIONS
    return np.exp(1j * beta)


def local_cone_check(params: HenonParams, nf: NormalForm2D, sample_grid,
                     rho: float = 0.15) -> ConeReport:
    """Cone invariance and expansion for the normal-form map at the samples.

    Horizontal cones |xi| >= |eta| push forward with measured expansion
    checked against |lambda_t|(1 + (q+1/2) eps1 |x|^q); vertical cones
    |xi| <= |x|^{2q} |eta| pull back with the expansion recorded.  Since the
    differential is complex-linear, boundary directions are scanned with
    xi = 1 and eta on a root-of-unity frame.
    """
    pts = np.asarray(sample_grid, dtype=complex).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    if not np.all(in_repelling_sector(params, x, rho)):
        raise PreconditionError("sample outside the repelling sector")
    q = params.q
    N1, N2 = nf.normal
    J11 = N1.partial_x()(x, y)
    J12 = N1.partial_y()(x, y)
    J21 = N2.partial_x()(x, y)
    J22 = N2.partial_y()(x, y)
    e = _direction_frame()[None, :]

    xh = nf.xh_series()
    n_at = max(float(np.max(np.abs(xh.partial_x()(x, y)))),
               float(np.max(np.abs(xh.partial_y()(x, y)))))

    # horizontal cones, forward
    xi_p = J11[:, None] + J12[:, None] * e
    eta_p = J21[:, None] + J22[:, None] * e
    h_invariant = np.abs(xi_p) > np.abs(eta_p)
    h_norm = np.maximum(np.abs(xi_p), np.abs(eta_p))
    h_bound = np.abs(params.lam) * (1.0 + (q + 0.5) * EPS1 * np.abs(x) ** q)
    h_margin = h_norm / h_bound[:, None]

    # vertical cones, backward from the image point
    x1 = N1(x, y)
    det = J11 * J22 - J12 * J21
    failures = []
    if float(np.min(np.abs(det))) < 1e-13:
        v_invariant = np.ones_like(h_invariant)
        worst_v = VERTICAL_SENTINEL
    else:
        open_img = np.abs(x1) ** (2 * q)
        xi_b = (J22[:, None] * open_img[:, None] * e - J12[:, None]) / det[:, None]
        eta_b = (-J21[:, None] * open_img[:, None] * e + J11[:, None]) / det[:, None]
        v_invariant = np.abs(xi_b) < np.abs(x[:, None]) ** (2 * q) * np.abs(eta_b)
        v_norm = np.maximum(np.abs(xi_b), np.abs(eta_b)) / np.maximum(open_img[:, None], 1.0)
        worst_v = float(np.min(v_norm))

    bad = ~(h_invariant.all(axis=1) & v_invariant.all(axis=1))
    failures = [(complex(a), complex(b)) for a, b in zip(x[bad], y[bad])]
    return ConeReport(
        region=f"W- normalized, q={q}, t={params.t}, a={params.a}, rho={rho}",
        samples=len(x),
        worst_h_expansion=float(np.min(h_norm)),
        worst_v_expansion=worst_v,
        invariance_failures=failures,
        worst_h_margin=float(np.min(h_margin)),
        extras={
            "n_at": n_at,
            "v_bound": 1.0 / (abs(params.nu) + 1.5 * n_at) if n_at + abs(params.nu) > 0 else VERTICAL_SENTINEL,
            "min_abs_xq": float(np.min(np.abs(x) ** q)),
            "marginal": params.t == 0,
        },
    )


@dataclass(frozen=True)
class VSpec:
    """Membership data for the neighborhood V of J+ inside the bidisk.

    V is the equipotential-bounded collar of the Julia set minus the two
    straightened tubes, with only the repelling sectors of the tubes kept.
    For the product-metric statistics the whole tube B is left to the local
    (normalized-chart) cone check.
    """

    r: float = FILTRATION_RADIUS
    R: float = BASE_RADIUS
    rho_prime: float = 0.2
    rho: float = 0.15
    collar: float = 0.05       # basin-side thickness of the J neighborhood
    crit_strip: float = 0.5    # exclude |2x| below this (tube through the critical point)
    tau: float = 0.25          # vertical cone aperture
    tau_nest: float | None = None  # nesting-report aperture; default 0.8 (rho/2)^{2q}

    def validate(self, params: HenonParams):
        if self.tau >= 1 or self.tau <= 0:
            raise PreconditionError("tau must lie in (0,1)")
        if 2 * abs(params.poly.alpha) <= 2 * self.rho_prime:
            raise PreconditionError("V_spec inconsistent: B' overlapping B")


def julia_slice_tree(params: HenonParams, n: int = 2048, iters: int = 48) -> cKDTree:
    """Spatial index over a sampled J_{p_t}, the backbone of the V collar."""
    vals = caratheodory(params.poly, n, iters).loop.values
    return cKDTree(np.column_stack([vals.real, vals.imag]))


def in_V(params: HenonParams, nf: NormalForm2D, vs: VSpec, x, y,
         j_tree: cKDTree | None = None):
    """Membership in the desk realization of the neighborhood V."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    alpha = params.poly.alpha
    ok = (np.abs(y) <= vs.r) & (np.abs(2 * x) >= vs.crit_strip)
    G = green(params.poly, x, iters=80)
    ok &= G <= math.log(vs.R) / 2.0 + 1e-12
    if j_tree is None:
        j_tree = julia_slice_tree(params)
    d, _ = j_tree.query(np.column_stack([x.real.ravel(), x.imag.ravel()]))
    ok &= (G > 0) | (d.reshape(x.shape) <= vs.collar)
    # tube B: keep repelling sectors only
    in_B = np.abs(x - alpha) <= vs.rho_prime
    xn, _ = nf.to_normalized(x, y)
    ok &= ~in_B | in_repelling_sector(params, xn, vs.rho)
    # tube B' = H^{-1}(B) - B: keep preimages of the repelling sectors
    hx, hy = henon(params, (x, y))
    in_Bp = (np.abs(hx - alpha) <= vs.rho_prime) & ~in_B & (np.abs(x) <= vs.r)
    hxn, _ = nf.to_normalized(hx, hy)
    ok &= ~in_Bp | in_repelling_sector(params, hxn, vs.rho)
    return ok


def _boundary_tree(params, nf, vs: VSpec, n_loop: int = 512):
    """Sample stand-ins for the boundary of U_t: the outer equipotential and
    the thin attracting tube (critical orbit plus the axis spine inside B)."""
    outer = equipotential_loop(params.poly, n_loop, level=math.log(vs.R)).values
    u = np.geomspace(1e-4, vs.rho_prime**params.q, 64)  # spine: arg(x^q) = pi
    spines = []
    for j in range(params.q):
        xn = u ** (1.0 / params.q) * np.exp(1j * (math.pi + 2 * math.pi * j) / params.q)
        spines.append(nf.from_normalized(xn, np.zeros_like(xn))[0])
    orbit = np.empty(128, dtype=complex)
    z = 0.0 + 0.0j
    for k in range(len(orbit)):
        orbit[k] = z
        z = z * z + params.c_t
    pts = np.concatenate([outer] + spines + [orbit])
    return cKDTree(np.column_stack([pts.real, pts.imag]))


def global_cone_check(params: HenonParams, v_spec: VSpec | None = None,
                      sample_count: int = 2000, seed: int = 0,
                      nf: NormalForm2D | None = None) -> ConeReport:
    """Sampled cone verification on the collar V minus the tube B.

    The primary metric is the Euclidean product metric; a sample whose
    horizontal expansion is marginal there is retried against the
    distance-to-boundary weighted surrogate (Koebe-style density) before
    being counted as a failure.  Vertical-cone statistics are taken over
    samples whose backward image stays in the region, matching the
    two-endpoint hypothesis of the invariance statement.
    """
    if params.a == 0:
        raise PreconditionError("global cone check requires a != 0")
    vs = v_spec or VSpec()
    vs.validate(params)
    if nf is None:
        nf = reduce(params)
    rng = np.random.default_rng(seed)
    j_tree = julia_slice_tree(params)
    xs = np.empty(0, dtype=complex)
    ys = np.empty(0, dtype=complex)
    alpha = params.poly.alpha
    while len(xs) < sample_count:
        m = 4 * (sample_count - len(xs)) + 64
        x = 2.5 * np.sqrt(rng.uniform(0, 1, m)) * np.exp(2j * math.pi * rng.uniform(0, 1, m))
        y = vs.r * np.sqrt(rng.uniform(0, 1, m)) * np.exp(2j * math.pi * rng.uniform(0, 1, m))
        keep = in_V(params, nf, vs, x, y, j_tree) & (np.abs(x - alpha) > vs.rho_prime)
        xs = np.append(xs, x[keep])
        ys = np.append(ys, y[keep])
    xs, ys = xs[:sample_count], ys[:sample_count]

    tree = _boundary_tree(params, nf, vs)

    def density(z):
        d, _ = tree.query(np.column_stack([z.real, z.imag]))
        return 1.0 / np.clip(d, 0.15, 3.0)  # bounded like the true density on V - B''

    a = params.a
    e = _direction_frame()[None, :]
    x1, _ = henon(params, (xs, ys))
    sig0, sig1 = density(xs), density(x1)

    # horizontal cones under DH, Euclidean frame (xi, eta) = (1, e)
    xi_p = 2.0 * xs[:, None] + a * e
    eta_p = a * np.ones_like(xi_p)
    h_inv = np.abs(xi_p) > np.abs(eta_p)
    h_exp_e = np.maximum(np.abs(xi_p), np.abs(eta_p))
    euclid_ok = np.min(h_exp_e, axis=1) > 1.0
    # weighted retry on the same frame reweighted to the surrogate density
    xi_w = 2.0 * xs[:, None] + a * (sig0[:, None] * e)
    h_exp_w = np.maximum(sig1[:, None] * np.abs(xi_w), np.abs(eta_p)) / sig0[:, None]
    weighted_ok = np.min(h_exp_w, axis=1) > 1.0

    # vertical cones under DH^{-1}: boundary |xi| = tau |eta|, eta = 1,
    # restricted to samples whose preimage stays clear of the critical tube
    xpre = ys / a  # first coordinate of H^{-1}(x, y)
    valid = np.abs(2.0 * xpre) >= vs.crit_strip
    xi_b = np.full((len(xs), N_DIRECTIONS), 1.0 / a, dtype=complex)
    eta_b = (vs.tau * e - 2.0 * xpre[:, None] / a) / a
    v_inv = np.abs(xi_b) < vs.tau * np.abs(eta_b)
    v_exp = np.maximum(np.abs(xi_b), np.abs(eta_b))  # ||v|| = max(tau, 1) = 1
    v_inv_ok = v_inv.all(axis=1) | ~valid

    bad = ~(h_inv.all(axis=1) & v_inv_ok & (euclid_ok | weighted_ok))
    failures = [(complex(p), complex(r)) for p, r in zip(xs[bad], ys[bad])]

    worst_h = float(np.min(np.where(euclid_ok, np.min(h_exp_e, axis=1),
                                    np.min(h_exp_w, axis=1))))
    worst_v = float(np.min(v_exp[valid])) if valid.any() else float("nan")

    # nesting of the narrow vertical cone inside the normalized cone at dB
    tau_nest = vs.tau_nest if vs.tau_nest is not None else min(0.005, 0.8 * (vs.rho / 2.0) ** (2 * params.q))
    nest_x = params.poly.alpha + vs.rho_prime * np.exp(2j * math.pi * np.arange(64) / 64)
    nest_keep = in_repelling_sector(params, nf.to_normalized(nest_x, np.zeros(64))[0], vs.rho * 1.5)
    nest_x = nest_x[nest_keep]
    nest_ratio = float("nan")
    if len(nest_x):
        c1, c2 = nf.change
        cx = nest_x - params.x_q
        cy = np.zeros_like(cx) - params.a * params.x_q
        d1x, d1y = c1.partial_x()(cx, cy), c1.partial_y()(cx, cy)
        d2x, d2y = c2.partial_x()(cx, cy), c2.partial_y()(cx, cy)
        xin = tau_nest
        xn = nf.to_normalized(nest_x, np.zeros_like(nest_x))[0]
        ratios = []
        for ph in _direction_frame():
            xi_t = d1x * xin * ph + d1y
            eta_t = d2x * xin * ph + d2y
            ratios.append(np.abs(xi_t) / (np.abs(xn) ** (2 * params.q) * np.abs(eta_t)))
        nest_ratio = float(np.max(ratios))

    vertical_floor = 0.95 / abs(a)
    return ConeReport(
        region=f"V global, t={params.t}, a={params.a}",
        samples=sample_count,
        worst_h_expansion=worst_h,
        worst_v_expansion=worst_v,
        invariance_failures=failures,
        worst_h_margin=worst_h,
        metric="euclidean + distance-weighted (Koebe surrogate)",
        extras={
            "euclid_certified": int(np.sum(euclid_ok)),
            "weighted_certified": int(np.sum(weighted_ok & ~euclid_ok)),
            "vertical_skipped_preimage": int(np.sum(~valid)),
            "vertical_floor": vertical_floor,
            "vertical_ok": worst_v >= vertical_floor,
            "tau": vs.tau,
            "tau_nest": tau_nest,
            "tau_nest_below_paper_bound": tau_nest < (vs.rho / 2.0) ** (2 * params.q),
            "nesting_ratio_at_dB": nest_ratio,
            "nesting_holds": bool(nest_ratio < 1.0) if nest_ratio == nest_ratio else False,
            "marginal": params.t == 0,
        },
    )


@dataclass(frozen=True)
class ScanCell:
    t: float
    a: float
    verdict: str
    worst_h: float
    worst_v: float


def hyperbolicity_scan(p_over_q, t_values, a_values, local_samples: int = 400,
                       seed: int = 0) -> list:
    """PASS/MARGINAL/FAIL verdict per (t, a) cell from the local cone check
    plus the global vertical floor; a = 0 and out-of-range cells are EXCLUDED."""
    from .henon import make_params

    cells = []
    for t in t_values:
        for a in a_values:
            if a == 0:
                cells.append(ScanCell(t=float(t), a=float(a), verdict="EXCLUDED",
                                      worst_h=float("nan"), worst_v=float("nan")))
                continue
            try:
                params = make_params(p_over_q, float(t), complex(a))
                nf = reduce(params)
                rep = local_cone_check(params, nf, sector_samples(params, local_samples, seed=seed))
            except (PreconditionError, NumericalError):
                cells.append(ScanCell(t=float(t), a=float(a), verdict="EXCLUDED",
                                      worst_h=float("nan"), worst_v=float("nan")))
                continue
            # at t = 0 the expansion margin decays to zero toward W^ss, so a
            # sampled PASS is never uniform: report MARGINAL instead
            verdict = "MARGINAL" if t == 0 and rep.verdict == "PASS" else rep.verdict
            cells.append(ScanCell(t=float(t), a=float(a), verdict=verdict,
                                  worst_h=rep.worst_h_expansion, worst_v=rep.worst_v_expansion))
    return cells
