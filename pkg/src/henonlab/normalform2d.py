"""Perturbed two-dimensional normal form at the distinguished fixed point.

Conjugates the Henon map, as a jet centered at the fixed point, to
lambda_t (x + x^{q+1} + C x^{2q+1} + tail) in the first coordinate and
nu y + x h(x,y) in the second: strong-stable straightening, linearization
along the straightened manifold, then the three coefficient reductions.
The change of coordinates maps {y = const} to {y = const} exactly; the
price is h(0,0) = O(a) rather than 0, which is what every estimate
downstream actually consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, PreconditionError
from .henon import HenonParams, attracting_cycle, henon
from .series import (
    TruncSeries1,
    TruncSeries2,
    compose1,
    compose2,
    invert2,
    series1_to_2,
)

_STAGNATION = 1e-14
_RESONANCE = 1e-10


def henon_jet(params: HenonParams, D: int):
    """The map written at the fixed point: (2 x_q x + a y + x^2, a x)."""
    H1 = TruncSeries2.from_terms(
        {(1, 0): 2.0 * params.x_q, (0, 1): params.a, (2, 0): 1.0}, D
    )
    H2 = TruncSeries2.from_terms({(1, 0): params.a}, D)
    return H1, H2


def wss_graph(params: HenonParams, D: int) -> TruncSeries1:
    """Jet of the strong stable manifold as a graph x = w(y), centered coords.

    Solves 2 x_q w(y) + a y + w(y)^2 = w(a w(y)) order by order; the tangent
    is the nu-eigenvector slope nu/a = -a/lambda_t.  Returns the zero jet in
    the degenerate case a = 0, where W^ss is the vertical line itself.
    """
    if abs(params.nu) >= 1:
        raise PreconditionError("strong stable graph requires |nu| < 1")
    w = np.zeros(D + 1, dtype=complex)
    if params.a == 0:
        return TruncSeries1(w, D=D)
    w[1] = params.nu / params.a
    y_lin = TruncSeries1.identity(D)
    for k in range(2, D + 1):
        W = TruncSeries1(w, D=D)
        lhs = 2.0 * params.x_q * W + params.a * y_lin + W * W
        rhs = compose1(W, params.a * W)
        denom = params.lam - params.nu**k
        if abs(denom) < _RESONANCE:
            raise NumericalError(f"resonance in stable-graph recursion at order {k}")
        w[k] = -(lhs - rhs).coeffs[k] / denom
    return TruncSeries1(w, D=D)


def _koenigs(rho: TruncSeries1, nu: complex) -> TruncSeries1:
    """Linearizing coordinate psi with psi(rho(y)) = nu psi(y), psi'(0) = 1."""
    D = rho.D
    psi = np.zeros(D + 1, dtype=complex)
    psi[1] = 1.0
    for k in range(2, D + 1):
        P = TruncSeries1(psi, D=D)
        resid = (compose1(P, rho) - nu * P).coeffs[k]
        denom = nu**k - nu
        if abs(denom) < _RESONANCE:
            raise NumericalError(f"resonance in linearization at order {k}")
        psi[k] = -resid / denom
    return TruncSeries1(psi, D=D)


def _scale_argument(f: TruncSeries1, factor: complex) -> TruncSeries1:
    return TruncSeries1(f.coeffs * factor ** np.arange(f.D + 1), D=f.D)


def _conjugate(T, H):
    return compose2(compose2(T, H), invert2(T))


@dataclass(frozen=True)
class NormalForm2D:
    params: HenonParams
    D: int
    change: tuple          # phi as a jet pair at the fixed point
    change_inv: tuple
    normal: tuple          # the conjugated map pair
    C_at: complex
    wss_jet: TruncSeries1  # graph x = w(y) of W^ss_loc, centered coords
    rescale: complex       # the constant A with A^q = (q+1)-coefficient

    def to_normalized(self, X, Y):
        cx = np.asarray(X, dtype=complex) - self.params.x_q
        cy = np.asarray(Y, dtype=complex) - self.params.a * self.params.x_q
        return self.change[0](cx, cy), self.change[1](cx, cy)

    def from_normalized(self, xn, yn):
        return (
            self.params.x_q + self.change_inv[0](xn, yn),
            self.params.a * self.params.x_q + self.change_inv[1](xn, yn),
        )

    def xh_series(self) -> TruncSeries2:
        """x h(x,y): the second normal component minus its linear part nu y."""
        return self.normal[1] - self.params.nu * TruncSeries2.var_y(self.D)


def reduce(params: HenonParams, D: int | None = None) -> NormalForm2D:
    """Normal form of the map at the fixed point, through total degree D."""
    q = params.q
    if D is None:
        D = 2 * q + 4
    if D < 2 * q + 2:
        raise PreconditionError("truncation order must be at least 2q+2")
    lam, nu = params.lam, params.nu
    if abs(nu) * abs(lam) ** (2 * q) >= 1:
        raise PreconditionError("eigenvalue condition |nu| |lambda|^{2q} < 1 violated")

    H = henon_jet(params, D)
    var_x, var_y = TruncSeries2.var_x(D), TruncSeries2.var_y(D)
    change = (var_x, var_y)

    def apply(T):
        nonlocal H, change
        H = _conjugate(T, H)
        change = compose2(T, change)

    # straighten W^ss to {x = 0}
    w = wss_graph(params, D)
    apply((var_x - series1_to_2(w, "y"), var_y))

    # linearize along the straightened manifold; below the threshold the
    # nonlinear part of the restriction is O(|a|^3), far under any tolerance
    if abs(nu) >= 1e-8:
        rho = TruncSeries1(H[1].coeffs[0, :].copy(), D=D)
        psi = _koenigs(rho, nu)
        apply((var_x, series1_to_2(psi, "y")))

    # step 1: x-linear coefficient a1(y) -> constant lambda, via the
    # infinite product u(y) of b1 at geometrically shrunk arguments
    b1 = TruncSeries1(H[0].coeffs[1, :].copy(), D=D) * (1.0 / lam)
    u = TruncSeries1.constant(1.0, D)
    for n in range(200):
        g = _scale_argument(b1, nu**n)
        u = u * g
        if np.max(np.abs(g.coeffs[1:])) < _STAGNATION and abs(g.coeffs[0] - 1.0) < _STAGNATION:
            break
    if np.max(np.abs(u.coeffs[1:])) > _STAGNATION or abs(u.coeffs[0] - 1.0) > _STAGNATION:
        apply((series1_to_2(u, "y") * var_x, var_y))

    # step 2: a_k(y) -> constants for 2 <= k <= 2q+1
    xpow = [None, var_x]
    for _ in range(2 * q):
        xpow.append(xpow[-1] * var_x)
    for k in range(2, 2 * q + 2):
        a_k = TruncSeries1(H[0].coeffs[k, :].copy(), D=D)
        if np.max(np.abs(a_k.coeffs[1:])) < _STAGNATION:
            continue
        osc = TruncSeries1(np.append(0.0, a_k.coeffs[1:]), D=D)
        total = TruncSeries1.zero(D)
        ratio = nu * lam ** (k - 1)
        for n in range(400):
            term = _scale_argument(osc, nu**n) * lam ** (n * (k - 1))
            total = total + term
            if term.max_abs() < _STAGNATION:
                break
        else:
            raise NumericalError(f"coefficient sum stagnated too slowly (|ratio|={abs(ratio):.3f})")
        v = total * (1.0 / lam)
        apply((var_x + series1_to_2(v, "y") * xpow[k], var_y))

    # step 3: eliminate non-resonant constants; normalize the (q+1)-slot
    A = 1.0 + 0.0j
    for k in range(2, 2 * q + 2):
        a_k = H[0].coeff(k, 0)
        if k == q + 1:
            A = (a_k / lam) ** (1.0 / q)
            apply((A * var_x, var_y))
        elif k % q == 1 % q:
            continue
        else:
            denom = lam - lam**k
            if abs(denom) < 1e-8:
                raise NumericalError(f"resonance too close: |lam - lam^{k}| = {abs(denom):.2e}")
            apply((var_x + (a_k / denom) * xpow[k], var_y))

    C_at = H[0].coeff(2 * q + 1, 0) / lam
    return NormalForm2D(
        params=params, D=D, change=change, change_inv=invert2(change),
        normal=H, C_at=complex(C_at), wss_jet=w, rescale=complex(A),
    )


def conjugacy_residual(params: HenonParams, nf: NormalForm2D) -> float:
    """Max coefficient of change o H - normal o change over both components."""
    H = henon_jet(params, nf.D)
    lhs = compose2(nf.change, H)
    rhs = compose2(nf.normal, nf.change)
    return max((lhs[i] - rhs[i]).max_abs() for i in (0, 1))


# --- petal geometry -------------------------------------------------------

def petal_scale(q: int, t: float, rho: float = 0.15, chart: float = 0.18) -> float:
    """The region parameter R.

    Petals must stay inside the normal-form chart, |x| <= chart, which wants
    R large; the t > 0 rotation bound (1+t)^q < (R+q)/(R+q/2) wants R small.
    For q >= 2 these collide unless t is tiny, and we refuse rather than
    evaluate jets out of range.
    """
    R = 2.0 / rho**q
    if t > 0:
        g = (1.0 + t) ** q
        R = min(R, 0.85 * q * (1.0 - g / 2.0) / (g - 1.0))
    if R < math.sqrt(2.0) / chart**q:
        raise PreconditionError(
            f"t={t} too large for a chart-sized petal region at q={q}"
        )
    return R


def in_petal(x, q: int, R: float, slack: float = 0.0):
    w = np.asarray(x, dtype=complex) ** q
    lhs = (w.real + 0.5 / R) ** 2 + (np.abs(w.imag) - 0.5 / R) ** 2
    return lhs < 0.5 / R**2 + slack


def petal_label(x, q: int):
    ang = np.mod(np.angle(np.asarray(x, dtype=complex)), 2.0 * math.pi)
    return np.mod(np.rint((q * ang - math.pi) / (2.0 * math.pi)).astype(int), q)


def sample_petal(rng, n: int, q: int, R: float):
    """n points of the petal union, with their component labels."""
    xs = np.empty(n, dtype=complex)
    js = rng.integers(0, q, size=n)
    got = 0
    while got < n:
        m = 2 * (n - got) + 16
        sign = rng.integers(0, 2, size=m) * 2 - 1
        centers = (-1.0 + 1j * sign) / (2.0 * R)
        radii = np.sqrt(rng.uniform(0, 1, size=m)) / (math.sqrt(2.0) * R)
        w = centers + radii * np.exp(2j * math.pi * rng.uniform(0, 1, size=m))
        ok = ((w.real + 0.5 / R) ** 2 + (np.abs(w.imag) - 0.5 / R) ** 2 < 0.5 / R**2)
        ok &= np.abs(w) > 1e-3 / R  # keep clear of the fixed point itself
        w = w[ok][: n - got]
        ang = np.mod(np.angle(w), 2.0 * math.pi)
        xs[got : got + len(w)] = np.abs(w) ** (1.0 / q) * np.exp(
            1j * (ang + 2.0 * math.pi * js[got : got + len(w)]) / q
        )
        got += len(w)
    return xs, js


@dataclass(frozen=True)
class TrappingReport:
    region: str
    n_samples: int
    steps: int
    tolerance: float
    rotation_failures: list
    attraction_failures: list
    target: str
    max_final_distance: float
    rows: list = field(repr=False, default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.rotation_failures and not self.attraction_failures


def petal_check(params: HenonParams, nf: NormalForm2D, samples: int = 1000,
                steps: int = 500, tol: float = 1e-6, r_loc: float = 0.1,
                rho: float = 0.15, seed: int = 0) -> TrappingReport:
    """Sampled verification of petal rotation and trapping.

    Each sampled point of the petals (normalized coordinates) is mapped back to
    ambient coordinates and pushed one step to check the j -> j+p rotation;
    for t != 0 the forward orbit is then run out for `steps` applications of
    the map and compared with the Newton-located q-cycle (t > 0) or the fixed
    point (t < 0).  steps=0 checks rotation only.
    """
    if samples < 10:
        raise PreconditionError("sample count too small to mean anything")
    rng = np.random.default_rng(seed)
    q, t = params.q, params.t
    R = petal_scale(q, t, rho)
    xs, js = sample_petal(rng, samples, q, R)
    zs = r_loc * np.sqrt(rng.uniform(0, 1, samples)) * np.exp(2j * math.pi * rng.uniform(0, 1, samples))

    Px, Py = nf.from_normalized(xs, zs)
    Qx, Qy = henon(params, (Px, Py))
    nx, nz = nf.to_normalized(Qx, Qy)
    good = in_petal(nx, q, R, slack=1e-9) | (np.abs(nx) ** q < 1e-9)
    good &= petal_label(nx, q) == (js + params.p) % q
    good &= np.abs(nz) < r_loc * 1.5
    rotation_failures = [(complex(a), complex(b)) for a, b in zip(Px[~good], Py[~good])]

    attraction_failures: list = []
    target = "none (t=0: forward invariance only)" if t == 0 else "none (rotation only)"
    max_final = 0.0
    rows = []
    if t != 0 and steps > 0:
        if t > 0:
            cycle = attracting_cycle(params)
            target = f"attracting {q}-cycle"
            Ax, Ay = Px.copy(), Py.copy()
        else:
            rt = abs(t) / ((q + 1.0 / 3.0) * (math.tan(2 * math.pi / 9) / math.sqrt(1 + math.tan(2 * math.pi / 9) ** 2)))
            target = "fixed point"
            ax = rt ** (1.0 / q) * np.sqrt(rng.uniform(0, 1, samples)) * np.exp(2j * math.pi * rng.uniform(0, 1, samples))
            Ax, Ay = nf.from_normalized(ax, zs)
            cycle = np.array([[params.q_fixed[0], params.q_fixed[1]]], dtype=complex)
        start = np.column_stack([Ax, Ay])
        for _ in range(steps):
            Ax, Ay = henon(params, (Ax, Ay))
        dists = np.min(
            np.maximum(
                np.abs(Ax[:, None] - cycle[None, :, 0]),
                np.abs(Ay[:, None] - cycle[None, :, 1]),
            ),
            axis=1,
        )
        max_final = float(np.max(dists))
        bad = dists >= tol
        attraction_failures = [(complex(a), complex(b)) for a, b in zip(start[bad, 0], start[bad, 1])]
        rows = [
            (complex(sx), complex(sy), complex(ex), complex(ey), float(d), "pass" if d < tol else "fail")
            for sx, sy, ex, ey, d in zip(start[:, 0], start[:, 1], Ax, Ay, dists)
        ]
    return TrappingReport(
        region=f"petals R={R:.3f} r_loc={r_loc} (q={q}, t={t}, a={params.a})",
        n_samples=samples, steps=steps, tolerance=tol,
        rotation_failures=rotation_failures,
        attraction_failures=attraction_failures,
        target=target, max_final_distance=max_final, rows=rows,
    )
