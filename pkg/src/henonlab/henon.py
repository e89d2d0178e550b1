"""The Henon family H(x,y) = (x^2 + c + a y, a x) on the fixed-multiplier curve.

Parameters live on the curve where one fixed-point eigenvalue is
lambda_t = (1+t) e^{2 pi i p/q}; the other eigenvalue is nu = -a^2/lambda_t.
Includes the filtration-based escape classification of K+/J+ slices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, PreconditionError
from .poly1d import PolyParams, poly_params

FILTRATION_RADIUS = 3.5  # paper only requires r > 3


@dataclass(frozen=True)
class HenonParams:
    p: int
    q: int
    t: float
    a: complex
    lam: complex       # lambda_t, the distinguished eigenvalue
    c: complex         # curve value c_t(a)
    c_t: complex       # polynomial-family value at a = 0
    w: complex         # residual: c = c_t + a^2 w
    x_q: complex       # first coordinate of the fixed point
    nu: complex        # second eigenvalue -a^2/lambda_t

    @property
    def q_fixed(self):
        return (self.x_q, self.a * self.x_q)

    @property
    def poly(self) -> PolyParams:
        """The a = 0 member of the same multiplier family."""
        return poly_params((self.p, self.q), self.t)


def make_params(p_over_q, t: float, a: complex) -> HenonParams:
    pp = poly_params(p_over_q, t)
    if abs(t) >= 1.0 / (2 * pp.q):
        raise PreconditionError(f"|t| must be below 1/(2q) = {1.0/(2*pp.q)}")
    if abs(a) >= 0.5:
        raise PreconditionError("|a| must be below 1/2")
    a = complex(a)
    lam = pp.lam
    s = lam / 2.0 - a * a / (2.0 * lam)
    c = (1.0 - a * a) * s - s * s
    w = (-1.0 + lam - lam * lam) / (2.0 * lam) + (a * a) / (2.0 * lam) * (1.0 - 1.0 / (2.0 * lam))
    return HenonParams(
        p=pp.p, q=pp.q, t=float(t), a=a,
        lam=complex(lam), c=complex(c), c_t=pp.c, w=complex(w),
        x_q=complex(s), nu=complex(-a * a / lam),
    )


def henon(params: HenonParams, point):
    x, y = point
    return (x * x + params.c + params.a * y, params.a * x)


def henon_inv(params: HenonParams, point):
    if params.a == 0:
        raise PreconditionError("degenerate Jacobian: a=0 is not invertible")
    x, y = point
    u = y / params.a
    return (u, (x - (u * u + params.c)) / params.a)


def dhenon(params: HenonParams, point):
    """Differential [[2x, a], [a, 0]] at the point."""
    x, _ = point
    a = params.a
    return np.array([[2.0 * x, a], [a, 0.0]], dtype=complex)


def fixed_point_eigenvalues(params: HenonParams):
    """Eigenvalues of DH at the distinguished fixed point, largest first."""
    x = params.x_q
    disc = np.sqrt(x * x + params.a**2)
    mu1, mu2 = x + disc, x - disc
    return (mu1, mu2) if abs(mu1) >= abs(mu2) else (mu2, mu1)


def in_vplus(x, y, r=FILTRATION_RADIUS):
    return np.abs(x) >= np.maximum(np.abs(y), r)


def escape_times(params: HenonParams, X, Y, max_iter: int, r: float = FILTRATION_RADIUS):
    """Vectorized first-entry times into V+; -1 marks still-bounded orbits."""
    if r <= 3.0:
        raise PreconditionError("filtration radius must exceed 3")
    X = np.array(X, dtype=complex)
    Y = np.array(Y, dtype=complex)
    times = np.full(X.shape, -1, dtype=int)
    active = np.ones(X.shape, dtype=bool)
    for n in range(max_iter + 1):
        hit = active & in_vplus(X, Y, r)
        times[hit] = n
        active &= ~hit
        if not active.any() or n == max_iter:
            break
        Xa, Ya = X[active], Y[active]
        X[active] = Xa * Xa + params.c + params.a * Ya
        Y[active] = params.a * Xa
    return times


def classify_forward(params: HenonParams, point, max_iter: int, r: float = FILTRATION_RADIUS):
    """Escape iterate into V+ within max_iter, or None if bounded."""
    n = int(escape_times(params, [point[0]], [point[1]], max_iter, r)[0])
    return None if n < 0 else n


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray  # (n, 2) complex, rows are (x, y)
    meta: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).reshape(-1, 2)
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class EscapeGrid:
    xs: np.ndarray        # real axis samples
    ys: np.ndarray        # imaginary axis samples
    times: np.ndarray     # (len(ys), len(xs)) escape iterates, -1 bounded
    y_slice: complex
    boundary: PointCloud = field(repr=False)

    @property
    def escaped_fraction(self):
        return float(np.mean(self.times >= 0))


def jplus_slice(params: HenonParams, window, resolution: int, max_iter: int,
                y_slice: complex = 0.0, r: float = FILTRATION_RADIUS) -> EscapeGrid:
    """Escape-time grid on {y = const}; bounded cells touching escaped cells
    are emitted as the J+ slice sample cloud."""
    if resolution < 2 or resolution > 8192:
        raise PreconditionError("resolution out of range")
    re_min, re_max, im_min, im_max = window
    xs = np.linspace(re_min, re_max, resolution)
    ys = np.linspace(im_min, im_max, resolution)
    X = xs[None, :] + 1j * ys[:, None]
    Y = np.full_like(X, complex(y_slice))
    times = escape_times(params, X, Y, max_iter, r)
    bounded = times < 0
    esc = ~bounded
    neighbor_esc = np.zeros_like(esc)
    neighbor_esc[1:, :] |= esc[:-1, :]
    neighbor_esc[:-1, :] |= esc[1:, :]
    neighbor_esc[:, 1:] |= esc[:, :-1]
    neighbor_esc[:, :-1] |= esc[:, 1:]
    edge = bounded & neighbor_esc
    pts = X[edge]
    cloud = PointCloud(
        points=np.column_stack([pts, np.full(len(pts), complex(y_slice))]),
        meta=f"jplus-slice y={y_slice} res={resolution} max_iter={max_iter}",
    )
    return EscapeGrid(xs=xs, ys=ys, times=times, y_slice=complex(y_slice), boundary=cloud)


def iterate(params: HenonParams, point, n: int):
    pt = point
    for _ in range(n):
        pt = henon(params, pt)
    return pt


def attracting_cycle(params: HenonParams, tol: float = 1e-12, max_newton: int = 50):
    """Newton-polished attracting q-cycle for t > 0, as an array of q points.

    Seeded from the attracting cycle of the a=0 polynomial (critical orbit),
    which is O(a) away from the Henon cycle.
    """
    if params.t <= 0:
        raise PreconditionError("attracting q-cycle exists for t > 0 only")
    q = params.q
    # polynomial cycle via critical orbit, then lift
    z = 0.0 + 0.0j
    for _ in range(2000):
        z = z * z + params.c_t
    seed = np.array([z, params.a * (np.sqrt(z - params.c_t + 0j))], dtype=complex)
    pt = (complex(seed[0]), complex(seed[1]))
    for _ in range(500):
        pt = henon(params, pt)
    vec = np.array(pt, dtype=complex)
    for _ in range(max_newton):
        cur = (vec[0], vec[1])
        jac = np.eye(2, dtype=complex)
        for _ in range(q):
            jac = dhenon(params, cur) @ jac
            cur = henon(params, cur)
        g = np.array([cur[0] - vec[0], cur[1] - vec[1]], dtype=complex)
        step = np.linalg.solve(jac - np.eye(2), -g)
        vec = vec + step
        if np.max(np.abs(step)) < tol:
            break
    else:
        raise NumericalError("Newton failed to locate the attracting cycle")
    cycle = np.empty((q, 2), dtype=complex)
    cur = (vec[0], vec[1])
    for i in range(q):
        cycle[i] = cur
        cur = henon(params, cur)
    if abs(cur[0] - cycle[0, 0]) + abs(cur[1] - cycle[0, 1]) > math.sqrt(tol):
        raise NumericalError("located orbit is not q-periodic")
    return cycle
