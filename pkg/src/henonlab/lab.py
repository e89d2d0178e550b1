"""Numerical experiments: Hausdorff continuity of J and J+, connectivity
scans over the parameter disk, and the one-dimensional radial demo."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np
from scipy.spatial import cKDTree

from .errors import NumericalError, PreconditionError
from .henon import HenonParams, PointCloud, jplus_slice, make_params
from .poly1d import caratheodory
from .torus import julia_from_sigma, torus_fixed_point

DEFAULT_WINDOW = (-2.2, 2.2, -2.2, 2.2)


def hausdorff(A: PointCloud, B: PointCloud) -> float:
    """Hausdorff distance between point clouds in C^2 (sup-min, Euclidean R^4)."""
    if len(A) == 0 or len(B) == 0:
        raise PreconditionError("Hausdorff distance of an empty cloud")

    def embed(c):
        p = c.points
        return np.column_stack([p[:, 0].real, p[:, 0].imag, p[:, 1].real, p[:, 1].imag])

    pa, pb = embed(A), embed(B)
    d_ab = float(np.max(cKDTree(pb).query(pa)[0]))
    d_ba = float(np.max(cKDTree(pa).query(pb)[0]))
    return max(d_ab, d_ba)


@dataclass(frozen=True)
class HausdorffResult:
    t_values: list
    distances: list
    meta: str = ""

    def __post_init__(self):
        if len(self.t_values) != len(self.distances):
            raise PreconditionError("t and distance lists must align")
        if any(d < 0 for d in self.distances):
            raise PreconditionError("distances must be nonnegative")

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.distances, self.distances[1:]))


def _check_t_list(t_list):
    t = [float(v) for v in t_list]
    if not t or any(v == 0 for v in t):
        raise PreconditionError("t list must be nonzero values descending to 0")
    if len({np.sign(v) for v in t}) != 1:
        raise PreconditionError("t list must keep one sign")
    if any(abs(b) >= abs(a) for a, b in zip(t, t[1:])):
        raise PreconditionError("t list must descend to 0 in absolute value")
    return t


def loop_cloud(loop) -> PointCloud:
    """A 1-D Julia sample as a cloud in C^2 on the {y=0} slice."""
    vals = loop.values
    return PointCloud(points=np.column_stack([vals, np.zeros_like(vals)]),
                      meta=f"loop level={loop.level}")


def continuity_experiment(p_over_q, a, t_list, resolution: int = 400,
                          n_angles: int = 1024, n_iters: int = 40,
                          depth: int = 12, max_iter: int = 200,
                          window=DEFAULT_WINDOW):
    """d_H(J_t, J_0) and d_H of the y=0 slices of J+, against the t=0 clouds.

    All clouds on both sides are built at identical resolution; the reference
    is the semi-parabolic member t = 0.
    """
    t_vals = _check_t_list(t_list)

    def clouds(t):
        params = make_params(p_over_q, t, a)
        torus = torus_fixed_point(params, n_iters, n_angles).torus
        jc = julia_from_sigma(params, torus, depth=depth)
        slice_ = jplus_slice(params, window, resolution, max_iter).boundary
        return jc, slice_

    ref_j, ref_slice = clouds(0.0)
    dj, ds = [], []
    for t in t_vals:
        jc, sl = clouds(t)
        dj.append(hausdorff(jc, ref_j))
        ds.append(hausdorff(sl, ref_slice))
    meta = f"pq={p_over_q} a={a} angles={n_angles} iters={n_iters} res={resolution}"
    return (HausdorffResult(t_values=t_vals, distances=dj, meta="J " + meta),
            HausdorffResult(t_values=t_vals, distances=ds, meta="J+slice " + meta))


def radial_demo(p_over_q, t_list, N: int = 2048, n_iters: int = 48) -> HausdorffResult:
    """1-D continuity: d_H between Caratheodory images at t and at 0."""
    t_vals = _check_t_list(t_list)
    from .poly1d import poly_params

    ref = loop_cloud(caratheodory(poly_params(p_over_q, 0.0), N, n_iters).loop)
    dist = []
    for t in t_vals:
        cur = loop_cloud(caratheodory(poly_params(p_over_q, t), N, n_iters).loop)
        dist.append(hausdorff(cur, ref))
    return HausdorffResult(t_values=t_vals, distances=dist,
                           meta=f"radial pq={p_over_q} N={N} iters={n_iters}")


@dataclass(frozen=True)
class ConnectivityCell:
    a: complex
    verdict: str         # CONNECTED-BY-CONSTRUCTION | UNKNOWN | EXCLUDED
    final_gap: float
    separation: float


def connectivity_scan(p_over_q, t, a_window, resolution: int = 9,
                      n_angles: int = 256, n_iters: int = 10,
                      gap_tol: float = 5e-2, sep_floor: float = 1e-2):
    """Constructive connectivity verdicts on a grid of complex a.

    A cell is CONNECTED-BY-CONSTRUCTION when the graph transform converges
    (shrinking Cauchy gaps below tolerance) with the fiber-separation
    invariant intact; anything else is UNKNOWN, never DISCONNECTED.
    """
    re_min, re_max, im_min, im_max = a_window
    if max(abs(re_min), abs(re_max), abs(im_min), abs(im_max)) >= 0.5:
        raise PreconditionError("a window must stay inside |a| < 1/2")
    res = resolution
    cells = []
    for im in np.linspace(im_min, im_max, res):
        row = []
        for re in np.linspace(re_min, re_max, res):
            a = complex(re, im)
            if a == 0 or abs(a) >= 0.5:
                row.append(ConnectivityCell(a=a, verdict="EXCLUDED",
                                            final_gap=float("nan"), separation=float("nan")))
                continue
            try:
                result = torus_fixed_point(make_params(p_over_q, t, a), n_iters, n_angles)
                ok = (result.final_gap < gap_tol
                      and result.gaps[-1] <= result.gaps[-2]
                      and result.separations[-1] > sep_floor)
                verdict = "CONNECTED-BY-CONSTRUCTION" if ok else "UNKNOWN"
                row.append(ConnectivityCell(a=a, verdict=verdict,
                                            final_gap=result.final_gap,
                                            separation=float(result.separations[-1])))
            except (PreconditionError, NumericalError):
                row.append(ConnectivityCell(a=a, verdict="UNKNOWN",
                                            final_gap=float("nan"), separation=float("nan")))
        cells.append(row)
    return cells


def connectivity_image(cells) -> np.ndarray:
    """0/128/255 image matrix (UNKNOWN/EXCLUDED/CONNECTED) for P5 output."""
    code = {"UNKNOWN": 0, "EXCLUDED": 128, "CONNECTED-BY-CONSTRUCTION": 255}
    return np.array([[code[c.verdict] for c in row] for row in cells], dtype=float)


@dataclass
class RunConfig:
    """Flat run description; round-trips losslessly through key=value files."""

    subcommand: str = ""
    pq: str = "1/1"
    t: float = 0.0
    a_re: float = 0.05
    a_im: float = 0.0
    angles: int = 1024
    degree: int = 8
    iters: int = 40
    res: int = 400
    depth: int = 12
    seed: int = 0
    tol: float = 1e-6
    samples: int = 1000
    t_list: str = "0.2,0.1,0.05,0.025"
    out: str = "out"

    @property
    def a(self) -> complex:
        return complex(self.a_re, self.a_im)

    @property
    def p_over_q(self):
        p, q = self.pq.split("/")
        return (int(p), int(q))

    @property
    def ts(self):
        return [float(v) for v in self.t_list.split(",") if v]

    def to_file(self, path):
        with open(path, "w") as fh:
            fh.write("# henonlab run config v1\n")
            for f in fields(self):
                v = getattr(self, f.name)
                if isinstance(v, float):
                    fh.write(f"{f.name}=%.17g\n" % v)
                else:
                    fh.write(f"{f.name}={v}\n")

    @classmethod
    def from_file(cls, path):
        kwargs = {}
        types = {f.name: f.type for f in fields(cls)}
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, _, val = line.partition("=")
                key = key.strip()
                if key not in types:
                    raise PreconditionError(f"unknown config key: {key}")
                typ = types[key]
                kwargs[key] = (float(val) if typ == "float"
                               else int(val) if typ == "int" else val.strip())
        return cls(**kwargs)
