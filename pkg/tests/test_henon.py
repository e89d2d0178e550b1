import numpy as np
import pytest

import henonlab.henon as hn
from henonlab import poly1d as p1
from henonlab.errors import PreconditionError


def test_curve_values_at_degenerate_a():
    P = hn.make_params((1, 1), 0.0, 0.0)
    assert abs(P.c - 0.25) < 1e-15
    assert abs(P.q_fixed[0] - 0.5) < 1e-15 and abs(P.q_fixed[1]) < 1e-15
    assert P.nu == 0
    P2 = hn.make_params((1, 2), 0.0, 0.0)
    assert abs(P2.c + 0.75) < 1e-12
    assert abs(P2.lam + 1.0) < 1e-12
    assert abs(P2.x_q + 0.5) < 1e-12


def test_eigenvalues_small_a():
    P = hn.make_params((1, 1), 0.0, 0.1)
    e1, e2 = hn.fixed_point_eigenvalues(P)
    assert abs(e1 - 1.0) < 1e-10
    assert abs(e2 + 0.01) < 1e-10


def test_curve_and_eigen_identities_random():
    rng = np.random.default_rng(1)
    for _ in range(200):
        q = int(rng.integers(1, 4))
        t = float(rng.uniform(-0.9, 0.9) / (2 * q))
        a = rng.uniform(0.0, 0.49) * np.exp(2j * np.pi * rng.uniform())
        P = hn.make_params((1, q), t, a)
        assert abs(P.c - P.c_t - a * a * P.w) < 1e-12
        e1, e2 = hn.fixed_point_eigenvalues(P)
        assert abs(e1 - P.lam) < 1e-10
        assert abs(e2 - P.nu) < 1e-10
        assert abs(abs(P.lam) * abs(P.nu) - abs(a) ** 2) < 1e-12


def test_make_params_range_checks():
    with pytest.raises(PreconditionError):
        hn.make_params((1, 2), 0.3, 0.1)
    with pytest.raises(PreconditionError):
        hn.make_params((1, 1), 0.1, 0.6)


def test_fixed_point_and_roundtrip():
    P = hn.make_params((1, 1), 0.0, 0.1)
    fp = P.q_fixed
    im = hn.henon(P, fp)
    assert abs(im[0] - fp[0]) + abs(im[1] - fp[1]) < 1e-12
    pt = (0.3, -0.2)
    rt = hn.henon_inv(P, hn.henon(P, pt))
    assert abs(rt[0] - pt[0]) + abs(rt[1] - pt[1]) < 1e-13


def test_inverse_requires_nonzero_a():
    P = hn.make_params((1, 1), 0.0, 0.0)
    with pytest.raises(PreconditionError, match="degenerate"):
        hn.henon_inv(P, (0.1, 0.2))


def test_degenerate_a_is_polynomial():
    P = hn.make_params((1, 1), 0.05, 0.0)
    x, y = hn.henon(P, (0.3 + 0.1j, 5.0))
    assert y == 0
    assert abs(x - ((0.3 + 0.1j) ** 2 + P.c)) < 1e-15


def test_jacobian_is_minus_a_squared():
    rng = np.random.default_rng(2)
    P = hn.make_params((1, 2), 0.05, 0.2 + 0.1j)
    for _ in range(100):
        pt = (rng.normal() + 1j * rng.normal(), rng.normal() + 1j * rng.normal())
        J = hn.dhenon(P, pt)
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        assert abs(det + P.a**2) < 1e-12


def test_classify_forward():
    P = hn.make_params((1, 1), 0.0, 0.1)
    assert hn.classify_forward(P, (10.0, 0.0), 100) == 0
    assert hn.classify_forward(P, P.q_fixed, 300) is None
    with pytest.raises(PreconditionError):
        hn.classify_forward(P, (0, 0), 10, r=2.9)


def test_petal_point_is_bounded():
    # t > 0: a point near the attracting cycle stays bounded
    P = hn.make_params((1, 1), 0.05, 0.05)
    cyc = hn.attracting_cycle(P)
    assert hn.classify_forward(P, (cyc[0, 0] + 1e-3, cyc[0, 1]), 500) is None


def test_attracting_cycle_is_a_cycle():
    P = hn.make_params((1, 2), 0.05, 0.05)
    cyc = hn.attracting_cycle(P)
    assert cyc.shape == (2, 2)
    pt = (cyc[0, 0], cyc[0, 1])
    for _ in range(2):
        pt = hn.henon(P, pt)
    assert abs(pt[0] - cyc[0, 0]) + abs(pt[1] - cyc[0, 1]) < 1e-10
    assert hn.attracting_cycle(hn.make_params((1, 1), 0.05, 0.05)).shape == (1, 2)
    with pytest.raises(PreconditionError):
        hn.attracting_cycle(hn.make_params((1, 1), -0.05, 0.05))


@pytest.fixture(scope="module")
def degenerate_grid():
    P = hn.make_params((1, 1), 0.0, 0.0)
    return P, hn.jplus_slice(P, (-2, 2, -2, 2), 256, 80)


def test_jplus_degenerate_matches_green(degenerate_grid):
    P, grid = degenerate_grid
    z = grid.xs[None, :] + 1j * grid.ys[:, None]
    gmask = p1.green(P.poly, z, iters=80) > 0
    agreement = np.mean((grid.times >= 0) == gmask)
    assert agreement >= 0.99


def test_jplus_boundary_near_fixed_point():
    P = hn.make_params((1, 1), 0.05, 0.05)
    x0 = P.q_fixed[0]
    win = (x0.real - 0.2, x0.real + 0.2, x0.imag - 0.2, x0.imag + 0.2)
    grid = hn.jplus_slice(P, win, 128, 200, y_slice=P.q_fixed[1])
    assert len(grid.boundary) >= 1


def test_escaped_fraction_monotone_in_max_iter():
    P = hn.make_params((1, 2), 0.05, 0.05)
    fracs = [hn.jplus_slice(P, (-2, 2, -2, 2), 128, m).escaped_fraction
             for m in (5, 20, 80)]
    assert fracs[0] <= fracs[1] <= fracs[2]


def test_jplus_resolution_cap():
    P = hn.make_params((1, 1), 0.0, 0.0)
    with pytest.raises(PreconditionError):
        hn.jplus_slice(P, (-2, 2, -2, 2), 9000, 10)
