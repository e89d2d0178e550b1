import numpy as np
import pytest

import henonlab.henon as hn
from henonlab import normalform2d as nf2
from henonlab import poly1d as p1
from henonlab.errors import PreconditionError


@pytest.fixture(scope="module")
def nf_q1():
    P = hn.make_params((1, 1), 0.05, 0.05)
    return P, nf2.reduce(P, D=8)


@pytest.fixture(scope="module")
def nf_q2():
    P = hn.make_params((1, 2), -0.02, 0.05)
    return P, nf2.reduce(P, D=10)


def test_wss_slope_is_eigenvector():
    P = hn.make_params((1, 1), 0.0, 0.1)
    w = nf2.wss_graph(P, 8)
    assert abs(w.coeffs[0]) == 0
    assert abs(w.coeffs[1] - P.nu / P.a) < 1e-10
    assert abs(w.coeffs[1] + P.a / P.lam) < 1e-10


def test_wss_degenerate_a_is_vertical_line():
    P = hn.make_params((1, 2), 0.05, 0.0)
    assert nf2.wss_graph(P, 8).max_abs() == 0.0


def test_wss_invariance_rate():
    # points on the graph contract to the fixed point at rate |nu| +- 20%
    P = hn.make_params((1, 1), 0.0, 0.1)
    w = nf2.wss_graph(P, 10)
    for yv in (0.1, 0.05j, -0.08 + 0.03j):
        pt = (w(yv) + P.x_q, yv + P.a * P.x_q)
        d_prev = max(abs(pt[0] - P.q_fixed[0]), abs(pt[1] - P.q_fixed[1]))
        for _ in range(3):
            pt = hn.henon(P, pt)
            d = max(abs(pt[0] - P.q_fixed[0]), abs(pt[1] - P.q_fixed[1]))
            assert 0.8 * abs(P.nu) < d / d_prev < 1.2 * abs(P.nu)
            d_prev = d


def test_normal_form_shape(nf_q1):
    P, nf = nf_q1
    N1, N2 = nf.normal
    q = P.q
    assert abs(N1.coeff(1, 0) - P.lam) < 1e-12
    assert abs(N1.coeff(q + 1, 0) - P.lam) < 1e-10
    # no forbidden pure-x monomials (none exist for q=1 besides the slots)
    assert abs(N2.coeff(0, 1) - P.nu) < 1e-12
    # second component has no pure-y nonlinearities: nu y + x h(x, y)
    assert max(abs(N2.coeff(0, j)) for j in range(2, nf.D + 1)) < 1e-9
    # h(0,0) is O(a), not zero: the change keeps horizontal slices flat instead
    assert abs(N2.coeff(1, 0)) < 2 * abs(P.a)


def test_normal_form_kill_list_q2(nf_q2):
    P, nf = nf_q2
    N1 = nf.normal[0]
    # q=2: x^2 and x^4 die, x^3 carries lam, x^5 carries lam C
    assert abs(N1.coeff(2, 0)) < 1e-9
    assert abs(N1.coeff(4, 0)) < 1e-9
    assert abs(N1.coeff(3, 0) - P.lam) < 1e-9
    assert abs(N1.coeff(5, 0) - P.lam * nf.C_at) < 1e-12


def test_conjugacy_residual(nf_q1, nf_q2):
    for P, nf in (nf_q1, nf_q2):
        assert nf2.conjugacy_residual(P, nf) < 1e-8


def test_change_is_horizontal_and_triangular(nf_q1):
    P, nf = nf_q1
    c1, c2 = nf.change
    # second component depends on y alone
    assert max(abs(c2.coeff(i, j)) for i in range(1, nf.D + 1)
               for j in range(nf.D + 1 - i)) < 1e-10
    assert abs(c1.coeff(0, 0)) == 0 and abs(c2.coeff(0, 0)) == 0
    assert abs(c1.coeff(1, 0) - nf.rescale) < 1e-12
    assert abs(c2.coeff(0, 1) - 1.0) < 1e-12
    assert abs(nf.rescale) > 0.1


def test_degenerate_a_matches_1d():
    P = hn.make_params((1, 2), 0.05, 0.0)
    nf = nf2.reduce(P, D=8)
    _, n1, C1 = p1.normal_form_1d(P.poly, D=8)
    diff = max(abs(nf.normal[0].coeff(k, 0) - n1.coeffs[k]) for k in range(9))
    assert diff < 1e-10
    assert nf.normal[1].max_abs() == 0.0
    assert abs(nf.C_at - C1) < 1e-10


def test_small_a_limit_matches_1d():
    for pq, t in [((1, 1), 0.05), ((1, 2), -0.02)]:
        P = hn.make_params(pq, t, 1e-5)
        nf = nf2.reduce(P)
        _, n1, _ = p1.normal_form_1d(P.poly)
        diff = max(abs(nf.normal[0].coeff(k, 0) - n1.coeffs[k]) for k in range(nf.D + 1))
        assert diff < 1e-8


def test_reduce_rejects_bad_eigenvalues():
    P = hn.make_params((1, 1), 0.05, 0.05)
    object.__setattr__(P, "nu", 1.5 + 0j)
    with pytest.raises(PreconditionError):
        nf2.reduce(P)


def test_petal_labels_and_membership():
    R = nf2.petal_scale(2, 0.0)
    rng = np.random.default_rng(0)
    xs, js = nf2.sample_petal(rng, 500, 2, R)
    assert np.all(nf2.in_petal(xs, 2, R))
    assert np.all(nf2.petal_label(xs, 2) == js)


@pytest.mark.parametrize("pq,t", [((1, 1), 0.04), ((1, 2), 0.008),
                                  ((1, 3), 0.0012), ((2, 5), 4e-5)])
def test_petal_rotation_combinatorics(pq, t):
    # one Henon step advances the petal label by p mod q; the admissible t
    # shrinks fast with q (rotation bound vs chart size)
    P = hn.make_params(pq, t, 0.03)
    nf = nf2.reduce(P)
    rep = nf2.petal_check(P, nf, samples=200, steps=0, seed=4)
    assert not rep.rotation_failures


def test_petal_scale_rejects_large_t_at_q2():
    with pytest.raises(PreconditionError, match="petal"):
        nf2.petal_scale(2, 0.04)


def test_trapping_t_positive():
    P = hn.make_params((1, 1), 0.05, 0.05)
    nf = nf2.reduce(P, D=10)
    rep = nf2.petal_check(P, nf, samples=300, steps=450, tol=1e-6, seed=2)
    assert rep.passed
    assert rep.max_final_distance < 1e-6
    assert rep.target.startswith("attracting")
    assert len(rep.rows) == 300


def test_trapping_t_zero_checks_rotation_only():
    P = hn.make_params((1, 1), 0.0, 0.05)
    nf = nf2.reduce(P, D=10)
    rep = nf2.petal_check(P, nf, samples=300, seed=2)
    assert not rep.rotation_failures
    assert rep.target.startswith("none")


def test_trapping_t_negative_reaches_origin_at_derived_threshold():
    # |lambda_t| = 0.99 forces ~0.99^n decay: after 500 steps the honest
    # bound from the sampled region is about 6e-4, which is what we assert
    P = hn.make_params((1, 2), -0.01, 0.05)
    nf = nf2.reduce(P, D=10)
    rep = nf2.petal_check(P, nf, samples=300, steps=500, tol=1e-3, seed=2)
    assert not rep.rotation_failures
    assert not rep.attraction_failures
    assert rep.max_final_distance < 1e-3
    assert rep.target == "fixed point"
