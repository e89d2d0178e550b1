import math

import numpy as np
import pytest

import henonlab.henon as hn
from henonlab import cli, io, lab
from henonlab import poly1d as p1
from henonlab.errors import PreconditionError


def cloud(pts):
    return hn.PointCloud(points=np.asarray(pts, dtype=complex).reshape(-1, 2))


def test_hausdorff_identical_is_zero():
    A = cloud([[0, 0], [1, 1j]])
    assert lab.hausdorff(A, A) == 0.0


def test_hausdorff_point_pair():
    assert abs(lab.hausdorff(cloud([[0, 0]]), cloud([[1, 0]])) - 1.0) < 1e-15


def test_hausdorff_circle_sampling_bound():
    fine = np.exp(2j * math.pi * np.arange(10000) / 10000)
    coarse = np.exp(2j * math.pi * np.arange(1000) / 1000)
    d = lab.hausdorff(cloud(np.column_stack([fine, 0 * fine])),
                      cloud(np.column_stack([coarse, 0 * coarse])))
    assert d <= 2 * math.pi / 1000


def test_hausdorff_empty_cloud_rejected():
    with pytest.raises(PreconditionError):
        lab.hausdorff(cloud([[0, 0]]), hn.PointCloud(points=np.zeros((0, 2))))


def test_t_list_validation():
    with pytest.raises(PreconditionError):
        lab._check_t_list([0.1, 0.2])
    with pytest.raises(PreconditionError):
        lab._check_t_list([0.1, -0.05])
    with pytest.raises(PreconditionError):
        lab._check_t_list([0.1, 0.0])
    assert lab._check_t_list([-0.2, -0.1]) == [-0.2, -0.1]


def test_radial_demo_monotone_both_signs():
    up = lab.radial_demo((1, 1), [0.2, 0.1, 0.05], N=1024, n_iters=40)
    assert up.strictly_decreasing
    down = lab.radial_demo((1, 2), [-0.2, -0.1, -0.05], N=1024, n_iters=40)
    assert down.strictly_decreasing


def test_radial_reference_distance_is_zero():
    ref = lab.loop_cloud(p1.caratheodory(p1.poly_params((1, 1), 0.0), 1024, 30).loop)
    assert lab.hausdorff(ref, ref) == 0.0


def test_negative_control_shifted_reference():
    # distances to a translated reference must not tend to zero
    ref = lab.loop_cloud(p1.caratheodory(p1.poly_params((1, 1), 0.0), 1024, 40).loop)
    shifted = hn.PointCloud(points=ref.points + np.array([0.3, 0.0]))
    dists = []
    for t in (0.2, 0.1, 0.05):
        cur = lab.loop_cloud(p1.caratheodory(p1.poly_params((1, 1), t), 1024, 40).loop)
        dists.append(lab.hausdorff(cur, shifted))
    assert min(dists) > 0.15


def test_connectivity_scan_small():
    w = 0.08
    cells = lab.connectivity_scan((1, 1), 0.1, (-w, w, -w, w), resolution=3,
                                  n_angles=256, n_iters=10)
    flat = {c.a: c for row in cells for c in row}
    assert flat[0j].verdict == "EXCLUDED"
    connected = [c for c in flat.values() if c.verdict == "CONNECTED-BY-CONSTRUCTION"]
    assert len(connected) >= 4
    # reflection symmetry of verdicts
    for c in flat.values():
        assert flat[-c.a].verdict == c.verdict
    img = lab.connectivity_image(cells)
    assert img.shape == (3, 3)


def test_connectivity_scan_window_guard():
    with pytest.raises(PreconditionError):
        lab.connectivity_scan((1, 1), 0.1, (-0.6, 0.6, -0.1, 0.1))


def test_runconfig_roundtrip(tmp_path):
    cfg = lab.RunConfig(subcommand="continuity", pq="1/2", t=-0.017,
                        a_re=0.0375, a_im=1e-3, angles=512, iters=17,
                        t_list="0.2,0.1", out="somewhere")
    path = tmp_path / "run.cfg"
    cfg.to_file(path)
    back = lab.RunConfig.from_file(path)
    assert back == cfg
    assert back.a == complex(0.0375, 1e-3)
    assert back.p_over_q == (1, 2)
    assert back.ts == [0.2, 0.1]


def test_runconfig_rejects_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("nonsense=1\n")
    with pytest.raises(PreconditionError):
        lab.RunConfig.from_file(path)


def test_cli_exit_codes(tmp_path):
    out = str(tmp_path / "x")
    assert cli.main(["caratheodory", "--pq", "1/1", "--t", "0.1",
                     "--angles", "1024", "--iters", "10", "--out", out]) == 0
    # precondition: |a| >= 1/2
    assert cli.main(["torus-iterate", "--pq", "1/1", "--t", "0.1",
                     "--a", "0.7", "--out", out]) == 2
    # numerical: trapping tolerance unreachable in 3 steps
    assert cli.main(["petal-check", "--pq", "1/1", "--t", "0.05", "--a", "0.05",
                     "--samples", "50", "--iters", "3", "--tol", "1e-12",
                     "--out", out]) == 3


def test_cli_deterministic_outputs(tmp_path):
    cfg = lab.RunConfig(subcommand="radial-demo", pq="1/1", angles=1024,
                        iters=30, t_list="0.2,0.1", out=str(tmp_path / "r1"))
    path = tmp_path / "c.cfg"
    cfg.to_file(path)
    assert cli.main(["radial-demo", "--config", str(path)]) == 0
    data1 = (tmp_path / "r1.csv").read_bytes()
    assert cli.main(["radial-demo", "--config", str(path)]) == 0
    assert (tmp_path / "r1.csv").read_bytes() == data1
    assert cli.main(["radial-demo", "--config", str(path),
                     "--out", str(tmp_path / "r2")]) == 0
    assert (tmp_path / "r2.csv").read_bytes() == data1


def test_pgm_writer(tmp_path):
    path = tmp_path / "img.pgm"
    io.write_pgm(path, np.arange(12).reshape(3, 4))
    raw = path.read_bytes()
    assert raw.startswith(b"P5\n")
    assert raw.endswith(bytes(range(0, 256, 255 // 11))[:12]) or len(raw) > 12


def test_loop_csv_header(tmp_path):
    loop = p1.equipotential_loop(p1.poly_params((1, 1), 0.1), 64)
    path = tmp_path / "loop.csv"
    io.write_loop_csv(path, loop)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# henonlab-csv v1 loop")
    assert lines[1] == "k,s,re,im,level"
    assert len(lines) == 2 + 64
