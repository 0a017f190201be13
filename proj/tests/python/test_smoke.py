import os
import subprocess

import numpy as np
import pytest

import sfpmc

CONFIGS = os.environ.get("SFPMC_CONFIG_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "configs"))


def test_disk_body_norms():
    K = sfpmc.ConvexBody.disk(2.0)
    v = np.array([[3.0, 4.0], [0.0, -1.0]])
    assert np.allclose(sfpmc.gauge(K, v), [2.5, 0.5])
    assert np.allclose(sfpmc.dual_norm(K, v), [10.0, 2.0])
    assert np.allclose(sfpmc.project(K, v[0]), [1.2, 1.6])


def test_ellipse_duality():
    K = sfpmc.ConvexBody.ellipse(np.array([[4.0, 1.0], [1.0, 2.0]]))
    assert K.valid
    u = np.random.default_rng(0).normal(size=(200, 2))
    pi = sfpmc.project(K, u)
    assert np.allclose(np.sum(u * pi, axis=1), sfpmc.dual_norm(K, u), rtol=1e-12)


def test_regularized_projection_shrinks():
    K = sfpmc.ConvexBody.disk(1.0)
    p = np.array([0.3, 0.4])
    assert sfpmc.keps_dual_norm(K, 0.5, p) == pytest.approx((0.125 + 0.125) ** (1 / 3))
    assert np.linalg.norm(sfpmc.pi_eps_h(K, 0.5, p)) < 1.0
    with pytest.raises(sfpmc.ParameterError):
        sfpmc.pi_eps_h(K, 1.5, p)


def test_invalid_body_reports_reason():
    theta = np.linspace(0, 2 * np.pi, 128, endpoint=False)
    K = sfpmc.ConvexBody.from_support_samples(list(1.0 + 0.5 * np.cos(4 * theta)))
    assert not K.valid
    assert K.validation["failure_reason"]


def test_distance_and_curvature_on_disk():
    K = sfpmc.ConvexBody.disk(1.0)
    D = sfpmc.Domain.disk(2.0, grid=41)
    d = sfpmc.finsler_distance(K, D)["distance"]
    assert d.shape == (D.grid["ny"], D.grid["nx"])
    assert np.nanmax(d) == pytest.approx(2.0, abs=3 * D.grid["h"])
    assert np.allclose(sfpmc.boundary_finsler_curvature(K, D, [0.0, 1.0, 2.0]), 0.5)
    assert not sfpmc.check_curvature_condition(K, D, 0.5)["curvcond_pass"]
    assert sfpmc.check_curvature_condition(K, D, 0.3)["curvcond_pass"]


def test_solve_disk_cmc():
    out = sfpmc.solve(
        """
body: {kind: disk, radius: 1}
domain: {shape: disk, radius: 2, grid: 33}
problem: {H: 0.3}
"""
    )
    u = out["u"]
    assert out["report"]["converged"]
    assert u.shape == (33, 33)
    assert np.nanmin(u) == pytest.approx(-0.411, abs=2e-2)


def test_bad_config_raises():
    with pytest.raises(ValueError):
        sfpmc.solve("body: {kind: disk, radius: -1}\ndomain: {shape: disk, radius: 2}\n")


def test_run_matches_cli(tmp_path):
    code = sfpmc.run("check", os.path.join(CONFIGS, "curvcond_fail.yaml"), str(tmp_path))
    assert code == 4
    assert (tmp_path / "conditions.json").exists()
