"""Kernel evaluation, Gram assembly, and Schur-class evidence tests."""

import numpy as np
import pytest

from clarkda import examples as ex
from clarkda.kernels import (
    SamplePlan,
    dbr_kernel,
    gram,
    herglotz_fn,
    herglotz_kernel,
    schur_class_check,
    szego_kernel,
)
from clarkda.polynomials import MatPoly, poly_eval


def test_szego_values():
    assert szego_kernel((0.0,), (0.0,)) == 1.0
    assert szego_kernel((0.5,), (0.5,)) == pytest.approx(4.0 / 3.0)
    assert szego_kernel((0.5, 0.0), (0.0, 0.5)) == pytest.approx(1.0)


def test_plan_deterministic_and_in_ball():
    p1 = SamplePlan(d=2, count=20, radius=0.6, seed=11)
    p2 = SamplePlan(d=2, count=20, radius=0.6, seed=11)
    for a, b in zip(p1, p2):
        assert np.array_equal(a, b)
    assert all(np.linalg.norm(z) <= 0.6 + 1e-15 for z in p1)
    p3 = SamplePlan(d=2, count=20, radius=0.6, seed=12)
    assert not np.array_equal(p1.points[0], p3.points[0])


def test_dbr_zero_multiplier_is_szego():
    b = ex.zero_b(2, 3)
    z, w = np.array([0.2, 0.1j]), np.array([0.1, -0.3])
    assert np.allclose(dbr_kernel(b, z, w), szego_kernel(z, w) * np.eye(3))


def test_dbr_b_equals_z_diagonal_is_one():
    b = ex.scalar_z()
    for z in SamplePlan(d=1, count=10, seed=3):
        assert dbr_kernel(b, z, z)[0, 0] == pytest.approx(1.0)


def test_dbr_theta_at_zero_is_identity():
    th = ex.theta_square()
    assert np.allclose(dbr_kernel(th, (0, 0), (0, 0)), np.eye(4))


def test_herglotz_fn_values():
    assert np.allclose(herglotz_fn(ex.zero_b(1, 1), (0.3,)), np.eye(1))
    assert herglotz_fn(ex.scalar_z(), (0.5,))[0, 0] == pytest.approx(3.0)
    assert np.allclose(herglotz_fn(ex.theta_square(), (0, 0)), np.eye(4))


def test_herglotz_fn_rejects_noncontractive_point():
    b = MatPoly.scalar(1, {(1,): 2.0})
    with pytest.raises(ValueError, match="purely contractive"):
        herglotz_fn(b, (0.6,))


def test_herglotz_kernel_scalar_z_closed_form():
    b = ex.scalar_z()
    plan = SamplePlan(d=1, count=15, seed=5)
    for z in plan:
        for w in plan:
            expected = 1.0 / ((1 - z[0]) * (1 - np.conj(w[0])))
            assert herglotz_kernel(b, z, w)[0, 0] == pytest.approx(expected, abs=1e-12)


def test_herglotz_kernel_cross_check_both_forms_agree():
    # the cross-check inside herglotz_kernel raises on disagreement
    for b in [ex.theta_square(), ex.hat_degenerate(), ex.avg_coords()]:
        plan = SamplePlan(d=b.d, count=8, seed=2)
        for z in plan:
            herglotz_kernel(b, z, (0.0,) * b.d)


@pytest.mark.parametrize("name", ["zero", "z_d1", "half_z_d1", "theta", "hat_degenerate", "avg_coords"])
def test_factorization_identity_100_pairs(name):
    """(I - b(z)) Kb(z,w) (I - b(w)*) = kb(z,w) at seeded random pairs."""
    b = ex.EXAMPLES()[name]
    plan = SamplePlan(d=b.d, count=20, radius=0.6, seed=101)
    pts = list(plan)
    rng = np.random.default_rng(7)
    n = b.rows
    worst = 0.0
    for _ in range(100):
        z = pts[rng.integers(len(pts))]
        w = pts[rng.integers(len(pts))]
        lhs = (np.eye(n) - poly_eval(b, z)) @ herglotz_kernel(b, z, w) @ (np.eye(n) - poly_eval(b, w)).conj().T
        worst = max(worst, float(np.max(np.abs(lhs - dbr_kernel(b, z, w)))))
    assert worst < 1e-10


@pytest.mark.parametrize("name", ["zero", "z_d1", "half_z_d1", "theta", "hat_degenerate", "avg_coords"])
def test_v_domain_identity_100_pairs(name):
    """Kb(z,w) - Kb(z,0) - Kb(0,w) + Kb(0,0) = (z.w*) Kb(z,w)."""
    b = ex.EXAMPLES()[name]
    plan = SamplePlan(d=b.d, count=20, radius=0.6, seed=103)
    pts = list(plan)
    zero = np.zeros(b.d)
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(100):
        z = pts[rng.integers(len(pts))]
        w = pts[rng.integers(len(pts))]
        lhs = (herglotz_kernel(b, z, w) - herglotz_kernel(b, z, zero)
               - herglotz_kernel(b, zero, w) + herglotz_kernel(b, zero, zero))
        rhs = np.sum(z * np.conj(w)) * herglotz_kernel(b, z, w)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    assert worst < 1e-10


def test_gram_hermitian_and_values():
    b = ex.scalar_z()
    G = gram("szego", None, [np.zeros(1), np.array([0.5])])
    assert np.allclose(G.entries, [[1, 1], [1, 4 / 3]])
    assert np.linalg.norm(G.entries - G.entries.conj().T) == 0.0


def test_gram_single_point_herglotz_identity():
    th = ex.theta_square()
    G = gram("herglotz", th, [np.zeros(2)])
    assert np.allclose(G.entries, np.eye(4), atol=1e-12)


def test_szego_gram_positive_definite():
    plan = SamplePlan(d=2, count=12, radius=0.6, seed=21)
    G = gram("szego", None, plan)
    assert np.linalg.eigvalsh(G.entries)[0] > 0


def test_dbr_gram_psd_for_theta():
    th = ex.theta_square()
    plan = SamplePlan(d=2, count=20, radius=0.6, seed=31)
    G = gram("dbr", th, plan)
    assert G.min_eig >= -1e-10


def test_schur_check_examples():
    plan1 = SamplePlan(d=1, count=15, seed=41)
    assert schur_class_check(ex.zero_b(1, 1), plan1)["psd"]
    rep = schur_class_check(ex.theta_square(), SamplePlan(d=2, count=15, seed=42))
    assert rep["psd"] and rep["pure"]
    bad = MatPoly.scalar(1, {(1,): 2.0})
    rep = schur_class_check(bad, plan1)
    assert not rep["psd"]
    assert rep["certificate"] == "sampled"
