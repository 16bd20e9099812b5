"""Tests for the one-variable Clark theory: atomic spectral measures,
Herglotz verification, rank-one unitary perturbations, spectral
realization, and the weighted Cauchy transform."""

import numpy as np
import pytest

from clarkda.disk import (
    DiscreteMeasure,
    FiniteBlaschke,
    KbDiskModel,
    ac_measure,
    clark_operator,
    density_mass_check,
    herglotz_verify,
    krylov_rank,
    measure_inner,
    spectral_realization,
    weighted_cauchy,
)

B_Z = FiniteBlaschke([0.0])
B_Z2 = FiniteBlaschke([0.0, 0.0])
B_BLASCHKE = FiniteBlaschke([0.0, 0.5])  # z(z - 1/2)/(1 - z/2)
ALPHAS = [np.exp(2j * np.pi * k / 16) for k in range(16)]


# ---------------------------------------------------------------------------
# Blaschke basics
# ---------------------------------------------------------------------------

def test_blaschke_values_and_unimodularity():
    assert abs(B_BLASCHKE(np.array(0.3 + 0j)) - 0.3 * (0.3 - 0.5) / (1 - 0.15)) < 1e-14
    for b in (B_Z, B_Z2, B_BLASCHKE):
        assert b.boundary_modulus_defect() < 1e-12


def test_blaschke_derivative_finite_difference():
    z = np.array(0.2 - 0.1j)
    h = 1e-6
    fd = (B_BLASCHKE(z + h) - B_BLASCHKE(z - h)) / (2 * h)
    assert abs(B_BLASCHKE.derivative(z) - fd) < 1e-8


def test_blaschke_rejects_bad_data():
    with pytest.raises(ValueError):
        FiniteBlaschke([1.0])
    with pytest.raises(ValueError):
        FiniteBlaschke([0.0], const=0.5)


def test_series_matches_values():
    s = B_BLASCHKE.series(200)
    z = 0.4 * np.exp(0.3j)
    assert abs(np.polyval(s[::-1], z) - B_BLASCHKE(np.array(z))) < 1e-12


# ---------------------------------------------------------------------------
# atomic measures
# ---------------------------------------------------------------------------

def test_ac_measure_b_z_is_point_mass():
    mu = ac_measure(B_Z, np.exp(0.9j))
    assert len(mu.atoms) == 1
    assert abs(mu.atoms[0] - np.exp(0.9j)) < 1e-12
    assert abs(mu.weights[0] - 1.0) < 1e-12


def test_ac_measure_b_z2_alpha_one():
    mu = ac_measure(B_Z2, 1.0)
    assert np.allclose(sorted(mu.atoms.real), [-1, 1], atol=1e-12)
    assert np.allclose(mu.weights, [0.5, 0.5], atol=1e-12)


@pytest.mark.parametrize("b", [B_Z, B_Z2, B_BLASCHKE])
@pytest.mark.parametrize("alpha", ALPHAS)
def test_measure_satisfies_integral_representation(b, alpha):
    mu = ac_measure(b, alpha)
    assert len(mu.atoms) == b.degree
    assert herglotz_verify(b, alpha, mu) < 1e-10


def test_herglotz_verify_rejects_corrupted_weights():
    mu = ac_measure(B_Z2, np.exp(0.4j))
    bad = DiscreteMeasure(mu.atoms, mu.weights * np.array([1.3, 0.7]))
    assert herglotz_verify(B_Z2, np.exp(0.4j), bad) > 1e-2


def test_ac_measure_input_validation():
    with pytest.raises(ValueError, match="unimodular"):
        ac_measure(B_Z, 0.5)


# ---------------------------------------------------------------------------
# model space and perturbed operators
# ---------------------------------------------------------------------------

def test_model_dimension_and_orthonormality():
    m = KbDiskModel(B_BLASCHKE)
    assert m.dim == 2
    G = m.Phi.conj().T @ m.Phi
    assert np.linalg.norm(G - np.eye(2), 2) < 1e-13


def test_model_rejects_function_outside():
    m = KbDiskModel(B_Z2)  # span{1, z}
    s = np.zeros(m.terms, dtype=complex)
    s[2] = 1.0  # z^2 = b is orthogonal to the model space
    assert m.membership_residual(s) > 0.99


def test_clark_operator_b_z_is_scalar_conjugate():
    alpha = np.exp(0.9j)
    Xa, _ = clark_operator(B_Z, alpha)
    assert Xa.shape == (1, 1)
    assert abs(Xa[0, 0] - np.conj(alpha)) < 1e-12


def test_clark_operator_b_z2_closed_form():
    alpha = np.exp(0.7j)
    Xa, model = clark_operator(B_Z2, alpha)
    # basis is {1, z}: backward shift sends z -> 1, plus the rank-one term
    assert np.allclose(Xa, [[0, 1], [np.conj(alpha), 0]], atol=1e-12)


def test_clark_operator_requires_b0_zero():
    with pytest.raises(ValueError, match="b\\(0\\)"):
        clark_operator(FiniteBlaschke([0.5]), 1.0)


@pytest.mark.parametrize("b", [B_Z, B_Z2, B_BLASCHKE])
@pytest.mark.parametrize("alpha", ALPHAS)
def test_clark_operator_unitary(b, alpha):
    Xa, _ = clark_operator(b, alpha)
    assert np.linalg.norm(Xa.conj().T @ Xa - np.eye(b.degree), 2) < 1e-12


@pytest.mark.parametrize("b", [B_Z, B_Z2, B_BLASCHKE])
@pytest.mark.parametrize("alpha", ALPHAS)
def test_spectral_realization_matches_measure(b, alpha):
    Xa, model = clark_operator(b, alpha)
    out = spectral_realization(Xa, b, alpha, model=model)
    assert out["match_error"] < 1e-10
    assert abs(np.sum(out["masses"]) - out["measure"].mass) < 1e-10


def test_spectral_orientation_is_conjugate():
    alpha = np.exp(0.9j)  # atom set not closed under conjugation
    Xa, model = clark_operator(B_Z, alpha)
    out = spectral_realization(Xa, B_Z, alpha, model=model)
    assert out["orientation"] == "conjugate"
    assert abs(out["eigs"][0] - np.conj(alpha)) < 1e-12


def test_spectral_orientation_both_when_self_conjugate():
    Xa, model = clark_operator(B_Z2, 1.0)  # atoms {1, -1}
    out = spectral_realization(Xa, B_Z2, 1.0, model=model)
    assert out["orientation"] == "both"


def test_spectral_realization_rejects_nonunitary():
    with pytest.raises(ValueError, match="unitary"):
        spectral_realization(0.5 * np.eye(2), B_Z2, 1.0)


@pytest.mark.parametrize("b", [B_Z2, B_BLASCHKE])
def test_cyclic_vector(b):
    Xa, model = clark_operator(b, np.exp(0.3j))
    assert krylov_rank(Xa, model.one_coords()) == b.degree


# ---------------------------------------------------------------------------
# weighted Cauchy transform
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("b", [B_Z2, B_BLASCHKE])
def test_weighted_cauchy_lands_in_model_space(b):
    alpha = np.exp(1.1j)
    model = KbDiskModel(b)
    for f in ([1.0], [0.0, 1.0], [0.3, -0.2j]):
        s = weighted_cauchy(b, alpha, f, model=model)
        assert model.membership_residual(s) < 1e-10


def test_weighted_cauchy_is_unitary_onto_model():
    """The transform carries the measure inner product to the model space
    inner product on polynomials of degree < deg b."""
    b = B_BLASCHKE
    alpha = np.exp(0.2j)
    model = KbDiskModel(b)
    mu = ac_measure(b, alpha)
    polys = ([1.0], [0.0, 1.0])
    images = [model.coords(weighted_cauchy(b, alpha, f, model=model)) for f in polys]
    for i, f in enumerate(polys):
        for j, g in enumerate(polys):
            lhs = np.vdot(images[i], images[j])
            rhs = measure_inner(mu, f, g)
            assert abs(lhs - rhs) < 1e-10


def test_weighted_cauchy_intertwines_clark_operator():
    """U composed with multiplication by conj(zeta) on L2(mu) equals the
    perturbed operator composed with U."""
    b = B_Z2
    alpha = np.exp(0.5j)
    model = KbDiskModel(b)
    Xa, _ = clark_operator(b, alpha, model=model)
    mu = ac_measure(b, alpha)
    for f in ([1.0], [0.0, 1.0]):
        # multiplication by conj(zeta) on atoms: g(zeta) = conj(zeta) f(zeta);
        # realize as the interpolating polynomial on the atom set
        fvals = np.polyval(np.asarray(f, dtype=complex)[::-1], mu.atoms)
        gvals = np.conj(mu.atoms) * fvals
        g = np.linalg.solve(np.vander(mu.atoms, increasing=True), gvals)
        lhs = model.coords(weighted_cauchy(b, alpha, g, model=model))
        rhs = Xa @ model.coords(weighted_cauchy(b, alpha, f, model=model))
        assert np.linalg.norm(lhs - rhs) < 1e-10


# ---------------------------------------------------------------------------
# non-inner boundary density
# ---------------------------------------------------------------------------

def test_density_mass_for_half_z():
    out = density_mass_check(lambda z: 0.5 * z, 1.0)
    assert out["error"] < 1e-10


def test_density_mass_nonconstant_alpha():
    out = density_mass_check(lambda z: 0.5 * z, np.exp(0.8j))
    assert out["error"] < 1e-8
