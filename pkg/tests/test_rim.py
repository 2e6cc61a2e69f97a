import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rimspinor.bilinears import compute_bilinears
from rimspinor.clifford import build_gamma_basis, chiral_rotation, random_spinors
from rimspinor.lounesto import LounestoClass, classify, classify_spinor, sample_class
from rimspinor.rim import (
    InadmissibleSeed, RimError, RimParams, build_dirac_from_rim, build_G, direct_dirac_bilinears,
    fit_global_constant, heisenberg_residual, lagrangian_density, lemma1_sweep, predicted_dirac_bilinears,
    principal_sqrt, random_params, rederived_dirac_bilinears, rim_derivative, rim_scalars, validate_params,
    verify_lemma1,
)


def spinor_with(A, B, basis):
    """A spinor whose scalar and pseudoscalar are exactly (A, B), |J| = 1."""
    psi = np.array([1, 0, 0, 0], dtype=complex)
    psi = chiral_rotation(psi, 0.0, basis)
    b = compute_bilinears(psi, basis)
    return chiral_rotation(psi, 0.5 * (np.arctan2(B, A) - np.arctan2(b.B, b.A)), basis) * np.hypot(A, B) ** 0.5


@pytest.mark.parametrize("z, root", [(4, 2), (2j, 1 + 1j), (1, 1)])
def test_principal_sqrt(z, root):
    assert principal_sqrt(z) == pytest.approx(root)


def test_principal_sqrt_branch_cut():
    with pytest.raises(RimError):
        principal_sqrt(-4)


def test_coupling_of_worked_params():
    # i(a - b)/2 with a - b = 3i is -3/2
    assert validate_params(1 + 2j, 1 - 1j, 1).s == pytest.approx(-1.5)


@pytest.mark.parametrize("a, b", [(1 + 1j, 2), (2j, 2j - 1j), (1 + 1j, 1)])
def test_invalid_params(a, b):
    with pytest.raises(RimError):
        validate_params(a, b, 1)


def test_integrability_gate(rng):
    for _ in range(200):
        re, d = rng.normal(), rng.normal()
        a, b = complex(re, rng.normal()), complex(re + d, rng.normal())
        try:
            p = validate_params(a, b, 0.0)
        except RimError:
            assert abs(d) > 0
            continue
        assert abs((0.5j * (p.a - p.b)).imag) < 1e-12


def test_rim_derivative_rest_frame(dirac):
    p = RimParams(1 + 2j, 1 - 1j, 1.0)
    D = rim_derivative([1, 0, 0, 0], p, dirac)
    assert np.allclose(D[0], p.a * np.array([1, 0, 0, 0]))
    assert np.allclose(D[1], 0) and np.allclose(D[2], 0)
    assert np.allclose(rim_derivative([1, 2j, 0, 1], RimParams(0, 0), dirac), 0)


def test_rim_derivative_rejects_singular(dirac):
    with pytest.raises(RimError):
        rim_derivative(sample_class(6, 0, dirac), RimParams(1 + 1j, 1 - 1j), dirac)


def test_heisenberg_holds_pointwise(basis, rng):
    psi = random_spinors(rng, 2000)
    for _ in range(5):
        p = random_params(rng)
        assert heisenberg_residual(psi, rim_derivative(psi, p, basis), p.s, basis).max() < 1e-10


def test_heisenberg_detects_wrong_coupling(dirac, rng):
    psi = random_spinors(rng, 200)
    p = validate_params(0.5 + 1j, 0.5 - 1j)
    r = heisenberg_residual(psi, rim_derivative(psi, p, dirac), p.s + 0.1, dirac)
    assert r.min() > 1e-3


def test_heisenberg_trivial_case(dirac):
    assert heisenberg_residual([1, 2, 3, 4j], np.zeros((4, 4)), 0.0, dirac) == 0


def test_lagrangian_examples(dirac, rng):
    assert lagrangian_density([1, 0, 0, 0], np.zeros((4, 4)), 1.0, dirac) == pytest.approx(-1)
    assert lagrangian_density([1, 2, 0, 1j], np.zeros((4, 4)), 0.0, dirac) == 0
    for _ in range(20):
        psi, p = random_spinors(rng), random_params(rng)
        L = lagrangian_density(psi, rim_derivative(psi, p, dirac), p.s, dirac)
        assert abs(np.imag(L)) < 1e-12 * np.linalg.norm(psi) ** 4


def test_scalars_worked_example(dirac):
    psi = spinor_with(0.6, 0.8, dirac)
    b = compute_bilinears(psi, dirac)
    assert (b.A, b.B, b.norm_J) == pytest.approx((0.6, 0.8, 1.0))
    sc = rim_scalars(b, RimParams(1 + 1j, 1 - 1j, 1.0), dirac)
    assert sc.S == pytest.approx(0)
    assert sc.J2sigma == pytest.approx(1)
    assert sc.alpha == pytest.approx(cmath.exp(0.5j))
    assert sc.T == pytest.approx(principal_sqrt(2 / (1.6 * (0.6 - 0.8j))))
    assert abs(rim_scalars(b, RimParams(1 + 1j, 1 - 1j, 0.0), dirac).alpha - 1) < 1e-15


def test_scalars_reject_B_zero(dirac):
    with pytest.raises(InadmissibleSeed):
        rim_scalars(compute_bilinears([1, 0, 0, 0], dirac), RimParams(1 + 1j, 1 - 1j), dirac)


def test_potentials_generate_currents(dirac, rng):
    # d(S) = J and d(R) = K along the RIM flow (directional derivative)
    psi, p = random_spinors(rng), random_params(rng)
    b = compute_bilinears(psi, dirac)
    sc = rim_scalars(b, p, dirac)
    D = rim_derivative(psi, p, dirac)
    h = 1e-6
    for mu in range(4):
        nb = compute_bilinears(psi + h * D[mu], dirac)
        sc2 = rim_scalars(nb, p, dirac)
        assert (sc2.S - sc.S) / h == pytest.approx(b.J[mu], rel=1e-4, abs=1e-5)
        assert (sc2.R - sc.R) / h == pytest.approx(b.K[mu], rel=1e-4, abs=1e-5)


def test_dirac_spinor_worked_example(dirac):
    psi = spinor_with(0.6, 0.8, dirac)
    p = RimParams(1 + 1j, 1 - 1j, 0.0)
    sc = rim_scalars(compute_bilinears(psi, dirac), p, dirac)
    eye, g5 = np.eye(4), dirac.gamma5
    expect = sc.alpha * (sc.beta * (eye + g5) + (eye - g5) / sc.beta) @ psi
    assert np.allclose(build_dirac_from_rim(psi, p, dirac), expect)


def test_lemma1_single_and_sweep(basis):
    res = lemma1_sweep(300, 7, convention=basis.convention)
    assert res["violations"] == [] and res["side_assertion_failures"] == []
    assert res["class1_count"] == res["accepted"] >= 290


def test_lemma1_sweep_independent_of_workers():
    assert lemma1_sweep(40, 3, workers=1) == lemma1_sweep(40, 3, workers=2)


def test_lemma1_counterexample_on_diagonal(dirac):
    # |A| = |B| sends the built spinor to A_D = 0
    psi = spinor_with(0.5, 0.5, dirac)
    rep = verify_lemma1(psi, RimParams(1 + 1j, 1 - 1j, 0.3), dirac)
    assert rep.lounesto_class == LounestoClass.CLASS_3
    assert not rep.extra["lemma_holds"]


def test_lemma1_rejects_inadmissible(dirac):
    with pytest.raises(InadmissibleSeed):
        verify_lemma1([1, 0, 0, 0], RimParams(1 + 1j, 1 - 1j), dirac)
    with pytest.raises(InadmissibleSeed):
        verify_lemma1(sample_class(3, 0, dirac), RimParams(1 + 1j, 1 - 1j), dirac)


def test_rederived_closed_forms_match(basis, rng):
    for _ in range(50):
        psi, p = random_spinors(rng), random_params(rng)
        direct = direct_dirac_bilinears(build_dirac_from_rim(psi, p, basis), basis)
        pred = rederived_dirac_bilinears(compute_bilinears(psi, basis))
        c, mismatch = fit_global_constant(pred, direct)
        assert mismatch < 1e-10 and c == pytest.approx(1)


def test_printed_closed_forms_disagree(dirac, rng):
    mism = []
    for _ in range(20):
        psi, p = random_spinors(rng), random_params(rng)
        direct = direct_dirac_bilinears(build_dirac_from_rim(psi, p, dirac), dirac)
        mism.append(fit_global_constant(predicted_dirac_bilinears(psi, dirac), direct)[1])
    assert min(mism) > 1e-3


def test_printed_closed_form_boundary(dirac):
    assert abs(predicted_dirac_bilinears([1, 0, 0, 0], dirac).B) < 1e-15


def test_G_rest_frame_and_parallel(dirac):
    b = compute_bilinears([1, 0, 0, 0], dirac)
    G, _ = build_G(b, dirac)
    ref = dirac.gamma_lower[3] @ dirac.gamma_lower[0] @ dirac.gamma5
    c = np.vdot(ref, G) / np.vdot(ref, ref)
    assert abs(c) > 0.1 and np.allclose(G, c * ref)
    from dataclasses import replace
    assert np.allclose(build_G(replace(b, K=2 * b.J), dirac)[0], 0)


def test_G_is_involution(basis, rng):
    for _ in range(20):
        G, det = build_G(compute_bilinears(random_spinors(rng), basis), basis)
        assert np.allclose(G @ G, np.eye(4))
        assert abs(abs(det) - 1) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_lemma1_property(seed):
    rng = np.random.default_rng(seed)
    basis = build_gamma_basis()
    psi, p = random_spinors(rng), random_params(rng)
    b = compute_bilinears(psi, basis)
    if min(abs(b.A), abs(b.B), abs(abs(b.A) - abs(b.B))) < 1e-6 * b.norm2:
        return
    assert classify(compute_bilinears(build_dirac_from_rim(psi, p, basis), basis)).lounesto_class == 1
