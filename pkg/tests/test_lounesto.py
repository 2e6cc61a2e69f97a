import numpy as np
import pytest

from rimspinor.bilinears import BilinearSet, compute_bilinears
from rimspinor.clifford import chiral_rotation
from rimspinor.lounesto import (
    ClassificationError, LounestoClass, SampleNotFound, classify, classify_many, classify_spinor, sample_class,
)


def test_rest_frame_is_class_2(dirac):
    assert classify_spinor([1, 0, 0, 0], dirac).lounesto_class == LounestoClass.CLASS_2


def test_chiral_eigenstate_is_class_6(dirac):
    rep = classify_spinor(np.array([1, 0, 1, 0]) / np.sqrt(2), dirac)
    assert rep.lounesto_class == LounestoClass.CLASS_6
    assert not rep.zero_flags["K"]


@pytest.mark.parametrize("label", [1, 2, 3, 4, 5, 6])
@pytest.mark.parametrize("seed", [0, 42, 7])
def test_sampler_round_trip(basis, label, seed):
    psi = sample_class(label, seed, basis)
    rep = classify_spinor(psi, basis)
    assert rep.lounesto_class == label
    assert rep.regular == (label <= 3)


def test_sampler_is_reproducible(dirac):
    assert np.array_equal(sample_class(4, 11, dirac), sample_class(4, 11, dirac))


def test_sampler_reports_empty_search(dirac):
    with pytest.raises(SampleNotFound):
        sample_class(4, 0, dirac, max_tries=0)


def test_class_2_rotated_by_quarter_turn_is_class_3(dirac):
    psi = sample_class(2, 5, dirac)
    assert classify_spinor(chiral_rotation(psi, np.pi / 4, dirac), dirac).lounesto_class == 3


def test_scale_invariance(dirac):
    for label in (2, 5, 6):
        psi = sample_class(label, 3, dirac)
        assert classify_spinor(1e-6 * psi, dirac).lounesto_class == label
        assert classify_spinor(1e6 * psi, dirac).lounesto_class == label


def test_regular_classes_have_K_and_S(dirac):
    for label in (1, 2, 3):
        assert classify_spinor(sample_class(label, 1, dirac), dirac).regular_KS_nonzero


def test_refusals():
    z4 = np.zeros(4)
    with pytest.raises(ClassificationError, match="J"):
        classify(BilinearSet(1.0, 0.0, z4, z4, np.zeros((4, 4)), 1.0))
    with pytest.raises(ClassificationError, match="all vanish"):
        classify(BilinearSet(0.0, 0.0, np.array([1.0, 0, 0, 1]), z4, np.zeros((4, 4)), 1.0))
    with pytest.raises(ValueError):
        classify(compute_bilinears([1, 0, 0, 0]), tol=0)


def test_near_boundary_flag(dirac):
    psi = chiral_rotation(sample_class(2, 0, dirac), 2e-9, dirac)
    rep = classify_spinor(psi, dirac)
    assert "B" in rep.near_boundary


def test_random_spinors_are_class_1(dirac, rng):
    psi = rng.normal(size=(20000, 4)) + 1j * rng.normal(size=(20000, 4))
    labels = classify_many(compute_bilinears(psi, dirac))
    assert np.all(labels > 0)
    assert np.mean(labels == 1) >= 0.999


def test_vectorised_matches_scalar(dirac):
    psis = np.array([sample_class(k, 9, dirac) for k in range(1, 7)])
    labels = classify_many(compute_bilinears(psis, dirac))
    assert labels.tolist() == [1, 2, 3, 4, 5, 6]
