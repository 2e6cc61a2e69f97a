"""Dirac spinor bilinears, Lounesto classes and restricted Inomata-McKinley spinors."""

from .bilinears import BilinearSet, FierzReport, compute_bilinears, fierz_residuals
from .clifford import GammaBasis, build_gamma_basis, change_of_basis
from .lounesto import ClassificationReport, LounestoClass, classify, classify_spinor, sample_class
from .rim import RimParams, build_dirac_from_rim, validate_params, verify_lemma1

__version__ = "0.1.0"
