"""Restricted Inomata-McKinley (RIM) spinors.

A RIM spinor obeys ``d_mu psi = (a J_mu + b K_mu g5) psi`` with complex
``a``, ``b`` and ``Re a == Re b``. Such spinors solve the Heisenberg equation
``[i g^mu d_mu - 2s (A + i B5 g5)] psi = 0`` with ``2s = i (a - b)``, where
``B5 = i psibar g5 psi``. A Dirac spinor is assembled from a RIM seed as::

    psi_D = alpha * J^{2 sigma} * [beta (1 + g5) + beta^-1 (1 - g5)] psi_H

This module evaluates that construction and its scalars, and checks the
classification of the result.
"""

from __future__ import annotations

import cmath
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bilinears import ZERO_TOL, BilinearSet, chiral_pseudoscalar, compute_bilinears
from .clifford import GammaBasis, as_spinor, build_gamma_basis, dirac_adjoint, random_spinors
from .lounesto import ClassificationReport, LounestoClass, classify

PARAM_TOL = 1e-12


class RimError(ValueError):
    """Invalid RIM parameters or a spinor outside the construction's domain."""


class InadmissibleSeed(RimError):
    pass


@dataclass(frozen=True)
class RimParams:
    a: complex
    b: complex
    M: float = 0.0

    @property
    def s(self) -> float:
        """Heisenberg coupling from ``2s = i(a - b)``."""
        return (0.5j * (self.a - self.b)).real

    def to_dict(self) -> dict:
        return {
            "a": [self.a.real, self.a.imag],
            "b": [self.b.real, self.b.imag],
            "M": self.M,
            "s": self.s,
        }


@dataclass(frozen=True)
class RimScalars:
    S: complex
    R: complex
    alpha: complex
    beta: complex
    J2sigma: complex
    sigma_exp: complex
    T: complex

    def to_dict(self) -> dict:
        return {k: [complex(v).real, complex(v).imag] for k, v in self.__dict__.items()}


def principal_sqrt(z):
    """``sqrt|z| (z + |z|) / |z + |z||``; undefined on the non-positive reals."""
    z = complex(z)
    w = z + abs(z)
    if abs(w) == 0.0:
        raise RimError(f"principal_sqrt: {z} lies on the branch cut")
    return math.sqrt(abs(z)) * w / abs(w)


def validate_params(a: complex, b: complex, M: float = 0.0) -> RimParams:
    """Check integrability and non-degeneracy of ``(a, b)``."""
    a, b, M = complex(a), complex(b), float(M)
    scale = max(1.0, abs(a), abs(b))
    if abs(a.real - b.real) > PARAM_TOL * scale:
        raise RimError(f"integrability needs Re(a) == Re(b); got {a.real} vs {b.real}")
    if a.real == 0.0:
        raise RimError("Re(a) = 0 makes S, sigma and alpha undefined")
    if b.imag == 0.0:
        raise RimError("Im(b) = 0 makes R undefined (b - conj(b) = 0)")
    if not math.isfinite(M):
        raise RimError("mass must be finite")
    p = RimParams(a, b, M)
    if abs((0.5j * (a - b)).imag) > PARAM_TOL * scale:
        raise RimError("coupling s is not real")
    return p


def _check_regular(b: BilinearSet, tol: float = ZERO_TOL):
    thresh = tol * np.asarray(b.norm2)
    singular = (np.abs(b.A) < thresh) & (np.abs(b.B) < thresh)
    if np.any(singular):
        raise RimError("RIM construction needs a regular spinor (A and B both vanish)")


def rim_derivative(psi, p: RimParams, basis: GammaBasis | None = None) -> np.ndarray:
    """``(a J_mu + b K_mu g5) psi`` for mu = 0..3, shape ``(..., 4, 4)`` [mu, component]."""
    basis = basis or build_gamma_basis()
    psi = as_spinor(psi)
    b = compute_bilinears(psi, basis)
    _check_regular(b)
    g5psi = np.einsum("ij,...j->...i", basis.gamma5, psi)
    return (p.a * b.J[..., :, None] * psi[..., None, :]
            + p.b * b.K[..., :, None] * g5psi[..., None, :])


def heisenberg_residual(psi, derivs, s: float, basis: GammaBasis | None = None):
    """``|i g^mu d_mu psi - 2s (A + i B5 g5) psi| / |psi|^3``."""
    basis = basis or build_gamma_basis()
    psi = as_spinor(psi)
    derivs = np.asarray(derivs, dtype=complex)
    b = compute_bilinears(psi, basis)
    B5 = chiral_pseudoscalar(b, basis)
    kinetic = 1j * np.einsum("mij,...mj->...i", basis.gamma, derivs)
    g5psi = np.einsum("ij,...j->...i", basis.gamma5, psi)
    mass = 2 * s * (np.asarray(b.A)[..., None] * psi + 1j * np.asarray(B5)[..., None] * g5psi)
    return np.linalg.norm(kinetic - mass, axis=-1) / np.asarray(b.norm2) ** 1.5


def lagrangian_density(psi, derivs, s: float, basis: GammaBasis | None = None):
    """``(i/2) psibar g^mu d_mu psi - (i/2) (d_mu psibar) g^mu psi - s J_mu J^mu``."""
    basis = basis or build_gamma_basis()
    psi = as_spinor(psi)
    derivs = np.asarray(derivs, dtype=complex)
    bar = dirac_adjoint(psi, basis)
    dbar = np.einsum("...mi,ij->...mj", derivs.conj(), basis.gamma[0])
    fwd = np.einsum("...i,mij,...mj->...", bar, basis.gamma, derivs)
    back = np.einsum("...mi,mij,...j->...", dbar, basis.gamma, psi)
    b = compute_bilinears(psi, basis)
    return 0.5j * fwd - 0.5j * back - s * b.J2


def rim_scalars(b: BilinearSet, p: RimParams, basis: GammaBasis | None = None,
                tol: float = ZERO_TOL) -> RimScalars:
    """Scalars of the decomposition for a single seed's bilinears.

    Seeds with B = 0 are rejected: the potential R would be constant, which
    forces K = 0, impossible for a regular spinor.
    """
    basis = basis or build_gamma_basis()
    A, B, n2 = float(b.A), float(b.B), float(b.norm2)
    thresh = tol * n2
    if abs(B) < thresh:
        raise InadmissibleSeed("B = 0 seed: K = dR would vanish, contradicting regularity")
    J = float(b.norm_J)
    if J < thresh:
        raise InadmissibleSeed("J vanishes")
    if J + A < thresh:
        raise InadmissibleSeed("J + A = 0: T_(ABJ) undefined")
    a, bb = p.a, p.b
    B5 = basis.pseudoscalar_sign * B
    S = math.log(J) / (a + a.conjugate())
    R = cmath.log(complex(A, -B5) / J) / (bb - bb.conjugate())
    alpha = cmath.exp(1j * p.M / (2 * a.real * J))
    beta = principal_sqrt(J / complex(A, -B))
    J2sigma = cmath.exp((2j * p.s - (bb - bb.conjugate()) / 2) * S)
    sigma_exp = -1j * a.imag / (4 * a.real)
    T = principal_sqrt(2 / ((J + A) * complex(A, -B)))
    return RimScalars(S=S, R=R, alpha=alpha, beta=beta, J2sigma=J2sigma, sigma_exp=sigma_exp, T=T)


def dirac_operator_from_scalars(sc: RimScalars, basis: GammaBasis) -> np.ndarray:
    eye = np.eye(4)
    g5 = basis.gamma5
    return sc.alpha * sc.J2sigma * (sc.beta * (eye + g5) + (eye - g5) / sc.beta)


def build_dirac_from_rim(psi_H, p: RimParams, basis: GammaBasis | None = None,
                         tol: float = ZERO_TOL) -> np.ndarray:
    """Dirac spinor assembled from a RIM seed (bracket form, no 1/2 on projectors)."""
    basis = basis or build_gamma_basis()
    psi_H = as_spinor(psi_H)
    sc = rim_scalars(compute_bilinears(psi_H, basis), p, basis, tol)
    return dirac_operator_from_scalars(sc, basis) @ psi_H


@dataclass(frozen=True)
class DiracBilinearPrediction:
    """Complex-valued A_D, B_D and upper-index J_D, K_D."""

    A: complex
    B: complex
    J: np.ndarray
    K: np.ndarray

    def as_vector(self) -> np.ndarray:
        return np.concatenate([[self.A, self.B], self.J, self.K])

    def to_dict(self) -> dict:
        def c(z):
            return [float(np.real(z)), float(np.imag(z))]
        return {"A": c(self.A), "B": c(self.B), "J": [c(z) for z in self.J], "K": [c(z) for z in self.K]}


def predicted_dirac_bilinears(psi_H, basis: GammaBasis | None = None,
                              tol: float = ZERO_TOL) -> DiracBilinearPrediction:
    """Closed forms for the Dirac bilinears, evaluated with the printed weights.

    With ``P = 1 + g5``, ``Q = 1 - g5`` and ``T = sqrt(2 / ((J + A)(A - iB)))``::

        A_D =     T psibar [(A+J-B) P + (A+J+B)(A-iB)/J Q] psi
        B_D =   i T psibar [(A+J-B) P - (A+J+B)(A-iB)/J Q] psi
        J_D =     T psibar g^mu [(A+J+B) P + (A+J-B)(A-iB)/J Q] psi
        K_D =  -i T psibar g^mu [(A+J+B) P - (A+J-B)(A-iB)/J Q] psi

    These do *not* reproduce the bilinears of ``build_dirac_from_rim``; see
    ``rederived_dirac_bilinears`` for forms that do.
    """
    basis = basis or build_gamma_basis()
    psi_H = as_spinor(psi_H)
    b = compute_bilinears(psi_H, basis)
    A, B, J = float(b.A), float(b.B), float(b.norm_J)
    if abs(complex(A, -B)) < tol * float(b.norm2) or J + A < tol * float(b.norm2):
        raise InadmissibleSeed("closed forms need A - iB != 0 and J + A != 0")
    T = principal_sqrt(2 / ((J + A) * complex(A, -B)))
    eye, g5 = np.eye(4), basis.gamma5
    P, Q = eye + g5, eye - g5
    w = complex(A, -B) / J
    bar = dirac_adjoint(psi_H, basis)

    def s(M):
        return bar @ M @ psi_H

    def sv(M):
        return np.einsum("i,mij,jk,k->m", bar, basis.gamma, M, psi_H)

    A_D = T * s((A + J - B) * P + (A + J + B) * w * Q)
    B_D = 1j * T * s((A + J - B) * P - (A + J + B) * w * Q)
    J_D = T * sv((A + J + B) * P + (A + J - B) * w * Q)
    K_D = -1j * T * sv((A + J + B) * P - (A + J - B) * w * Q)
    return DiracBilinearPrediction(A_D, B_D, J_D, K_D)


def rederived_dirac_bilinears(b: BilinearSet) -> DiracBilinearPrediction:
    """Bilinears of ``build_dirac_from_rim`` from the seed's, in closed form.

    The bracket is ``2 exp(i phi g5)`` with ``exp(2i phi) = (A + iB)/J``, so
    (A, B) is turned by the seed's own angle and J, K are only rescaled::

        A_D = 4 (A^2 - B^2) / J,  B_D = 8 A B / J,  J_D = 4 J,  K_D = 4 K
    """
    A, B, J = float(b.A), float(b.B), float(b.norm_J)
    return DiracBilinearPrediction(
        4 * (A * A - B * B) / J + 0j, 8 * A * B / J + 0j,
        4 * b.J_upper.astype(complex), 4 * b.K_upper.astype(complex),
    )


def direct_dirac_bilinears(psi_D, basis: GammaBasis | None = None) -> DiracBilinearPrediction:
    b = compute_bilinears(psi_D, basis)
    return DiracBilinearPrediction(complex(b.A), complex(b.B), b.J_upper.astype(complex), b.K_upper.astype(complex))


def fit_global_constant(pred: DiracBilinearPrediction, direct: DiracBilinearPrediction):
    """Least-squares ``c`` with ``pred ~ c * direct``; returns ``(c, relative mismatch)``."""
    p, d = pred.as_vector(), direct.as_vector()
    c = np.vdot(d, p) / np.vdot(d, d)
    mismatch = np.abs(p - c * d).max() / max(np.abs(p).max(), np.finfo(float).tiny)
    return complex(c), float(mismatch)


def verify_lemma1(psi_H, p: RimParams, basis: GammaBasis | None = None,
                  tol: float = ZERO_TOL) -> ClassificationReport:
    """Build the Dirac spinor from a class-1 seed and classify it.

    The report's ``extra`` carries ``lemma_holds`` and the side checks
    ``|A + J +- B| > tol |psi|^2`` on the seed.
    """
    basis = basis or build_gamma_basis()
    psi_H = as_spinor(psi_H)
    bH = compute_bilinears(psi_H, basis)
    thresh = tol * float(bH.norm2)
    if abs(float(bH.A)) < thresh:
        raise InadmissibleSeed("seed has A = 0; a class-1 seed is required")
    psi_D = build_dirac_from_rim(psi_H, p, basis, tol)
    report = classify(compute_bilinears(psi_D, basis), tol)
    A, B, J = float(bH.A), float(bH.B), float(bH.norm_J)
    side_plus, side_minus = abs(A + J + B), abs(A + J - B)
    extra = {
        "lemma_holds": report.lounesto_class == LounestoClass.CLASS_1,
        "seed_class": classify(bH, tol).lounesto_class.label,
        "side_A_plus_J_plus_B": side_plus,
        "side_A_plus_J_minus_B": side_minus,
        "side_assertions_hold": side_plus > thresh and side_minus > thresh,
    }
    return ClassificationReport(
        report.lounesto_class, report.magnitudes, report.tolerance_used,
        report.zero_flags, report.near_boundary, report.regular_KS_nonzero, extra,
    )


def random_params(rng: np.random.Generator) -> RimParams:
    """Admissible ``(a, b, M)``: shared real part away from 0, Im(b) away from 0."""
    re = rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 2.0)
    im_b = rng.choice([-1.0, 1.0]) * rng.uniform(0.05, 2.0)
    return validate_params(complex(re, rng.normal()), complex(re, im_b), rng.uniform(0.0, 5.0))


def _lemma1_chunk(args):
    seeds, tol, convention = args
    basis = build_gamma_basis(convention)
    out = []
    for trial, ss in seeds:
        rng = np.random.default_rng(ss)
        psi = random_spinors(rng)
        p = random_params(rng)
        try:
            rep = verify_lemma1(psi, p, basis, tol)
        except InadmissibleSeed as exc:
            out.append((trial, "rejected", str(exc), None))
            continue
        out.append((trial, "ok", rep.lounesto_class.label, rep.extra["side_assertions_hold"]))
    return out


def lemma1_sweep(trials: int, seed: int, tol: float = ZERO_TOL,
                 convention: str = "standard-Dirac", workers: int = 1) -> dict:
    """Monte-Carlo check over random (seed spinor, parameters) pairs.

    Trial ``k`` draws from ``SeedSequence(seed).spawn(trials)[k]``, so the
    outcome does not depend on ``workers``.
    """
    children = list(enumerate(np.random.SeedSequence(seed).spawn(trials)))
    if workers > 1:
        size = -(-len(children) // workers)
        chunks = [(children[i:i + size], tol, convention) for i in range(0, len(children), size)]
        with ProcessPoolExecutor(workers) as pool:
            results = [r for part in pool.map(_lemma1_chunk, chunks) for r in part]
    else:
        results = _lemma1_chunk((children, tol, convention))

    classes = Counter()
    reasons = Counter()
    violations = []
    side_failures = []
    for trial, status, info, side_ok in results:
        if status == "rejected":
            reasons[info] += 1
            continue
        classes[info] += 1
        if info != 1:
            violations.append({"trial": trial, "class": info})
        if not side_ok:
            side_failures.append(trial)
    accepted = sum(classes.values())
    return {
        "trials": trials,
        "accepted": accepted,
        "class1_count": classes.get(1, 0),
        "class_counts": {str(k): v for k, v in sorted(classes.items())},
        "rejected": sum(reasons.values()),
        "rejection_reasons": dict(reasons),
        "violations": violations,
        "side_assertion_failures": side_failures,
    }


def build_G(b: BilinearSet, basis: GammaBasis | None = None, tol: float = ZERO_TOL):
    """``G = J^mu K^nu [g_nu, g_mu] g5 / (2 J^2)``; returns ``(G, det G)``."""
    basis = basis or build_gamma_basis()
    J2 = float(b.J2)
    if J2 <= (tol * float(b.norm2)) ** 2:
        raise RimError("J^2 vanishes; G undefined")
    gl = basis.gamma_lower
    comm = np.einsum("nij,mjk->nmik", gl, gl) - np.einsum("mij,njk->nmik", gl, gl)
    G = np.einsum("m,n,nmik,kl->il", b.J_upper, b.K_upper, comm, basis.gamma5) / (2 * J2)
    return G, complex(np.linalg.det(G))
