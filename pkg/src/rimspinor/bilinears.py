"""Bilinear covariants of a Dirac spinor and the Fierz aggregate identities.

All index placements are lower (``J_mu``, ``K_mu``, ``S_{mu nu}``)::

    A       = psibar psi
    B       = -psibar g_0123 psi
    J_mu    = psibar g_mu psi
    K_mu    = psibar i g_0123 g_mu psi
    S_mu_nu = psibar i g_mu g_nu psi        (mu != nu)

The aggregate is ``Z = A + J_mu g^mu + i/2 S_{mu nu} g^{mu nu}
- i g_0123 K_mu g^mu + g_0123 B``, which equals ``4 psi psibar``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import GammaBasis, METRIC, as_spinor, build_gamma_basis, dirac_adjoint, norm2

# imaginary parts of bilinears are rounding noise below this fraction of |psi|^2
REALITY_TOL = 1e-12
# |x| < ZERO_TOL * |psi|^2 counts as a vanishing bilinear
ZERO_TOL = 1e-9


@dataclass(frozen=True)
class BilinearSet:
    """Covariants of one spinor (or a batch; leading axes are broadcast).

    ``norm2`` is ``|psi|^2`` and sets the scale for zero tests.
    """

    A: np.ndarray | float
    B: np.ndarray | float
    J: np.ndarray
    K: np.ndarray
    S: np.ndarray
    norm2: np.ndarray | float

    @property
    def J2(self):
        """``J_mu J^mu``."""
        return np.einsum("...m,mn,...n->...", self.J, METRIC, self.J)

    @property
    def K2(self):
        return np.einsum("...m,mn,...n->...", self.K, METRIC, self.K)

    @property
    def norm_J(self):
        """``sqrt(J_mu J^mu)``; zero if rounding makes ``J^2`` negative."""
        return np.sqrt(np.maximum(self.J2, 0.0))

    @property
    def J_upper(self):
        return self.J @ METRIC

    @property
    def K_upper(self):
        return self.K @ METRIC

    def scaled(self, factor: float) -> "BilinearSet":
        return BilinearSet(
            self.A * factor, self.B * factor, self.J * factor,
            self.K * factor, self.S * factor, self.norm2 * factor,
        )

    def to_dict(self) -> dict:
        if np.ndim(self.A) != 0:
            raise ValueError("to_dict works on a single spinor's bilinears")
        return {
            "A": float(self.A),
            "B": float(self.B),
            "J": [float(x) for x in self.J],
            "K": [float(x) for x in self.K],
            "S": [[float(x) for x in row] for row in self.S],
        }


@dataclass(frozen=True)
class FierzReport:
    """Normalised residuals of the five aggregate identities.

    ``residuals[k]`` is the max-norm of identity ``k`` divided by ``|psi|^4``,
    in the order Z^2, Z g Z, Z i g_{mu nu} Z, Z g_0123 Z, Z i g_0123 g Z.
    """

    residuals: np.ndarray
    sigma: np.ndarray | float
    omega: np.ndarray | float

    def to_dict(self) -> dict:
        return {
            "residuals": [float(r) for r in np.ravel(self.residuals)],
            "sigma": float(self.sigma),
            "omega": float(self.omega),
        }


def _real(x, scale, what):
    bad = np.abs(np.imag(x)) > REALITY_TOL * np.expand_dims(scale, tuple(range(np.ndim(scale), np.ndim(x))))
    if np.any(bad):
        raise ArithmeticError(f"bilinear {what} has a non-negligible imaginary part")
    return np.real(x)


def compute_bilinears(psi, basis: GammaBasis | None = None) -> BilinearSet:
    """Bilinear covariants of ``psi`` (shape ``(4,)`` or ``(..., 4)``).

    Raises ``ValueError`` for a zero spinor. B is evaluated twice, as
    ``-psibar g_0123 psi`` and via ``i psibar g5 psi`` with the basis'
    stored sign; a disagreement means the conventions are broken and raises.
    """
    basis = basis or build_gamma_basis()
    psi = as_spinor(psi)
    n2 = norm2(psi)
    if np.any(n2 == 0):
        raise ValueError("zero spinor has no classification (J would vanish)")

    bar = dirac_adjoint(psi, basis)
    A = np.einsum("...i,...i->...", bar, psi)
    B = -np.einsum("...i,ij,...j->...", bar, basis.gamma0123, psi)
    B_chiral = 1j * np.einsum("...i,ij,...j->...", bar, basis.gamma5, psi)
    J = np.einsum("...i,mij,...j->...m", bar, basis.gamma_lower, psi)
    axial = 1j * np.einsum("ij,mjk->mik", basis.gamma0123, basis.gamma_lower)
    K = np.einsum("...i,mij,...j->...m", bar, axial, psi)
    S = 1j * np.einsum("...i,mnij,...j->...mn", bar, basis.sigma_lower, psi)

    if np.any(np.abs(B - basis.pseudoscalar_sign * B_chiral) > REALITY_TOL * n2):
        raise ArithmeticError("the two pseudoscalar formulas disagree under the stored sign")

    return BilinearSet(
        A=_real(A, n2, "A"),
        B=_real(B, n2, "B"),
        J=_real(J, n2, "J"),
        K=_real(K, n2, "K"),
        S=_real(S, n2, "S"),
        norm2=n2,
    )


def chiral_pseudoscalar(b: BilinearSet, basis: GammaBasis | None = None):
    """``i psibar g5 psi``, the pseudoscalar used in the Heisenberg equation."""
    basis = basis or build_gamma_basis()
    return basis.pseudoscalar_sign * b.B


def fpk_defect(b: BilinearSet):
    """``(J_mu J^mu - A^2 - B^2) / |psi|^4`` (zero for every spinor)."""
    return (b.J2 - b.A**2 - b.B**2) / b.norm2**2


def aggregate_Z(b: BilinearSet, basis: GammaBasis | None = None) -> np.ndarray:
    """The Fierz aggregate ``Z`` as a ``(..., 4, 4)`` complex matrix."""
    basis = basis or build_gamma_basis()
    A = np.asarray(b.A, dtype=complex)[..., None, None]
    B = np.asarray(b.B, dtype=complex)[..., None, None]
    eye = np.eye(4)
    Jslash = np.einsum("...m,mij->...ij", b.J, basis.gamma)
    Kslash = np.einsum("...m,mij->...ij", b.K, basis.gamma)
    tensor = basis.tensor_factor * np.einsum("...mn,mnij->...ij", b.S, basis.sigma_upper)
    g0123 = basis.gamma0123
    return (
        A * eye
        + Jslash
        + 1j * tensor
        - 1j * np.einsum("ij,...jk->...ik", g0123, Kslash)
        + B * g0123
    )


def fierz_residuals(psi, basis: GammaBasis | None = None) -> FierzReport:
    """Residuals of the five aggregate identities, with sigma = A, omega = B."""
    basis = basis or build_gamma_basis()
    b = compute_bilinears(psi, basis)
    Z = aggregate_Z(b, basis)
    scale = np.asarray(b.norm2) ** 2
    sigma, omega = b.A, b.B
    A = np.asarray(sigma)[..., None, None]
    Bm = np.asarray(omega)[..., None, None]

    def sand(M):
        # Z M Z for M of shape (k, 4, 4) -> (..., k, 4, 4)
        return np.einsum("...ij,kjl,...lm->...kim", Z, M, Z)

    def mx(x):
        return np.abs(x).max(axis=(-2, -1))

    r1 = mx(Z @ Z - 4 * A * Z)
    r2 = mx(sand(basis.gamma_lower) - 4 * b.J[..., :, None, None] * Z[..., None, :, :]).max(axis=-1)

    iu = np.triu_indices(4, 1)
    pairs = 1j * basis.sigma_lower[iu]
    S_pairs = b.S[..., iu[0], iu[1]]
    r3 = mx(sand(pairs) - 4 * S_pairs[..., :, None, None] * Z[..., None, :, :]).max(axis=-1)

    r4 = mx(Z @ basis.gamma0123 @ Z + 4 * Bm * Z)

    axial = 1j * np.einsum("ij,mjk->mik", basis.gamma0123, basis.gamma_lower)
    r5 = mx(sand(axial) - 4 * b.K[..., :, None, None] * Z[..., None, :, :]).max(axis=-1)

    res = np.stack([r1, r2, r3, r4, r5], axis=-1) / scale[..., None]
    return FierzReport(residuals=res, sigma=sigma, omega=omega)
