"""Gamma matrices for Cl(1,3), Dirac adjoints and chiral projectors.

Two representations are available, ``"standard-Dirac"`` and ``"chiral"``.
Both use the metric diag(+1, -1, -1, -1) and the same sign conventions:

* ``gamma5 = i g^0 g^1 g^2 g^3``
* ``gamma0123 = g_0 g_1 g_2 g_3`` (lower indices, i.e. ``-g^0 g^1 g^2 g^3``)

With these choices ``gamma0123 = i gamma5``. The relation is measured when the
basis is built and stored on it (``g5_per_g0123`` and ``pseudoscalar_sign``).

Spinors are plain ``complex128`` arrays with a trailing axis of length 4.
Every function accepts a single spinor ``(4,)`` or a batch ``(..., 4)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

CONVENTIONS = ("standard-Dirac", "chiral")
_ALIASES = {
    "standard-dirac": "standard-Dirac",
    "dirac": "standard-Dirac",
    "standard": "standard-Dirac",
    "chiral": "chiral",
    "weyl": "chiral",
}

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])
METRIC.setflags(write=False)

_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# psi_chiral = _DIRAC_TO_CHIRAL @ psi_dirac
_DIRAC_TO_CHIRAL = np.array(
    [[1, 0, -1, 0], [0, 1, 0, -1], [1, 0, 1, 0], [0, 1, 0, 1]], dtype=complex
) / np.sqrt(2.0)


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GammaBasis:
    """A concrete representation of the Dirac algebra.

    Attributes
    ----------
    gamma : ndarray, shape (4, 4, 4)
        Upper-index matrices ``gamma[mu] = g^mu``.
    gamma_lower : ndarray, shape (4, 4, 4)
        ``g_mu = eta_{mu nu} g^nu``.
    gamma5, gamma0123 : ndarray, shape (4, 4)
    sigma_lower : ndarray, shape (4, 4, 4, 4)
        ``g_{mu nu} = (g_mu g_nu - g_nu g_mu) / 2``.
    g5_per_g0123 : complex
        The constant ``c`` with ``gamma5 = c * gamma0123``.
    pseudoscalar_sign : int
        ``-psibar gamma0123 psi == pseudoscalar_sign * (i psibar gamma5 psi)``.
    tensor_factor : float
        Weight of ``S_{mu nu} g^{mu nu}`` in the Fierz aggregate when the
        sum runs over all ordered pairs (mu, nu).
    """

    convention: str
    gamma: np.ndarray
    gamma5: np.ndarray
    gamma0123: np.ndarray
    gamma_lower: np.ndarray = field(repr=False)
    sigma_lower: np.ndarray = field(repr=False)
    sigma_upper: np.ndarray = field(repr=False)
    metric: np.ndarray = field(default=METRIC, repr=False)
    g5_per_g0123: complex = 0j
    pseudoscalar_sign: int = 0
    tensor_factor: float = 0.5

    @property
    def identity(self) -> np.ndarray:
        return np.eye(4, dtype=complex)

    @property
    def to_standard(self) -> np.ndarray:
        """Unitary ``U`` with ``psi_standard = U @ psi`` for spinors in this basis."""
        return change_of_basis(self.convention, "standard-Dirac")


def _canonical(convention: str) -> str:
    key = str(convention).strip()
    if key in CONVENTIONS:
        return key
    try:
        return _ALIASES[key.lower()]
    except KeyError:
        raise ValueError(
            f"unknown gamma convention {convention!r}; supported: {', '.join(CONVENTIONS)}"
        ) from None


def _raw_gammas(convention: str) -> list[np.ndarray]:
    spatial = [np.block([[_Z2, s], [-s, _Z2]]) for s in PAULI]
    if convention == "standard-Dirac":
        g0 = np.block([[_I2, _Z2], [_Z2, -_I2]])
    else:
        g0 = np.block([[_Z2, _I2], [_I2, _Z2]])
    return [g0, *spatial]


def build_gamma_basis(convention: str = "standard-Dirac") -> GammaBasis:
    """Return the (cached, immutable) gamma basis for ``convention``."""
    return _build(_canonical(convention))


@lru_cache(maxsize=None)
def _build(convention: str) -> GammaBasis:
    g = np.array(_raw_gammas(convention))
    gl = np.einsum("mn,nij->mij", METRIC, g)
    g5 = 1j * g[0] @ g[1] @ g[2] @ g[3]
    g0123 = gl[0] @ gl[1] @ gl[2] @ gl[3]

    # gamma5 = c * gamma0123 with c = tr(g5 g0123^-1)/4 and g0123^-1 = -g0123
    c = np.trace(g5 @ -g0123) / 4.0
    if not np.allclose(g5, c * g0123, atol=1e-15):
        raise AssertionError("gamma5 is not proportional to gamma0123")
    # -g0123 = sign * i g5  ->  sign = tr(-g0123 g5) / (4i)
    sign = np.trace(-g0123 @ g5) / 4j
    if not (abs(sign.imag) < 1e-15 and abs(abs(sign.real) - 1) < 1e-15):
        raise AssertionError("pseudoscalar relation is not +-1")

    sig_l = 0.5 * (np.einsum("mij,njk->mnik", gl, gl) - np.einsum("nij,mjk->mnik", gl, gl))
    sig_u = 0.5 * (np.einsum("mij,njk->mnik", g, g) - np.einsum("nij,mjk->mnik", g, g))
    return GammaBasis(
        convention=convention,
        gamma=_frozen(g),
        gamma5=_frozen(g5),
        gamma0123=_frozen(g0123),
        gamma_lower=_frozen(gl),
        sigma_lower=_frozen(sig_l),
        sigma_upper=_frozen(sig_u),
        g5_per_g0123=complex(np.round(c, 15)),
        pseudoscalar_sign=int(round(sign.real)),
    )


def change_of_basis(src: str, dst: str) -> np.ndarray:
    """Unitary ``U`` mapping spinor components: ``psi_dst = U @ psi_src``.

    Gamma matrices transform as ``g_dst = U g_src U^dagger``.
    """
    src, dst = _canonical(src), _canonical(dst)
    if src == dst:
        return np.eye(4, dtype=complex)
    if src == "standard-Dirac":
        return _DIRAC_TO_CHIRAL.copy()
    return _DIRAC_TO_CHIRAL.conj().T.copy()


def as_spinor(psi) -> np.ndarray:
    """Coerce to a complex array with trailing dimension 4; reject NaN/Inf."""
    arr = np.asarray(psi, dtype=complex)
    if arr.shape[-1:] != (4,):
        raise ValueError(f"spinor must have trailing dimension 4, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("spinor has non-finite components")
    return arr


def norm2(psi) -> np.ndarray | float:
    """Squared Euclidean norm ``sum |psi_i|^2`` (batch aware)."""
    psi = np.asarray(psi)
    return np.einsum("...i,...i->...", psi.conj(), psi).real


def dirac_adjoint(psi, basis: GammaBasis | None = None) -> np.ndarray:
    """Row spinor ``psibar = psi^dagger g^0``."""
    basis = basis or build_gamma_basis()
    return np.einsum("...i,ij->...j", as_spinor(psi).conj(), basis.gamma[0])


def sandwich(psi, matrix, basis: GammaBasis | None = None, phi=None) -> np.ndarray:
    """``psibar @ matrix @ phi`` (``phi`` defaults to ``psi``); complex result."""
    psi = as_spinor(psi)
    phi = psi if phi is None else as_spinor(phi)
    bar = dirac_adjoint(psi, basis)
    return np.einsum("...i,ij,...j->...", bar, matrix, phi)


def chiral_project(psi, handedness: str, basis: GammaBasis | None = None) -> np.ndarray:
    """``(1 + g5) psi / 2`` for ``"left"`` and ``(1 - g5) psi / 2`` for ``"right"``."""
    basis = basis or build_gamma_basis()
    psi = as_spinor(psi)
    if handedness == "left":
        sign = 1.0
    elif handedness == "right":
        sign = -1.0
    else:
        raise ValueError(f"handedness must be 'left' or 'right', got {handedness!r}")
    proj = 0.5 * (np.eye(4) + sign * basis.gamma5)
    return np.einsum("ij,...j->...i", proj, psi)


def slash(v, basis: GammaBasis | None = None) -> np.ndarray:
    """``g^mu v_mu`` for a lower-index 4-vector ``v`` (batch aware)."""
    basis = basis or build_gamma_basis()
    return np.einsum("...m,mij->...ij", np.asarray(v), basis.gamma)


def anticommutator_defect(basis: GammaBasis, mu: int, nu: int) -> float:
    """Max-norm of ``{g^mu, g^nu} - 2 eta^{mu nu} I``."""
    g = basis.gamma
    ac = g[mu] @ g[nu] + g[nu] @ g[mu]
    return float(np.abs(ac - 2 * METRIC[mu, nu] * np.eye(4)).max())


def chiral_rotation(psi, angle: float, basis: GammaBasis | None = None) -> np.ndarray:
    """``exp(i angle g5) psi``.

    The rotation turns the pair (A, B) of scalar and pseudoscalar bilinears
    by ``2 * angle`` and leaves J and K untouched.
    """
    basis = basis or build_gamma_basis()
    rot = np.cos(angle) * np.eye(4) + 1j * np.sin(angle) * basis.gamma5
    return np.einsum("ij,...j->...i", rot, as_spinor(psi))


def random_spinors(rng: np.random.Generator, n: int | None = None) -> np.ndarray:
    """Standard complex Gaussian spinors, shape ``(4,)`` or ``(n, 4)``."""
    shape = (4,) if n is None else (n, 4)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
