"""Lounesto's six spinor classes.

A spinor is sorted by which of its bilinears vanish (J never does)::

    1: A != 0, B != 0          4: A = B = 0, K != 0, S != 0
    2: A != 0, B == 0          5: A = B = 0, K == 0, S != 0
    3: A == 0, B != 0          6: A = B = 0, K != 0, S == 0

"Zero" means ``|x| < tol * |psi|^2``, so the class of ``lambda * psi`` does
not depend on ``lambda``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .bilinears import ZERO_TOL, BilinearSet, compute_bilinears
from .clifford import GammaBasis, build_gamma_basis, change_of_basis, chiral_project, chiral_rotation, random_spinors

# quantities within this factor of the threshold are flagged as ambiguous
NEAR_FACTOR = 10.0


class LounestoClass(enum.IntEnum):
    CLASS_1 = 1
    CLASS_2 = 2
    CLASS_3 = 3
    CLASS_4 = 4
    CLASS_5 = 5
    CLASS_6 = 6

    @property
    def regular(self) -> bool:
        return self.value <= 3

    @property
    def label(self) -> int:
        return int(self.value)


class ClassificationError(ValueError):
    """The bilinears do not fit the six-class table."""


class SampleNotFound(LookupError):
    """A bounded search for a class representative came back empty."""


@dataclass(frozen=True)
class ClassificationReport:
    lounesto_class: LounestoClass
    magnitudes: dict
    tolerance_used: float
    zero_flags: dict
    near_boundary: tuple = ()
    # regular classes are expected to have K and S both nonzero
    regular_KS_nonzero: bool | None = None
    extra: dict = field(default_factory=dict)

    @property
    def regular(self) -> bool:
        return self.lounesto_class.regular

    def to_dict(self) -> dict:
        out = {
            "class": self.lounesto_class.label,
            "regular": self.regular,
            "magnitudes": {k: float(v) for k, v in self.magnitudes.items()},
            "tolerance_used": self.tolerance_used,
            "zero_flags": dict(self.zero_flags),
            "near_boundary": list(self.near_boundary),
        }
        if self.regular_KS_nonzero is not None:
            out["regular_KS_nonzero"] = self.regular_KS_nonzero
        out.update(self.extra)
        return out


def _magnitudes(b: BilinearSet):
    return {
        "A": np.abs(b.A),
        "B": np.abs(b.B),
        "K": np.abs(b.K).max(axis=-1),
        "S": np.abs(b.S).max(axis=(-2, -1)),
        "J": np.abs(b.J).max(axis=-1),
    }


def _table(zA, zB, zK, zS):
    """Decision table on boolean arrays; 0 marks 'outside the six classes'."""
    label = np.zeros(np.shape(zA), dtype=int)
    label = np.where(~zA & ~zB, 1, label)
    label = np.where(~zA & zB, 2, label)
    label = np.where(zA & ~zB, 3, label)
    singular = zA & zB
    label = np.where(singular & ~zK & ~zS, 4, label)
    label = np.where(singular & zK & ~zS, 5, label)
    label = np.where(singular & ~zK & zS, 6, label)
    return label


def classify(b: BilinearSet, tol: float = ZERO_TOL) -> ClassificationReport:
    """Assign one of the six classes to a single spinor's bilinears."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    if np.ndim(b.A) != 0:
        raise ValueError("classify takes one spinor; use classify_many for batches")
    mags = {k: float(v) for k, v in _magnitudes(b).items()}
    thresh = tol * float(b.norm2)
    if mags["J"] < thresh:
        raise ClassificationError("current J vanishes; the class table presumes J != 0")
    zero = {k: mags[k] < thresh for k in ("A", "B", "K", "S")}
    label = int(_table(*(np.bool_(zero[k]) for k in ("A", "B", "K", "S"))))
    if label == 0:
        raise ClassificationError("A, B, K and S all vanish: outside the six classes")
    near = tuple(k for k in ("A", "B", "K", "S") if thresh / NEAR_FACTOR <= mags[k] < thresh * NEAR_FACTOR)
    cls = LounestoClass(label)
    ks = (not zero["K"] and not zero["S"]) if cls.regular else None
    return ClassificationReport(cls, mags, tol, zero, near, ks)


def classify_many(b: BilinearSet, tol: float = ZERO_TOL) -> np.ndarray:
    """Vectorised class labels for a batch; 0 marks a refusal."""
    mags = _magnitudes(b)
    thresh = tol * np.asarray(b.norm2)
    z = {k: mags[k] < thresh for k in mags}
    label = _table(z["A"], z["B"], z["K"], z["S"])
    return np.where(z["J"], 0, label)


def classify_spinor(psi, basis: GammaBasis | None = None, tol: float = ZERO_TOL) -> ClassificationReport:
    return classify(compute_bilinears(psi, basis), tol)


# -- representatives ----------------------------------------------------------

_EPS2 = np.array([[0, 1], [-1, 0]], dtype=complex)


def _singular_family(xi, c, basis: GammaBasis) -> np.ndarray:
    """``(xi, c * eps xi*)`` in the chiral representation, mapped to ``basis``.

    The two Weyl halves are orthogonal, so A = B = 0. ``c = 0`` is a Weyl
    spinor (class 6), ``|c| = 1`` a Majorana-type spinor (class 5) and any
    other nonzero ``c`` lands in class 4.
    """
    psi = np.concatenate([xi, c * (_EPS2 @ np.conj(xi))])
    return change_of_basis("chiral", basis.convention) @ psi


def _yt_angle(b: BilinearSet) -> float:
    return float(np.arctan2(b.B, b.A))


def sample_class(label: int, seed: int, basis: GammaBasis | None = None, *, max_tries: int = 64) -> np.ndarray:
    """A spinor of the requested class, reproducible from ``seed``.

    Classes 2 and 3 come from a chiral rotation of a random spinor that
    puts (A, B) on the corresponding axis. Class 4 is a bounded search over
    the singular family; ``SampleNotFound`` is raised if it comes up empty.
    """
    basis = basis or build_gamma_basis()
    cls = LounestoClass(int(label))
    rng = np.random.default_rng(seed)

    for _ in range(max_tries):
        if cls == LounestoClass.CLASS_1:
            psi = random_spinors(rng)
        elif cls in (LounestoClass.CLASS_2, LounestoClass.CLASS_3):
            psi = random_spinors(rng)
            b = compute_bilinears(psi, basis)
            target = 0.0 if cls == LounestoClass.CLASS_2 else np.pi / 2
            if rng.random() < 0.5:
                target += np.pi
            psi = chiral_rotation(psi, 0.5 * (target - _yt_angle(b)), basis)
        elif cls == LounestoClass.CLASS_6:
            psi = chiral_project(random_spinors(rng), "left" if rng.random() < 0.5 else "right", basis)
        else:
            xi = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            phase = np.exp(2j * np.pi * rng.random())
            if cls == LounestoClass.CLASS_5:
                c = phase
            else:
                # keep |c| well away from 0 and 1
                c = phase * rng.choice([rng.uniform(0.2, 0.8), rng.uniform(1.25, 5.0)])
            psi = _singular_family(xi, c, basis)
        try:
            if classify(compute_bilinears(psi, basis)).lounesto_class == cls:
                return psi
        except ClassificationError:
            continue
    raise SampleNotFound(f"no class-{cls.label} representative after {max_tries} tries (seed {seed})")
