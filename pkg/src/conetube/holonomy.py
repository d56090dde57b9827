"""Two-parameter family of SL(2, C) representations of the exterior group.

The group is generated by ``alpha, beta, gamma`` subject to

    alpha gamma = gamma beta
    gamma alpha beta alpha^-1 = alpha beta^-1 alpha beta alpha^-1 gamma.

The family is parametrized by ``x`` (the eigenvalue of alpha, which is the
second-cusp meridian) and ``y`` (minus the commutator trace defect of the
alpha/gamma pair). One matrix entry involves

    z = sqrt( x^2 (1 - x^2 - y) / w ),
    w = (x^2 y - x^2 + 1) (x^2 y + (x^2 - 1)^2),

whose branch is pinned at the complete structure ``(x, y) = (-1, 2i)``
where ``w = -4`` and ``z = -(1+i)/2``, and continued from there.

Peripheral elements: the second-cusp meridian/longitude pair is
``(alpha, gamma alpha^-1 gamma^-1 alpha beta^-1 alpha)``, both upper
triangular; the first-cusp pair is ``(gamma, alpha beta^-1 alpha^-1 beta)``.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .config import ensure_finite
from .jets import BranchError, continue_sqrt

BASE_X = complex(-1.0, 0.0)
BASE_Y = complex(0.0, 2.0)
BASE_Z = complex(-0.5, -0.5)
# radicand of z at the base
BASE_Z_SQUARED = complex(0.0, 0.5)


class HolonomyError(ValueError):
    pass


def _mat(a, b, c, d) -> np.ndarray:
    return np.array([[a, b], [c, d]], dtype=complex)


def sl2_inverse(m: np.ndarray) -> np.ndarray:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det - 1.0) > 1e-8:
        raise HolonomyError(f"matrix determinant {det!r} is not 1")
    return _mat(m[1, 1], -m[0, 1], -m[1, 0], m[0, 0])


def z_radicand(x: complex, y: complex) -> tuple[complex, complex]:
    """Return (w, z^2) at the parameters (x, y)."""
    x2 = x * x
    w = (x2 * y - x2 + 1.0) * (x2 * y + (x2 - 1.0) ** 2)
    if w == 0:
        raise HolonomyError("family is singular here (w = 0)")
    return w, x2 * (1.0 - x2 - y) / w


@dataclasses.dataclass(frozen=True)
class Representation:
    x: complex
    y: complex
    z: complex
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray


def build_representation(x: complex, y: complex, z_value: complex) -> Representation:
    """Assemble matrices at (x, y) with an explicitly chosen branch of z."""
    x, y, z = complex(x), complex(y), complex(z_value)
    ensure_finite(x, y, z)
    if x == 0:
        raise HolonomyError("x = 0 is outside the family")
    w, z2 = z_radicand(x, y)
    if abs(z * z - z2) > 1e-8 * max(1.0, abs(z2)):
        raise HolonomyError(f"z value {z!r} does not square to the radicand {z2!r}")
    x2 = x * x
    alpha = _mat(x, 1.0, 0.0, 1.0 / x)
    beta = _mat(x, 0.0, y, 1.0 / x)
    g11 = -x * (x2 * y * y + x2 * (x2 - 3.0) * y - (x2 - 1.0) ** 2) / (z * w)
    gamma = _mat(g11, z, z * y, z * (1.0 - x2) / x)
    det = gamma[0, 0] * gamma[1, 1] - gamma[0, 1] * gamma[1, 0]
    if abs(det - 1.0) > 1e-8:
        raise HolonomyError(f"gamma determinant {det!r} is not 1")
    return Representation(x, y, z, alpha, beta, gamma)


class RepresentationFamily:
    """Branch-tracked access to the family; continue z as (x, y) moves."""

    def __init__(self) -> None:
        self.z_anchor: tuple[complex, complex] = (BASE_Z_SQUARED, BASE_Z)

    def representation(self, x: complex, y: complex, commit: bool = False) -> Representation:
        _, z2 = z_radicand(x, y)
        try:
            z = continue_sqrt(z2, *self.z_anchor)
        except BranchError as exc:
            raise HolonomyError(f"z branch lost: {exc}") from exc
        if commit:
            self.z_anchor = (z2, z)
        return build_representation(x, y, z)


def base_representation() -> Representation:
    return build_representation(BASE_X, BASE_Y, BASE_Z)


def relation_residuals(rep: Representation) -> tuple[float, float]:
    """Max-norm residuals of the two defining group relations."""
    a, b, g = rep.alpha, rep.beta, rep.gamma
    ai = sl2_inverse(a)
    bi = sl2_inverse(b)
    r1 = a @ g - g @ b
    r2 = g @ a @ b @ ai - a @ bi @ a @ b @ ai @ g
    return float(np.max(np.abs(r1))), float(np.max(np.abs(r2)))


@dataclasses.dataclass(frozen=True)
class PeripheralMatrices:
    meridian1: np.ndarray
    longitude1: np.ndarray
    meridian2: np.ndarray
    longitude2: np.ndarray


def peripheral_matrices(rep: Representation) -> PeripheralMatrices:
    a, b, g = rep.alpha, rep.beta, rep.gamma
    ai = sl2_inverse(a)
    bi = sl2_inverse(b)
    gi = sl2_inverse(g)
    return PeripheralMatrices(
        meridian1=g,
        longitude1=a @ bi @ ai @ b,
        meridian2=a,
        longitude2=g @ ai @ gi @ a @ bi @ a,
    )


def l2_eigenvalue(x: complex, y: complex) -> complex:
    """Second-cusp longitude eigenvalue paired with meridian eigenvalue x."""
    x2 = x * x
    den = -1.0 + x2 + y
    if den == 0:
        raise HolonomyError("longitude eigenvalue is singular here")
    return (-1.0 + x2 - x2 * y) / den


def y_from_l2(x: complex, l2: complex) -> complex:
    """Invert l2_eigenvalue in y at fixed x."""
    den = l2 + x * x
    if den == 0:
        raise HolonomyError("(x, l2) lies on the exceptional locus")
    return (x * x - 1.0) * (1.0 - l2) / den


def commutator_trace_minus2(rep: Representation) -> complex:
    """tr of the alpha/gamma commutator minus 2; equals -y on the family."""
    a, g = rep.alpha, rep.gamma
    comm = a @ g @ sl2_inverse(a) @ sl2_inverse(g)
    return comm[0, 0] + comm[1, 1] - 2.0


def trace_identity_m1(m2: complex, l2: complex) -> complex:
    """(m1 + 1/m1)^2 expressed through the second-cusp eigenvalues."""
    m2sq = m2 * m2
    den = l2 * (l2 + m2sq) * (m2sq - 1.0)
    if den == 0:
        raise HolonomyError("trace identity singular at this point")
    return (1.0 + l2) ** 2 * (m2sq * m2sq - l2) / den


def trace_identity_l1(m2: complex, l2: complex) -> complex:
    """l1 + 1/l1 expressed through the second-cusp eigenvalues."""
    m2sq = m2 * m2
    m4 = m2sq * m2sq
    den = m2sq * (l2 + m2sq) ** 2
    if den == 0:
        raise HolonomyError("trace identity singular at this point")
    num = (
        l2 * l2 * (1.0 + m4)
        + l2 * (-1.0 + 2.0 * m2sq + 2.0 * m4 + 2.0 * m4 * m2sq - m4 * m4)
        + m4
        + m4 * m4
    )
    return num / den


def cusp_relation_residuals(rep: Representation) -> tuple[float, float]:
    """Commutation defect of each cusp's meridian/longitude pair."""
    per = peripheral_matrices(rep)
    r1 = per.meridian1 @ per.longitude1 - per.longitude1 @ per.meridian1
    r2 = per.meridian2 @ per.longitude2 - per.longitude2 @ per.meridian2
    return float(np.max(np.abs(r1))), float(np.max(np.abs(r2)))
