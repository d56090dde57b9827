"""Shape solutions of the two-tetrahedron gluing variety and cusp eigenvalues.

The exterior is triangulated by two ideal tetrahedra carrying four shape
parameters ``z1..z4``. Consistency of the gluing reduces to two polynomial
equations,

    (1-z1)(1-z4) = (1-z2)(1-z3)
    (1-z1)(1-z2)(1-z3)(1-z4) = z1 z2 z3 z4,

with the complete structure at ``z1 = z2 = z3 = z4 = (1+i)/2``. Near that
point ``(z1, z2)`` is a chart: given ``(u, v)`` the remaining pair
``(z3, z4)`` is recovered by Newton continuation from the base solution.

Cusp meridian/longitude eigenvalues are square-root expressions in the
shapes. Both cusps have eigenvalue -1 at the base, and every square root is
1 there; moving around the chart the caller carries ``BranchAnchors`` so
the sheet is continued, never re-chosen.
"""

from __future__ import annotations

import dataclasses

from .config import TOLERANCES, ensure_finite
from .jets import BranchError, continue_sqrt

BASE_SHAPE = complex(0.5, 0.5)
CHART_RADIUS = 0.35
MAX_CONTINUATION_STEPS = 16
_NEWTON_ITERATIONS = 30
_DEGENERATE_TOL = 1e-8


class GluingError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class TetShapes:
    z1: complex
    z2: complex
    z3: complex
    z4: complex

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.z1, self.z2, self.z3, self.z4)

    def check_nondegenerate(self) -> "TetShapes":
        for z in self.as_tuple():
            ensure_finite(z)
            if abs(z) < _DEGENERATE_TOL or abs(z - 1.0) < _DEGENERATE_TOL:
                raise GluingError(f"degenerate tetrahedron shape {z!r}")
        return self


BASE_SHAPES = TetShapes(BASE_SHAPE, BASE_SHAPE, BASE_SHAPE, BASE_SHAPE)


def residuals(s: TetShapes) -> tuple[complex, complex]:
    z1, z2, z3, z4 = s.as_tuple()
    r1 = (1 - z1) * (1 - z4) - (1 - z2) * (1 - z3)
    r2 = (1 - z1) * (1 - z2) * (1 - z3) * (1 - z4) - z1 * z2 * z3 * z4
    return r1, r2


def _jacobian_z34(s: TetShapes) -> tuple[complex, complex, complex, complex]:
    """d(r1, r2)/d(z3, z4), row-major."""
    z1, z2, z3, z4 = s.as_tuple()
    a = 1 - z2
    b = -(1 - z1)
    c = -(1 - z1) * (1 - z2) * (1 - z4) - z1 * z2 * z4
    d = -(1 - z1) * (1 - z2) * (1 - z3) - z1 * z2 * z3
    return a, b, c, d


def _newton_z34(u: complex, v: complex, z3: complex, z4: complex) -> tuple[complex, complex]:
    tol = TOLERANCES.newton
    polished = False
    for _ in range(_NEWTON_ITERATIONS):
        s = TetShapes(u, v, z3, z4)
        r1, r2 = residuals(s)
        if polished:
            return z3, z4
        a, b, c, d = _jacobian_z34(s)
        det = a * d - b * c
        if abs(det) < 1e-14:
            raise GluingError("singular chart Jacobian; point is outside the chart")
        dz3 = (-r1 * d + r2 * b) / det
        dz4 = (r1 * c - r2 * a) / det
        z3 += dz3
        z4 += dz4
        if abs(z3) > 10 or abs(z4) > 10:
            raise GluingError("Newton iterate escaped; point is outside the chart")
        if max(abs(r1), abs(r2)) < tol:
            # one extra step so downstream finite differences see ~eps noise
            polished = True
    raise GluingError("Newton failed to converge on the gluing variety")


def solve_shapes(u: complex, v: complex) -> TetShapes:
    """Solve the chart point (z1, z2) = (u, v), continuing from the base."""
    u, v = complex(u), complex(v)
    ensure_finite(u, v)
    radius = max(abs(u - BASE_SHAPE), abs(v - BASE_SHAPE))
    if radius > CHART_RADIUS:
        raise GluingError(
            f"chart coordinate {radius:.3f} from base exceeds radius {CHART_RADIUS}"
        )
    z3, z4 = BASE_SHAPE, BASE_SHAPE
    t, step = 0.0, 1.0
    solves = 0
    while t < 1.0:
        target = min(1.0, t + step)
        ut = BASE_SHAPE + target * (u - BASE_SHAPE)
        vt = BASE_SHAPE + target * (v - BASE_SHAPE)
        solves += 1
        if solves > MAX_CONTINUATION_STEPS:
            raise GluingError("continuation exceeded step budget")
        try:
            z3, z4 = _newton_z34(ut, vt, z3, z4)
        except GluingError:
            if step < 1.0 / MAX_CONTINUATION_STEPS:
                raise
            step /= 2.0
            continue
        t = target
    return TetShapes(u, v, z3, z4).check_nondegenerate()


@dataclasses.dataclass
class BranchAnchors:
    """Last committed (argument, value) pair of each cusp square root."""

    m1: tuple[complex, complex] = (1.0 + 0j, 1.0 + 0j)
    l1: tuple[complex, complex] = (1.0 + 0j, 1.0 + 0j)
    m2: tuple[complex, complex] = (1.0 + 0j, 1.0 + 0j)
    l2: tuple[complex, complex] = (1.0 + 0j, 1.0 + 0j)


@dataclasses.dataclass(frozen=True)
class CuspEigenvalues:
    """Meridian/longitude holonomy eigenvalues of the two cusps."""

    m1: complex
    l1: complex
    m2: complex
    l2: complex


def sqrt_arguments(s: TetShapes) -> tuple[complex, complex, complex, complex]:
    """Radicands of (m1, l1, m2, l2), all equal to 1 at the base."""
    z1, z2, z3, z4 = s.as_tuple()
    return (
        (1 - z4) / (1 - z2),
        z3 * z4 / (z1 * z2),
        (1 - z2) / (1 - z1),
        z2 * z4 / (z1 * z3),
    )


def cusp_eigenvalues(
    s: TetShapes,
    anchors: BranchAnchors | None = None,
    commit: bool = False,
) -> CuspEigenvalues:
    """Eigenvalues at the shapes ``s``, continued from ``anchors``.

    With ``commit`` the anchors are advanced to ``s``; probe evaluations
    (finite differences, line searches) should leave it False.
    """
    if anchors is None:
        anchors = BranchAnchors()
    z1, z2, z3, z4 = s.as_tuple()
    arg_m1, arg_l1, arg_m2, arg_l2 = sqrt_arguments(s)
    try:
        s_m1 = continue_sqrt(arg_m1, *anchors.m1)
        s_l1 = continue_sqrt(arg_l1, *anchors.l1)
        s_m2 = continue_sqrt(arg_m2, *anchors.m2)
        s_l2 = continue_sqrt(arg_l2, *anchors.l2)
    except BranchError as exc:
        raise GluingError(f"eigenvalue branch lost: {exc}") from exc
    if commit:
        anchors.m1 = (arg_m1, s_m1)
        anchors.l1 = (arg_l1, s_l1)
        anchors.m2 = (arg_m2, s_m2)
        anchors.l2 = (arg_l2, s_l2)
    ratio1 = (1 - z4) / (1 - z2)
    ratio2 = (1 - z2) / (1 - z1)
    return CuspEigenvalues(
        m1=-s_m1,
        l1=-ratio1 * s_l1,
        m2=-s_m2,
        l2=-ratio2 * s_l2,
    )


def alternate_eigenvalues(
    s: TetShapes, anchors: BranchAnchors | None = None
) -> CuspEigenvalues:
    """The second printed form of each eigenvalue, for consistency checks.

    The first gluing equation makes (1-z4)/(1-z2) = (1-z3)/(1-z1) and
    (1-z2)/(1-z1) = (1-z4)/(1-z3); on the variety these agree with
    ``cusp_eigenvalues`` and off it they differ. Never commits anchors.
    """
    if anchors is None:
        anchors = BranchAnchors()
    z1, z2, z3, z4 = s.as_tuple()
    _, arg_l1, _, arg_l2 = sqrt_arguments(s)
    ratio1 = (1 - z3) / (1 - z1)
    ratio2 = (1 - z4) / (1 - z3)
    try:
        s_m1 = continue_sqrt(ratio1, *anchors.m1)
        s_l1 = continue_sqrt(arg_l1, *anchors.l1)
        s_m2 = continue_sqrt(ratio2, *anchors.m2)
        s_l2 = continue_sqrt(arg_l2, *anchors.l2)
    except BranchError as exc:
        raise GluingError(f"eigenvalue branch lost: {exc}") from exc
    return CuspEigenvalues(
        m1=-s_m1,
        l1=-ratio1 * s_l1,
        m2=-s_m2,
        l2=-ratio2 * s_l2,
    )
