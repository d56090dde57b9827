"""Maximal-tube geometry: radius, core length, and meridian normalization.

The singular core of a filled cusp is surrounded by its maximal embedded
tube. Half the distance from the core's axis to its nearest translate
under the tie-class element gives the radius R; in trace terms

    cosh(2R) = |bc| + |bc + 1|,   bc = -(tr[w, g] - 2) / (tr^2 g - 4),

where g is the peripheral element with eigenvalue m2 and w the tie class
(bc is the off-diagonal product of w in the frame diagonalizing g). The
commutator trace comes from the eigenvalue relation

    tr[w, g] - 2 = -(m2^2 - 1)(1 - l2) / (m2^2 + l2).

From R, the core length t, and the cone angle theta: meridian length
mu = theta sinh R, tube-boundary area theta t sinh R cosh R, and the
normalized square mu_hat^2 = theta tanh(R)/t, whose small-angle expansion
mu_hat^2 = k0 + k1 theta^2 is produced both numerically and by a jet
pipeline on the geometric curve.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Sequence

import numpy as np

from .curves import GeometricCurve
from .jets import jet_sqrt, real_modulus_jet
from .surgery import (
    Slope,
    SolvedStructure,
    cone_expansion,
    solve_cone_structure,
)

INFINITY = complex(math.inf, 0.0)


class TubeError(ValueError):
    pass


def _homogeneous(w: complex) -> tuple[complex, complex]:
    if isinstance(w, (int, float)) and math.isinf(w):
        return (1.0 + 0j, 0j)
    w = complex(w)
    if math.isinf(w.real) or math.isinf(w.imag):
        return (1.0 + 0j, 0j)
    return (w, 1.0 + 0j)


def cross_ratio(w1, w2, w3, w4) -> complex:
    """(w1-w3)(w2-w4) / ((w1-w4)(w2-w3)) on the extended plane.

    Points at infinity are handled projectively; the lines are (w1, w2)
    and (w3, w4), and endpoints must be distinct within each pair.
    """
    h = [_homogeneous(w) for w in (w1, w2, w3, w4)]

    def det(a, b) -> complex:
        return a[0] * b[1] - a[1] * b[0]

    if det(h[0], h[1]) == 0 or det(h[2], h[3]) == 0:
        raise TubeError("degenerate line: repeated endpoint within a pair")
    num = det(h[0], h[2]) * det(h[1], h[3])
    den = det(h[0], h[3]) * det(h[1], h[2])
    if den == 0:
        raise TubeError("coincident endpoints across pairs")
    return num / den


def line_distance(w1, w2, w3, w4) -> float:
    """Hyperbolic distance between the geodesics (w1, w2) and (w3, w4)."""
    cr = cross_ratio(w1, w2, w3, w4)
    if cr == 1.0:
        raise TubeError("cross-ratio 1: degenerate line configuration")
    cosh_d = (1.0 + abs(cr)) / abs(1.0 - cr)
    return math.acosh(max(1.0, cosh_d))


def tube_cosh2R(tr_comm_minus2: complex, tr_peripheral: complex) -> float:
    """cosh(2R) = |bc| + |bc + 1| from the frame-invariant bc."""
    denom = tr_peripheral * tr_peripheral - 4.0
    if abs(denom) < 1e-14:
        raise TubeError("parabolic peripheral element: tube radius undefined")
    bc = -complex(tr_comm_minus2) / denom
    return abs(bc) + abs(bc + 1.0)


def tube_cosh2R_trace_form(tr_comm_minus2: complex, tr_peripheral: complex) -> float:
    """The same radius from the printed trace display.

    (|tr[w,g] - 2| + |tr^2 g - tr[w,g] - 2|) / |tr^2 g - 4|; algebraically
    identical to ``tube_cosh2R`` since tr^2 g - tr[w,g] - 2 =
    (tr^2 g - 4)(1 + bc). Kept as an independent expression for the
    agreement check; the bc form is the one used downstream.
    """
    tsq = tr_peripheral * tr_peripheral
    denom = tsq - 4.0
    if abs(denom) < 1e-14:
        raise TubeError("parabolic peripheral element: tube radius undefined")
    t = complex(tr_comm_minus2)
    return (abs(t) + abs(tsq - (t + 2.0) - 2.0)) / abs(denom)


def commutator_trace_minus2_from_eigenvalues(m2: complex, l2: complex) -> complex:
    """tr[w, g] - 2 on the variety, as a function of the cusp eigenvalues."""
    den = m2 * m2 + l2
    if den == 0:
        raise TubeError("eigenvalue relation singular: m2^2 + l2 = 0")
    return -(m2 * m2 - 1.0) * (1.0 - l2) / den


def core_length(m2: complex, l2: complex, slope: Slope) -> float:
    """t = 2 |Re(r log(-m2) + s log(-l2))| for the dual (r, s) of the slope.

    The real part of a logarithm is branch-free (log moduli), so this is
    computed directly; it is also independent of the choice of dual pair
    on solved structures, where p log(-m2) + q log(-l2) is imaginary.
    """
    am, al = abs(m2), abs(l2)
    if am == 0 or al == 0:
        raise TubeError("degenerate eigenvalue for core length")
    return 2.0 * abs(slope.r * math.log(am) + slope.s * math.log(al))


@dataclasses.dataclass(frozen=True)
class TubeMeasurement:
    theta: float
    cosh2R: float
    R: float
    t: float
    mu: float
    mu_hat_sq: float

    def check(self) -> None:
        if not (self.R > 0 and self.t > 0 and self.mu > 0 and self.mu_hat_sq > 0):
            raise TubeError(f"non-positive tube measurement {self!r}")
        if abs(self.mu - self.theta * math.sinh(self.R)) > 1e-12 * max(1.0, self.mu):
            raise TubeError("mu = theta sinh R violated")
        area = self.theta * self.t * math.sinh(self.R) * math.cosh(self.R)
        if abs(self.mu_hat_sq - self.mu**2 / area) > 1e-12 * self.mu_hat_sq:
            raise TubeError("area identity violated")


def measure_tube(structure: SolvedStructure) -> TubeMeasurement:
    """TubeMeasurement of a solved cone structure (theta > 0)."""
    theta = structure.theta
    if theta <= 0:
        raise TubeError("theta = 0 is the cusp limit: no tube to measure")
    ev = structure.point.eigenvalues
    trc = commutator_trace_minus2_from_eigenvalues(ev.m2, ev.l2)
    trp = ev.m2 + 1.0 / ev.m2
    c2r = tube_cosh2R(trc, trp)
    R = 0.5 * math.acosh(max(1.0, c2r))
    sl = structure.slope2
    t = 2.0 * abs(
        (sl.r * structure.point.log_m2 + sl.s * structure.point.log_l2).real
    )
    if t <= 0 or R <= 0:
        raise TubeError("degenerate core or tube")
    mu = theta * math.sinh(R)
    mu_hat_sq = theta * math.tanh(R) / t
    out = TubeMeasurement(
        theta=theta, cosh2R=c2r, R=R, t=t, mu=mu, mu_hat_sq=mu_hat_sq
    )
    out.check()
    return out


def mu_hat_squared_numeric(
    slope1: Slope | None, slope2: Slope, theta: float
) -> TubeMeasurement:
    """Full pipeline: solve the structure at theta, then measure the tube."""
    return measure_tube(solve_cone_structure(slope1, slope2, theta))


@dataclasses.dataclass(frozen=True)
class KExpansion:
    """mu_hat^2(theta) = k0 + k1 theta^2 + O(theta^3)."""

    k0: float
    k1: float
    slope2: Slope
    source: str


def k_expansion_closed_form(curve: GeometricCurve, slope2: Slope) -> KExpansion:
    """(k0, k1) by jet expansion of the tube quantities on the curve.

    Every absolute value is expanded with its leading theta-power factored
    explicitly (the commutator trace and its denominator both vanish to
    first order; the peripheral trace-square defect to second). No
    precomputed expansion constants enter.
    """
    ce = cone_expansion(curve, slope2)
    m, l = ce.m_jet, ce.l_jet
    num = (m * m - 1.0) * (1.0 - l)
    den = m * m + l
    # tr[w,g] - 2 = -num/den; both factors vanish at theta = 0
    trc = -(num.shift_down(1) / den.shift_down(1))
    s2 = ((m * m - 1.0) / m) ** 2  # tr^2 g - 4, vanishing to order 2

    x = real_modulus_jet(trc, 0)
    y = real_modulus_jet(s2 - trc, 0)
    z = real_modulus_jet(s2, 2)
    tanh_sq = (x + y - z) / (x + y + z)
    tanh_r = jet_sqrt(tanh_sq, 1.0)

    combo_over_theta = ce.log_combo_jet.real_part().shift_down(1)
    t_hat = 2.0 * real_modulus_jet(combo_over_theta, 0)
    mu_hat_sq = tanh_r / t_hat

    stray = max(abs(mu_hat_sq[1]), mu_hat_sq.imag_max())
    if stray > 1e-9 * max(1.0, abs(mu_hat_sq[0])):
        raise TubeError(f"mu_hat^2 jet has stray odd/imaginary part {stray:.3e}")
    return KExpansion(
        k0=mu_hat_sq[0].real, k1=mu_hat_sq[2].real, slope2=slope2, source="numeric-jet"
    )


def whitehead_k_reference(slope2: Slope) -> KExpansion:
    """Reference (k0, k1) for the unfilled exterior's curve (a1 = 2 + 2i)."""
    p, q = slope2.p, slope2.q
    k0 = (p * p + 4 * p * q + 8 * q * q) / 2.0
    k1 = -(
        p**4 + 8 * p**3 * q + 48 * p**2 * q**2 + 128 * p * q**3 + 128 * q**4
    ) / (12.0 * (p * p + 4 * p * q + 8 * q * q) ** 2)
    return KExpansion(k0=k0, k1=k1, slope2=slope2, source="closed-form")


def fit_k_expansion(
    slope1: Slope | None,
    slope2: Slope,
    thetas: Sequence[float] = (0.02, 0.04, 0.06, 0.08, 0.10),
) -> tuple[float, float]:
    """Least-squares (k0, k1) from numeric mu_hat^2 over the theta grid.

    mu_hat^2 is even in theta (the conjugate angle gives the conjugate
    structure), so the fit is quadratic in theta^2: {1, theta^2, theta^4}.
    The quartic column is a nuisance term absorbing the Taylor remainder;
    without it the k1 estimate is biased at the 1e-3 level on this grid.
    """
    ths = np.asarray(list(thetas), dtype=float)
    if ths.size < 3:
        raise TubeError("need at least three angles to fit")
    vals = np.array(
        [mu_hat_squared_numeric(slope1, slope2, th).mu_hat_sq for th in ths]
    )
    basis = np.column_stack([np.ones_like(ths), ths**2, ths**4])
    coeffs, *_ = np.linalg.lstsq(basis, vals, rcond=None)
    return float(coeffs[0]), float(coeffs[1])


def _k1_rational(x: np.ndarray) -> np.ndarray:
    num = -(x**4 + 8 * x**3 + 48 * x**2 + 128 * x + 128)
    den = 12.0 * (x**2 + 4 * x + 8) ** 2
    return num / den


def k1_range_check(samples: int = 1_000_000) -> tuple[float, float]:
    """Extrema of the k1 rational function over slopes x = p/q.

    Dense grid on [-1e4, 1e4] (graded toward the origin where the
    structure lives) plus the x -> +-infinity limit -1/12, then ternary
    refinement around every interior extremum bracket.
    """
    if samples < 1000:
        raise TubeError("need at least 1000 samples")
    half = samples // 2
    core = np.linspace(-50.0, 50.0, samples - half)
    tails = np.concatenate(
        [
            -np.logspace(math.log10(50.0), 4.0, half // 2),
            np.logspace(math.log10(50.0), 4.0, half - half // 2),
        ]
    )
    grid = np.sort(np.concatenate([core, tails]))
    vals = _k1_rational(grid)

    lo = float(vals.min())
    hi = float(vals.max())

    def refine(a: float, b: float, maximize: bool) -> float:
        for _ in range(200):
            m1 = a + (b - a) / 3.0
            m2 = b - (b - a) / 3.0
            f1 = float(_k1_rational(np.array([m1]))[0])
            f2 = float(_k1_rational(np.array([m2]))[0])
            if (f1 < f2) == maximize:
                a = m1
            else:
                b = m2
        x = 0.5 * (a + b)
        return float(_k1_rational(np.array([x]))[0])

    # brackets where the discrete slope changes sign
    dv = np.diff(vals)
    sign_flips = np.nonzero(np.sign(dv[:-1]) * np.sign(dv[1:]) < 0)[0]
    for i in sign_flips:
        a, b = float(grid[i]), float(grid[i + 2])
        maximize = dv[i] > 0
        val = refine(a, b, maximize)
        lo = min(lo, val)
        hi = max(hi, val)

    # the limit value at x -> +-infinity (q = 0 slope)
    hi = max(hi, -1.0 / 12.0)
    lo = min(lo, -1.0 / 12.0)
    return lo, hi


def monotonicity_report(curve: GeometricCurve, slope2: Slope) -> dict:
    """Signs of the leading behavior: mu_hat decreasing, mu_hat^2 + theta^2 increasing."""
    k = k_expansion_closed_form(curve, slope2)
    return {
        "k1": k.k1,
        "mu_hat_decreasing": k.k1 < 0,
        "sum_increasing": k.k1 + 1.0 > 0,
    }
