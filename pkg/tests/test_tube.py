from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.optimize import minimize

from conetube import (
    INFINITY,
    Slope,
    TubeError,
    commutator_trace_minus2_from_eigenvalues,
    core_length,
    cross_ratio,
    fit_k_expansion,
    k1_range_check,
    k_expansion_closed_form,
    line_distance,
    measure_tube,
    monotonicity_report,
    mu_hat_squared_numeric,
    solve_cone_structure,
    tube_cosh2R,
    tube_cosh2R_trace_form,
    whitehead_k_reference,
)
from conetube.holonomy import (
    RepresentationFamily,
    peripheral_matrices,
    sl2_inverse,
    y_from_l2,
)


def _h3_geodesic_point(a: complex, b: complex, phi: float):
    """Point on the H^3 geodesic with ideal endpoints a, b at angle phi."""
    center = (a + b) / 2
    rho = abs(b - a) / 2
    u = (b - a) / abs(b - a)
    return center + rho * math.cos(phi) * u, rho * math.sin(phi)


def _h3_point_distance(x1: complex, z1: float, x2: complex, z2: float) -> float:
    arg = 1.0 + (abs(x1 - x2) ** 2 + (z1 - z2) ** 2) / (2 * z1 * z2)
    return math.acosh(arg)


def _min_distance_oracle(a1, b1, a2, b2) -> float:
    def objective(phis):
        p1 = _h3_geodesic_point(a1, b1, phis[0])
        p2 = _h3_geodesic_point(a2, b2, phis[1])
        return _h3_point_distance(*p1, *p2)

    eps = 1e-9
    best = minimize(
        objective,
        x0=[math.pi / 2, math.pi / 2],
        bounds=[(eps, math.pi - eps)] * 2,
        method="L-BFGS-B",
        options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 500},
    )
    return float(best.fun)


def _mobius(g: np.ndarray, w: complex) -> complex:
    a, b, c, d = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    if w == INFINITY:
        return INFINITY if abs(c) == 0 else a / c
    den = c * w + d
    if abs(den) == 0:
        return INFINITY
    return (a * w + b) / den


def _rep_at_structure(structure, steps: int = 12):
    x = structure.point.eigenvalues.m2
    y = y_from_l2(x, structure.point.eigenvalues.l2)
    fam = RepresentationFamily()
    for k in range(1, steps + 1):
        s = k / steps
        rep = fam.representation(-1 + s * (x + 1), 2j + s * (y - 2j), commit=True)
    return rep


def _axis_distance_R(structure):
    """Half the distance between the core axis and its tied translate.

    All peripheral elements at the second cusp share one axis; conjugating
    it to (0, infinity), the tied element gamma carries that line to a
    translate, and the tube radius is half the distance between the two.
    """
    rep = _rep_at_structure(structure)
    x = rep.x
    w_star = x / (1 - x * x)
    shear = np.array([[1, -w_star], [0, 1]], dtype=complex)
    w = shear @ rep.gamma @ np.array([[1, w_star], [0, 1]], dtype=complex)
    a, b, c, d = w[0, 0], w[0, 1], w[1, 0], w[1, 1]
    e1 = b / d
    e2 = a / c
    return 0.5 * line_distance(0, INFINITY, e1, e2), complex(b * c)


def test_cross_ratio_examples():
    assert abs(cross_ratio(-1, 1, -2, 2) - 1 / 9) < 1e-15
    assert abs(cross_ratio(-1, 1, 0, INFINITY) - (-1)) < 1e-15


def test_cross_ratio_rejects_degenerate():
    with pytest.raises(TubeError):
        cross_ratio(1, 1, 0, 2)


def test_line_distance_symmetric_example():
    # geodesics over (-1, 1) and (-s, s) meet the symmetry axis at heights
    # 1 and s: distance is log(s)
    for s in (2.0, 5.0, 11.0):
        assert abs(line_distance(-1, 1, -s, s) - math.log(s)) < 1e-12


def test_line_distance_matches_minimization_oracle():
    rng = np.random.default_rng(31)
    done = 0
    while done < 50:
        vals = rng.uniform(-3, 3, 8)
        a1 = complex(vals[0], vals[1])
        b1 = complex(vals[2], vals[3])
        a2 = complex(vals[4], vals[5])
        b2 = complex(vals[6], vals[7])
        if min(abs(a1 - b1), abs(a2 - b2)) < 0.5:
            continue
        d = line_distance(a1, b1, a2, b2)
        if d < 0.05:
            continue
        done += 1
        assert abs(d - _min_distance_oracle(a1, b1, a2, b2)) < 1e-6


def test_line_distance_mobius_invariant():
    rng = np.random.default_rng(37)
    for _ in range(50):
        vals = rng.normal(size=8)
        pts = [complex(vals[2 * i], vals[2 * i + 1]) for i in range(4)]
        if min(abs(pts[0] - pts[1]), abs(pts[2] - pts[3])) < 1e-2:
            continue
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if abs(np.linalg.det(g)) < 1e-2:
            continue
        moved = [_mobius(g, w) for w in pts]
        assert abs(line_distance(*pts) - line_distance(*moved)) < 1e-10


def test_trace_form_agreement():
    rng = np.random.default_rng(41)
    for _ in range(40):
        vals = rng.normal(size=4)
        trc = complex(vals[0], vals[1]) * 0.1
        trp = -2.0 + complex(vals[2], vals[3]) * 0.1
        direct = tube_cosh2R(trc, trp)
        printed = tube_cosh2R_trace_form(trc, trp)
        assert abs(direct - printed) < 1e-12 * max(1.0, direct)


def test_tube_cosh2R_rejects_parabolic():
    with pytest.raises(TubeError):
        tube_cosh2R(0.1 + 0j, 2.0 + 0j)


def test_radius_matches_axis_distance_oracle():
    cases = [
        (None, Slope.make(1, 0), 0.05),
        (None, Slope.make(1, 1), 0.08),
        (Slope.make(9, 1), Slope.make(1, 0), 0.05),
    ]
    for slope1, slope2, theta in cases:
        st = solve_cone_structure(slope1, slope2, theta)
        tm = measure_tube(st)
        r_oracle, bc_frame = _axis_distance_R(st)
        assert abs(tm.R - r_oracle) < 1e-8
        # the frame product b*c agrees with the trace-ratio formula
        ev = st.point.eigenvalues
        trc = commutator_trace_minus2_from_eigenvalues(ev.m2, ev.l2)
        trp = ev.m2 + 1 / ev.m2
        bc_formula = -trc / (trp**2 - 4)
        assert abs(bc_frame - bc_formula) < 1e-10 * max(1.0, abs(bc_formula))


def test_core_length_matches_word_eigenvalue():
    for slope1, slope2, theta in [
        (None, Slope.make(1, 0), 0.05),
        (None, Slope.make(2, 1), 0.07),
        (Slope.make(9, 1), Slope.make(1, 0), 0.06),
    ]:
        st = solve_cone_structure(slope1, slope2, theta)
        ev = st.point.eigenvalues
        t = core_length(ev.m2, ev.l2, slope2)
        rep = _rep_at_structure(st)
        per = peripheral_matrices(rep)

        def power(m, k):
            return np.linalg.matrix_power(m if k >= 0 else sl2_inverse(m), abs(k))

        word = power(per.meridian2, slope2.r) @ power(per.longitude2, slope2.s)
        t_matrix = 2 * abs(math.log(abs(word[0, 0])))
        assert abs(t - t_matrix) < 1e-8


def test_core_length_for_meridian_filling():
    # theta and core length scale together for the (1, 0) filling
    st = solve_cone_structure(None, Slope.make(1, 0), 0.05)
    ev = st.point.eigenvalues
    t = core_length(ev.m2, ev.l2, Slope.make(1, 0))
    assert abs(t / 0.05 - 2.0) < 1e-2


def test_measurement_identities():
    tm = mu_hat_squared_numeric(None, Slope.make(1, 0), 0.05)
    tm.check()
    assert abs(tm.mu - tm.theta * math.sinh(tm.R)) < 1e-12 * tm.mu
    area = tm.theta * tm.t * math.sinh(tm.R) * math.cosh(tm.R)
    assert abs(tm.mu_hat_sq - tm.mu**2 / area) < 1e-12
    assert abs(tm.mu_hat_sq - 0.5) < 5e-3


def test_no_tube_at_cusp_limit():
    st = solve_cone_structure(None, Slope.make(1, 0), 0.0)
    with pytest.raises(TubeError):
        measure_tube(st)


def test_k_reference_values():
    ref = whitehead_k_reference(Slope.make(1, 0))
    assert abs(ref.k0 - 0.5) < 1e-15
    assert abs(ref.k1 + 1 / 12) < 1e-15
    ref = whitehead_k_reference(Slope.make(0, 1))
    assert abs(ref.k0 - 4.0) < 1e-15
    assert abs(ref.k1 + 1 / 6) < 1e-15


def test_k_jet_matches_reference(poly_curve):
    curve = poly_curve.symmetrized()
    for p, q in [(1, 0), (0, 1), (1, 1), (-2, 1), (5, -2), (3, 7), (-11, 4)]:
        jet = k_expansion_closed_form(curve, Slope.make(p, q))
        ref = whitehead_k_reference(Slope.make(p, q))
        assert abs(jet.k0 - ref.k0) < 1e-9 * max(1.0, abs(ref.k0))
        assert abs(jet.k1 - ref.k1) < 1e-9
    assert jet.source == "numeric-jet"
    assert ref.source == "closed-form"


def test_k1_spot_values(poly_curve):
    curve = poly_curve.symmetrized()
    k10 = k_expansion_closed_form(curve, Slope.make(1, 0))
    k01 = k_expansion_closed_form(curve, Slope.make(0, 1))
    assert abs(k10.k1 + 1 / 12) < 1e-10
    assert abs(k01.k1 + 1 / 6) < 1e-10


def test_k1_range_small_grid():
    lo, hi = k1_range_check(samples=20_000)
    assert -1 / 6 - 1e-9 <= lo <= -1 / 6 + 1e-6
    assert -1 / 12 - 1e-6 <= hi <= -1 / 12 + 1e-9
    with pytest.raises(TubeError):
        k1_range_check(samples=10)


def test_fit_recovers_expansion():
    slope2 = Slope.make(1, 0)
    k0_fit, k1_fit = fit_k_expansion(None, slope2, thetas=(0.03, 0.06, 0.09))
    ref = whitehead_k_reference(slope2)
    assert abs(k0_fit - ref.k0) < 1e-6 * max(1.0, abs(ref.k0))
    assert abs(k1_fit - ref.k1) < 1e-4
    with pytest.raises(TubeError):
        fit_k_expansion(None, slope2, thetas=(0.04, 0.08))


def test_monotonicity_report(poly_curve):
    curve = poly_curve.symmetrized()
    rep = monotonicity_report(curve, Slope.make(1, 1))
    assert rep["mu_hat_decreasing"] is True
    assert rep["sum_increasing"] is True
    assert rep["k1"] < 0
