from __future__ import annotations

import pytest

from conetube import (
    GeometricCurve,
    expand_from_polynomial,
    expand_from_samples,
    unfilled_curve_sampler,
    whitehead_a_polynomial,
)

A1 = 2 + 2j
A2 = 2 - 6j
A3 = -12 + 0j


@pytest.fixture(scope="session")
def poly_curve() -> GeometricCurve:
    """Unfilled curve from the closed-form eigenvalue polynomial."""
    return expand_from_polynomial(whitehead_a_polynomial(), -1, -1, A1)


@pytest.fixture(scope="session")
def sampled_curve() -> GeometricCurve:
    """Unfilled curve from the variety sampler (independent route)."""
    return expand_from_samples(unfilled_curve_sampler(), -1, -1)
