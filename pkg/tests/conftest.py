import math

import pytest

from mangoldt.profile import builtin_model


def _clamped_acos(x):
    return math.acos(max(-1.0, min(1.0, x)))


def euclidean_angles(a, b, c):
    """Angles (at pole, at x, at y) of a flat triangle with pole sides
    a = |px|, b = |py| and opposite side c = |xy|."""

    def ang(u, v, w):
        return _clamped_acos((u * u + v * v - w * w) / (2.0 * u * v))

    return ang(a, b, c), ang(a, c, b), ang(b, c, a)


def hyperbolic_angles(a, b, c):
    """Same vertices on the curvature -1 plane."""

    def ang(u, v, w):
        num = math.cosh(u) * math.cosh(v) - math.cosh(w)
        return _clamped_acos(num / (math.sinh(u) * math.sinh(v)))

    return ang(a, b, c), ang(a, c, b), ang(b, c, a)


def assert_angle_matches(got, ref, tol=1e-8):
    """Angle agreement at tol, measured on the cosine scale near 0 and
    pi where float acos cannot resolve below ~sqrt(eps)."""
    if abs(got - ref) <= tol:
        return
    assert abs(math.cos(got) - math.cos(ref)) <= tol, (got, ref)


@pytest.fixture(scope="session")
def plane():
    return builtin_model("plane")


@pytest.fixture(scope="session")
def paraboloid():
    return builtin_model("paraboloid")


@pytest.fixture(scope="session")
def hyperbolic():
    return builtin_model("hyperbolic")


@pytest.fixture(scope="session")
def sinclair():
    return builtin_model("sinclair")
