import math
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from helpers import bivariate_to_sympy, nonzero_gaussian, poly_to_sympy, random_descriptor, sympy_surface
from wforge.algebra import BivariatePoly, ComplexPoly, RationalFunction
from wforge.errors import DegenerateSurfaceError, StructureError
from wforge.families import make_family
from wforge.weierstrass import (
    NumericPair,
    PolySurface,
    build_curve,
    check_isotropy,
    imaginary_part_surface,
    integrand,
    surface_from_pair,
    validate_pair,
)

z = ComplexPoly.z()


def enneper():
    return validate_pair(ComplexPoly([1]), z)


class TestValidatePair:
    def test_enneper_structure(self):
        pair = enneper()
        assert pair.structure == {"p": 1, "q": 0, "r": 0, "n": 3}

    def test_pole_needs_square_divisor(self):
        with pytest.raises(StructureError):
            validate_pair(z + 1, RationalFunction(z * z, z + 1))

    def test_zero_f(self):
        with pytest.raises(DegenerateSurfaceError):
            validate_pair(ComplexPoly(), z)

    def test_constant_g(self):
        with pytest.raises(DegenerateSurfaceError):
            validate_pair(ComplexPoly([1]), ComplexPoly([3]))

    def test_unreduced_g_is_reduced(self):
        pair = validate_pair((z + 1) ** 2, RationalFunction(z * z - 1, z + 1))
        assert pair.Q.is_constant() and pair.P == z - 1
        assert pair.n == 5

    @given(nonzero_gaussian, nonzero_gaussian)
    def test_degree_formula_attained(self, a, b):
        pair = validate_pair(a * (z + b) ** 2, RationalFunction(z**2 + 1, z + b))
        assert pair.n - 1 == max(pair.degree_sums())


class TestSurface:
    def test_enneper_formula(self):
        surf = surface_from_pair(enneper())
        half, third = Fraction(1, 2), Fraction(1, 3)
        u = BivariatePoly({(1, 0): 1})
        v = BivariatePoly({(0, 1): 1})
        one = BivariatePoly({(0, 0): 1})
        x1 = u * (one + v * v - u * u * BivariatePoly({(0, 0): third})) * BivariatePoly({(0, 0): half})
        x2 = -(v * (one + u * u - v * v * BivariatePoly({(0, 0): third})) * BivariatePoly({(0, 0): half}))
        x3 = (u * u - v * v) * BivariatePoly({(0, 0): half})
        assert surf.components == (x1, x2, x3)

    @pytest.mark.parametrize("kind", ["R11", "R12", "R3"])
    def test_matches_sympy_integration(self, kind):
        rng = random.Random(hash(kind) % 1000)
        pair = make_family(random_descriptor(kind, rng))
        f_expr = poly_to_sympy(pair.f)
        g_expr = poly_to_sympy(pair.P) / poly_to_sympy(pair.Q)
        expected = sympy_surface(f_expr, g_expr)
        got = surface_from_pair(pair).components
        for e, c in zip(expected, got):
            assert sympy.expand(bivariate_to_sympy(c) - e) == 0

    def test_basepoint_at_origin(self):
        surf = surface_from_pair(make_family(random_descriptor("R12", random.Random(3))))
        assert all(c(0, 0) == 0 for c in surf.components)

    @pytest.mark.parametrize("kind", ["R11", "R12", "R3", "Enneper"])
    def test_harmonic_and_isothermal(self, kind):
        pair = make_family(random_descriptor(kind, random.Random(11)))
        surf = surface_from_pair(pair)
        assert surf.is_harmonic() and surf.is_isothermal()
        assert check_isotropy(integrand(pair)).is_zero()

    def test_non_isotropic_detected(self):
        assert not check_isotropy((ComplexPoly([1]), ComplexPoly([0]), ComplexPoly([0]))).is_zero()

    def test_mirrored(self):
        surf = surface_from_pair(enneper())
        m = surf.mirrored()
        assert m.x1 == -surf.x1 and m.x2 == surf.x2 and m.x3 == surf.x3

    def test_numeric_agrees_with_exact(self):
        surf = surface_from_pair(make_family(random_descriptor("R3", random.Random(5))))
        num = surf.to_numeric()
        for u, v in [(0.3, -0.7), (1.1, 0.2)]:
            exact = np.array([float(c(Fraction(u), Fraction(v))) for c in surf.components])
            assert np.allclose(num(u, v), exact, rtol=1e-12, atol=1e-12)

    def test_conjugate_surface_is_imaginary_part(self):
        curve = build_curve(enneper())
        im = imaginary_part_surface(curve)
        # Im of z - z^3/3 ... the x3 component is Im(z^2/2) = uv
        assert im.x3 == BivariatePoly({(1, 1): 1})


class TestPolySurface:
    def test_derivatives_match_finite_differences(self):
        surf = surface_from_pair(make_family(random_descriptor("R12", random.Random(8)))).to_numeric()
        u, v, h = 0.31, -0.22, 1e-6
        d = surf.derivatives(u, v)
        fd_u = (surf(u + h, v) - surf(u - h, v)) / (2 * h)
        fd_v = (surf(u, v + h) - surf(u, v - h)) / (2 * h)
        scale = np.abs(d["u"]).max() + np.abs(d["v"]).max()
        assert np.allclose(d["u"], fd_u, atol=1e-6 * scale)
        assert np.allclose(d["v"], fd_v, atol=1e-6 * scale)

    def test_vectorized(self):
        surf = surface_from_pair(enneper()).to_numeric()
        U_, V_ = np.meshgrid(np.linspace(-1, 1, 4), np.linspace(-1, 1, 5), indexing="ij")
        assert surf(U_, V_).shape == (3, 4, 5)
        assert surf.derivatives(U_, V_)["uv"].shape == (3, 4, 5)

    def test_bad_shape(self):
        with pytest.raises(ValueError):
            PolySurface(np.zeros((2, 3, 3)))


class TestNumericPair:
    def test_matches_exact_pair(self):
        pair = make_family(random_descriptor("R12", random.Random(21)))
        exact = surface_from_pair(pair).to_numeric()
        num = pair.to_numeric().surface()
        k = exact.coeffs.shape[1]
        assert np.allclose(num.coeffs[:, :k, :k], exact.coeffs, atol=1e-12)

    def test_from_fg_divisibility(self):
        with pytest.raises(StructureError):
            NumericPair.from_fg([1, 1], [0, 0, 1], [1, 1])
        pair = NumericPair.from_fg([1, 2, 1], [1, 0, 1], [1, 1])
        assert pair.degree == 5

    def test_isotropy_residual_small(self):
        pair = NumericPair([np.sqrt(2), 0, 1j], [1], [np.pi])
        assert pair.isotropy_residual() < 1e-14

    @pytest.mark.parametrize("t", [math.pi / 6, math.pi / 4, math.pi / 2])
    def test_associated_family_is_isometric(self, t):
        pair = NumericPair([0.3, 0, 1], [1], [1.5 - 0.5j])
        base, other = pair.surface(), pair.associated(t)
        d0, d1 = base.derivatives(0.4, -0.3), other.derivatives(0.4, -0.3)
        E0, E1 = d0["u"] @ d0["u"], d1["u"] @ d1["u"]
        assert E1 == pytest.approx(E0, rel=1e-12)

    def test_f_gprime(self):
        pair = NumericPair([0, 0, 1], [1], [2])  # f = 2, g = z^2
        assert np.allclose(pair.f_gprime(), [0, 4])

    def test_zero_f_rejected(self):
        with pytest.raises(DegenerateSurfaceError):
            NumericPair([0, 1], [1], [0])


@settings(max_examples=25)
@given(st.integers(0, 3), nonzero_gaussian)
def test_metric_matches_closed_form(k, a):
    """E = |f|^2 (1 + |g|^2)^2 / 4 for f = a, g = z^k + z."""
    g = ComplexPoly.monomial(1, k) + z if k != 1 else z
    pair = validate_pair(ComplexPoly([a]), g)
    surf = surface_from_pair(pair).to_numeric()
    w = 0.3 - 0.4j
    d = surf.derivatives(w.real, w.imag)
    gv = complex(g.evalf(w))
    expected = abs(complex(a)) ** 2 * (1 + abs(gv) ** 2) ** 2 / 4
    assert d["u"] @ d["u"] == pytest.approx(expected, rel=1e-10)
