import json
import random
import re
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from helpers import random_descriptor
from wforge.algebra import BivariatePoly, ComplexPoly
from wforge.degree5 import (
    BASIS,
    EQUATIONS,
    NAMES,
    CoeffVectors5,
    extract_coeffs,
    residual_report,
    residual_scale,
    system_residual,
)
from wforge.errors import NotRepresentableError
from wforge.families import make_family, xw_degree5
from wforge.weierstrass import PolySurface, SurfacePolynomial, surface_from_pair, validate_pair

z = ComplexPoly.z()
half, third = Fraction(1, 2), Fraction(1, 3)


def test_equations_follow_from_isotropy():
    """Expanding phi . phi = 0 for a generic basis combination gives, coefficient by
    coefficient, exactly the listed equations up to a nonzero factor."""
    vecs = {n: sympy.symbols(f"{n}1:4", real=True) for n in NAMES}
    u, v, w = sympy.symbols("u v w", real=True)
    basis = {n: sum(c * u**i * v**j for (i, j), c in BASIS[n].items()) for n in NAMES}
    phis = []
    for m in range(3):
        x = sum(vecs[n][m] * basis[n] for n in NAMES)
        phi = sympy.expand(sympy.diff(x, u) - sympy.I * sympy.diff(x, v))
        phis.append(phi.subs(v, 0).subs(u, w))  # holomorphic: fixed by its values on the real axis
    total = sympy.expand(sum(p**2 for p in phis))
    derived = []
    for c in sympy.Poly(total, w).all_coeffs():
        re_part, im_part = sympy.expand(c).as_real_imag()
        derived += [sympy.expand(re_part), sympy.expand(im_part)]

    def parse(eq):
        expr = sympy.Integer(0)
        for sign, coef, x, y in re.findall(r"([+-]?)\s*(\d*)([a-k])\.([a-k])", eq):
            k = int(coef or 1) * (-1 if sign == "-" else 1)
            expr += k * sum(vecs[x][m] * vecs[y][m] for m in range(3))
        return sympy.expand(expr)

    listed = [parse(eq) for eq in EQUATIONS]
    matches = [[k for k, l in enumerate(listed) if sympy.cancel(d / l).is_number] for d in derived]
    assert all(len(m) == 1 for m in matches)
    assert sorted(m[0] for m in matches) == list(range(18))


class TestExtraction:
    def test_enneper_vectors(self):
        cv = extract_coeffs(surface_from_pair(validate_pair(ComplexPoly([1]), z)))
        assert cv.e == (-Fraction(1, 6), 0, 0)
        assert cv.f == (0, Fraction(1, 6), 0)
        assert cv.g == (0, 0, half)
        assert cv.i == (half, 0, 0)
        assert cv.j == (0, -half, 0)
        assert cv.a == cv.b == cv.c == cv.d == cv.h == cv.k == (0, 0, 0)

    @pytest.mark.parametrize("kind", ["R11", "R12", "R3"])
    def test_reconstruction_roundtrip(self, kind):
        surf = surface_from_pair(make_family(random_descriptor(kind, random.Random(2))))
        assert extract_coeffs(surf).reconstruct().components == surf.components

    def test_rejects_degree_six(self):
        surf = surface_from_pair(validate_pair(ComplexPoly([1]), z**3))
        with pytest.raises(NotRepresentableError):
            extract_coeffs(surf)

    def test_rejects_non_harmonic(self):
        u2 = BivariatePoly({(2, 0): 1})
        with pytest.raises(NotRepresentableError):
            extract_coeffs(SurfacePolynomial.from_components([u2, u2, u2]))

    def test_float_path_agrees(self):
        surf = surface_from_pair(make_family(random_descriptor("R12", random.Random(6))))
        exact = extract_coeffs(surf)
        fl = extract_coeffs(surf.to_numeric())
        for name in NAMES:
            assert np.allclose([float(x) for x in getattr(exact, name)], getattr(fl, name), atol=1e-12)

    def test_float_rejects_high_terms(self):
        c = np.zeros((3, 7, 7))
        c[0, 6, 0] = 1.0
        with pytest.raises(NotRepresentableError):
            extract_coeffs(PolySurface(c))

    def test_d_basis_term_is_literal(self):
        """The d vector multiplies uv(u^2 - v^2) with coefficient one."""
        cv = CoeffVectors5.zero().replace(d=(1, 0, 0))
        assert cv.reconstruct().x1 == BivariatePoly({(3, 1): 1, (1, 3): -1})


class TestSystem:
    @pytest.mark.parametrize("kind", ["R11", "R12", "R3", "Enneper"])
    @pytest.mark.parametrize("seed", range(5))
    def test_family_members_satisfy_system(self, kind, seed):
        cv = extract_coeffs(surface_from_pair(make_family(random_descriptor(kind, random.Random(seed)))))
        res = system_residual(cv)
        assert len(res) == 18 and res.is_zero() and res.failing() == []

    def test_perturbation_breaks_system(self):
        cv = extract_coeffs(surface_from_pair(make_family(random_descriptor("R12", random.Random(0)))))
        a = cv.a
        broken = cv.replace(a=(a[0] + Fraction(1, 1000), a[1], a[2]))
        assert not system_residual(broken).is_zero()

    def test_named_failure(self):
        cv = CoeffVectors5.from_mapping({"a": ["1", "0", "0"], "b": ["0", "1", "0"], "c": ["0", "0", "1"]})
        res = system_residual(cv)
        assert res.failing() == [5]
        assert res.residuals[4] == 16

    def test_xu_wang_float(self):
        pair, _ = xw_degree5(1.0, 0.0, 0.0, 1.0)
        cv = extract_coeffs(pair.surface())
        res = system_residual(cv)
        assert res.max_abs() / residual_scale(cv) < 1e-12

    def test_report_json(self):
        cv = extract_coeffs(surface_from_pair(validate_pair(ComplexPoly([1]), z)))
        report = residual_report(system_residual(cv))
        assert len(report) == 18
        assert report[0] == {"index": 1, "equation": "a.a - b.b = 0", "exact": "0", "value": 0.0}
        json.dumps(report)

    @settings(max_examples=40)
    @given(st.lists(st.fractions(-3, 3, max_denominator=5), min_size=33, max_size=33))
    def test_exact_residual_is_polynomial_identity(self, vals):
        """Residuals computed from vectors equal those recomputed in floats."""
        cv = CoeffVectors5(*(tuple(vals[3 * k: 3 * k + 3]) for k in range(11)))
        fl = CoeffVectors5(*(tuple(float(x) for x in vals[3 * k: 3 * k + 3]) for k in range(11)))
        exact = system_residual(cv).residuals
        approx = system_residual(fl).residuals
        assert np.allclose([float(x) for x in exact], approx, atol=1e-9)
