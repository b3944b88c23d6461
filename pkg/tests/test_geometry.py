import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_descriptor
from wforge.algebra import ComplexPoly, ExactComplex, RationalFunction
from wforge.errors import BranchPointError, CriticalPointError, SingularPointError
from wforge.families import FamilyDescriptor, inversion_transform, make_family, moebius_transform, xu_wang_pair, xu_wang_surface
from wforge.geometry import (
    branch_points,
    canonical_chart,
    canonical_energy,
    fd_derivatives,
    forms_at,
    minimality_scan,
    weierstrass_metric,
)
from wforge.weierstrass import PolySurface, surface_from_pair, validate_pair

z = ComplexPoly.z()


def enneper_pair():
    return validate_pair(ComplexPoly([1]), z)


def graph(coeff_z):
    """Graph surface (u, v, h(u, v)) with h given by a coefficient matrix."""
    n = coeff_z.shape[0]
    c = np.zeros((3, n, n))
    c[0, 1, 0] = 1
    c[1, 0, 1] = 1
    c[2] = coeff_z
    return PolySurface(c)


class TestForms:
    def test_enneper_origin(self):
        s = forms_at(enneper_pair(), 0.0, 0.0)
        assert s.E == pytest.approx(0.25) and s.G == pytest.approx(0.25) and s.F == 0
        assert s.K == pytest.approx(-16.0)
        assert s.H == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("w", [0.3 + 0.2j, -0.7 + 0.5j, 1.1 - 0.9j])
    def test_enneper_closed_forms(self, w):
        s = forms_at(enneper_pair(), w.real, w.imag)
        r2 = abs(w) ** 2
        assert s.E == pytest.approx((1 + r2) ** 2 / 4, rel=1e-12)
        assert s.K == pytest.approx(-16 / (1 + r2) ** 4, rel=1e-12)
        assert s.nu == pytest.approx(4 / (1 + r2) ** 2, rel=1e-12)

    def test_paraboloid_control(self):
        c = np.zeros((3, 3))
        c[2, 0] = 1.0  # u^2
        s = forms_at(graph(c), 0.0, 0.0)
        assert s.L == pytest.approx(2.0) and s.N == 0
        assert s.H == pytest.approx(1.0) and s.K == 0

    def test_saddle_control(self):
        c = np.zeros((3, 3))
        c[2, 0], c[0, 2] = 1.0, -1.0  # u^2 - v^2
        s = forms_at(graph(c), 0.0, 0.0)
        assert s.H == pytest.approx(0.0) and s.K == pytest.approx(-4.0)

    def test_fd_mode_agrees(self):
        pair = make_family(random_descriptor("R12", random.Random(1)))
        ex = forms_at(pair, 0.3, -0.4)
        fd = forms_at(pair, 0.3, -0.4, mode="fd")
        assert fd.E == pytest.approx(ex.E, rel=1e-8)
        assert fd.K == pytest.approx(ex.K, rel=1e-4)

    def test_fd_derivatives_close(self):
        surf = surface_from_pair(enneper_pair()).to_numeric()
        d = fd_derivatives(surf, 0.4, 0.1)
        e = surf.derivatives(0.4, 0.1)
        for k in ("u", "v"):
            assert np.allclose(d[k], e[k], atol=1e-9)
        for k in ("uu", "uv", "vv"):
            assert np.allclose(d[k], e[k], atol=1e-6)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            forms_at(enneper_pair(), 0, 0, mode="magic")

    def test_singular_point(self):
        with pytest.raises(SingularPointError):
            forms_at(xu_wang_pair(5, 1.0), 0.0, 0.0)

    @pytest.mark.parametrize("kind", ["R11", "R12", "R3"])
    def test_metric_oracle(self, kind):
        pair = make_family(random_descriptor(kind, random.Random(13)))
        w = 0.35 - 0.15j
        s = forms_at(pair, w.real, w.imag)
        assert s.E == pytest.approx(float(weierstrass_metric(pair, w)), rel=1e-10)


class TestBranchPoints:
    def test_zeros_of_R_only(self):
        # f = z^2 (z - 1), g = z/z: poles of g are not branch points
        pair = validate_pair(z * z * (z - 1), RationalFunction(ComplexPoly([1, 0, 1]), z))
        pts = branch_points(pair)
        assert len(pts) == 1 and pts[0] == pytest.approx(1.0)

    def test_repeated_root_once(self):
        pair = validate_pair(z**3, z)
        assert len(branch_points(pair)) == 1


class TestMinimalityScan:
    @pytest.mark.parametrize("kind", ["R11", "R12", "R3", "Enneper"])
    def test_families_pass(self, kind):
        pair = make_family(random_descriptor(kind, random.Random(23)))
        rep = minimality_scan(pair, exclude=branch_points(pair))
        assert rep.passed, rep.as_dict()

    def test_xu_wang_skips_branch_point(self):
        rep = minimality_scan(xu_wang_surface(5, 1.0), exclude=[0j])
        assert rep.passed and rep.skipped >= 1 and rep.points + rep.skipped == 41 * 41

    def test_paraboloid_fails(self):
        c = np.zeros((3, 3))
        c[2, 0], c[0, 2] = 1.0, 1.0
        rep = minimality_scan(graph(c))
        assert not rep.passed and rep.max_abs_H == pytest.approx(2.0)

    def test_harmonic_but_not_conformal_fails(self):
        # (u, v, u^2 - v^2) is harmonic yet not minimal
        c = np.zeros((3, 3))
        c[2, 0], c[0, 2] = 1.0, -1.0
        assert not minimality_scan(graph(c)).passed

    def test_report_dict(self):
        d = minimality_scan(enneper_pair(), grid=5).as_dict()
        assert d["passed"] is True and d["points"] == 25


class TestCanonicalChart:
    @pytest.mark.parametrize("branch", [1, -1])
    def test_enneper(self, branch):
        chart = canonical_chart(enneper_pair(), branch=branch)
        fr = chart.form_residuals()
        assert max(fr["E-1/nu"], fr["G-1/nu"], fr["F"]) < 1e-6
        assert max(fr["L-1"], fr["M"], fr["N+1"]) < 1e-5
        assert np.abs(chart.ganchev_residual()).max() < 1e-4
        assert chart.path_residual() < 1e-6
        assert chart.z[25, 25] == 0

    def test_energy_relation(self):
        """In canonical coordinates E equals the canonical energy of g times |f g'|."""
        pair = make_family(FamilyDescriptor.from_values("r3", [ExactComplex(1), ExactComplex(1), ExactComplex(0)]))
        chart = canonical_chart(pair, z0=0.2 + 0.1j, half_width=0.1)
        npair = pair.to_numeric()
        for idx in [(0, 0), (10, 3), (20, 20)]:
            zz = chart.z[idx]
            fg = np.polynomial.polynomial.polyval(zz, npair.f_gprime())
            expected = canonical_energy(pair.g, zz) * abs(fg)
            assert chart.forms["E"][idx] == pytest.approx(expected, rel=1e-9)

    def test_critical_start(self):
        with pytest.raises(CriticalPointError):
            canonical_chart(validate_pair(ComplexPoly([1]), z * z), z0=0)

    def test_branch_point_guard(self):
        # f g' = 2z for (1, z^2); a chart starting close to 0 runs into it
        with pytest.raises(BranchPointError):
            canonical_chart(validate_pair(ComplexPoly([1]), z * z), z0=0.05, radius=0.04)

    def test_bad_branch(self):
        with pytest.raises(ValueError):
            canonical_chart(enneper_pair(), branch=2)


class TestCanonicalEnergy:
    def test_enneper_value(self):
        assert canonical_energy(RationalFunction(z), 0.5) == pytest.approx((1.25) ** 2 / 4)

    def test_critical_point(self):
        with pytest.raises(CriticalPointError):
            canonical_energy(RationalFunction(z * z), 0.0)

    def test_callable_pair(self):
        val = canonical_energy((lambda w: w**2, lambda w: 2 * w), 0.5)
        assert val == pytest.approx((1 + 0.0625) ** 2 / 4)

    @settings(max_examples=40)
    @given(
        st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False),
        st.floats(0, 2 * math.pi),
        st.complex_numbers(min_magnitude=0.1, max_magnitude=1.0, allow_nan=False, allow_infinity=False),
    )
    def test_invariant_under_moebius(self, alpha, phi, w):
        g = RationalFunction(ComplexPoly([1, 0, 1]), z + 2)
        a = ExactComplex.coerce(complex(round(alpha.real, 3), round(alpha.imag, 3)))
        if abs(1 - complex(a).conjugate() * complex(g.to_float()(w))) < 1e-3:
            return
        ref = canonical_energy(g, w)
        moved = canonical_energy(moebius_transform(g, a, phi), w)
        assert moved == pytest.approx(ref, rel=1e-11)

    def test_invariant_under_inversion(self):
        g = RationalFunction(ComplexPoly([1, 2, 3]))
        for phi in (0.0, 1.0, 2.5):
            for w in (0.3 + 0.4j, -0.8 + 0.1j):
                assert canonical_energy(inversion_transform(g, phi), w) == pytest.approx(canonical_energy(g, w), rel=1e-12)
