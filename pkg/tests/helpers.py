"""Shared strategies, random draws and a sympy oracle for the test suite."""

import random
from fractions import Fraction

import sympy
from hypothesis import strategies as st

from wforge.algebra import BivariatePoly, ComplexPoly, ExactComplex
from wforge.families import FamilyDescriptor, PARAM_NAMES

Z = sympy.Symbol("z")
U, V = sympy.symbols("u v", real=True)

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)
gaussian = st.builds(ExactComplex, fractions, fractions)
nonzero_gaussian = gaussian.filter(lambda c: not c.is_zero())
polys = st.lists(gaussian, max_size=5).map(ComplexPoly)
nonzero_polys = polys.filter(lambda p: not p.is_zero())


def random_gaussian(rng: random.Random, nonzero: bool = False, den: int = 4) -> ExactComplex:
    while True:
        c = ExactComplex(Fraction(rng.randint(-6, 6), rng.randint(1, den)),
                         Fraction(rng.randint(-6, 6), rng.randint(1, den)))
        if not (nonzero and c.is_zero()):
            return c


def random_descriptor(kind: str, rng: random.Random) -> FamilyDescriptor:
    """Exact random member of an exact family, respecting the side conditions."""
    params = {}
    for name in PARAM_NAMES[kind]:
        must = name == "a" or (kind == "R12" and name == "c")
        params[name] = random_gaussian(rng, nonzero=must)
    return FamilyDescriptor(kind, params)


def to_sympy(c: ExactComplex):
    return sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(c.im.numerator, c.im.denominator)


def poly_to_sympy(p: ComplexPoly):
    return sum((to_sympy(c) * Z**k for k, c in enumerate(p.coefficients)), sympy.Integer(0))


def bivariate_to_sympy(b: BivariatePoly):
    return sum((sympy.Rational(c.numerator, c.denominator) * U**i * V**j for (i, j), c in b.terms.items()),
               sympy.Integer(0))


def sympy_surface(f_expr, g_expr):
    """Re of the Weierstrass integral from 0, computed independently with sympy."""
    comps = [f_expr * (1 - g_expr**2) / 2, sympy.I * f_expr * (1 + g_expr**2) / 2, f_expr * g_expr]
    out = []
    for c in comps:
        psi = sympy.integrate(sympy.cancel(c), (Z, 0, Z))
        w = sympy.expand(psi.subs(Z, U + sympy.I * V))
        out.append(sympy.expand(sympy.re(w)))
    return out


# criterion number -> (passed, detail); printed at the end of the run by conftest
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, title: str, passed: bool, detail: str) -> None:
    line = f"[acceptance {criterion:2d}] {'PASS' if passed else 'FAIL'} {title}: {detail}"
    ACCEPTANCE[criterion] = (passed, line)
    print(line)
