"""Weierstrass data -> minimal curve -> polynomial surface.

The exact path goes ``validate_pair -> integrand -> build_curve ->
real_part_surface`` and keeps every coefficient a Gaussian rational, so
isotropy, harmonicity and isothermality are checked as exact identities.

The float path (:class:`NumericPair`, :class:`PolySurface`) mirrors it with
numpy coefficient arrays for data that is not Gaussian-rational (square roots
in the Xu-Wang families, rotations of the associated family).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb

import numpy as np
from numpy.polynomial import polynomial as npoly

from .algebra import (
    I,
    BivariatePoly,
    ComplexPoly,
    ExactComplex,
    RationalFunction,
    substitute_complex,
)
from .errors import DegenerateSurfaceError, StructureError

HALF = ExactComplex(1, 0) / 2


@dataclass(frozen=True)
class WeierstrassPair:
    """Validated generating pair ``f = Q^2 R``, ``g = P/Q``."""

    f: ComplexPoly
    g: RationalFunction
    P: ComplexPoly
    Q: ComplexPoly
    R: ComplexPoly
    p: int
    q: int
    r: int
    n: int

    @property
    def structure(self) -> dict[str, int]:
        return {"p": self.p, "q": self.q, "r": self.r, "n": self.n}

    def degree_sums(self) -> tuple[int, int, int]:
        return 2 * self.q + self.r, 2 * self.p + self.r, self.p + self.q + self.r

    def to_numeric(self) -> "NumericPair":
        return NumericPair(self.P.to_numpy(), self.Q.to_numpy(), self.R.to_numpy())


def validate_pair(f: ComplexPoly, g: RationalFunction | ComplexPoly) -> WeierstrassPair:
    """Check the structure f = Q^2 R, g = P/Q and compute (p, q, r, n)."""
    if not isinstance(g, RationalFunction):
        g = RationalFunction(g)
    if f.is_zero():
        raise DegenerateSurfaceError("f is identically zero; the pair generates no surface")
    if g.is_constant():
        raise DegenerateSurfaceError(f"g = {g} is constant; the pair generates a plane")
    P, Q = g.numerator, g.denominator
    R, rem = divmod(f, Q * Q)
    if not rem.is_zero():
        raise StructureError(
            f"f = {f} is not divisible by Q^2 where Q = {Q}; f*g^2 would not be a polynomial"
        )
    p, q, r = int(P.degree), int(Q.degree), int(R.degree)
    n = 1 + max(2 * q + r, 2 * p + r, p + q + r)
    return WeierstrassPair(f=f, g=g, P=P, Q=Q, R=R, p=p, q=q, r=r, n=n)


def integrand(pair: WeierstrassPair) -> tuple[ComplexPoly, ComplexPoly, ComplexPoly]:
    """(phi1, phi2, phi3) with the poles of g cleared through f = Q^2 R."""
    q2r = pair.Q * pair.Q * pair.R
    p2r = pair.P * pair.P * pair.R
    phi1 = (q2r - p2r) * HALF
    phi2 = (q2r + p2r) * (I * HALF)
    phi3 = pair.P * pair.Q * pair.R
    return phi1, phi2, phi3


def check_isotropy(phi) -> ComplexPoly:
    """phi1^2 + phi2^2 + phi3^2; the zero polynomial certifies a minimal curve."""
    phi1, phi2, phi3 = (ComplexPoly._lift(x) for x in phi)
    return phi1 * phi1 + phi2 * phi2 + phi3 * phi3


@dataclass(frozen=True)
class MinimalCurve:
    """Psi(z) = integral of the Weierstrass integrand from 0, so Psi(0) = 0."""

    psi: tuple[ComplexPoly, ComplexPoly, ComplexPoly]

    def derivative(self) -> tuple[ComplexPoly, ...]:
        return tuple(c.derivative() for c in self.psi)

    def evalf(self, z) -> np.ndarray:
        return np.array([c.evalf(z) for c in self.psi])


def build_curve(pair: WeierstrassPair) -> MinimalCurve:
    return MinimalCurve(tuple(phi.integral() for phi in integrand(pair)))


@dataclass(frozen=True)
class SurfacePolynomial:
    """Exact polynomial surface x(u, v) = (x1, x2, x3)."""

    x1: BivariatePoly
    x2: BivariatePoly
    x3: BivariatePoly
    degree: int

    @classmethod
    def from_components(cls, comps) -> "SurfacePolynomial":
        comps = tuple(comps)
        deg = max((c.degree for c in comps), default=0)
        deg = 0 if deg == float("-inf") else int(deg)
        return cls(*comps, degree=deg)

    @property
    def components(self) -> tuple[BivariatePoly, BivariatePoly, BivariatePoly]:
        return (self.x1, self.x2, self.x3)

    def mirrored(self) -> "SurfacePolynomial":
        """Reflection in the plane Oyz: (-x1, x2, x3)."""
        return SurfacePolynomial(-self.x1, self.x2, self.x3, self.degree)

    def laplacians(self) -> tuple[BivariatePoly, ...]:
        return tuple(c.laplacian() for c in self.components)

    def first_form_polys(self) -> tuple[BivariatePoly, BivariatePoly, BivariatePoly]:
        """Exact E, F, G as bivariate polynomials."""
        xu = [c.diff("u") for c in self.components]
        xv = [c.diff("v") for c in self.components]
        E = sum((a * a for a in xu), BivariatePoly())
        F = sum((a * b for a, b in zip(xu, xv)), BivariatePoly())
        G = sum((b * b for b in xv), BivariatePoly())
        return E, F, G

    def is_harmonic(self) -> bool:
        return all(lap.is_zero() for lap in self.laplacians())

    def is_isothermal(self) -> bool:
        E, F, G = self.first_form_polys()
        return (E - G).is_zero() and F.is_zero()

    def __call__(self, u, v):
        return tuple(c(u, v) for c in self.components)

    def to_numeric(self) -> "PolySurface":
        size = max(self.degree, 0) + 1
        return PolySurface(np.stack([c.to_array(size) for c in self.components]))


def real_part_surface(curve: MinimalCurve) -> SurfacePolynomial:
    """x(u, v) = Re Psi(u + i v)."""
    return SurfacePolynomial.from_components(substitute_complex(c)[0] for c in curve.psi)


def imaginary_part_surface(curve: MinimalCurve) -> SurfacePolynomial:
    """The conjugate surface y(u, v) = Im Psi(u + i v)."""
    return SurfacePolynomial.from_components(substitute_complex(c)[1] for c in curve.psi)


def surface_from_pair(pair: WeierstrassPair) -> SurfacePolynomial:
    return real_part_surface(build_curve(pair))


def associated_surface(curve, t: float) -> "PolySurface":
    """Member x cos t + y sin t of the associated family (float coefficients)."""
    if isinstance(curve, MinimalCurve):
        re = real_part_surface(curve).to_numeric().coeffs
        im = imaginary_part_surface(curve).to_numeric().coeffs
        size = max(re.shape[1], im.shape[1])
        re, im = _pad(re, size), _pad(im, size)
    else:
        re, im = complex_to_bivariate(curve)
    return PolySurface(np.cos(t) * re + np.sin(t) * im)


def _pad(c: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros((c.shape[0], size, size))
    out[:, : c.shape[1], : c.shape[2]] = c
    return out


# ---------------------------------------------------------------------------
# float path


def complex_to_bivariate(psi) -> tuple[np.ndarray, np.ndarray]:
    """Float analogue of ``substitute_complex`` for a stack of coefficient rows.

    ``psi`` is a sequence of complex coefficient arrays (lowest degree first);
    returns real and imaginary coefficient tensors of shape (len(psi), d+1, d+1).
    """
    rows = [np.atleast_1d(np.asarray(c, dtype=complex)) for c in psi]
    d = max(len(c) for c in rows)
    re = np.zeros((len(rows), d, d))
    im = np.zeros((len(rows), d, d))
    for m, c in enumerate(rows):
        for k, ck in enumerate(c):
            if ck == 0:
                continue
            for j in range(k + 1):
                term = ck * comb(k, j) * (1j**j)
                re[m, k - j, j] += term.real
                im[m, k - j, j] += term.imag
    return re, im


class PolySurface:
    """Polynomial surface with float coefficients, ``coeffs[k, i, j]`` of u^i v^j.

    Evaluation and the exact partial derivatives accept numpy arrays.
    """

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.ndim != 3 or self.coeffs.shape[0] != 3:
            raise ValueError("coefficient tensor must have shape (3, n, m)")

    @cached_property
    def _derivative_coeffs(self):
        c = self.coeffs
        cu = npoly.polyder(c, axis=1)
        cv = npoly.polyder(c, axis=2)
        return {
            "u": cu,
            "v": cv,
            "uu": npoly.polyder(c, m=2, axis=1),
            "uv": npoly.polyder(cu, axis=2),
            "vv": npoly.polyder(c, m=2, axis=2),
        }

    @property
    def degree(self) -> int:
        nz = np.argwhere(self.coeffs != 0)
        return int((nz[:, 1] + nz[:, 2]).max()) if len(nz) else 0

    @staticmethod
    def _eval(c, u, v):
        return np.stack([npoly.polyval2d(u, v, ck) if ck.size else np.zeros_like(np.asarray(u, float) + v) for ck in c])

    def evaluate(self, u, v) -> np.ndarray:
        """Positions, shape (3, *broadcast(u, v).shape)."""
        return self._eval(self.coeffs, u, v)

    __call__ = evaluate

    def derivatives(self, u, v) -> dict[str, np.ndarray]:
        return {k: self._eval(c, u, v) for k, c in self._derivative_coeffs.items()}

    def mirrored(self) -> "PolySurface":
        c = self.coeffs.copy()
        c[0] = -c[0]
        return PolySurface(c)

    def __repr__(self):
        return f"PolySurface(degree={self.degree})"


class NumericPair:
    """Float generating data ``f = Q^2 R``, ``g = P/Q`` as complex coefficient arrays.

    The structure is taken as given; no exact divisibility check is possible.
    """

    def __init__(self, P, Q, R):
        self.P = np.atleast_1d(np.asarray(P, dtype=complex))
        self.Q = np.atleast_1d(np.asarray(Q, dtype=complex))
        self.R = np.atleast_1d(np.asarray(R, dtype=complex))
        if not np.any(self.Q):
            raise ZeroDivisionError("Q is identically zero")
        if not np.any(self.R):
            raise DegenerateSurfaceError("f is identically zero")

    @classmethod
    def from_fg(cls, f, g_num, g_den=(1.0,)) -> "NumericPair":
        """Build from f and g = g_num/g_den, assuming g_den^2 divides f."""
        Q = np.asarray(g_den, dtype=complex)
        R, rem = npoly.polydiv(np.asarray(f, dtype=complex), npoly.polymul(Q, Q))
        scale = max(np.abs(f).max(), 1.0)
        if rem.size and np.abs(rem).max() > 1e-12 * scale:
            raise StructureError("f is not divisible by the square of the denominator of g")
        return cls(g_num, Q, R)

    @property
    def f(self) -> np.ndarray:
        return npoly.polymul(npoly.polymul(self.Q, self.Q), self.R)

    @property
    def g(self):
        from .algebra import FloatRational

        return FloatRational(self.P, self.Q)

    def f_gprime(self) -> np.ndarray:
        """f * g' as a polynomial: R (P'Q - PQ')."""
        w = npoly.polysub(
            npoly.polymul(npoly.polyder(self.P), self.Q),
            npoly.polymul(self.P, npoly.polyder(self.Q)),
        )
        return npoly.polymul(self.R, np.atleast_1d(w))

    def phi(self) -> list[np.ndarray]:
        q2r = npoly.polymul(npoly.polymul(self.Q, self.Q), self.R)
        p2r = npoly.polymul(npoly.polymul(self.P, self.P), self.R)
        return [
            0.5 * npoly.polysub(q2r, p2r),
            0.5j * npoly.polyadd(q2r, p2r),
            npoly.polymul(npoly.polymul(self.P, self.Q), self.R),
        ]

    def psi(self) -> list[np.ndarray]:
        return [npoly.polyint(c) for c in self.phi()]

    def surface(self) -> PolySurface:
        return PolySurface(complex_to_bivariate(self.psi())[0])

    def conjugate_surface(self) -> PolySurface:
        return PolySurface(complex_to_bivariate(self.psi())[1])

    def associated(self, t: float) -> PolySurface:
        return associated_surface(self.psi(), t)

    def isotropy_residual(self) -> float:
        """Largest coefficient of phi.phi relative to the largest coefficient of phi^2 terms."""
        sq = [npoly.polymul(c, c) for c in self.phi()]
        total = npoly.polyadd(npoly.polyadd(sq[0], sq[1]), sq[2])
        scale = max(max(np.abs(s).max() for s in sq), 1e-300)
        return float(np.abs(total).max() / scale)

    @property
    def degree(self) -> int:
        def deg(c):
            nz = np.nonzero(c)[0]
            return int(nz[-1]) if len(nz) else 0

        p, q, r = deg(self.P), deg(self.Q), deg(self.R)
        return 1 + max(2 * q + r, 2 * p + r, p + q + r)
