"""Exact algebra over the Gaussian rationals.

Scalars are :class:`ExactComplex` (rational real and imaginary parts),
univariate polynomials are :class:`ComplexPoly`, quotients are kept reduced in
:class:`RationalFunction`, and the real coordinate functions of a surface live
in :class:`BivariatePoly` (exact rational coefficients in ``u`` and ``v``).

Everything here is immutable.  Floating-point evaluation is provided through
``evalf``/``to_numpy`` and :class:`FloatRational` for the numeric layers.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from itertools import zip_longest
from math import comb
from typing import Iterable, Mapping, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DegenerateInputError, WforgeError

Rational = Union[int, Fraction]

#: Degree of the zero polynomial.
NEG_INF = -math.inf


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


class ExactComplex:
    """Complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("ExactComplex is immutable")

    @classmethod
    def coerce(cls, x) -> "ExactComplex":
        if isinstance(x, ExactComplex):
            return x
        if isinstance(x, complex):
            return cls(x.real, x.imag)
        if isinstance(x, str):
            return cls.parse(x)
        return cls(x, 0)

    @classmethod
    def parse(cls, text: str) -> "ExactComplex":
        """Parse ``"3"``, ``"-1/2"``, ``"2i"``, ``"1/3-2/5i"``, ``"-i"`` or ``"(re,im)"``."""
        s = text.strip().replace(" ", "")
        if s.startswith("(") and s.endswith(")"):
            parts = s[1:-1].split(",")
            if len(parts) != 2:
                raise ValueError(f"bad complex pair {text!r}")
            return cls(Fraction(parts[0]), Fraction(parts[1]))
        if not s:
            raise ValueError("empty scalar")
        if s[-1] not in "ij":
            return cls(Fraction(s))
        body = s[:-1]
        split = 0
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "eE":
                split = k
                break
        re_txt, im_txt = body[:split], body[split:]
        if im_txt in ("", "+"):
            im = Fraction(1)
        elif im_txt == "-":
            im = Fraction(-1)
        else:
            im = Fraction(im_txt)
        return cls(Fraction(re_txt) if re_txt else 0, im)

    # arithmetic -------------------------------------------------------
    def _other(self, other):
        if isinstance(other, ExactComplex):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return ExactComplex(other)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by exact zero")
        num = self * o.conjugate()
        return ExactComplex(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (ExactComplex(1) / self) ** (-k)
        out = ExactComplex(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "ExactComplex":
        return ExactComplex(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def sqrt(self) -> "ExactComplex | None":
        """Principal square root if it is again a Gaussian rational, else None."""
        if self.is_zero():
            return ExactComplex(0)
        mod = _rational_sqrt(self.abs2())
        if mod is None:
            return None
        x = _rational_sqrt((mod + self.re) / 2)
        if x is None:
            return None
        if x == 0:
            # negative real axis
            y = _rational_sqrt((mod - self.re) / 2)
            return None if y is None else ExactComplex(0, y)
        return ExactComplex(x, self.im / (2 * x))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, complex):
            return complex(self) == other
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"ExactComplex({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


ZERO = ExactComplex(0)
ONE = ExactComplex(1)
I = ExactComplex(0, 1)


class ComplexPoly:
    """Univariate polynomial in z with Gaussian-rational coefficients.

    Coefficients are stored lowest degree first with trailing zeros removed,
    so the leading coefficient is nonzero unless the polynomial is zero.
    """

    __slots__ = ("_c",)

    def __init__(self, coefficients: Iterable = ()):
        cs = [ExactComplex.coerce(c) for c in coefficients]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "_c", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("ComplexPoly is immutable")

    @classmethod
    def z(cls) -> "ComplexPoly":
        return cls([0, 1])

    @classmethod
    def constant(cls, c) -> "ComplexPoly":
        return cls([c])

    @classmethod
    def monomial(cls, c, k: int) -> "ComplexPoly":
        return cls([0] * k + [c])

    @property
    def coefficients(self) -> tuple[ExactComplex, ...]:
        return self._c

    @property
    def degree(self):
        """Degree, or ``NEG_INF`` for the zero polynomial."""
        return len(self._c) - 1 if self._c else NEG_INF

    def is_zero(self) -> bool:
        return not self._c

    def is_constant(self) -> bool:
        return len(self._c) <= 1

    def leading(self) -> ExactComplex:
        return self._c[-1] if self._c else ZERO

    def __getitem__(self, k: int) -> ExactComplex:
        if k < 0:
            raise IndexError("negative exponent")
        return self._c[k] if k < len(self._c) else ZERO

    def __len__(self):
        return len(self._c)

    # ring operations ----------------------------------------------------
    @staticmethod
    def _lift(x) -> "ComplexPoly | None":
        if isinstance(x, ComplexPoly):
            return x
        if isinstance(x, (ExactComplex, int, Fraction)) and not isinstance(x, bool):
            return ComplexPoly([x])
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return ComplexPoly(a + b for a, b in zip_longest(self._c, o._c, fillvalue=ZERO))

    __radd__ = __add__

    def __neg__(self):
        return ComplexPoly(-a for a in self._c)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if not self._c or not o._c:
            return ComplexPoly()
        out = [ZERO] * (len(self._c) + len(o._c) - 1)
        for i, a in enumerate(self._c):
            if a.is_zero():
                continue
            for j, b in enumerate(o._c):
                out[i + j] = out[i + j] + a * b
        return ComplexPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = ComplexPoly([1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, scalar):
        s = ExactComplex.coerce(scalar)
        return ComplexPoly(a / s for a in self._c)

    def __divmod__(self, divisor: "ComplexPoly"):
        if not isinstance(divisor, ComplexPoly):
            divisor = ComplexPoly([divisor])
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self._c)
        dd = len(divisor._c) - 1
        lead = divisor._c[-1]
        if len(rem) - 1 < dd:
            return ComplexPoly(), self
        quot = [ZERO] * (len(rem) - dd)
        for k in range(len(rem) - 1, dd - 1, -1):
            coef = rem[k] / lead
            if coef.is_zero():
                continue
            quot[k - dd] = coef
            for j, b in enumerate(divisor._c):
                rem[k - dd + j] = rem[k - dd + j] - coef * b
        return ComplexPoly(quot), ComplexPoly(rem[:dd])

    def __floordiv__(self, divisor):
        return divmod(self, divisor)[0]

    def __mod__(self, divisor):
        return divmod(self, divisor)[1]

    def divides(self, other: "ComplexPoly") -> bool:
        return (other % self).is_zero()

    # calculus -----------------------------------------------------------
    def derivative(self) -> "ComplexPoly":
        return ComplexPoly(k * c for k, c in enumerate(self._c) if k > 0)

    def integral(self) -> "ComplexPoly":
        """Antiderivative vanishing at z = 0."""
        return ComplexPoly([ZERO] + [c / (k + 1) for k, c in enumerate(self._c)])

    def compose(self, inner: "ComplexPoly") -> "ComplexPoly":
        """Return ``self(inner(z))`` (Horner)."""
        out = ComplexPoly()
        for c in reversed(self._c):
            out = out * inner + c
        return out

    def monic(self) -> "ComplexPoly":
        if self.is_zero():
            return self
        return self / self._c[-1]

    def conjugate_coefficients(self) -> "ComplexPoly":
        return ComplexPoly(c.conjugate() for c in self._c)

    # evaluation ---------------------------------------------------------
    def __call__(self, z):
        """Exact evaluation at a Gaussian rational (or int/Fraction)."""
        x = ExactComplex.coerce(z)
        out = ZERO
        for c in reversed(self._c):
            out = out * x + c
        return out

    def to_numpy(self) -> np.ndarray:
        return np.array([complex(c) for c in self._c] or [0j], dtype=complex)

    def evalf(self, z):
        return npoly.polyval(z, self.to_numpy())

    # comparison / text ----------------------------------------------------
    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._c == o._c

    def __hash__(self):
        return hash(self._c)

    def __repr__(self):
        return f"ComplexPoly({format_poly(self)})"

    def __str__(self):
        if not self._c:
            return "0"
        terms = []
        for k, c in enumerate(self._c):
            if c.is_zero():
                continue
            cs = str(c)
            if c.re != 0 and c.im != 0:
                cs = f"({cs})"
            if k == 0:
                terms.append(cs)
            else:
                mon = "z" if k == 1 else f"z^{k}"
                terms.append(mon if cs == "1" else f"-{mon}" if cs == "-1" else f"{cs}*{mon}")
        return " + ".join(terms)


def poly_gcd(a: ComplexPoly, b: ComplexPoly) -> ComplexPoly:
    """Monic greatest common divisor (Euclid over the Gaussian rationals)."""
    if a.is_zero() and b.is_zero():
        raise DegenerateInputError("gcd of two zero polynomials is undefined")
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


class RationalFunction:
    """Reduced quotient of two complex polynomials with monic denominator."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator, denominator=None):
        num = ComplexPoly._lift(numerator)
        den = ComplexPoly([1]) if denominator is None else ComplexPoly._lift(denominator)
        if num is None or den is None:
            raise TypeError("RationalFunction needs polynomial numerator and denominator")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            num, den = ComplexPoly(), ComplexPoly([1])
        else:
            g = poly_gcd(num, den)
            if not g.is_constant():
                num, den = num // g, den // g
            lead = den.leading()
            num, den = num / lead, den / lead
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    def is_polynomial(self) -> bool:
        return self.denominator.is_constant()

    def is_constant(self) -> bool:
        return self.numerator.is_constant() and self.denominator.is_constant()

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def __call__(self, z):
        return self.numerator(z) / self.denominator(z)

    def derivative(self) -> "RationalFunction":
        p, q = self.numerator, self.denominator
        return RationalFunction(p.derivative() * q - p * q.derivative(), q * q)

    def compose(self, inner: ComplexPoly) -> "RationalFunction":
        return RationalFunction(self.numerator.compose(inner), self.denominator.compose(inner))

    def reciprocal(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("reciprocal of the zero function")
        return RationalFunction(self.denominator, self.numerator)

    def to_float(self) -> "FloatRational":
        return FloatRational(self.numerator.to_numpy(), self.denominator.to_numpy())

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.numerator == other.numerator and self.denominator == other.denominator
        o = ComplexPoly._lift(other)
        if o is None:
            return NotImplemented
        return self.is_polynomial() and self.numerator == o

    def __hash__(self):
        return hash((self.numerator, self.denominator))

    def __repr__(self):
        return f"RationalFunction({format_poly(self.numerator)}, {format_poly(self.denominator)})"

    def __str__(self):
        if self.is_polynomial():
            return str(self.numerator)
        return f"({self.numerator}) / ({self.denominator})"


class FloatRational:
    """Quotient of two complex floating-point polynomials (lowest degree first)."""

    def __init__(self, numerator, denominator=(1.0,)):
        self.numerator = np.atleast_1d(np.asarray(numerator, dtype=complex))
        self.denominator = np.atleast_1d(np.asarray(denominator, dtype=complex))
        if not np.any(self.denominator):
            raise ZeroDivisionError("zero denominator")

    def __call__(self, z):
        return npoly.polyval(z, self.numerator) / npoly.polyval(z, self.denominator)

    def value_and_derivative(self, z):
        p = npoly.polyval(z, self.numerator)
        q = npoly.polyval(z, self.denominator)
        dp = npoly.polyval(z, npoly.polyder(self.numerator))
        dq = npoly.polyval(z, npoly.polyder(self.denominator))
        return p / q, (dp * q - p * dq) / (q * q)

    def __repr__(self):
        return f"FloatRational({self.numerator!r}, {self.denominator!r})"


# ---------------------------------------------------------------------------
# bivariate real polynomials


class BivariatePoly:
    """Real polynomial in (u, v) with exact rational coefficients.

    ``terms`` maps ``(i, j)`` to the coefficient of ``u**i * v**j``; zero
    coefficients are never stored.
    """

    __slots__ = ("_t",)

    def __init__(self, terms: Mapping[tuple[int, int], Rational] | None = None):
        t = {}
        for (i, j), c in (terms or {}).items():
            c = _frac(c)
            if c != 0:
                if i < 0 or j < 0:
                    raise ValueError("negative exponent")
                t[(int(i), int(j))] = c
        object.__setattr__(self, "_t", t)

    def __setattr__(self, name, value):
        raise AttributeError("BivariatePoly is immutable")

    @classmethod
    def from_array(cls, coeffs) -> "BivariatePoly":
        return cls({(i, j): c for (i, j), c in np.ndenumerate(np.asarray(coeffs, dtype=object))})

    @property
    def terms(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._t)

    def coefficient(self, i: int, j: int) -> Fraction:
        return self._t.get((i, j), Fraction(0))

    @property
    def degree(self):
        return max((i + j for i, j in self._t), default=NEG_INF)

    def is_zero(self) -> bool:
        return not self._t

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BivariatePoly({(0, 0): other})
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        t = dict(self._t)
        for k, c in other._t.items():
            t[k] = t.get(k, 0) + c
        return BivariatePoly(t)

    __radd__ = __add__

    def __neg__(self):
        return BivariatePoly({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BivariatePoly({(0, 0): other})
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return BivariatePoly({k: c * other for k, c in self._t.items()})
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        t: dict[tuple[int, int], Fraction] = {}
        for (i1, j1), c1 in self._t.items():
            for (i2, j2), c2 in other._t.items():
                k = (i1 + i2, j1 + j2)
                t[k] = t.get(k, 0) + c1 * c2
        return BivariatePoly(t)

    __rmul__ = __mul__

    def diff(self, var: str) -> "BivariatePoly":
        if var == "u":
            return BivariatePoly({(i - 1, j): i * c for (i, j), c in self._t.items() if i > 0})
        if var == "v":
            return BivariatePoly({(i, j - 1): j * c for (i, j), c in self._t.items() if j > 0})
        raise ValueError(f"unknown variable {var!r}")

    def laplacian(self) -> "BivariatePoly":
        return self.diff("u").diff("u") + self.diff("v").diff("v")

    def __call__(self, u, v) -> Fraction:
        u, v = _frac(u), _frac(v)
        return sum((c * u**i * v**j for (i, j), c in self._t.items()), Fraction(0))

    def to_array(self, size: int | None = None) -> np.ndarray:
        """Float coefficient matrix ``C[i, j]`` of ``u**i v**j``."""
        d = max((max(i, j) for i, j in self._t), default=0)
        n = d + 1 if size is None else size
        arr = np.zeros((n, n))
        for (i, j), c in self._t.items():
            arr[i, j] = float(c)
        return arr

    def evalf(self, u, v):
        from numpy.polynomial.polynomial import polyval2d

        return polyval2d(u, v, self.to_array())

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BivariatePoly({(0, 0): other})
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        return self._t == other._t

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def __repr__(self):
        body = ", ".join(f"({i}, {j}): {c}" for (i, j), c in sorted(self._t.items()))
        return f"BivariatePoly({{{body}}})"


def substitute_complex(p: ComplexPoly) -> tuple[BivariatePoly, BivariatePoly]:
    """Expand ``p(u + i v)`` into its real and imaginary bivariate parts."""
    re_t: dict[tuple[int, int], Fraction] = {}
    im_t: dict[tuple[int, int], Fraction] = {}
    for k, c in enumerate(p.coefficients):
        if c.is_zero():
            continue
        # (u + iv)^k = sum_j C(k, j) u^(k-j) i^j v^j
        for j in range(k + 1):
            b = comb(k, j)
            key = (k - j, j)
            # i^j is 1, i, -1, -i
            r, s = [(1, 0), (0, 1), (-1, 0), (0, -1)][j % 4]
            xr, xi = b * r, b * s  # real/imag part of the monomial's factor
            re_t[key] = re_t.get(key, 0) + c.re * xr - c.im * xi
            im_t[key] = im_t.get(key, 0) + c.re * xi + c.im * xr
    return BivariatePoly(re_t), BivariatePoly(im_t)


# ---------------------------------------------------------------------------
# textual format:  poly[(re,im), (re,im), ...], lowest degree first

_PAIR_RE = re.compile(r"\(\s*([^(),]+?)\s*,\s*([^(),]+?)\s*\)")


def format_poly(p: ComplexPoly) -> str:
    return "poly[" + ", ".join(f"({c.re},{c.im})" for c in p.coefficients) + "]"


def parse_poly(text: str) -> ComplexPoly:
    s = text.strip()
    if not (s.startswith("poly[") and s.endswith("]")):
        raise WforgeError(f"expected 'poly[...]', got {text!r}")
    body = s[5:-1].strip()
    if not body:
        return ComplexPoly()
    pairs = _PAIR_RE.findall(body)
    leftover = _PAIR_RE.sub("", body).replace(",", "").strip()
    if leftover:
        raise WforgeError(f"malformed coefficient list in {text!r}")
    try:
        return ComplexPoly(ExactComplex(Fraction(a), Fraction(b)) for a, b in pairs)
    except (ValueError, ZeroDivisionError) as exc:
        raise WforgeError(f"bad coefficient in {text!r}: {exc}") from None
