"""Named generating pairs and the transforms relating them.

Normal forms of the quintic minimal surfaces built from Weierstrass data:

    r11[a, b]        f = a,             g = z^2 + b
    r12[a, b, c, d]  f = a (z + b)^2,   g = (c z^2 + d) / (z + b)
    r3[a, b, c]      f = a z^2 + b,     g = z + c

The mirrored cases are reached through :func:`symmetry_transform`.  Also here:
Enneper, the Xu-Wang harmonic families, affine reparametrization, the
Moebius/inversion action on g and the r12/r3 coincidence predicate.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .algebra import (
    BivariatePoly,
    ComplexPoly,
    ExactComplex,
    FloatRational,
    RationalFunction,
)
from .errors import (
    InvalidFamilyError,
    InvalidTransformError,
    NotMinimalError,
    WforgeError,
)
from .weierstrass import NumericPair, PolySurface, WeierstrassPair, validate_pair

KINDS = ("R11", "R12", "R3", "XuWangDeg5", "XuWangOmega", "Enneper")

PARAM_NAMES = {
    "R11": ("a", "b"),
    "R12": ("a", "b", "c", "d"),
    "R3": ("a", "b", "c"),
    "Enneper": (),
    "XuWangDeg5": ("a1", "a2", "e1", "e2"),
    "XuWangOmega": ("n", "omega"),
}

ALIASES = {
    "r11": "R11",
    "r12": "R12",
    "r3": "R3",
    "enneper": "Enneper",
    "xw5": "XuWangDeg5",
    "xwdeg5": "XuWangDeg5",
    "xuwangdeg5": "XuWangDeg5",
    "xw": "XuWangOmega",
    "xuwangomega": "XuWangOmega",
}

EXACT_KINDS = ("R11", "R12", "R3", "Enneper")


def canonical_kind(kind: str) -> str:
    if kind in KINDS:
        return kind
    try:
        return ALIASES[kind.lower()]
    except KeyError:
        raise InvalidFamilyError(f"unknown family {kind!r}; choose from {', '.join(KINDS)}") from None


def _is_exact(x) -> bool:
    return isinstance(x, (ExactComplex, Fraction, int)) and not isinstance(x, bool)


def _exact(x) -> ExactComplex:
    return ExactComplex.coerce(x)


@dataclass(frozen=True)
class FamilyDescriptor:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_kind(self.kind))
        names = PARAM_NAMES[self.kind]
        missing = [n for n in names if n not in self.params]
        extra = [n for n in self.params if n not in names]
        if missing or extra:
            raise InvalidFamilyError(
                f"{self.kind} takes parameters ({', '.join(names) or 'none'}); "
                f"missing {missing}, unexpected {extra}"
            )
        self.check()

    @classmethod
    def from_values(cls, kind: str, values) -> "FamilyDescriptor":
        kind = canonical_kind(kind)
        names = PARAM_NAMES[kind]
        values = list(values)
        if len(values) != len(names):
            raise InvalidFamilyError(f"{kind} expects {len(names)} parameters {names}, got {len(values)}")
        return cls(kind, dict(zip(names, values)))

    @property
    def exact(self) -> bool:
        return self.kind in EXACT_KINDS and all(_is_exact(v) for v in self.params.values())

    def check(self) -> None:
        """Side conditions of each family."""
        p = self.params
        if self.kind in ("R11", "R12", "R3") and _is_zero(p["a"]):
            raise InvalidFamilyError(f"{self.kind} requires a != 0")
        if self.kind == "R12" and _is_zero(p["c"]):
            raise InvalidFamilyError("R12 requires c != 0")
        if self.kind == "XuWangDeg5":
            a1, a2, e1, e2 = (float(p[k]) for k in ("a1", "a2", "e1", "e2"))
            if not a2 * e1 - a1 * e2 < 0:
                raise NotMinimalError(
                    f"XuWangDeg5 requires a2*e1 - a1*e2 < 0, got {a2 * e1 - a1 * e2:g}"
                )
        if self.kind == "XuWangOmega":
            n, omega = p["n"], float(p["omega"])
            if int(n) != n or int(n) < 3:
                raise InvalidFamilyError(f"XuWangOmega requires integer n >= 3, got {n}")
            if omega < 0:
                raise InvalidFamilyError(f"XuWangOmega requires omega >= 0, got {omega}")

    @property
    def degenerate(self) -> bool:
        """R12 whose g loses its pole (b^2 c + d = 0); the surface is then of type r3."""
        if self.kind != "R12":
            return False
        b, c, d = (self.params[k] for k in "bcd")
        if all(_is_exact(x) for x in (b, c, d)):
            b, c, d = _exact(b), _exact(c), _exact(d)
            return (b * b * c + d).is_zero()
        b, c, d = complex(b), complex(c), complex(d)
        return abs(b * b * c + d) <= 1e-14 * max(1.0, abs(b * b * c), abs(d))

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": {k: _scalar_text(v) for k, v in self.params.items()}}

    @classmethod
    def from_json(cls, data: dict) -> "FamilyDescriptor":
        kind = canonical_kind(data["kind"])
        params = {k: parse_param(v) if isinstance(v, str) else v for k, v in data.get("params", {}).items()}
        if kind == "XuWangOmega" and "n" in params:
            params["n"] = int(params["n"] if not isinstance(params["n"], ExactComplex) else params["n"].re)
        return cls(kind, params)

    def label(self) -> str:
        vals = ",".join(_scalar_text(v) for v in self.params.values())
        return f"{self.kind.lower()}[{vals}]" if vals else self.kind.lower()


def _is_zero(x) -> bool:
    if _is_exact(x):
        return _exact(x).is_zero()
    return complex(x) == 0


def _scalar_text(v) -> str:
    if isinstance(v, ExactComplex):
        return str(v)
    if isinstance(v, complex):
        return repr(v)
    return str(v)


def parse_param(text: str):
    """Exact Gaussian rational when possible ("1/3", "0.5", "1-2i"), else float/complex."""
    try:
        return ExactComplex.parse(text)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        raise WforgeError(f"cannot parse parameter {text!r}") from None


# ---------------------------------------------------------------------------
# constructors


def _exact_pair_polys(kind: str, params) -> tuple[ComplexPoly, RationalFunction]:
    z = ComplexPoly.z()
    if kind == "Enneper":
        return ComplexPoly([1]), RationalFunction(z)
    p = {k: _exact(v) for k, v in params.items()}
    if kind == "R11":
        return ComplexPoly([p["a"]]), RationalFunction(ComplexPoly([p["b"], 0, 1]))
    if kind == "R12":
        zb = ComplexPoly([p["b"], 1])
        return p["a"] * zb * zb, RationalFunction(ComplexPoly([p["d"], 0, p["c"]]), zb)
    if kind == "R3":
        return ComplexPoly([p["b"], 0, p["a"]]), RationalFunction(ComplexPoly([p["c"], 1]))
    raise InvalidFamilyError(f"{kind} has no exact constructor")


def _float_pair(kind: str, params) -> NumericPair:
    p = {k: complex(v) for k, v in params.items()}
    if kind == "R11":
        return NumericPair([p["b"], 0, 1], [1], [p["a"]])
    if kind == "R12":
        return NumericPair([p["d"], 0, p["c"]], [p["b"], 1], [p["a"]])
    if kind == "R3":
        return NumericPair([p["c"], 1], [1], [p["b"], 0, p["a"]])
    if kind == "Enneper":
        return NumericPair([0, 1], [1], [1])
    raise InvalidFamilyError(f"{kind} has no float constructor")


def make_family(desc: FamilyDescriptor) -> WeierstrassPair | NumericPair:
    """Generating pair of a family member: exact when all parameters are Gaussian
    rationals, a :class:`NumericPair` otherwise."""
    if desc.kind == "XuWangDeg5":
        return xw_degree5(*(float(desc.params[k]) for k in ("a1", "a2", "e1", "e2")))[0]
    if desc.kind == "XuWangOmega":
        return xu_wang_pair(int(desc.params["n"]), float(desc.params["omega"]))
    if desc.exact:
        f, g = _exact_pair_polys(desc.kind, desc.params)
        return validate_pair(f, g)
    return _float_pair(desc.kind, desc.params)


# ---------------------------------------------------------------------------
# Xu-Wang families


def xu_wang_basis(n: int) -> tuple[BivariatePoly, BivariatePoly]:
    """The harmonic pair (P_n, Q_n) written as alternating binomial sums."""
    if n < 1:
        raise WforgeError(f"xu_wang_basis needs n >= 1, got {n}")
    P = {}
    for k in range(0, math.ceil((n - 1) / 2) + 1):
        if 2 * k <= n:
            P[(n - 2 * k, 2 * k)] = (-1) ** k * math.comb(n, 2 * k)
    Q = {}
    for k in range(0, (n - 1) // 2 + 1):
        Q[(n - 2 * k - 1, 2 * k + 1)] = (-1) ** k * math.comb(n, 2 * k + 1)
    return BivariatePoly(P), BivariatePoly(Q)


def xu_wang_surface(n: int, omega: float) -> PolySurface:
    """(-P_n + w P_{n-2}, Q_n + w Q_{n-2}, 2 sqrt(n(n-2)w)/(n-1) P_{n-1})."""
    if n < 3:
        raise WforgeError(f"xu_wang_surface needs n >= 3, got {n}")
    if omega < 0:
        raise WforgeError(f"xu_wang_surface needs omega >= 0, got {omega}")
    Pn, Qn = xu_wang_basis(n)
    Pm, Qm = xu_wang_basis(n - 2)
    P1, _ = xu_wang_basis(n - 1)
    size = n + 1
    c3 = 2.0 * math.sqrt(n * (n - 2) * omega) / (n - 1)
    coeffs = np.stack([
        -Pn.to_array(size) + omega * Pm.to_array(size),
        Qn.to_array(size) + omega * Qm.to_array(size),
        c3 * P1.to_array(size),
    ])
    return PolySurface(coeffs)


def xu_wang_pair(n: int, omega: float) -> NumericPair:
    """Weierstrass data of :func:`xu_wang_surface`: f = -2n z^(n-1), g = kappa / z."""
    if n < 3:
        raise WforgeError(f"xu_wang_pair needs n >= 3, got {n}")
    kappa = -math.sqrt(n * (n - 2) * omega) / n
    R = np.zeros(n - 2, dtype=complex)
    R[-1] = -2 * n
    return NumericPair([kappa], [0, 1], R)


def xw_degree5(a1: float, a2: float, e1: float, e2: float) -> tuple[NumericPair, FamilyDescriptor]:
    """Generating pair of the degree-5 Xu-Wang surface and its r12 descriptor (b = d = 0)."""
    if not a2 * e1 - a1 * e2 < 0:
        raise NotMinimalError(f"a2*e1 - a1*e2 = {a2 * e1 - a1 * e2:g} must be negative")
    s = math.sqrt((a1 * a1 + a2 * a2) * (e1 * e1 + e2 * e2))
    dot = a1 * e1 + a2 * e2
    k = complex(e1, -e2)
    lead = 6 * k
    slope = math.sqrt(5 / 6) * complex(math.sqrt(max(s - dot, 0.0)), math.sqrt(max(s + dot, 0.0))) / k
    pair = NumericPair([0, slope], [1], [0, 0, lead])
    desc = FamilyDescriptor("R12", {"a": lead, "b": 0.0, "c": slope, "d": 0.0})
    return pair, desc


# ---------------------------------------------------------------------------
# transforms


def affine_normalize(f: ComplexPoly, g: RationalFunction, alpha, beta) -> tuple[ComplexPoly, RationalFunction]:
    """(alpha f(alpha z + beta), g(alpha z + beta)): same surface up to translation."""
    alpha, beta = _exact(alpha), _exact(beta)
    if alpha.is_zero():
        raise InvalidTransformError("affine reparametrization needs alpha != 0")
    if not isinstance(g, RationalFunction):
        g = RationalFunction(g)
    inner = ComplexPoly([beta, alpha])
    return f.compose(inner) * alpha, g.compose(inner)


def quadratic_normalizer(g: RationalFunction | ComplexPoly) -> tuple[ExactComplex, ExactComplex]:
    """(alpha, beta) making a quadratic g monic with no linear term.

    Solves alpha^2 A = 1 (principal root) and beta = -B / (2A) for
    g = A z^2 + B z + C.  Raises when 1/A has no Gaussian-rational square root.
    """
    num = g.numerator if isinstance(g, RationalFunction) else g
    if isinstance(g, RationalFunction) and not g.is_polynomial():
        raise InvalidTransformError("quadratic normalizer needs a polynomial g")
    if num.degree != 2:
        raise InvalidTransformError(f"g must be quadratic, got degree {num.degree}")
    A, B = num[2], num[1]
    alpha = (ExactComplex(1) / A).sqrt()
    if alpha is None:
        raise InvalidTransformError(f"1/A = {ExactComplex(1) / A} has no Gaussian-rational square root")
    return alpha, -B / (2 * A)


def symmetry_transform(pair: WeierstrassPair) -> WeierstrassPair:
    """(f g^2, 1/g): the mirror image of the surface in the plane Oyz."""
    if pair.g.is_zero():
        raise InvalidTransformError("g is identically zero")
    f2 = pair.P * pair.P * pair.R
    return validate_pair(f2, pair.g.reciprocal())


def moebius_transform(g: RationalFunction, alpha, phi: float) -> RationalFunction | FloatRational:
    """e^{i phi} (alpha + g) / (1 - conj(alpha) g); exact when phi == 0."""
    alpha = _exact(alpha)
    P, Q = g.numerator, g.denominator
    num = Q * alpha + P
    den = Q - P * alpha.conjugate()
    if den.is_zero():
        raise InvalidTransformError("1 - conj(alpha) g vanishes identically")
    if phi == 0:
        return RationalFunction(num, den)
    return FloatRational(cmath.exp(1j * phi) * num.to_numpy(), den.to_numpy())


def inversion_transform(g: RationalFunction, phi: float) -> RationalFunction | FloatRational:
    """e^{i phi} / g; exact when phi == 0."""
    if g.is_zero():
        raise InvalidTransformError("cannot invert g = 0")
    if phi == 0:
        return g.reciprocal()
    return FloatRational(cmath.exp(1j * phi) * g.denominator.to_numpy(), g.numerator.to_numpy())


# ---------------------------------------------------------------------------
# coincidence between r12 and r3


@dataclass(frozen=True)
class Coincidence:
    coincident: bool
    value: ExactComplex  # b^2 c + d
    reduced: WeierstrassPair | None = None
    r3: FamilyDescriptor | None = None


def coincidence_r12_r3(b, c, d, a=1) -> Coincidence:
    """Whether r12[a, b, c, d] is also an r3 surface, i.e. b^2 c + d == 0.

    When it is, g = c (z - b) and the substitution z -> z/c - b brings the pair
    to the r3 normal form r3[a / c^3, 0, -2 b c].
    """
    a, b, c, d = (_exact(x) for x in (a, b, c, d))
    if c.is_zero():
        raise InvalidFamilyError("coincidence test needs c != 0")
    value = b * b * c + d
    if not value.is_zero():
        return Coincidence(False, value)
    f, g = _exact_pair_polys("R12", {"a": a, "b": b, "c": c, "d": d})
    reduced = validate_pair(f, g)
    r3 = FamilyDescriptor("R3", {"a": a / (c * c * c), "b": ExactComplex(0), "c": -2 * b * c})
    return Coincidence(True, value, reduced, r3)


def r12_r3_relations(r12: dict, r3: dict, tol: float = 1e-12) -> bool:
    """Whether some rotation angle phi satisfies the coincidence relations

        a = A c^3 e^{4 i phi},  C + 2 b c e^{i phi} = 0,  B = 0,  b^2 c + d = 0

    between r12[a, b, c, d] and r3[A, B, C] (alpha = 0 branch).
    """
    a, b, c, d = (complex(r12[k]) for k in "abcd")
    A, B, C = (complex(r3[k]) for k in "abc")

    def close(x, y):
        return abs(x - y) <= tol * max(1.0, abs(x), abs(y))

    if not close(b * b * c + d, 0) or not close(B, 0):
        return False
    if abs(b * c) > tol:
        rot = -C / (2 * b * c)
        if not close(abs(rot), 1.0):
            return False
        return close(a, A * c**3 * rot**4)
    if not close(C, 0):
        return False
    ratio = a / (A * c**3)
    return close(abs(ratio), 1.0)


# ---------------------------------------------------------------------------
# classification of explicit pairs


def classify(pair: WeierstrassPair) -> list[FamilyDescriptor]:
    """Normal forms the pair literally matches (no reparametrization attempted)."""
    out: list[FamilyDescriptor] = []
    f, P, Q = pair.f, pair.P, pair.Q
    z = ComplexPoly.z()
    if Q.is_constant():
        if f.is_constant() and P == z:
            out.append(FamilyDescriptor("Enneper", {}))
        if f.is_constant() and P.degree == 2 and P[2] == 1 and P[1].is_zero():
            out.append(FamilyDescriptor("R11", {"a": f[0], "b": P[0]}))
        if f.degree == 2 and f[1].is_zero() and P.degree == 1 and P[1] == 1:
            out.append(FamilyDescriptor("R3", {"a": f[2], "b": f[0], "c": P[0]}))
        # r12 with b^2 c + d = 0: g = c (z - b), f = a (z + b)^2
        if f.degree == 2 and P.degree == 1:
            a = f[2]
            b = f[1] / (2 * a)
            if f[0] == a * b * b and P(b).is_zero():
                c = P[1]
                out.append(FamilyDescriptor("R12", {"a": a, "b": b, "c": c, "d": -b * b * c}))
    elif Q.degree == 1:
        b = Q[0]
        a_poly, rem = divmod(f, Q * Q)
        if rem.is_zero() and a_poly.is_constant() and P.degree == 2 and P[1].is_zero():
            out.append(FamilyDescriptor("R12", {"a": a_poly[0], "b": b, "c": P[2], "d": P[0]}))
    return out


CATALOG = {
    "R11": "f = a, g = z^2 + b  (a != 0)",
    "R12": "f = a (z + b)^2, g = (c z^2 + d)/(z + b)  (a, c != 0)",
    "R3": "f = a z^2 + b, g = z + c  (a != 0)",
    "Enneper": "f = 1, g = z  (degree 3)",
    "XuWangDeg5": "f = 6 (e1 - i e2) z^2, g = kappa z  (a2 e1 - a1 e2 < 0)",
    "XuWangOmega": "(-P_n + w P_{n-2}, Q_n + w Q_{n-2}, 2 sqrt(n(n-2)w)/(n-1) P_{n-1})  (n >= 3, w >= 0)",
}


__all__ = [
    "CATALOG",
    "Coincidence",
    "FamilyDescriptor",
    "KINDS",
    "affine_normalize",
    "classify",
    "coincidence_r12_r3",
    "inversion_transform",
    "make_family",
    "moebius_transform",
    "parse_param",
    "quadratic_normalizer",
    "r12_r3_relations",
    "symmetry_transform",
    "xu_wang_basis",
    "xu_wang_pair",
    "xu_wang_surface",
    "xw_degree5",
]
