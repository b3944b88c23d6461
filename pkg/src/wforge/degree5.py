"""Coefficient vectors of harmonic surfaces of degree <= 5 and the 18-equation
minimality system they satisfy.

A harmonic polynomial surface of degree at most five is written as

    r(u, v) = a (u^5 - 10u^3v^2 + 5uv^4) + b (v^5 - 10u^2v^3 + 5u^4v)
            + c (u^4 - 6u^2v^2 + v^4) + d uv(u^2 - v^2) + e u(u^2 - 3v^2)
            + f v(v^2 - 3u^2) + g (u^2 - v^2) + h uv + i u + j v + k

with 3-vectors a..k.  Each basis polynomial is identified by one monomial that
no other basis element contains (u^5, v^5, u^4, u^3v, u^3, v^3, u^2, uv, u, v, 1),
so extraction is a direct read-off followed by an exact reconstruction check.

Works with exact ``Fraction`` coefficients (from :class:`SurfacePolynomial`)
and with floats (from :class:`PolySurface`).
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import BivariatePoly
from .errors import NotRepresentableError
from .weierstrass import PolySurface, SurfacePolynomial

NAMES = ("a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k")

# basis polynomial -> {(i, j): coefficient of u^i v^j}
BASIS: dict[str, dict[tuple[int, int], int]] = {
    "a": {(5, 0): 1, (3, 2): -10, (1, 4): 5},
    "b": {(0, 5): 1, (2, 3): -10, (4, 1): 5},
    "c": {(4, 0): 1, (2, 2): -6, (0, 4): 1},
    "d": {(3, 1): 1, (1, 3): -1},
    "e": {(3, 0): 1, (1, 2): -3},
    "f": {(0, 3): 1, (2, 1): -3},
    "g": {(2, 0): 1, (0, 2): -1},
    "h": {(1, 1): 1},
    "i": {(1, 0): 1},
    "j": {(0, 1): 1},
    "k": {(0, 0): 1},
}

PIVOT = {
    "a": (5, 0), "b": (0, 5), "c": (4, 0), "d": (3, 1), "e": (3, 0), "f": (0, 3),
    "g": (2, 0), "h": (1, 1), "i": (1, 0), "j": (0, 1), "k": (0, 0),
}

EQUATIONS = (
    "a.a - b.b",
    "a.b",
    "4a.c - b.d",
    "a.d + 4b.c",
    "16c.c - d.d + 30a.e + 30b.f",
    "4d.c + 15b.e - 15a.f",
    "9e.e - 9f.f + 16c.g - 2d.h + 10a.i - 10b.j",
    "9e.f - 4c.h - 2d.g - 5b.i - 5a.j",
    "4g.g - h.h + 6e.i + 6f.j",
    "2g.h - 3f.i + 3e.j",
    "5a.h + 10b.g - 12c.f + 3d.e",
    "5b.h - 10a.g - 3d.f - 12c.e",
    "6e.g + 3f.h + 4c.i - d.j",
    "6f.g - 3e.h - d.i - 4c.j",
    "h.i + 2g.j",
    "2g.i - h.j",
    "i.i - j.j",
    "i.j",
)


@dataclass(frozen=True)
class CoeffVectors5:
    a: tuple
    b: tuple
    c: tuple
    d: tuple
    e: tuple
    f: tuple
    g: tuple
    h: tuple
    i: tuple
    j: tuple
    k: tuple

    @classmethod
    def zero(cls) -> "CoeffVectors5":
        z = (Fraction(0),) * 3
        return cls(*([z] * 11))

    @classmethod
    def from_mapping(cls, m) -> "CoeffVectors5":
        out = {}
        for name in NAMES:
            vec = m.get(name, (0, 0, 0))
            if len(vec) != 3:
                raise ValueError(f"vector {name!r} must have three components")
            out[name] = tuple(_num(x) for x in vec)
        return cls(**out)

    def as_dict(self) -> dict[str, tuple]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def replace(self, **changes) -> "CoeffVectors5":
        d = self.as_dict()
        d.update({k: tuple(v) for k, v in changes.items()})
        return CoeffVectors5(**d)

    def is_exact(self) -> bool:
        return all(isinstance(x, (int, Fraction)) for v in self.as_dict().values() for x in v)

    def reconstruct(self) -> SurfacePolynomial:
        """Plug the vectors back into the basis (exact vectors only)."""
        comps = []
        for axis in range(3):
            t: dict[tuple[int, int], Fraction] = {}
            for name in NAMES:
                coef = getattr(self, name)[axis]
                for key, b in BASIS[name].items():
                    t[key] = t.get(key, 0) + b * coef
            comps.append(BivariatePoly(t))
        return SurfacePolynomial.from_components(comps)

    def reconstruct_array(self) -> np.ndarray:
        out = np.zeros((3, 6, 6))
        for axis in range(3):
            for name in NAMES:
                coef = float(getattr(self, name)[axis])
                for (i, j), b in BASIS[name].items():
                    out[axis, i, j] += b * coef
        return out


def _num(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return float(x)


def extract_coeffs(surface: SurfacePolynomial | PolySurface, rtol: float = 1e-9) -> CoeffVectors5:
    """Coefficient vectors of a harmonic surface of degree at most five.

    Exact surfaces must reconstruct exactly; float surfaces must reconstruct
    within ``rtol`` relative to their largest coefficient.
    """
    if isinstance(surface, PolySurface):
        return _extract_float(surface, rtol)
    if surface.degree > 5:
        raise NotRepresentableError(f"surface degree {surface.degree} exceeds 5")
    if not surface.is_harmonic():
        raise NotRepresentableError("surface is not harmonic")
    vecs = {
        name: tuple(comp.coefficient(*PIVOT[name]) for comp in surface.components)
        for name in NAMES
    }
    cv = CoeffVectors5(**vecs)
    rebuilt = cv.reconstruct()
    if rebuilt.components != surface.components:
        raise NotRepresentableError("surface is not spanned by the degree-5 harmonic basis")
    return cv


def _extract_float(surface: PolySurface, rtol: float) -> CoeffVectors5:
    c = surface.coeffs
    n = c.shape[1]
    scale = max(np.abs(c).max(), 1.0)
    above = (np.arange(n)[:, None] + np.arange(c.shape[2])[None, :]) > 5
    if above.any() and np.abs(c[:, above]).max() > rtol * scale:
        raise NotRepresentableError("surface has terms above degree 5")
    padded = np.zeros((3, 6, 6))
    m = min(n, 6)
    padded[:, :m, :m] = c[:, :m, :m]
    vecs = {
        name: tuple(float(padded[axis][PIVOT[name]]) for axis in range(3)) for name in NAMES
    }
    cv = CoeffVectors5(**vecs)
    diff = np.abs(cv.reconstruct_array() - padded).max()
    if diff > rtol * scale:
        raise NotRepresentableError(
            f"float surface is not harmonic of degree <= 5 (reconstruction error {diff:.3g})"
        )
    return cv


def _dot(x: Sequence, y: Sequence):
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]


@dataclass(frozen=True)
class SystemResidual:
    residuals: tuple

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(r) <= tol for r in self.residuals)

    def failing(self, tol: float = 0.0) -> list[int]:
        """1-based indices of equations whose residual exceeds ``tol``."""
        return [k + 1 for k, r in enumerate(self.residuals) if abs(r) > tol]

    def max_abs(self) -> float:
        return float(max(abs(r) for r in self.residuals))

    def __len__(self):
        return len(self.residuals)

    def __iter__(self):
        return iter(self.residuals)


def system_residual(cv: CoeffVectors5) -> SystemResidual:
    a, b, c, d, e, f, g, h, i, j = (getattr(cv, n) for n in NAMES[:10])
    dot = _dot
    res = (
        dot(a, a) - dot(b, b),
        dot(a, b),
        4 * dot(a, c) - dot(b, d),
        dot(a, d) + 4 * dot(b, c),
        16 * dot(c, c) - dot(d, d) + 30 * dot(a, e) + 30 * dot(b, f),
        4 * dot(d, c) + 15 * dot(b, e) - 15 * dot(a, f),
        9 * dot(e, e) - 9 * dot(f, f) + 16 * dot(c, g) - 2 * dot(d, h) + 10 * dot(a, i) - 10 * dot(b, j),
        9 * dot(e, f) - 4 * dot(c, h) - 2 * dot(d, g) - 5 * dot(b, i) - 5 * dot(a, j),
        4 * dot(g, g) - dot(h, h) + 6 * dot(e, i) + 6 * dot(f, j),
        2 * dot(g, h) - 3 * dot(f, i) + 3 * dot(e, j),
        5 * dot(a, h) + 10 * dot(b, g) - 12 * dot(c, f) + 3 * dot(d, e),
        5 * dot(b, h) - 10 * dot(a, g) - 3 * dot(d, f) - 12 * dot(c, e),
        6 * dot(e, g) + 3 * dot(f, h) + 4 * dot(c, i) - dot(d, j),
        6 * dot(f, g) - 3 * dot(e, h) - dot(d, i) - 4 * dot(c, j),
        dot(h, i) + 2 * dot(g, j),
        2 * dot(g, i) - dot(h, j),
        dot(i, i) - dot(j, j),
        dot(i, j),
    )
    return SystemResidual(res)


def residual_scale(cv: CoeffVectors5) -> float:
    """Magnitude for relative float comparisons: square of the largest coefficient."""
    m = max(abs(float(x)) for v in cv.as_dict().values() for x in v)
    return max(m * m, 1e-300)


def residual_report(res: SystemResidual) -> list[dict]:
    """JSON fragment: one entry per equation, exact string plus float."""
    out = []
    for idx, (eq, r) in enumerate(zip(EQUATIONS, res.residuals), start=1):
        out.append({"index": idx, "equation": f"{eq} = 0", "exact": str(r) if isinstance(r, (int, Fraction)) else None, "value": float(r)})
    return out
