"""Floating-point differential geometry of the constructed surfaces.

Surfaces are anything with ``evaluate(u, v)`` returning positions of shape
(3, ...) and, for the exact-derivative mode, ``derivatives(u, v)`` returning
the partials ``u, v, uu, uv, vv``; :class:`~wforge.weierstrass.PolySurface`
provides both and accepts numpy arrays.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .algebra import FloatRational, RationalFunction
from .errors import BranchPointError, CriticalPointError, SingularPointError
from .weierstrass import NumericPair, SurfacePolynomial, WeierstrassPair

SINGULAR_TOL = 1e-12
FD_STEP = 1e-5


def as_evaluator(surface):
    if isinstance(surface, SurfacePolynomial):
        return surface.to_numeric()
    if isinstance(surface, WeierstrassPair):
        return surface.to_numeric().surface()
    if isinstance(surface, NumericPair):
        return surface.surface()
    return surface


def as_numeric_pair(pair) -> NumericPair:
    return pair.to_numeric() if isinstance(pair, WeierstrassPair) else pair


def _dot(a, b):
    return np.sum(a * b, axis=0)


def fundamental_forms(xu, xv, xuu, xuv, xvv) -> dict[str, np.ndarray]:
    """E, F, G, L, M, N, H, K, nu and det = EG - F^2 from partial derivatives.

    Inputs have shape (3, ...); the unit normal is x_u x x_v / |x_u x x_v|.
    """
    E, F, G = _dot(xu, xu), _dot(xu, xv), _dot(xv, xv)
    det = E * G - F * F
    n = np.cross(xu, xv, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        U = n / np.sqrt(_dot(n, n))
        L, M, N = _dot(U, xuu), _dot(U, xuv), _dot(U, xvv)
        K = (L * N - M * M) / det
        H = (E * N - 2 * F * M + G * L) / (2 * det)
        nu = np.sqrt(np.maximum(-K, 0.0))
    return {"E": E, "F": F, "G": G, "L": L, "M": M, "N": N, "H": H, "K": K, "nu": nu, "det": det}


@dataclass
class FormsSample:
    u: float
    v: float
    E: float
    F: float
    G: float
    L: float
    M: float
    N: float
    H: float
    K: float
    nu: float

    def first_form(self) -> tuple[float, float, float]:
        return self.E, self.F, self.G

    def second_form(self) -> tuple[float, float, float]:
        return self.L, self.M, self.N

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def fd_derivatives(surface, u, v, h: float | None = None) -> dict[str, np.ndarray]:
    """Central differences of positions only.

    First derivatives use step ``h`` (default 1e-5 scaled by max(1, |u|, |v|));
    second derivatives use 10 h to keep round-off below truncation error.
    """
    scale = np.maximum(1.0, np.maximum(np.abs(u), np.abs(v)))
    h1 = (FD_STEP if h is None else h) * scale
    h2 = 10 * h1
    ev = surface.evaluate
    x0 = ev(u, v)
    return {
        "u": (ev(u + h1, v) - ev(u - h1, v)) / (2 * h1),
        "v": (ev(u, v + h1) - ev(u, v - h1)) / (2 * h1),
        "uu": (ev(u + h2, v) - 2 * x0 + ev(u - h2, v)) / (h2 * h2),
        "vv": (ev(u, v + h2) - 2 * x0 + ev(u, v - h2)) / (h2 * h2),
        "uv": (ev(u + h2, v + h2) - ev(u + h2, v - h2) - ev(u - h2, v + h2) + ev(u - h2, v - h2))
        / (4 * h2 * h2),
    }


def _derivatives(surface, u, v, mode: str):
    if mode in ("exact", "exact-derivatives"):
        return surface.derivatives(u, v)
    if mode in ("fd", "finite-difference"):
        return fd_derivatives(surface, u, v)
    raise ValueError(f"unknown mode {mode!r}")


def forms_at(surface, u: float, v: float, mode: str = "exact", singular_tol: float = SINGULAR_TOL) -> FormsSample:
    """Fundamental forms and curvatures at one parameter point."""
    surface = as_evaluator(surface)
    d = _derivatives(surface, float(u), float(v), mode)
    ff = fundamental_forms(d["u"], d["v"], d["uu"], d["uv"], d["vv"])
    if not ff["det"] > singular_tol:
        raise SingularPointError(u, v, f"EG - F^2 = {float(ff['det']):.3g}")
    return FormsSample(float(u), float(v), *(float(ff[k]) for k in ("E", "F", "G", "L", "M", "N", "H", "K", "nu")))


def weierstrass_metric(pair, z) -> np.ndarray:
    """Closed-form E = G = |f|^2 (1 + |g|^2)^2 / 4 of x = Re Psi at z = u + iv."""
    npair = as_numeric_pair(pair)
    f = npoly.polyval(z, npair.f)
    g = npair.g(z)
    return np.abs(f) ** 2 * (1 + np.abs(g) ** 2) ** 2 / 4


def branch_points(pair, tol: float = 1e-8) -> np.ndarray:
    """Distinct zeros of R in f = Q^2 R, where the induced metric
    |R|^2 (|P|^2 + |Q|^2)^2 / 4 vanishes.  Zeros of Q are poles of g, not
    singularities of the surface."""
    roots = _roots(as_numeric_pair(pair).R)
    out: list[complex] = []
    for z in roots:
        if all(abs(z - w) > tol * max(1.0, abs(w)) for w in out):
            out.append(complex(z))
    return np.array(out, dtype=complex)


def _roots(c) -> np.ndarray:
    c = np.trim_zeros(np.asarray(c, dtype=complex), "b")
    if len(c) <= 1:
        return np.array([], dtype=complex)
    return npoly.polyroots(c)


# ---------------------------------------------------------------------------
# minimality scan


@dataclass
class ScanReport:
    max_abs_H: float
    max_rel_H: float
    max_K: float
    max_rel_K: float
    points: int
    skipped: int
    tol_H: float
    tol_K: float
    worst: tuple[float, float] = (float("nan"), float("nan"))

    @property
    def passed(self) -> bool:
        return self.points > 0 and self.max_rel_H < self.tol_H and self.max_rel_K <= self.tol_K

    def as_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        d["worst"] = list(self.worst)
        return d


def minimality_scan(
    surface,
    region=(-1.0, 1.0, -1.0, 1.0),
    grid: int = 41,
    tol_H: float = 1e-8,
    tol_K: float = 1e-10,
    exclude=(),
    exclude_radius: float = 1e-3,
    singular_tol: float = SINGULAR_TOL,
) -> ScanReport:
    """Mean and Gauss curvature over a grid, measured against the local curvature scale.

    |H| is divided by max(sqrt(|K|), 1/extent) where extent is the diameter of
    the sampled patch; positive K is divided by max(|K|, 1).  Points within
    ``exclude_radius`` of any complex point in ``exclude`` or with
    EG - F^2 <= ``singular_tol`` are skipped and counted.
    """
    ev = as_evaluator(surface)
    u0, u1, v0, v1 = region
    U, V = np.meshgrid(np.linspace(u0, u1, grid), np.linspace(v0, v1, grid), indexing="ij")
    d = ev.derivatives(U, V)
    ff = fundamental_forms(d["u"], d["v"], d["uu"], d["uv"], d["vv"])
    ok = ff["det"] > singular_tol
    for zc in np.atleast_1d(np.asarray(exclude, dtype=complex)):
        ok &= np.abs(U + 1j * V - zc) > exclude_radius
    pos = ev.evaluate(U, V)
    if ok.any():
        span = pos[:, ok]
        extent = float(np.linalg.norm(span.max(axis=1) - span.min(axis=1)))
    else:
        extent = 1.0
    floor = 1.0 / extent if extent > 0 else 1.0
    absK = np.abs(ff["K"])
    h_rel = np.abs(ff["H"]) / np.maximum(np.sqrt(absK), floor)
    k_pos = np.maximum(ff["K"], 0.0)
    k_rel = k_pos / np.maximum(absK, 1.0)
    if ok.any():
        idx = np.unravel_index(np.argmax(np.where(ok, h_rel, -1.0)), h_rel.shape)
        worst = (float(U[idx]), float(V[idx]))
        report = ScanReport(
            max_abs_H=float(np.abs(ff["H"][ok]).max()),
            max_rel_H=float(h_rel[ok].max()),
            max_K=float(ff["K"][ok].max()),
            max_rel_K=float(k_rel[ok].max()),
            points=int(ok.sum()),
            skipped=int((~ok).sum()),
            tol_H=tol_H,
            tol_K=tol_K,
            worst=worst,
        )
    else:
        report = ScanReport(np.nan, np.nan, np.nan, np.nan, 0, int(ok.size), tol_H, tol_K)
    return report


# ---------------------------------------------------------------------------
# canonical principal parameters


@dataclass
class CanonicalChart:
    """z(w) on a square w-grid centred at w = 0 (z(0) = z0), with the forms of
    w -> Re Psi(z(w)) and the transformed generating function g(z(w))."""

    w: np.ndarray
    z: np.ndarray
    dz: np.ndarray
    spacing: float
    branch: int
    forms: dict[str, np.ndarray]
    g_tilde: np.ndarray
    ode_rhs: np.ndarray  # -1/(f g') at z(w)
    positions: np.ndarray = field(repr=False, default=None)

    @property
    def nu(self) -> np.ndarray:
        return self.forms["nu"]

    def form_residuals(self) -> dict[str, float]:
        f = self.forms
        inv_nu = 1.0 / f["nu"]
        return {
            "E-1/nu": float(np.abs(f["E"] - inv_nu).max()),
            "G-1/nu": float(np.abs(f["G"] - inv_nu).max()),
            "F": float(np.abs(f["F"]).max()),
            "L-1": float(np.abs(f["L"] - 1).max()),
            "M": float(np.abs(f["M"]).max()),
            "N+1": float(np.abs(f["N"] + 1).max()),
        }

    def path_residual(self) -> float:
        """max |(dz/dw)^2 + 1/(f g')| / |1/(f g')| with dz/dw from 4th-order
        differences of the integrated grid values along the real w direction."""
        z, h = self.z, self.spacing
        dz = (-z[4:, 2:-2] + 8 * z[3:-1, 2:-2] - 8 * z[1:-3, 2:-2] + z[:-4, 2:-2]) / (12 * h)
        target = self.ode_rhs[2:-2, 2:-2]
        return float((np.abs(dz * dz - target) / np.abs(target)).max())

    def ganchev_residual(self) -> np.ndarray:
        """Delta ln(nu) + 2 nu on interior points (fourth-order central stencil)."""
        ln = np.log(self.nu)
        h = self.spacing

        def d2(a, axis):
            s = lambda k: np.roll(a, -k, axis=axis)
            return (-s(2) + 16 * s(1) - 30 * a + 16 * s(-1) - s(-2)) / (12 * h * h)

        lap = d2(ln, 0) + d2(ln, 1)
        return (lap + 2 * self.nu)[2:-2, 2:-2]


def _principal_sqrt_near(val, ref):
    r = np.sqrt(val)
    return r if abs(r - ref) <= abs(r + ref) else -r


def canonical_chart(
    pair,
    half_width: float = 0.25,
    spacing: float = 1e-2,
    z0: complex = 0j,
    branch: int = 1,
    step: float = 1e-3,
    radius: float = 1e-3,
) -> CanonicalChart:
    """Integrate (dz/dw)^2 = -1/(f(z) g'(z)) on the square |Re w|, |Im w| <= half_width.

    Paths run from w = 0 along the real axis, then parallel to the imaginary
    axis, with classical RK4 of fixed ``step``.  The square root is the
    principal value times ``branch`` at z0 and is continued by choosing, at
    every stage, the root nearest the previous derivative.
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    npair = as_numeric_pair(pair)
    D = npair.f_gprime()
    dD = npoly.polyder(D)
    zeros = _roots(D)
    z0 = complex(z0)
    D0 = npoly.polyval(z0, D)
    if D0 == 0:
        raise CriticalPointError(f"f(z0) g'(z0) = 0 at z0 = {z0}")

    def rhs(z):
        return -1.0 / npoly.polyval(z, D)

    def guard(z):
        if zeros.size:
            k = int(np.argmin(np.abs(zeros - z)))
            if abs(zeros[k] - z) < radius:
                raise BranchPointError(z, complex(zeros[k]), radius)

    guard(z0)
    m = int(round(half_width / spacing))
    sub = max(1, int(round(spacing / step)))
    hs = spacing / sub

    def march(z, dzdw, direction, count):
        """Return lists of (z, dz/dw) at every grid node along ``count`` nodes."""
        zs, ds = [], []
        for _ in range(count):
            for _ in range(sub):
                ref = dzdw

                def deriv(zz):
                    return _principal_sqrt_near(rhs(zz), ref)

                k1 = deriv(z)
                k2 = deriv(z + 0.5 * hs * direction * k1)
                k3 = deriv(z + 0.5 * hs * direction * k2)
                k4 = deriv(z + hs * direction * k3)
                z = z + hs * direction * (k1 + 2 * k2 + 2 * k3 + k4) / 6
                guard(z)
                dzdw = deriv(z)
            zs.append(z)
            ds.append(dzdw)
        return zs, ds

    n = 2 * m + 1
    Z = np.empty((n, n), dtype=complex)  # Z[j, k] at w = (j - m) h + i (k - m) h
    DZ = np.empty((n, n), dtype=complex)
    d0 = branch * np.sqrt(rhs(z0))
    axis_z = {0: (z0, d0)}
    for sign in (1, -1):
        zs, ds = march(z0, d0, sign, m)
        for idx, (zz, dd) in enumerate(zip(zs, ds), start=1):
            axis_z[sign * idx] = (zz, dd)
    for j in range(-m, m + 1):
        zc, dc = axis_z[j]
        Z[j + m, m], DZ[j + m, m] = zc, dc
        for sign in (1, -1):
            zs, ds = march(zc, dc, sign * 1j, m)
            for idx, (zz, dd) in enumerate(zip(zs, ds), start=1):
                Z[j + m, m + sign * idx] = zz
                DZ[j + m, m + sign * idx] = dd

    offs = (np.arange(n) - m) * spacing
    W = offs[:, None] + 1j * offs[None, :]

    phi = npair.phi()
    dphi = [npoly.polyder(c) for c in phi]
    Pz = np.stack([npoly.polyval(Z, c) for c in phi])
    dPz = np.stack([npoly.polyval(Z, c) for c in dphi])
    Dz = npoly.polyval(Z, D)
    zpp = npoly.polyval(Z, dD) / (2 * Dz * Dz)
    A = Pz * DZ
    B = dPz * DZ * DZ + Pz * zpp
    forms = fundamental_forms(A.real, -A.imag, B.real, -B.imag, -B.real)
    psi = npair.psi()
    positions = np.stack([npoly.polyval(Z, c).real for c in psi])
    with np.errstate(divide="ignore", invalid="ignore"):
        g_tilde = npair.g(Z)  # a pole of g is a regular point of the chart
    return CanonicalChart(
        w=W,
        z=Z,
        dz=DZ,
        spacing=spacing,
        branch=branch,
        forms=forms,
        g_tilde=g_tilde,
        ode_rhs=-1.0 / Dz,
        positions=positions,
    )


def canonical_energy(g, z) -> float:
    """(1 + |g|^2)^2 / (4 |g'|^2): the metric factor E = 1/nu of the surface
    that g generates in canonical principal parameters (f = -1/g')."""
    if isinstance(g, RationalFunction):
        g = g.to_float()
    if isinstance(g, FloatRational):
        val, der = g.value_and_derivative(z)
    else:
        gf, dgf = g
        val, der = gf(z), dgf(z)
    if der == 0:
        raise CriticalPointError(f"g'(z) = 0 at z = {z}")
    return float((1 + abs(val) ** 2) ** 2 / (4 * abs(der) ** 2))
