"""Verification and comparison pipelines behind the CLI.

Both produce plain dicts ready for JSON; key order is fixed by construction.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import degree5
from .errors import BranchPointError, CriticalPointError, NotRepresentableError, WforgeError
from .families import (
    FamilyDescriptor,
    classify,
    coincidence_r12_r3,
    make_family,
    r12_r3_relations,
    symmetry_transform,
    xu_wang_surface,
    xw_degree5,
)
from .geometry import branch_points, canonical_chart, canonical_energy, minimality_scan
from .weierstrass import (
    NumericPair,
    PolySurface,
    SurfacePolynomial,
    WeierstrassPair,
    check_isotropy,
    integrand,
    surface_from_pair,
)

SCHEMA_VERSION = "wforge.verify/1"
COMPARE_SCHEMA_VERSION = "wforge.compare/1"

TOLERANCES: dict[str, float] = {
    "H_rel": 1e-8,
    "K_pos": 1e-10,
    "float_identity": 1e-12,
    "eq22_float": 1e-8,
    "chart_first_form": 1e-6,
    "chart_second_form": 1e-5,
    "chart_path": 1e-6,
    "ganchev": 1e-4,
}


def tolerances(overrides: dict[str, float] | None = None, env=None) -> dict[str, float]:
    """Defaults scaled by $WFORGE_TOL_SCALE, then explicit overrides."""
    env = os.environ if env is None else env
    scale = float(env.get("WFORGE_TOL_SCALE", "1") or 1)
    if not scale > 0:
        raise WforgeError(f"WFORGE_TOL_SCALE must be positive, got {scale}")
    tol = {k: v * scale for k, v in TOLERANCES.items()}
    for k, v in (overrides or {}).items():
        if k not in tol:
            raise WforgeError(f"unknown tolerance {k!r}; known: {', '.join(tol)}")
        if not v > 0:
            raise WforgeError(f"tolerance {k} must be positive, got {v}")
        tol[k] = float(v)
    return tol


@dataclass
class Subject:
    """What a command operates on: a family member, an explicit pair or raw coefficient vectors."""

    label: str
    descriptor: FamilyDescriptor | None = None
    pair: WeierstrassPair | NumericPair | None = None
    coeffs: degree5.CoeffVectors5 | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return isinstance(self.pair, WeierstrassPair)

    @property
    def exact_surface(self) -> SurfacePolynomial | None:
        if not self.exact:
            return None
        if not hasattr(self, "_exact_surface"):
            self._exact_surface = surface_from_pair(self.pair)
        return self._exact_surface

    @property
    def surface(self) -> PolySurface | None:
        if self.exact:
            return self.exact_surface.to_numeric()
        if isinstance(self.pair, NumericPair):
            return self.pair.surface()
        return None

    @property
    def degree(self) -> int | None:
        if self.exact:
            return self.pair.n
        if isinstance(self.pair, NumericPair):
            return self.pair.degree
        return None

    def structure(self) -> dict[str, int] | None:
        if self.exact:
            return self.pair.structure
        return None

    def classification(self) -> list[FamilyDescriptor]:
        if self.exact:
            return classify(self.pair)
        if self.descriptor is not None:
            if self.descriptor.kind == "XuWangDeg5":
                p = self.descriptor.params
                return [xw_degree5(*(float(p[k]) for k in ("a1", "a2", "e1", "e2")))[1]]
            return [self.descriptor]
        return []

    def mirror_classification(self) -> list[FamilyDescriptor]:
        """Normal forms matched by the symmetry transform of the pair (cases 2.1, 2.2, 4)."""
        if not self.exact:
            return []
        try:
            return classify(symmetry_transform(self.pair))
        except WforgeError:
            return []


CASE_NUMBERS = {"R11": "1.1", "R12": "1.2", "R3": "3"}
MIRROR_CASE_NUMBERS = {"R11": "2.1", "R12": "2.2", "R3": "4"}


def _is_zero_param(x) -> bool:
    return complex(x) == 0


def case_label(desc: FamilyDescriptor, mirror: bool = False) -> str:
    table = MIRROR_CASE_NUMBERS if mirror else CASE_NUMBERS
    if desc.kind not in table:
        return desc.label()
    text = f"case {table[desc.kind]}: "
    text += f"symmetric of {desc.label()}" if mirror else desc.label()
    if desc.kind == "R12" and _is_zero_param(desc.params["b"]) and _is_zero_param(desc.params["d"]):
        text += " (b=d=0)"
    return text


def family_subject(desc: FamilyDescriptor) -> Subject:
    subj = Subject(label=desc.label(), descriptor=desc, pair=make_family(desc))
    if desc.degenerate:
        subj.notes.append("b^2 c + d = 0: g reduces to a polynomial and the surface is of type r3")
    return subj


def _check(name, passed, max_residual=None, tolerance=None, skipped=0, detail=None, status=None) -> dict:
    return {
        "name": name,
        "status": status or ("pass" if passed else "fail"),
        "passed": bool(passed),
        "max_residual": None if max_residual is None else float(max_residual),
        "tolerance": tolerance,
        "skipped": int(skipped),
        "detail": detail or {},
    }


def _skipped(name, reason) -> dict:
    return _check(name, True, status="skipped", detail={"reason": reason})


# ---------------------------------------------------------------------------
# individual checks


def structure_check(pair: WeierstrassPair) -> dict:
    s1, s2, s3 = pair.degree_sums()
    bound = pair.n - 1
    ok = s1 <= bound and s2 <= bound and s3 <= bound and bound in (s1, s2, s3)
    return _check("structure", ok, tolerance=0, detail={
        **pair.structure,
        "2q+r": s1, "2p+r": s2, "p+q+r": s3, "n-1": bound,
        "f": str(pair.f), "g": str(pair.g),
    })


def eq22_check(cv: degree5.CoeffVectors5, tol: dict) -> dict:
    res = degree5.system_residual(cv)
    if cv.is_exact():
        failing = res.failing(0)
        tolerance: float = 0
        worst = res.max_abs()
    else:
        scale = degree5.residual_scale(cv)
        tolerance = tol["eq22_float"]
        failing = [k for k, r in enumerate(res.residuals, start=1) if abs(r) / scale > tolerance]
        worst = res.max_abs() / scale
    detail = {"equations": degree5.residual_report(res)}
    if failing:
        first = failing[0]
        detail["failing"] = failing
        detail["message"] = f"equation {first} ({degree5.EQUATIONS[first - 1]} = 0) violated"
    return _check("eq22", not failing, worst, tolerance, detail=detail)


def _exact_checks(subj: Subject, tol: dict) -> list[dict]:
    pair = subj.pair
    out = [structure_check(pair)]
    iso = check_isotropy(integrand(pair))
    out.append(_check("isotropy", iso.is_zero(), tolerance=0, detail={"residual": str(iso)}))
    surf = subj.exact_surface
    laps = surf.laplacians()
    out.append(_check("harmonic", all(l.is_zero() for l in laps), tolerance=0))
    E, F, G = surf.first_form_polys()
    out.append(_check("isothermal", (E - G).is_zero() and F.is_zero(), tolerance=0))
    if surf.degree <= 5:
        out.append(eq22_check(degree5.extract_coeffs(surf), tol))
    else:
        out.append(_skipped("eq22", f"surface degree {surf.degree} > 5"))
    return out


def _float_checks(subj: Subject, tol: dict) -> list[dict]:
    pair: NumericPair = subj.pair
    out = []
    iso = pair.isotropy_residual()
    out.append(_check("isotropy", iso <= tol["float_identity"], iso, tol["float_identity"]))
    surf = pair.surface()
    c = surf.coeffs
    lap = np.zeros_like(c)
    uu = npoly.polyder(c, m=2, axis=1)
    vv = npoly.polyder(c, m=2, axis=2)
    lap[:, : uu.shape[1], :] += uu
    lap[:, :, : vv.shape[2]] += vv
    scale = max(np.abs(c).max(), 1e-300)
    lap_res = float(np.abs(lap).max() / scale)
    out.append(_check("harmonic", lap_res <= tol["float_identity"], lap_res, tol["float_identity"]))
    grid = np.linspace(-1, 1, 11)
    U, V = np.meshgrid(grid, grid, indexing="ij")
    d = surf.derivatives(U, V)
    E = np.sum(d["u"] ** 2, axis=0)
    G = np.sum(d["v"] ** 2, axis=0)
    F = np.sum(d["u"] * d["v"], axis=0)
    iso_res = float(max(np.abs(E - G).max(), np.abs(F).max()) / max(E.max(), 1e-300))
    out.append(_check("isothermal", iso_res <= tol["float_identity"], iso_res, tol["float_identity"]))
    if pair.degree <= 5:
        try:
            out.append(eq22_check(degree5.extract_coeffs(surf), tol))
        except NotRepresentableError as exc:
            out.append(_check("eq22", False, detail={"message": str(exc)}))
    else:
        out.append(_skipped("eq22", f"surface degree {pair.degree} > 5"))
    if subj.descriptor is not None and subj.descriptor.kind == "XuWangOmega":
        p = subj.descriptor.params
        direct = xu_wang_surface(int(p["n"]), float(p["omega"])).coeffs
        k = direct.shape[1]
        diff = float(np.abs(direct - c[:, :k, :k]).max() / max(np.abs(direct).max(), 1.0))
        out.append(_check("xu_wang_formula", diff <= tol["float_identity"], diff, tol["float_identity"]))
    return out


@dataclass(frozen=True)
class ChartPlan:
    z0: complex
    clearance: float  # distance from z0 to the nearest zero of f g'
    half_width: float
    spacing: float


def plan_chart(pair, z0=None, max_half_width: float = 0.25, nodes: int = 25) -> ChartPlan | None:
    """Pick a chart centre and size so that z(w) stays well clear of the zeros of f g'.

    Without an explicit ``z0`` the origin is used when it is at least 0.5 away
    from every zero, otherwise the point of a 9 x 9 grid on [-1, 1]^2 farthest
    from them.  The half width is capped so that |dz/dw| * half_width is at
    most a quarter of the clearance; the grid always has ``nodes`` steps per half.
    """
    npair = pair.to_numeric() if isinstance(pair, WeierstrassPair) else pair
    D = np.trim_zeros(npair.f_gprime(), "b")
    zeros = npoly.polyroots(D) if len(D) > 1 else np.array([], dtype=complex)

    def clearance(z):
        return float(np.abs(zeros - z).min()) if zeros.size else math.inf

    if z0 is None:
        if clearance(0) >= 0.5:
            z0 = 0j
        else:
            axis = np.linspace(-1, 1, 9)
            cands = (axis[:, None] + 1j * axis[None, :]).ravel()
            z0 = complex(max(cands, key=lambda z: (clearance(z), -abs(z))))
    z0 = complex(z0)
    c = clearance(z0)
    if c == 0:
        return None
    speed = abs(npoly.polyval(z0, D)) ** -0.5
    hw = min(max_half_width, c / (4 * speed)) if math.isfinite(c) else max_half_width
    return ChartPlan(z0, c, hw, hw / nodes)


def chart_checks(pair, tol: dict, z0=None) -> list[dict]:
    names = ("chart_forms", "chart_path", "ganchev_pde")
    plan = plan_chart(pair, z0)
    if plan is None:
        return [_skipped(n, "chart centre is a zero of f g'") for n in names]
    try:
        chart = canonical_chart(pair, half_width=plan.half_width, spacing=plan.spacing,
                                z0=plan.z0, step=plan.spacing / 10)
    except (BranchPointError, CriticalPointError) as exc:
        return [_skipped(n, str(exc)) for n in names]
    fr = chart.form_residuals()
    first = max(fr["E-1/nu"], fr["G-1/nu"], fr["F"])
    second = max(fr["L-1"], fr["M"], fr["N+1"])
    ok = first < tol["chart_first_form"] and second < tol["chart_second_form"]
    where = {"z0": [plan.z0.real, plan.z0.imag], "half_width": plan.half_width, "spacing": plan.spacing}
    out = [_check("chart_forms", ok, max(first, second),
                  {"first": tol["chart_first_form"], "second": tol["chart_second_form"]},
                  detail={**fr, **where, "branch": chart.branch})]
    pr = chart.path_residual()
    out.append(_check("chart_path", pr < tol["chart_path"], pr, tol["chart_path"], detail=where))
    gres = float(np.abs(chart.ganchev_residual()).max())
    out.append(_check("ganchev_pde", gres < tol["ganchev"], gres, tol["ganchev"], detail=where))
    return out


def scan_check(subj: Subject, tol: dict, region, grid: int) -> dict:
    surf = subj.surface
    exclude = branch_points(subj.pair) if subj.pair is not None else ()
    rep = minimality_scan(surf, region=region, grid=grid, tol_H=tol["H_rel"], tol_K=tol["K_pos"], exclude=exclude)
    return _check("minimality_scan", rep.passed, rep.max_rel_H, {"H_rel": tol["H_rel"], "K_pos": tol["K_pos"]},
                  skipped=rep.skipped, detail=rep.as_dict())


# ---------------------------------------------------------------------------
# verify


def run_verification(subj: Subject, tol: dict | None = None, region=(-1.0, 1.0, -1.0, 1.0),
                     grid: int = 41, chart: bool = True, z0=None) -> dict:
    tol = tol or tolerances()
    if subj.pair is None:
        if subj.coeffs is None:
            raise WforgeError("nothing to verify")
        checks = [eq22_check(subj.coeffs, tol)]
    else:
        checks = _exact_checks(subj, tol) if subj.exact else _float_checks(subj, tol)
        checks.append(scan_check(subj, tol, region, grid))
        if chart:
            checks.extend(chart_checks(subj.pair, tol, z0))
    failed = [c["name"] for c in checks if not c["passed"]]
    return {
        "schema": SCHEMA_VERSION,
        "subject": subject_summary(subj),
        "tolerances": tol,
        "checks": checks,
        "failed": failed,
        "passed": not failed,
    }


def subject_summary(subj: Subject) -> dict:
    out: dict[str, Any] = {"label": subj.label, "exact": subj.exact}
    if subj.descriptor is not None:
        out["descriptor"] = subj.descriptor.to_json()
    if subj.degree is not None:
        out["degree"] = subj.degree
    s = subj.structure()
    if s is not None:
        out["structure"] = s
    cases = [case_label(d) for d in subj.classification()]
    if not cases:
        cases = [case_label(d, mirror=True) for d in subj.mirror_classification()]
    if cases:
        out["cases"] = cases
    if subj.notes:
        out["notes"] = list(subj.notes)
    return out


# ---------------------------------------------------------------------------
# compare


FINGERPRINT_POINTS = (0.3 + 0.1j, -0.2 + 0.4j, 0.5 - 0.3j, -0.4 - 0.25j, 0.15 + 0.6j)


def _family_of(subj: Subject) -> FamilyDescriptor | None:
    for d in subj.classification():
        if d.kind in ("R11", "R12", "R3"):
            return d
    return None


def energy_fingerprint(subj: Subject, points=FINGERPRINT_POINTS) -> list[float] | None:
    """Canonical energy (1 + |g|^2)^2 / (4 |g'|^2) of the subject's g at ``points``."""
    if subj.pair is None:
        return None
    g = subj.pair.g
    out = []
    for z in points:
        try:
            out.append(canonical_energy(g, complex(z)))
        except (CriticalPointError, ZeroDivisionError):
            out.append(float("nan"))
    return out


def _normalized(values: list[float]) -> list[float]:
    """Values divided by the first finite one, so that homotheties drop out."""
    ref = next((v for v in values if math.isfinite(v) and v != 0), None)
    return [v / ref if ref else float("nan") for v in values]


def compare_subjects(a: Subject, b: Subject) -> dict:
    verdict, summary, extra, point_map = _compare(a, b)
    pa = list(FINGERPRINT_POINTS)
    pb = [point_map(z) for z in pa] if point_map is not None else pa
    fa, fb = energy_fingerprint(a, pa), energy_fingerprint(b, pb)
    fp: dict[str, Any] = {
        "points_a": [[z.real, z.imag] for z in pa],
        "points_b": [[complex(z).real, complex(z).imag] for z in pb],
        "matched": point_map is not None,
        "a": fa,
        "b": fb,
    }
    if fa is not None and fb is not None:
        na, nb = _normalized(fa), _normalized(fb)
        diffs = [abs(x - y) / max(abs(x), abs(y), 1e-300) for x, y in zip(na, nb)
                 if math.isfinite(x) and math.isfinite(y)]
        fp["max_rel_diff"] = max(diffs) if diffs else None
        fp["match"] = bool(diffs) and max(diffs) < 1e-9
    return {
        "schema": COMPARE_SCHEMA_VERSION,
        "a": subject_summary(a),
        "b": subject_summary(b),
        "verdict": verdict,
        "summary": summary,
        **extra,
        "energy_fingerprint": fp,
    }


def _as_r3(d: FamilyDescriptor) -> FamilyDescriptor | None:
    """The r3 normal form of a degenerate r12 descriptor (exact parameters only)."""
    if d.kind != "R12" or not d.degenerate or not d.exact:
        return None
    return coincidence_r12_r3(d.params["b"], d.params["c"], d.params["d"], d.params["a"]).r3


def _rotation(r12: FamilyDescriptor, r3: FamilyDescriptor) -> complex:
    """e^{i phi} in  a = A c^3 e^{4 i phi},  C + 2 b c e^{i phi} = 0."""
    a, b, c = (complex(r12.params[k]) for k in "abc")
    A, C = complex(r3.params["a"]), complex(r3.params["c"])
    if b * c != 0:
        return -C / (2 * b * c)
    return (a / (A * c**3)) ** 0.25


def _predicate(r12: FamilyDescriptor, r3: FamilyDescriptor):
    extra: dict[str, Any] = {}
    b_, c_, d_ = (r12.params[k] for k in "bcd")
    co = None
    if r12.exact:
        co = coincidence_r12_r3(b_, c_, d_, r12.params["a"])
        value, zero = co.value, co.coincident
    else:
        value = complex(b_) ** 2 * complex(c_) + complex(d_)
        zero = abs(value) <= 1e-12
    extra["predicate"] = {"b^2c+d": str(value), "zero": zero}
    if not zero:
        return "distinct", f"distinct (b\u00b2c+d={value}\u22600)", extra
    if co is not None:
        extra["reduced_pair"] = {"f": str(co.reduced.f), "g": str(co.reduced.g), "r3": co.r3.label()}
    if r12_r3_relations(r12.params, r3.params):
        return "coincident", "coincident (predicate)", extra
    return "distinct", "distinct (b\u00b2c+d=0 but the r3 parameters do not match the reduced pair)", extra


def _r12_to_r3_map(r12: FamilyDescriptor, rot: complex = 1.0):
    """z -> w carrying a degenerate r12 pair onto the r3 normal form (g rotated by ``rot``)."""
    b, c = complex(r12.params["b"]), complex(r12.params["c"])
    return lambda z: rot * c * (z + b)


def _inverse_affine(forward):
    """Inverse of an affine map z -> forward(z)."""
    w0 = forward(0)
    slope = forward(1) - w0
    return lambda w: (w - w0) / slope


def _compare(a: Subject, b: Subject):
    """(verdict, summary, extra report fields, map from a's z to matched z of b or None)."""
    da, db = _family_of(a), _family_of(b)
    if da is not None and db is not None:
        # a degenerate r12 compared with another r12 is tested through its r3 normal form
        to_norm_a = to_norm_b = None
        if da.kind == db.kind == "R12":
            if _as_r3(db) is not None:
                to_norm_b, db = _r12_to_r3_map(db), _as_r3(db)
            elif _as_r3(da) is not None:
                to_norm_a, da = _r12_to_r3_map(da), _as_r3(da)
        if {da.kind, db.kind} == {"R12", "R3"}:
            a_is_r12 = da.kind == "R12"
            r12, r3 = (da, db) if a_is_r12 else (db, da)
            verdict, summary, extra = _predicate(r12, r3)
            point_map = None
            if verdict == "coincident":
                fwd = _r12_to_r3_map(r12, _rotation(r12, r3))
                if a_is_r12:
                    back = _inverse_affine(to_norm_b) if to_norm_b else (lambda w: w)
                    point_map = lambda z: back(fwd(z))
                else:
                    to_norm = to_norm_a or (lambda z: z)
                    inv = _inverse_affine(fwd)
                    point_map = lambda z: inv(to_norm(z))
            return verdict, summary, extra, point_map
    identity = lambda z: z
    if a.exact and b.exact:
        sa, sb = a.exact_surface, b.exact_surface
        if sa.components == sb.components:
            return "coincident", "coincident (identical surfaces)", {}, identity
        if sa.mirrored().components == sb.components:
            return "mirror-congruent", "mirror-congruent (reflection in the plane x1 = 0, exact)", {}, identity
    if da is not None and db is not None:
        kinds = {da.kind, db.kind}
        if "R11" in kinds and kinds & {"R12", "R3"}:
            return "distinct", "distinct (r11 never coincides with r12 or r3)", {}, None
    return "undetermined", "undetermined by implemented criteria", {}, None
