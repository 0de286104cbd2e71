"""Coordinate rectification: admissible changes, quadrature normalization of
the integral's extreme coefficients, and the three case solvers recovering
normal-form data from a null-form metric plus a quadratic integral."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (AmbiguousCase, CoefficientVanishes, NotAnIntegral, NotAxisAligned,
                     NotCase1, NotCase3, NotHolomorphic, RectifyError, SignatureMismatch,
                     TrivialIntegral, YhatVanishes)
from .expr import Expr, parse
from .fields import ExprMap, IdentityMap, Monotone1D, QuadratureMap, \
    ScalarField, map_derivative_field
from .geometry import Chart, Metric2
from .dynamics import QuadraticForm
from .equivalence import NullFormMetric, null_form_of, sys_residuals, triviality_check

DEFAULT_CASE_TOL = 1e-6
DEFAULT_SYS_TOL = 1e-8
_ZERO_COEFF_RTOL = 1e-7   # below this (relative) a coefficient counts as identically 0


# --- admissible coordinate changes ------------------------------------------------


@dataclass
class AdmissibleChange:
    """x_new = phi(x_old), y_new = psi(y_old), both strictly increasing."""

    phi: str | Expr
    psi: str | Expr

    def maps(self, chart: Chart) -> tuple[Monotone1D, Monotone1D]:
        phi = parse(self.phi, variables=("x",)) if isinstance(self.phi, str) else self.phi
        psi = parse(self.psi, variables=("y",)) if isinstance(self.psi, str) else self.psi
        return (ExprMap(phi, "x", *chart.x_range), ExprMap(psi, "y", *chart.y_range))


def transform_separable(nf: NullFormMetric, F: QuadraticForm,
                        xmap: Monotone1D, ymap: Monotone1D) -> tuple[NullFormMetric, QuadraticForm]:
    """Pull the null-form metric and the integral through a separable change.

    Transformation law (from the momenta p_old = p_new * dnew/dold):
    a_new = a phi'^2, b_new = b phi' psi', c_new = c psi'^2, and
    f_new = f / (phi' psi') so that ds^2 = f dx dy is invariant.
    """
    chart = nf.chart
    new_chart = Chart(xmap.range, ymap.range, chart.grid)
    dphi = map_derivative_field(xmap, "x")
    dpsi = map_derivative_field(ymap, "y")
    f_new = (nf.f.compose_separable(xmap, ymap) / (dphi * dpsi)).cached()
    a_new = (F.a.compose_separable(xmap, ymap) * dphi * dphi).cached()
    b_new = (F.b.compose_separable(xmap, ymap) * dphi * dpsi).cached()
    c_new = (F.c.compose_separable(xmap, ymap) * dpsi * dpsi).cached()
    return (NullFormMetric(f_new, new_chart), QuadraticForm(a_new, b_new, c_new, new_chart))


def apply_admissible_change(f, F: QuadraticForm, change: AdmissibleChange):
    """(f, F) pulled through an admissible change; f may be a NullFormMetric
    or a bare ScalarField (then F's chart is used)."""
    nf = f if isinstance(f, NullFormMetric) else NullFormMetric(f, F.chart)
    xmap, ymap = change.maps(nf.chart)
    return transform_separable(nf, F, xmap, ymap)


# --- Birkhoff-Kolokoltsov normalization ---------------------------------------------


@dataclass
class BKResult:
    xmap: Monotone1D
    ymap: Monotone1D
    metric: NullFormMetric
    integral: QuadraticForm
    sign_a: int
    sign_c: int          # 0 when c is identically zero
    base_point: tuple[float, float]


def _coeff_stats(coef: ScalarField, chart: Chart):
    vals = np.array([coef(x, y) for x, y in chart.points()])
    return vals


def _axis_variation(coef: ScalarField, chart: Chart, axis: str) -> float:
    """Max relative cross-axis derivative (a_y for axis 'x', c_x for 'y')."""
    worst = 0.0
    scale = float(np.max(np.abs(_coeff_stats(coef, chart))) + 1e-300)
    for x, y in chart.points():
        j = coef.jet(x, y)
        d = j.dy if axis == "x" else j.dx
        worst = max(worst, abs(d) / (scale + abs(j.dx) + abs(j.dy)))
    return worst


def _bk_axis_map(coef: ScalarField, axis: str, lo: float, hi: float, ref: float,
                 base: float) -> Monotone1D:
    """Quadrature map with derivative 1 / sqrt(|coef|) along one axis."""

    def deriv_jet(t):
        j = coef.jet(t, ref) if axis == "x" else coef.jet(ref, t)
        a = j.v
        a1 = j.dx if axis == "x" else j.dy
        a2 = j.dxx if axis == "x" else j.dyy
        s = 1.0 if a > 0.0 else -1.0
        mag = abs(a)
        d0 = mag ** -0.5
        d1 = -0.5 * s * a1 * mag ** -1.5
        d2 = -0.5 * s * a2 * mag ** -1.5 + 0.75 * a1 * a1 * mag ** -2.5
        return (d0, d1, d2)

    return QuadratureMap(deriv_jet, base, lo, hi)


def bk_normalize(nf: NullFormMetric, F: QuadraticForm,
                 axis_tol: float = DEFAULT_CASE_TOL) -> BKResult:
    """Rectify coordinates by integrating dx / sqrt(|a|) and dy / sqrt(|c|).

    In the new coordinates the extreme coefficients become sign(a_old) and
    sign(c_old).  An axis whose coefficient is identically zero keeps its
    coordinate (identity map).  Raises NotAxisAligned when a depends on y
    (or c on x) beyond tolerance, i.e. the input is not an integral.
    """
    chart = nf.chart
    scale = max(float(np.max(np.abs(_coeff_stats(f, chart)))) for f in (F.a, F.b, F.c))
    scale = max(scale, 1e-300)

    def axis_plan(coef, axis, lo, hi):
        vals = _coeff_stats(coef, chart)
        if np.max(np.abs(vals)) <= _ZERO_COEFF_RTOL * scale:
            return 0, IdentityMap(lo, hi)
        var = _axis_variation(coef, chart, axis)
        if var > axis_tol:
            raise NotAxisAligned(
                f"coefficient {'a' if axis == 'x' else 'c'} varies across "
                f"{'y' if axis == 'x' else 'x'} (relative variation {var:.3e}); "
                "the input is not a first integral of this metric")
        if np.min(vals) < 0.0 < np.max(vals) or np.min(np.abs(vals)) < 1e-8 * np.max(np.abs(vals)):
            i = int(np.argmin(np.abs(vals)))
            loc = list(chart.points())[i][0 if axis == "x" else 1]
            raise CoefficientVanishes(axis, loc)
        sign = 1 if vals[0] > 0.0 else -1
        ref = chart.center[1 if axis == "x" else 0]
        base = 0.5 * (lo + hi)
        return sign, _bk_axis_map(coef, axis, lo, hi, ref, base)

    sign_a, xmap = axis_plan(F.a, "x", *chart.x_range)
    sign_c, ymap = axis_plan(F.c, "y", *chart.y_range)
    nf2, F2 = transform_separable(nf, F, xmap, ymap)
    return BKResult(xmap, ymap, nf2, F2, sign_a, sign_c,
                    (0.5 * sum(chart.x_range), 0.5 * sum(chart.y_range)))


# --- case solvers ------------------------------------------------------------------


def _diag_point(chart: Chart, target: float, kind: str) -> tuple[float, float]:
    """A chart point with x+y = target (kind 'sum') or x-y = target ('diff')."""
    (xlo, xhi), (ylo, yhi) = chart.x_range, chart.y_range
    cx = 0.5 * (xlo + xhi)
    if kind == "sum":
        x = min(max(cx + 0.5 * (target - cx - 0.5 * (ylo + yhi)), xlo), xhi)
        y = target - x
        if not (ylo <= y <= yhi):
            y = min(max(y, ylo), yhi)
            x = target - y
    else:
        x = min(max(cx + 0.5 * (target + 0.5 * (ylo + yhi) - cx), xlo), xhi)
        y = x - target
        if not (ylo <= y <= yhi):
            y = min(max(y, ylo), yhi)
            x = target + y
    return (min(max(x, xlo), xhi), y)


@dataclass
class Case1Result:
    """Liouville recovery: X on u = x+y, Y on v = x-y (normal-form scale,
    i.e. the metric reads (X - Y)(du^2 - dv^2) up to the reported factor)."""

    u_grid: np.ndarray
    X_values: np.ndarray
    v_grid: np.ndarray
    Y_values: np.ndarray
    X: CubicSpline = field(repr=False, default=None)
    Y: CubicSpline = field(repr=False, default=None)
    reconstruction_residual: float = 0.0
    gauge: dict = field(default_factory=dict)
    family = "liouville"


def solve_case1(nf: NullFormMetric, F: QuadraticForm,
                tol: float = DEFAULT_CASE_TOL, samples: int = 129) -> Case1Result:
    """a = 1, c = 1 form: fb + 2f is a function of x - y alone and fb - 2f of
    x + y alone; read off Y and X, reconstruct f and b, report the residual."""
    chart = nf.chart
    P = (nf.f * F.b + 2.0 * nf.f).cached()    # = Y_s(x - y)
    Q = (nf.f * F.b - 2.0 * nf.f).cached()    # = X_s(x + y)
    worst = 0.0
    for x, y in chart.points():
        pj = P.jet(x, y)
        qj = Q.jet(x, y)
        ps = 1.0 + abs(pj.v) + abs(pj.dx) + abs(pj.dy)
        qs = 1.0 + abs(qj.v) + abs(qj.dx) + abs(qj.dy)
        worst = max(worst, abs(pj.dx + pj.dy) / ps, abs(qj.dx - qj.dy) / qs)
    if worst > tol:
        raise NotCase1(f"fb+2f / fb-2f are not functions of one rotated variable "
                       f"(relative residual {worst:.3e})")

    (xlo, xhi), (ylo, yhi) = chart.x_range, chart.y_range
    us = np.linspace(xlo + ylo, xhi + yhi, samples)
    vs = np.linspace(xlo - yhi, xhi - ylo, samples)
    Xs = np.array([Q(*_diag_point(chart, float(u), "sum")) for u in us])
    Ys = np.array([P(*_diag_point(chart, float(v), "diff")) for v in vs])
    Xsp = CubicSpline(us, Xs)
    Ysp = CubicSpline(vs, Ys)

    fscale = max(abs(nf.f(x, y)) for x, y in chart.points())
    resid = 0.0
    for x, y in chart.points():
        Yv = float(Ysp(x - y))
        Xv = float(Xsp(x + y))
        f_rec = (Yv - Xv) / 4.0
        b_rec = 2.0 * (Xv + Yv) / (Yv - Xv)
        fv, bv = nf.f(x, y), F.b(x, y)
        resid = max(resid, abs(f_rec - fv) / fscale, abs(b_rec - bv) / (1.0 + abs(bv)))

    # normal-form-scale functions: ds^2 = (X_T - Y_T)(du^2 - dv^2)
    XT, YT = -Xs / 16.0, -Ys / 16.0
    return Case1Result(us, XT, vs, YT, CubicSpline(us, XT), CubicSpline(vs, YT),
                       resid, {"rotation": "u = x + y, v = x - y",
                               "function_scale": -1.0 / 16.0,
                               "one_variable_residual": worst})


@dataclass
class Case2Result:
    """Complex-Liouville recovery: h = fb + 2if sampled on the chart grid."""

    xs: np.ndarray
    ys: np.ndarray
    h_samples: np.ndarray          # complex, shape (nx, ny)
    cr_residual: float
    gauge: dict = field(default_factory=dict)
    family = "complex_liouville"


def solve_case2(nf: NullFormMetric, F: QuadraticForm,
                tol: float = DEFAULT_CASE_TOL) -> Case2Result:
    """a = 1, c = -1 form: (fb, 2f) satisfy the Cauchy-Riemann equations;
    return the sampled holomorphic h = fb + 2if."""
    chart = nf.chart
    re = nf.f * F.b
    im = nf.f * 2.0
    worst, worst_pt = 0.0, chart.center
    for x, y in chart.points():
        rj = re.jet(x, y)
        ij = im.jet(x, y)
        s = 1.0 + abs(rj.dx) + abs(rj.dy) + abs(ij.dx) + abs(ij.dy)
        r = (abs(rj.dx - ij.dy) + abs(rj.dy + ij.dx)) / s
        if r > worst:
            worst, worst_pt = r, (x, y)
    if worst > tol:
        raise NotHolomorphic(worst, worst_pt)
    xs, ys = chart.xs(), chart.ys()
    h = np.empty((len(xs), len(ys)), dtype=complex)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            h[i, j] = complex(re(float(x), float(y)), im(float(x), float(y)))
    # h = fb + 2if is 4x the h whose normal form reads 2 Im(h) dx dy
    return Case2Result(xs, ys, h, worst, {"h_scale": 4.0, "readoff": "h = f b + 2 i f"})


@dataclass
class Case3Result:
    """Jordan-block recovery: after y_new with dy_new/dy_old = Yhat the
    metric matches (1 + x Y'(y_new)) dx dy_new and b = -2 Y / (1 + x Y')."""

    y_new_grid: np.ndarray
    Y_values: np.ndarray           # Y as a function of the final y coordinate
    y_old_grid: np.ndarray
    Yhat_values: np.ndarray        # Yhat as a function of the original y
    beta: Monotone1D
    final_residual: float
    gauge: dict = field(default_factory=dict)
    family = "jordan_block"


def solve_case3(nf: NullFormMetric, F: QuadraticForm,
                tol: float = DEFAULT_CASE_TOL) -> Case3Result:
    """a = 1, c = 0 form: fb = -2 Y(y), f = x Y'(y) + Yhat(y); the quadrature
    reparametrization dy_new = Yhat dy_old rectifies Yhat to 1."""
    chart = nf.chart
    (xlo, xhi), (ylo, yhi) = chart.x_range, chart.y_range
    x_ref, y0 = chart.center

    fb = nf.f * F.b
    # Y must not depend on x; Yhat_x = f_x - Y' must vanish
    worst = 0.0
    for x, y in chart.points():
        j = fb.jet(x, y)
        fj = nf.f.jet(x, y)
        yp = -0.5 * fb.jet(x_ref, y).dy
        s = 1.0 + abs(j.v) + abs(j.dx) + abs(j.dy)
        worst = max(worst, abs(j.dx) / s,
                    abs(fj.dx - yp) / (1.0 + abs(fj.v) + abs(fj.dx)))
    if worst > tol:
        raise NotCase3(f"Y or Yhat depends on x (relative residual {worst:.3e})")

    def Y_jets(y):
        j = fb.jet(x_ref, y)
        return (-0.5 * j.v, -0.5 * j.dy, -0.5 * j.dyy)

    def yhat_jets(t):
        fj = nf.f.jet(x_ref, t)
        _, yp, ypp = Y_jets(t)
        v = fj.v - x_ref * yp
        d1 = fj.dy - x_ref * ypp
        # third-order term Y''' is not carried by order-2 jets; finite
        # difference is fine here (enters only second-order map slots)
        eps = 1e-5
        tc = min(max(t, ylo + eps), yhi - eps)
        d1p = nf.f.jet(x_ref, tc + eps).dy + 0.5 * x_ref * fb.jet(x_ref, tc + eps).dyy
        d1m = nf.f.jet(x_ref, tc - eps).dy + 0.5 * x_ref * fb.jet(x_ref, tc - eps).dyy
        return (v, d1, (d1p - d1m) / (2.0 * eps))

    ys = chart.ys()
    yhat_vals = np.array([yhat_jets(float(t))[0] for t in ys])
    if np.min(yhat_vals) <= 0.0:
        if np.max(yhat_vals) <= 0.0:
            raise NotCase3("Yhat is negative; flip the y orientation of the input")
        raise YhatVanishes(float(ys[int(np.argmin(np.abs(yhat_vals)))]))

    beta = QuadratureMap(yhat_jets, y0, ylo, yhi)     # dy_new/dy_old = Yhat
    nf_fin, F_fin = transform_separable(nf, F, IdentityMap(xlo, xhi), beta)

    new_chart = nf_fin.chart
    resid = 0.0
    for xn, yn in new_chart.points():
        y_old = beta.inverse(yn)
        Yv, Yp, _ = Y_jets(y_old)
        yh = yhat_jets(y_old)[0]
        gT = 1.0 + xn * (Yp / yh)                     # target (1 + x Y'_new)
        fv = nf_fin.f(xn, yn)
        bv = F_fin.b(xn, yn)
        resid = max(resid, abs(fv - gT) / (1.0 + abs(gT)),
                    abs(bv + 2.0 * Yv / gT) / (1.0 + abs(bv)),
                    abs(F_fin.a(xn, yn) - 1.0), abs(F_fin.c(xn, yn)))

    yn_grid = np.linspace(*new_chart.y_range, chart.grid[1])
    Y_new = np.array([Y_jets(beta.inverse(float(t)))[0] for t in yn_grid])
    return Case3Result(yn_grid, Y_new, ys, yhat_vals, beta, resid,
                       {"base_point": (x_ref, y0),
                        "x_independence_residual": worst})


# --- null-form conversion -----------------------------------------------------------


@dataclass
class NullFormChange:
    """Linear change to admissible (null) coordinates: old = M @ new."""

    M: np.ndarray
    chart: Chart
    flipped_F: bool = False
    swapped_axes: bool = False


def to_null_form(g, F: QuadraticForm):
    """Express (g, F) in admissible coordinates ds^2 = f dx dy, f > 0.

    Handles metrics already in null form and metrics whose null directions
    are constant across the chart (then an exact linear change suffices).
    Varying null directions would need integrating the direction fields into
    coordinate curves; such inputs are rejected with a clear message.
    """
    if isinstance(g, NullFormMetric):
        return g, F, NullFormChange(np.eye(2), g.chart)
    if g.signature != ("+", "-"):
        raise SignatureMismatch(
            "rectification needs signature (+,-); Riemannian inputs follow the "
            "classical Dini path, which is outside this pipeline's scope")
    nf = null_form_of(g)
    if nf is not None:
        return nf, F, NullFormChange(np.eye(2), g.chart)

    # null slopes m: g11 + 2 g12 m + g22 m^2 = 0
    slopes = []
    for x, y in g.chart.points():
        m, det, _ = g.values_at(x, y)
        if abs(m[1, 1]) < 1e-12 * (abs(m[0, 0]) + abs(m[0, 1]) + 1e-300):
            raise RectifyError("null direction along dy; swap coordinates first")
        root = math.sqrt(-det)
        slopes.append(((-m[0, 1] + root) / m[1, 1], (-m[0, 1] - root) / m[1, 1]))
    mp, mm = slopes[0]
    for sp, sm in slopes[1:]:
        if abs(sp - mp) > 1e-9 * (1.0 + abs(mp)) or abs(sm - mm) > 1e-9 * (1.0 + abs(mm)):
            raise RectifyError(
                "the metric's null directions vary across the chart; supply the "
                "metric in null form (f dx dy) to rectify it")

    delta = mp - mm
    M = np.array([[1.0 / delta, -1.0 / delta],
                  [1.0 + mm / delta, -mm / delta]])     # old = M @ new
    nf, F_new, chart_new, M = _linear_null_change(g, F, M)
    return nf, F_new, NullFormChange(M, chart_new)


def _inscribed_chart(chart: Chart, M: np.ndarray) -> Chart:
    """Largest centered axis-aligned rectangle (in new coords) whose image
    under old = M @ new stays inside the old chart."""
    A = np.linalg.inv(M)
    c_old = np.array(chart.center)
    c_new = A @ c_old
    corners_old = [np.array([x, y]) for x in chart.x_range for y in chart.y_range]
    box = np.array([A @ p for p in corners_old])
    h = 0.5 * (box.max(axis=0) - box.min(axis=0))
    s_best = np.inf
    for su in (-1.0, 1.0):
        for sv in (-1.0, 1.0):
            e = M @ np.array([su * h[0], sv * h[1]])    # old-coord excursion
            for comp, (lo, hi), c in zip(e, (chart.x_range, chart.y_range), c_old):
                if comp > 0.0:
                    s_best = min(s_best, (hi - c) / comp)
                elif comp < 0.0:
                    s_best = min(s_best, (lo - c) / comp)
    h *= 0.999 * min(s_best, 1.0)
    return Chart((c_new[0] - h[0], c_new[0] + h[0]),
                 (c_new[1] - h[1], c_new[1] + h[1]), chart.grid)


def _linear_null_change(g: Metric2, F: QuadraticForm, M: np.ndarray):
    chart_new = _inscribed_chart(g.chart, M)
    # orientation: f = 2 (M^T g M)_{12} must be positive
    c = chart_new.center
    x0, y0 = (M @ np.array(c))
    m_old, _, _ = g.values_at(float(x0), float(y0))
    gn = M.T @ m_old @ M
    if gn[0, 1] < 0.0:
        M = M @ np.diag([1.0, -1.0])
        chart_new = _inscribed_chart(g.chart, M)
    g11 = g.g11.compose_linear(M)
    g12 = g.g12.compose_linear(M)
    g22 = g.g22.compose_linear(M)
    m11, m12, m21, m22 = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    f = (g11 * (m11 * m12) + g12 * (m11 * m22 + m12 * m21) + g22 * (m21 * m22)) * 2.0
    A = np.linalg.inv(M)
    a = F.a.compose_linear(M)
    b = F.b.compose_linear(M)
    cc = F.c.compose_linear(M)
    a_new = a * (A[0, 0] ** 2) + b * (A[0, 0] * A[0, 1]) + cc * (A[0, 1] ** 2)
    b_new = a * (2 * A[0, 0] * A[1, 0]) + b * (A[0, 0] * A[1, 1] + A[0, 1] * A[1, 0]) \
        + cc * (2 * A[0, 1] * A[1, 1])
    c_new = a * (A[1, 0] ** 2) + b * (A[1, 0] * A[1, 1]) + cc * (A[1, 1] ** 2)
    return (NullFormMetric(f.cached(), chart_new),
            QuadraticForm(a_new.cached(), b_new.cached(), c_new.cached(), chart_new),
            chart_new, M)


# --- the full pipeline ---------------------------------------------------------------


@dataclass
class RectificationReport:
    family: str
    case: int
    result: object                  # Case1Result | Case2Result | Case3Result
    flipped_integral: bool
    swapped_axes: bool
    bk: BKResult
    sys_residual: float
    gauge: dict

    def to_dict(self):
        d = {
            "family": self.family,
            "case": self.case,
            "flipped_integral": self.flipped_integral,
            "swapped_axes": self.swapped_axes,
            "sys_residual": self.sys_residual,
            "gauge": {k: (list(v) if isinstance(v, tuple) else v)
                      for k, v in self.gauge.items()},
        }
        r = self.result
        if isinstance(r, Case1Result):
            d["parameters"] = {
                "u": r.u_grid.tolist(), "X": r.X_values.tolist(),
                "v": r.v_grid.tolist(), "Y": r.Y_values.tolist(),
            }
            d["reconstruction_residual"] = r.reconstruction_residual
        elif isinstance(r, Case2Result):
            d["parameters"] = {
                "x": r.xs.tolist(), "y": r.ys.tolist(),
                "h_re": r.h_samples.real.tolist(), "h_im": r.h_samples.imag.tolist(),
            }
            d["reconstruction_residual"] = r.cr_residual
        else:
            d["parameters"] = {
                "y_new": r.y_new_grid.tolist(), "Y": r.Y_values.tolist(),
                "y_old": r.y_old_grid.tolist(), "Yhat": r.Yhat_values.tolist(),
            }
            d["reconstruction_residual"] = r.final_residual
        return d


def _swap_axes(nf: NullFormMetric, F: QuadraticForm):
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    chart = Chart(nf.chart.y_range, nf.chart.x_range, (nf.chart.grid[1], nf.chart.grid[0]))
    f2 = nf.f.compose_linear(swap)
    return (NullFormMetric(f2, chart),
            QuadraticForm(F.c.compose_linear(swap), F.b.compose_linear(swap),
                          F.a.compose_linear(swap), chart))


def rectification_pipeline(g, F: QuadraticForm, tol: float = DEFAULT_CASE_TOL,
                           sys_tol: float = DEFAULT_SYS_TOL) -> RectificationReport:
    """Recover normal-form data from a metric plus quadratic integral:
    null form -> sign normalization of F -> quadrature rectification ->
    case dispatch on the signs of (a, c)."""
    g_metric = g.to_metric2() if isinstance(g, NullFormMetric) else g
    triv = triviality_check(F, g_metric)
    if triv.trivial:
        raise TrivialIntegral(
            f"F = {triv.scale:.6g} * H is a trivial integral; nothing to rectify")

    nf, F, change = to_null_form(g, F)
    chart = nf.chart

    worst_sys, worst_pt = 0.0, chart.center
    for x, y in chart.points():
        r = sys_residuals(nf.f, F, x, y).max_normalized()
        if r > worst_sys:
            worst_sys, worst_pt = r, (x, y)
    if worst_sys > sys_tol:
        raise NotAnIntegral(worst_sys, worst_pt)

    avals = _coeff_stats(F.a, chart)
    cvals = _coeff_stats(F.c, chart)
    scale = max(float(np.max(np.abs(v))) for v in
                (avals, cvals, _coeff_stats(F.b, chart)))
    scale = max(scale, 1e-300)

    def sign_of(vals, name):
        if np.max(np.abs(vals)) <= _ZERO_COEFF_RTOL * scale:
            return 0
        if np.min(vals) > 0.0:
            return 1
        if np.max(vals) < 0.0:
            return -1
        raise AmbiguousCase(f"coefficient {name} changes sign inside the chart; "
                            "pick a chart on one side of its zero set")

    sa, sc = sign_of(avals, "a"), sign_of(cvals, "c")
    swapped = False
    flipped = False
    if sa == 0 and sc == 0:
        raise TrivialIntegral("a = c = 0 on the chart: F is proportional to H")
    if sa == 0:
        nf, F = _swap_axes(nf, F)
        sa, sc = sc, sa
        swapped = True
    if sa < 0:
        F = F.scaled(-1.0)
        sa, sc = -sa, -sc
        flipped = True

    bk = bk_normalize(nf, F, axis_tol=tol)
    gauge = {"flipped_integral": flipped, "swapped_axes": swapped,
             "bk_base_point": bk.base_point}

    if sc > 0:
        result = solve_case1(bk.metric, bk.integral, tol)
        case = 1
    elif sc < 0:
        result = solve_case2(bk.metric, bk.integral, tol)
        case = 2
    else:
        result = solve_case3(bk.metric, bk.integral, tol)
        case = 3
    gauge.update(result.gauge)
    return RectificationReport(result.family, case, result, flipped, swapped,
                               bk, worst_sys, gauge)
