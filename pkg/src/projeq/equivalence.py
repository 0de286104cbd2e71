"""Bridges between metric pairs and quadratic integrals: the projective
integral I, the null-coordinate PDE residuals, and the triviality test."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation, SignatureMismatch, SingularMetric
from .expr import parse
from .fields import ScalarField
from .geometry import Chart, Metric2, metric_at
from .dynamics import PhaseState, QuadraticForm, hamiltonian, hamiltonian_form, \
    poisson_bracket, quadratic_value

DEFAULT_VERIFY_TOL = 1e-9
DEFAULT_TRIVIALITY_TOL = 1e-8

# momentum directions pinning a cubic in (px, py)
_MOMENTUM_BASIS = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0))


@dataclass
class NullFormMetric:
    """ds^2 = f dx dy with f > 0 on the chart."""

    f: ScalarField
    chart: Chart

    def __post_init__(self):
        for x, y in self.chart.points():
            if not self.f(x, y) > 0.0:
                raise InvariantViolation("null-form coefficient f must be positive", (x, y))

    @classmethod
    def from_expr(cls, f: str, chart: Chart) -> "NullFormMetric":
        return cls(ScalarField.from_expr(parse(f)), chart)

    def to_metric2(self) -> Metric2:
        return Metric2.null_form(self.f, self.chart)


def null_form_of(g: Metric2, tol: float = 1e-10) -> NullFormMetric | None:
    """Recognize ds^2 = f dx dy; None if g11 or g22 is not negligible."""
    for x, y in g.chart.points():
        m, _, _ = g.values_at(x, y)
        scale = max(abs(m[0, 1]), 1e-300)
        if abs(m[0, 0]) > tol * scale or abs(m[1, 1]) > tol * scale:
            return None
    return NullFormMetric(g.g12 * 2.0, g.chart)


# --- the projective integral I ------------------------------------------------


def projective_integral_I(g: Metric2, gbar: Metric2, x: float, y: float,
                          xi: tuple[float, float]) -> float:
    """I(xi) = gbar(xi, xi) * (det g / det gbar)^(2/3), real cube root."""
    _, det_g, sig_g = metric_at(g, x, y)
    mbar, det_gbar, sig_gbar = metric_at(gbar, x, y)
    ratio = det_g / det_gbar
    if ratio <= 0.0:
        raise SignatureMismatch(
            f"det ratio {ratio:.3e} <= 0 at ({x:.4g}, {y:.4g}); signatures differ")
    vx, vy = xi
    quad = mbar[0, 0] * vx * vx + 2.0 * mbar[0, 1] * vx * vy + mbar[1, 1] * vy * vy
    return quad * ratio ** (2.0 / 3.0)


def projective_integral_momentum(g: Metric2, gbar: Metric2, s: PhaseState) -> float:
    """I evaluated on the velocity xi = g^{-1} p of a phase-space state."""
    m, det, _ = metric_at(g, s.x, s.y)
    vx = (m[1, 1] * s.px - m[0, 1] * s.py) / det
    vy = (-m[0, 1] * s.px + m[0, 0] * s.py) / det
    return projective_integral_I(g, gbar, s.x, s.y, (vx, vy))


def fit_integral_combination(g: Metric2, gbar: Metric2, F: QuadraticForm,
                             states: list[PhaseState]):
    """Least-squares constants (alpha, beta) with I = alpha F + beta H over
    the given states; returns (alpha, beta, max abs residual, scale)."""
    ivals = np.array([projective_integral_momentum(g, gbar, s) for s in states])
    fvals = np.array([quadratic_value(F, s) for s in states])
    hvals = np.array([hamiltonian(g, s) for s in states])
    design = np.column_stack([fvals, hvals])
    (alpha, beta), *_ = np.linalg.lstsq(design, ivals, rcond=None)
    resid = float(np.max(np.abs(design @ np.array([alpha, beta]) - ivals)))
    scale = float(np.max(np.abs(ivals)) + 1e-300)
    return float(alpha), float(beta), resid, scale


# --- system (sys) residuals -----------------------------------------------------


@dataclass
class SysResiduals:
    """The four PDE left-hand sides whose simultaneous vanishing makes F an
    integral of the null-form flow:
    r1 = a_y, r2 = f a_x + f b_y + 2 f_x a + f_y b,
    r3 = f b_x + f c_y + f_x b + 2 f_y c, r4 = c_x."""

    r1: float
    r2: float
    r3: float
    r4: float
    norm: float = 1.0  # chart-scale normalizer, see normalized()

    def normalized(self) -> tuple[float, float, float, float]:
        return (self.r1 / self.norm, self.r2 / self.norm,
                self.r3 / self.norm, self.r4 / self.norm)

    def max_normalized(self) -> float:
        return max(abs(v) for v in self.normalized())


def sys_residuals(f: ScalarField, F: QuadraticForm, x: float, y: float) -> SysResiduals:
    fj = f.jet(x, y)
    aj, bj, cj = F.jets_at(x, y)
    r1 = aj.dy
    r2 = fj.v * aj.dx + fj.v * bj.dy + 2.0 * fj.dx * aj.v + fj.dy * bj.v
    r3 = fj.v * bj.dx + fj.v * cj.dy + fj.dx * bj.v + 2.0 * fj.dy * cj.v
    r4 = cj.dx
    norm = ((1.0 + abs(fj.v) + abs(fj.dx) + abs(fj.dy))
            * (1.0 + abs(aj.v) + abs(bj.v) + abs(cj.v)))
    return SysResiduals(r1, r2, r3, r4, norm)


def bracket_cubic_from_sys(f: ScalarField, res: SysResiduals, x: float, y: float,
                           px: float, py: float) -> float:
    """{H, F} reassembled from the sys residuals for H = 1/2 g^{ij} p_i p_j
    of the null form (the library's H normalization):
    {H, F} = -(2/f^2) (f r1 px^3 + r2 px^2 py + r3 px py^2 + f r4 py^3)."""
    fv = f(x, y)
    cubic = (fv * res.r1 * px ** 3 + res.r2 * px * px * py
             + res.r3 * px * py * py + fv * res.r4 * py ** 3)
    return -2.0 / (fv * fv) * cubic


def _sys_from_bracket(g_null: Metric2, f: ScalarField, F: QuadraticForm,
                      x: float, y: float) -> SysResiduals:
    """Recover the four sys values from numerically evaluated Poisson
    brackets at the momentum basis (independent route through the
    inverse-metric jets)."""
    vals = np.array([poisson_bracket(g_null, F, PhaseState(x, y, px, py))
                     for px, py in _MOMENTUM_BASIS])
    # cubic coefficients (C0..C3) of {H,F} from the basis evaluations:
    # (1,0): C0; (0,1): C3; (1,1): C0+C1+C2+C3; (1,-1): C0-C1+C2-C3
    c0 = vals[0]
    c3 = vals[1]
    c1 = 0.5 * (vals[2] - vals[3]) - c3
    c2 = 0.5 * (vals[2] + vals[3]) - c0
    fv = f(x, y)
    k = -fv * fv / 2.0
    ref = sys_residuals(f, F, x, y)  # only for the shared normalizer
    return SysResiduals(k * c0 / fv, k * c1, k * c2, k * c3 / fv, ref.norm)


# --- verification reports ---------------------------------------------------------


@dataclass
class VerificationReport:
    method: str
    max_residual: float
    worst_point: tuple[float, float]
    tolerance: float
    passed: bool

    def to_dict(self):
        return {
            "method": self.method,
            "max_residual": self.max_residual,
            "worst_point": list(self.worst_point),
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def verify_integral(metric, F: QuadraticForm, chart: Chart | None = None,
                    method: str = "auto", tol: float = DEFAULT_VERIFY_TOL) -> VerificationReport:
    """Check {H, F} = 0 over the chart grid.

    method 'sys' evaluates the null-coordinate PDE residuals (requires a
    null-form metric); 'bracket' evaluates the Poisson bracket at the
    momentum basis; 'auto' picks 'sys' when the metric is in null form.
    Residuals are normalized by local field magnitudes.
    """
    nf = metric if isinstance(metric, NullFormMetric) else None
    g = metric.to_metric2() if isinstance(metric, NullFormMetric) else metric
    if nf is None and method in ("auto", "sys"):
        nf = null_form_of(g)
    if method == "auto":
        method = "sys" if nf is not None else "bracket"
    chart = chart or g.chart

    worst = 0.0
    worst_pt = chart.center
    if method == "sys":
        if nf is None:
            raise ValueError("sys residuals require a null-form metric")
        for x, y in chart.points():
            r = sys_residuals(nf.f, F, x, y).max_normalized()
            if r > worst:
                worst, worst_pt = r, (x, y)
    elif method == "bracket":
        for x, y in chart.points():
            if nf is not None:
                r = _sys_from_bracket(g, nf.f, F, x, y).max_normalized()
            else:
                hf = hamiltonian_form(g)
                aj, bj, cj = hf.jets_at(x, y)
                fnorm = (1.0 + abs(aj.v) + abs(bj.v) + abs(cj.v) + abs(aj.dx)
                         + abs(bj.dx) + abs(cj.dx) + abs(aj.dy) + abs(bj.dy) + abs(cj.dy))
                a2, b2, c2 = F.jets_at(x, y)
                cnorm = 1.0 + abs(a2.v) + abs(b2.v) + abs(c2.v)
                for px, py in _MOMENTUM_BASIS:
                    v = abs(poisson_bracket(g, F, PhaseState(x, y, px, py)))
                    r = v / (fnorm * cnorm)
                    if r > worst:
                        worst, worst_pt = r, (x, y)
                continue
            if r > worst:
                worst, worst_pt = r, (x, y)
    else:
        raise ValueError(f"unknown method {method!r}")
    return VerificationReport(method, worst, worst_pt, tol, worst < tol)


# --- triviality (is F a constant multiple of H?) ------------------------------------


@dataclass
class TrivialityResult:
    trivial: bool
    scale: float          # the lambda minimizing |F - lambda H|
    deviation: float
    tolerance: float


def triviality_check(F: QuadraticForm, g: Metric2, chart: Chart | None = None,
                     tol: float = DEFAULT_TRIVIALITY_TOL) -> TrivialityResult:
    """F is trivial iff F - lambda H vanishes (coefficient-wise on the grid)
    for the deviation-minimizing lambda."""
    chart = chart or g.chart
    hf = hamiltonian_form(g)
    fvals, hvals = [], []
    for x, y in chart.points():
        fvals.extend((F.a(x, y), F.b(x, y), F.c(x, y)))
        hvals.extend((hf.a(x, y), hf.b(x, y), hf.c(x, y)))
    fvals = np.array(fvals)
    hvals = np.array(hvals)
    denom = float(hvals @ hvals)
    lam = float(fvals @ hvals) / denom if denom > 0.0 else 0.0
    dev = float(np.max(np.abs(fvals - lam * hvals)))
    scale = float(np.max(np.abs(fvals)) + 1e-300)
    return TrivialityResult(dev <= tol * scale, lam, dev, tol)
