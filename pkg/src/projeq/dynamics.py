"""Hamiltonian geodesic flow: energy, Poisson bracket, integration,
conservation logging, and the unparametrized-geodesic residual."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ChartExit, SingularMetric, StepFailure, ZeroVelocity
from .expr import Jet2, parse
from .fields import ScalarField
from .geometry import Chart, Metric2, christoffel_at

DEFAULT_INTEGRATOR_TOL = 1e-10
MAX_STEPS = 1_000_000


@dataclass(frozen=True)
class PhaseState:
    x: float
    y: float
    px: float
    py: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.px, self.py])

    @classmethod
    def from_array(cls, a) -> "PhaseState":
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))


@dataclass
class QuadraticForm:
    """F = a px^2 + b px py + c py^2 with coefficient fields on a chart."""

    a: ScalarField
    b: ScalarField
    c: ScalarField
    chart: Chart

    @classmethod
    def from_exprs(cls, a: str, b: str, c: str, chart: Chart) -> "QuadraticForm":
        return cls(ScalarField.from_expr(parse(a)),
                   ScalarField.from_expr(parse(b)),
                   ScalarField.from_expr(parse(c)), chart)

    def jets_at(self, x: float, y: float) -> tuple[Jet2, Jet2, Jet2]:
        return self.a.jet(x, y), self.b.jet(x, y), self.c.jet(x, y)

    def scaled(self, k: float) -> "QuadraticForm":
        return QuadraticForm(self.a * k, self.b * k, self.c * k, self.chart)


def hamiltonian_form(g: Metric2) -> QuadraticForm:
    """H = 1/2 g^{ij} p_i p_j written as a QuadraticForm (a, b, c) =
    (g^11/2, g^12, g^22/2)."""
    i11, i12, i22 = g.inverse_fields()
    return QuadraticForm(i11 * 0.5, i12, i22 * 0.5, g.chart)


def hamiltonian(g: Metric2, s: PhaseState) -> float:
    m, det, _ = g.values_at(s.x, s.y)
    norm2 = float(np.sum(m * m))
    if abs(det) < 1e-12 * max(norm2, 1e-300):
        raise SingularMetric(s.x, s.y, det)
    gxx, gxy, gyy = m[1, 1] / det, -m[0, 1] / det, m[0, 0] / det
    return 0.5 * (gxx * s.px * s.px + 2.0 * gxy * s.px * s.py + gyy * s.py * s.py)


def quadratic_value(F: QuadraticForm, s: PhaseState) -> float:
    a, b, c = F.a(s.x, s.y), F.b(s.x, s.y), F.c(s.x, s.y)
    return a * s.px * s.px + b * s.px * s.py + c * s.py * s.py


def _as_form(A) -> QuadraticForm:
    if isinstance(A, Metric2):
        return hamiltonian_form(A)
    if isinstance(A, QuadraticForm):
        return A
    raise TypeError("expected a Metric2 (its Hamiltonian) or a QuadraticForm")


def poisson_bracket(A, B, s: PhaseState) -> float:
    """{A, B} = sum_i dA/dx_i dB/dp_i - dA/dp_i dB/dx_i for momentum
    quadratics; position derivatives come from jets, momentum derivatives
    are closed-form."""
    fa, fb = _as_form(A), _as_form(B)
    a1, b1, c1 = fa.jets_at(s.x, s.y)
    a2, b2, c2 = fb.jets_at(s.x, s.y)
    px, py = s.px, s.py
    px2, pxpy, py2 = px * px, px * py, py * py

    ax1 = a1.dx * px2 + b1.dx * pxpy + c1.dx * py2
    ay1 = a1.dy * px2 + b1.dy * pxpy + c1.dy * py2
    apx1 = 2.0 * a1.v * px + b1.v * py
    apy1 = b1.v * px + 2.0 * c1.v * py

    ax2 = a2.dx * px2 + b2.dx * pxpy + c2.dx * py2
    ay2 = a2.dy * px2 + b2.dy * pxpy + c2.dy * py2
    apx2 = 2.0 * a2.v * px + b2.v * py
    apy2 = b2.v * px + 2.0 * c2.v * py

    return ax1 * apx2 - apx1 * ax2 + ay1 * apy2 - apy1 * ay2


@dataclass
class Trajectory:
    """Samples of a geodesic flow with per-sample conservation logs."""

    metric: Metric2
    times: np.ndarray
    states: np.ndarray                  # shape (n, 4): x, y, px, py
    hamiltonian_values: np.ndarray
    integral_values: dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> PhaseState:
        return PhaseState.from_array(self.states[i])

    def final_state(self) -> PhaseState:
        return self.state(len(self) - 1)


def _hamilton_rhs(g: Metric2, y: np.ndarray) -> np.ndarray:
    """Hamilton's equations for H = 1/2 p g^{-1} p."""
    x, yy, px, py = y
    i11, i12, i22 = g.inverse_jets_at(x, yy)
    vx = i11.v * px + i12.v * py
    vy = i12.v * px + i22.v * py
    dpx = -0.5 * (i11.dx * px * px + 2.0 * i12.dx * px * py + i22.dx * py * py)
    dpy = -0.5 * (i11.dy * px * px + 2.0 * i12.dy * px * py + i22.dy * py * py)
    return np.array([vx, vy, dpx, dpy])


# Dormand-Prince 5(4) tableau (FSAL)
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                   -92097 / 339200, 187 / 2100, 1 / 40])


def integrate_geodesic(g: Metric2, s0: PhaseState, t_end: float,
                       tol: float = DEFAULT_INTEGRATOR_TOL,
                       integrals: dict[str, QuadraticForm] | None = None,
                       allow_null: bool = False,
                       max_steps: int = MAX_STEPS) -> Trajectory:
    """Integrate Hamilton's equations with an embedded RK 4/5 pair and PI
    step-size control, sampling at every accepted step."""
    integrals = integrals or {}
    if not g.chart.contains(s0.x, s0.y):
        raise ChartExit(0.0, s0)
    h0 = hamiltonian(g, s0)
    pscale = s0.px * s0.px + s0.py * s0.py
    if not allow_null and abs(h0) < 1e-12 * max(pscale, 1e-300):
        raise ValueError("initial covector is (numerically) null; "
                         "pass allow_null=True to integrate null geodesics")

    y = s0.as_array()
    t = 0.0
    ts = [0.0]
    ys = [y.copy()]
    k_first = _hamilton_rhs(g, y)
    # conservative initial step from the RHS magnitude
    h = min(abs(t_end), max(1e-6, 0.01 / (np.max(np.abs(k_first)) + 1.0)))
    direction = 1.0 if t_end >= 0.0 else -1.0
    h *= direction
    err_prev = 1.0
    steps = 0
    ks = np.empty((7, 4))
    ks[0] = k_first

    while (t_end - t) * direction > 0.0:
        if steps >= max_steps:
            raise StepFailure(f"exceeded {max_steps} steps")
        if (t + h - t_end) * direction > 0.0:
            h = t_end - t
        try:
            for i in range(1, 7):
                yi = y + h * sum(_DP_A[i][j] * ks[j] for j in range(i))
                ks[i] = _hamilton_rhs(g, yi)
        except (SingularMetric, ZeroDivisionError):
            h *= 0.5
            if abs(h) < 1e-14 * max(abs(t_end), 1.0):
                raise StepFailure("step size underflow near a metric singularity")
            continue
        y5 = y + h * (_DP_B5 @ ks)
        y4 = y + h * (_DP_B4 @ ks)
        scale = tol * (1.0 + np.abs(y5))
        err = math.sqrt(float(np.mean(((y5 - y4) / scale) ** 2)))
        if err <= 1.0:
            t += h
            y = y5
            if not g.chart.contains(y[0], y[1]):
                raise ChartExit(t, PhaseState.from_array(y),
                                _build_trajectory(g, ts, ys, integrals))
            ts.append(t)
            ys.append(y.copy())
            ks[0] = ks[6]  # FSAL
            fac = 0.9 * (err + 1e-16) ** -0.14 * (err_prev + 1e-16) ** 0.08
            err_prev = err
            steps += 1
        else:
            fac = max(0.2, 0.9 * err ** -0.2)
        h *= min(5.0, max(0.2, fac))
        if abs(h) < 1e-14 * max(abs(t_end), 1.0):
            raise StepFailure("step size underflow")
        if err > 1.0:
            ks[0] = _hamilton_rhs(g, y)

    return _build_trajectory(g, ts, ys, integrals)


def _build_trajectory(g, ts, ys, integrals):
    times = np.array(ts)
    states = np.array(ys)
    hs = np.array([hamiltonian(g, PhaseState.from_array(s)) for s in states])
    logs = {}
    for name, F in integrals.items():
        logs[name] = np.array([quadratic_value(F, PhaseState.from_array(s)) for s in states])
    return Trajectory(g, times, states, hs, logs)


def projective_residual(g: Metric2, traj: Trajectory) -> float:
    """Max over samples of |r ^ v| / |v|^3 where r = gamma'' + Gamma_g(v, v),
    gamma'' taken analytically from the generating metric's Hamiltonian flow.
    Zero iff the curve is an unparametrized geodesic of g."""
    gen = traj.metric
    worst = 0.0
    for i in range(len(traj)):
        x, y, px, py = traj.states[i]
        i11, i12, i22 = gen.inverse_jets_at(x, y)
        vx = i11.v * px + i12.v * py
        vy = i12.v * px + i22.v * py
        speed2 = vx * vx + vy * vy
        if speed2 < 1e-300:
            raise ZeroVelocity(f"zero velocity at sample {i}")
        dpx = -0.5 * (i11.dx * px * px + 2.0 * i12.dx * px * py + i22.dx * py * py)
        dpy = -0.5 * (i11.dy * px * px + 2.0 * i12.dy * px * py + i22.dy * py * py)
        # gamma''^k = d_i(g^{kl}) v^i p_l + g^{kl} p_l'
        ax = (i11.dx * vx + i11.dy * vy) * px + (i12.dx * vx + i12.dy * vy) * py \
            + i11.v * dpx + i12.v * dpy
        ay = (i12.dx * vx + i12.dy * vy) * px + (i22.dx * vx + i22.dy * vy) * py \
            + i12.v * dpx + i22.v * dpy
        gamma = christoffel_at(g, x, y)
        rx = ax + gamma[0, 0, 0] * vx * vx + 2.0 * gamma[0, 0, 1] * vx * vy + gamma[0, 1, 1] * vy * vy
        ry = ay + gamma[1, 0, 0] * vx * vx + 2.0 * gamma[1, 0, 1] * vx * vy + gamma[1, 1, 1] * vy * vy
        cross = abs(rx * vy - ry * vx)
        worst = max(worst, cross / speed2 ** 1.5)
    return worst


def export_trajectory(traj: Trajectory, path) -> None:
    """CSV with header t,x,y,px,py,H,F (F column omitted when no integral
    was registered, one column per registered integral otherwise)."""
    names = list(traj.integral_values)
    header = ["t", "x", "y", "px", "py", "H"] + (names if names else [])
    lines = [",".join(header)]
    for i in range(len(traj)):
        row = [traj.times[i], *traj.states[i], traj.hamiltonian_values[i]]
        row += [traj.integral_values[n][i] for n in names]
        lines.append(",".join(f"{v:.17g}" for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
