"""Metrics on rectangular charts and the pointwise pair classification."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation, SingularMetric
from .expr import Jet2, parse
from .fields import ScalarField

DEFAULT_CLASSIFY_TOL = 1e-8


@dataclass(frozen=True)
class Chart:
    """Rectangular coordinate domain with its sampling grid."""

    x_range: tuple[float, float]
    y_range: tuple[float, float]
    grid: tuple[int, int] = (21, 21)

    def __post_init__(self):
        if not (self.x_range[1] > self.x_range[0] and self.y_range[1] > self.y_range[0]):
            raise InvariantViolation("chart ranges must be non-degenerate")
        if self.grid[0] < 2 or self.grid[1] < 2:
            raise InvariantViolation("chart grid must be at least 2x2")

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_range[0], self.x_range[1], self.grid[0])

    def ys(self) -> np.ndarray:
        return np.linspace(self.y_range[0], self.y_range[1], self.grid[1])

    def points(self):
        for x in self.xs():
            for y in self.ys():
                yield float(x), float(y)

    def contains(self, x: float, y: float, pad: float = 0.0) -> bool:
        return (self.x_range[0] - pad <= x <= self.x_range[1] + pad
                and self.y_range[0] - pad <= y <= self.y_range[1] + pad)

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x_range[0] + self.x_range[1]),
                0.5 * (self.y_range[0] + self.y_range[1]))


def _signature_of(m: np.ndarray, det: float) -> tuple[str, str]:
    if det > 0.0:
        return ("+", "+") if m[0, 0] + m[1, 1] > 0.0 else ("-", "-")
    return ("+", "-")


class Metric2:
    """Symmetric metric (g11, g12, g22) of scalar fields on a chart.

    Construction checks that the determinant is nonzero and the signature
    constant across the chart's grid.
    """

    def __init__(self, g11: ScalarField, g12: ScalarField, g22: ScalarField, chart: Chart):
        self.g11 = g11
        self.g12 = g12
        self.g22 = g22
        self.chart = chart
        self.signature = self._validate()

    @classmethod
    def from_exprs(cls, g11: str, g12: str, g22: str, chart: Chart) -> "Metric2":
        return cls(ScalarField.from_expr(parse(g11)),
                   ScalarField.from_expr(parse(g12)),
                   ScalarField.from_expr(parse(g22)), chart)

    @classmethod
    def null_form(cls, f: ScalarField, chart: Chart) -> "Metric2":
        """ds^2 = f dx dy, i.e. g11 = g22 = 0, g12 = f/2."""
        zero = ScalarField.constant(0.0)
        return cls(zero, f * 0.5, zero, chart)

    def _validate(self):
        sig = None
        for x, y in self.chart.points():
            m, det, s = self.values_at(x, y)
            norm2 = float(np.sum(m * m))
            if abs(det) < 1e-12 * max(norm2, 1e-300):
                raise SingularMetric(x, y, det)
            if sig is None:
                sig = s
            elif s != sig:
                raise InvariantViolation(
                    f"metric signature changes across the chart ({sig} vs {s})", (x, y))
        return sig

    # pointwise data -----------------------------------------------------------
    def values_at(self, x: float, y: float):
        a = self.g11(x, y)
        b = self.g12(x, y)
        c = self.g22(x, y)
        m = np.array([[a, b], [b, c]])
        det = a * c - b * b
        return m, det, _signature_of(m, det)

    def jets_at(self, x: float, y: float) -> tuple[Jet2, Jet2, Jet2]:
        return self.g11.jet(x, y), self.g12.jet(x, y), self.g22.jet(x, y)

    def inverse_jets_at(self, x: float, y: float) -> tuple[Jet2, Jet2, Jet2]:
        """Jets of (g^11, g^12, g^22)."""
        j11, j12, j22 = self.jets_at(x, y)
        det = j11 * j22 - j12 * j12
        if det.v == 0.0:
            raise SingularMetric(x, y, det.v)
        return j22 / det, -j12 / det, j11 / det

    def inverse_fields(self) -> tuple[ScalarField, ScalarField, ScalarField]:
        det = self.g11 * self.g22 - self.g12 * self.g12
        return self.g22 / det, -self.g12 / det, self.g11 / det

    def scaled(self, c: float) -> "Metric2":
        return Metric2(self.g11 * c, self.g12 * c, self.g22 * c, self.chart)


def metric_at(g: Metric2, x: float, y: float):
    """(2x2 matrix, det, signature) with a singularity check."""
    m, det, sig = g.values_at(x, y)
    norm2 = float(np.sum(m * m))
    if abs(det) < 1e-12 * max(norm2, 1e-300):
        raise SingularMetric(x, y, det)
    return m, det, sig


def christoffel_at(g: Metric2, x: float, y: float) -> np.ndarray:
    """Gamma[k][i][j] = 1/2 g^{kl} (d_i g_{lj} + d_j g_{li} - d_l g_{ij})."""
    j11, j12, j22 = g.jets_at(x, y)
    det = j11.v * j22.v - j12.v * j12.v
    norm2 = j11.v ** 2 + 2 * j12.v ** 2 + j22.v ** 2
    if abs(det) < 1e-12 * max(norm2, 1e-300):
        raise SingularMetric(x, y, det)
    ginv = np.array([[j22.v, -j12.v], [-j12.v, j11.v]]) / det
    # dg[l][i][j] = d_l g_{ij}
    dg = np.empty((2, 2, 2))
    dg[0] = [[j11.dx, j12.dx], [j12.dx, j22.dx]]
    dg[1] = [[j11.dy, j12.dy], [j12.dy, j22.dy]]
    gamma = np.zeros((2, 2, 2))
    for k in range(2):
        for i in range(2):
            for j in range(2):
                s = 0.0
                for l in range(2):
                    s += ginv[k, l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j])
                gamma[k, i, j] = 0.5 * s
    return gamma


def g_tensor_at(g: Metric2, gbar: Metric2, x: float, y: float) -> np.ndarray:
    """G^i_j = sum_alpha gbar_{j alpha} g^{i alpha}."""
    m, det, _ = metric_at(g, x, y)
    mbar, _, _ = metric_at(gbar, x, y)
    ginv = np.array([[m[1, 1], -m[0, 1]], [-m[0, 1], m[0, 0]]]) / det
    return ginv @ mbar


@dataclass(frozen=True)
class Classification:
    """Pointwise eigenstructure of the pair tensor G.

    tag: real_distinct | complex_pair | jordan_block | proportional | ambiguous
    """

    tag: str
    tolerance: float
    eigenvalues: tuple[float, ...] = field(default_factory=tuple)

    @property
    def values(self):
        return self.eigenvalues


def classify_at(G, tol: float = DEFAULT_CLASSIFY_TOL) -> Classification:
    """Classify a 2x2 matrix by its eigenstructure, with scale-relative
    tolerances.  Points too close to a case boundary come back 'ambiguous'."""
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    G = np.asarray(G, dtype=float)
    g11, g12, g21, g22 = G[0, 0], G[0, 1], G[1, 0], G[1, 1]
    scale = math.sqrt(g11 * g11 + g12 * g12 + g21 * g21 + g22 * g22)
    if scale == 0.0:
        return Classification("proportional", tol, (0.0,))
    tr = g11 + g22
    half = 0.5 * tr
    # deviation from a scalar multiple of the identity
    nil = math.sqrt((g11 - half) ** 2 + g12 * g12 + g21 * g21 + (g22 - half) ** 2)
    if nil <= tol * scale:
        return Classification("proportional", tol, (half,))
    # numerically stable discriminant of the characteristic polynomial
    disc = (g11 - g22) ** 2 + 4.0 * g12 * g21
    root = math.sqrt(abs(disc))
    if disc > 0.0 and root > tol * scale:
        lam = half + 0.5 * root
        mu = half - 0.5 * root
        return Classification("real_distinct", tol, (lam, mu))
    if disc < 0.0 and 0.5 * root > tol * scale:
        return Classification("complex_pair", tol, (half, 0.5 * root))
    if root <= tol * scale:
        return Classification("jordan_block", tol, (half,))
    return Classification("ambiguous", tol, (half,))


@dataclass
class PairClassification:
    summary: Classification
    fraction: float
    counts: dict
    per_point: list  # (x, y, Classification)

    @property
    def tag(self):
        return self.summary.tag


def classify_pair(g: Metric2, gbar: Metric2, tol: float = DEFAULT_CLASSIFY_TOL) -> PairClassification:
    """Classify at every grid point; report the modal case and the fraction
    of grid points agreeing with it."""
    per_point = []
    counts: Counter = Counter()
    rep = {}
    for x, y in g.chart.points():
        G = g_tensor_at(g, gbar, x, y)
        c = classify_at(G, tol)
        per_point.append((x, y, c))
        counts[c.tag] += 1
        rep.setdefault(c.tag, c)
    modal, n = counts.most_common(1)[0]
    total = sum(counts.values())
    return PairClassification(rep[modal], n / total, dict(counts), per_point)
