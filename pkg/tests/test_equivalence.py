import numpy as np
import pytest

import projeq as pq
from projeq.dynamics import hamiltonian_form
from projeq.equivalence import bracket_cubic_from_sys, sys_residuals
from projeq.errors import SignatureMismatch

UNIT = pq.Chart((-1.0, 1.0), (-1.0, 1.0), (5, 5))


class TestNullForm:
    def test_recognized(self):
        g = pq.Metric2.from_exprs("0", "1 + x/4", "0", UNIT)
        nf = pq.null_form_of(g)
        assert nf is not None
        assert nf.f(0.4, 0.0) == pytest.approx(2.0 * (1 + 0.1))

    def test_not_recognized(self):
        g = pq.Metric2.from_exprs("1", "0", "-1", UNIT)
        assert pq.null_form_of(g) is None


class TestProjectiveIntegralI:
    def test_equal_metrics(self):
        g = pq.Metric2.from_exprs("2 + x", "0", "3 - y", UNIT)
        xi = (0.7, -0.4)
        v = pq.projective_integral_I(g, g, 0.3, 0.2, xi)
        m, _, _ = g.values_at(0.3, 0.2)
        quad = m[0, 0] * xi[0] ** 2 + m[1, 1] * xi[1] ** 2
        assert v == pytest.approx(quad, rel=1e-12)

    def test_scaled_metric(self):
        # gbar = c g -> I = c^{-1/3} g(xi, xi)
        g = pq.Metric2.from_exprs("2 + x", "0", "3 - y", UNIT)
        gbar = g.scaled(5.0)
        xi = (0.7, -0.4)
        got = pq.projective_integral_I(g, gbar, 0.3, 0.2, xi)
        want = 5.0 ** (-1.0 / 3.0) * pq.projective_integral_I(g, g, 0.3, 0.2, xi)
        assert got == pytest.approx(want, rel=1e-12)

    def test_signature_mismatch_raises(self):
        g = pq.Metric2.from_exprs("1", "0", "1", UNIT)       # det > 0
        gbar = pq.Metric2.from_exprs("1", "0", "-1", UNIT)   # det < 0
        with pytest.raises(SignatureMismatch):
            pq.projective_integral_I(g, gbar, 0.0, 0.0, (1.0, 0.0))

    def test_liouville_closed_form(self):
        # I = -(X py^2 - Y px^2) / (X - Y) = -F for the sign '-' family
        chart = pq.Chart((-0.5, 0.5), (0.2, 0.9))
        pair = pq.generate(pq.LiouvilleSpec("3 + x^2/2", "y", "-", chart))
        rng = np.random.default_rng(7)
        for _ in range(100):
            s = pq.PhaseState(rng.uniform(-0.5, 0.5), rng.uniform(0.2, 0.9),
                              rng.uniform(-1, 1), rng.uniform(-1, 1))
            I = pq.projective_integral_momentum(pair.g, pair.gbar, s)
            F = pq.quadratic_value(pair.F, s)
            assert I == pytest.approx(-F, rel=1e-9, abs=1e-12)


class TestSysResiduals:
    def test_vanish_for_generated_integral(self):
        chart = pq.Chart((-0.4, 0.4), (-0.5, 0.5))
        pair = pq.generate(pq.JordanBlockSpec("3/2 + y/10", chart))
        nf = pq.null_form_of(pair.g)
        for x, y in chart.points():
            assert sys_residuals(nf.f, pair.F, x, y).max_normalized() < 1e-10

    def test_match_poisson_bracket(self):
        # the four residuals reassemble {H, F} exactly
        nf = pq.NullFormMetric.from_expr("2 + x/3 + y/5", UNIT)
        F = pq.QuadraticForm.from_exprs("1 + y^2", "x * y", "2 - x", UNIT)
        g = nf.to_metric2()
        rng = np.random.default_rng(3)
        for _ in range(20):
            x, y = rng.uniform(-0.9, 0.9, 2)
            px, py = rng.uniform(-1, 1, 2)
            res = sys_residuals(nf.f, F, x, y)
            want = pq.poisson_bracket(g, F, pq.PhaseState(x, y, px, py))
            got = bracket_cubic_from_sys(nf.f, res, x, y, px, py)
            assert got == pytest.approx(want, rel=1e-10, abs=1e-12)


class TestVerifyIntegral:
    def test_sys_and_bracket_agree(self):
        chart = pq.Chart((0.5, 1.5), (0.5, 1.2))
        pair = pq.generate(pq.ComplexLiouvilleSpec("z^2", chart))
        nf = pq.null_form_of(pair.g)
        r_sys = pq.verify_integral(nf, pair.F, method="sys")
        r_br = pq.verify_integral(nf, pair.F, method="bracket")
        assert r_sys.passed and r_br.passed
        assert abs(r_sys.max_residual - r_br.max_residual) < 1e-9

    def test_detects_non_integral(self):
        nf = pq.NullFormMetric.from_expr("2 + x/3", UNIT)
        F = pq.QuadraticForm.from_exprs("1 + y", "0", "1", UNIT)  # a_y != 0
        rep = pq.verify_integral(nf, F)
        assert not rep.passed
        assert rep.max_residual > 1e-4

    def test_general_metric_bracket_route(self):
        g = pq.Metric2.from_exprs("1", "0", "1", UNIT)
        F = pq.QuadraticForm.from_exprs("0", "0", "1", UNIT)  # py^2 Killing
        rep = pq.verify_integral(g, F)
        assert rep.method == "bracket"
        assert rep.passed


class TestTriviality:
    def test_scaled_hamiltonian_trivial(self):
        g = pq.Metric2.from_exprs("2 + x", "0", "3 - y", UNIT)
        res = pq.triviality_check(hamiltonian_form(g).scaled(3.0), g)
        assert res.trivial
        assert res.scale == pytest.approx(3.0)

    def test_constant_bf_trivial(self):
        # a = c = 0 and b = 5/f is 5/2 * (the lowered H): trivial
        nf = pq.NullFormMetric.from_expr("2 + x/3 + y/5", UNIT)
        F = pq.QuadraticForm(pq.ScalarField.constant(0.0),
                             5.0 / nf.f, pq.ScalarField.constant(0.0), UNIT)
        assert pq.triviality_check(F, nf.to_metric2()).trivial

    def test_generated_integral_nontrivial(self):
        chart = pq.Chart((-0.5, 0.5), (0.2, 0.9))
        pair = pq.generate(pq.LiouvilleSpec("3 + x^2/2", "y", "-", chart))
        assert not pq.triviality_check(pair.F, pair.g).trivial


class TestFitIntegralCombination:
    def test_recovers_alpha_beta(self):
        chart = pq.Chart((-0.5, 0.5), (0.2, 0.9))
        pair = pq.generate(pq.LiouvilleSpec("3 + x/4", "y", "-", chart))
        rng = np.random.default_rng(11)
        states = [pq.PhaseState(rng.uniform(-0.4, 0.4), rng.uniform(0.3, 0.8),
                                rng.uniform(-1, 1), rng.uniform(-1, 1))
                  for _ in range(20)]
        alpha, beta, resid, scale = pq.fit_integral_combination(
            pair.g, pair.gbar, pair.F, states)
        assert alpha == pytest.approx(-1.0, rel=1e-9)
        assert abs(beta) < 1e-9
        assert resid < 1e-9 * scale
