import math

import numpy as np
import pytest

import viscorod as vr
from viscorod.errors import QuadratureError
from viscorod.quadrature import Q_FLOOR

from reference import mp_cut_integrand_P, mp_cut_integrand_T, mp_quad_cut_P

CFG = vr.QuadratureConfig()


class TestIntegrateCut:
    def test_zero_integrand(self):
        r = vr.integrate_cut(lambda q: np.zeros_like(q), "exp", 1.0, CFG)
        assert r.value == 0.0 and r.error_estimate == 0.0

    def test_exponential_stub(self):
        # int_0^inf e^{-q} e^{-q t} dq = 1/(1+t)
        r = vr.integrate_cut(lambda q: np.exp(-q), "exp", 1.0, CFG)
        assert r.value == pytest.approx(0.5, rel=1e-9)
        assert r.evaluations > 0

    def test_frullani_weight(self):
        # int_0^inf e^{-q} (1-e^{-q t})/q dq = ln(1+t)
        for t in (0.5, 3.0):
            r = vr.integrate_cut(lambda q: np.exp(-q), "one_minus_exp_over_q", t, CFG)
            assert r.value == pytest.approx(math.log(1.0 + t), rel=1e-9)

    def test_weight_validation(self):
        with pytest.raises(ValueError):
            vr.integrate_cut(lambda q: q, "bogus", 1.0, CFG)
        with pytest.raises(ValueError):
            vr.integrate_cut(lambda q: q, "exp", -1.0, CFG)
        with pytest.raises(ValueError):
            vr.integrate_cut(lambda q: q, "exp", 1.0, CFG, q_min=0.0)

    def test_nan_integrand_raises(self):
        with pytest.raises(QuadratureError):
            vr.integrate_cut(lambda q: np.full_like(q, np.nan), "exp", 1.0, CFG)

    def test_tolerance_not_met_raises(self):
        # a spike of width 1e-4 at q = 3 that the initial panels cannot see
        spike = lambda q: 1.0 / (1.0 + 1e8 * (q - 3.0) ** 2)
        tight = vr.QuadratureConfig(q_max=1000.0, rel_tol=1e-12, abs_tol=1e-14,
                                    max_subdivisions=2)
        with pytest.raises(QuadratureError):
            vr.integrate_cut(spike, "one", 0.0, tight)

    def test_adaptive_resolves_spike(self):
        # same spike, enough subdivisions: compare to the arctan closed form
        w = 1e-4
        spike = lambda q: 1.0 / (1.0 + (q - 3.0) ** 2 / w**2)
        exact = w * (math.atan(997.0 / w) + math.atan(3.0 / w))
        r = vr.integrate_cut(spike, "one", 0.0, vr.QuadratureConfig(
            q_max=1000.0, rel_tol=1e-9, abs_tol=1e-14, max_subdivisions=2000))
        assert r.value == pytest.approx(exact, rel=1e-8)
        assert abs(r.value - exact) <= 10.0 * max(r.error_estimate, 1e-15)

    def test_tightening_rel_tol_tightens_error(self):
        # Gauss-Kronrod refinement converges in steps, so pairwise halving
        # is not observable; the stronger property is that every requested
        # tolerance is honored against the closed form, all the way down
        w = 1e-3
        spike = lambda q: 1.0 / (1.0 + (q - 3.0) ** 2 / w**2)
        exact = w * (math.atan(997.0 / w) + math.atan(3.0 / w))
        prev = float("inf")
        for rel in (1e-2, 1e-3, 1e-4, 1e-6, 1e-8):
            r = vr.integrate_cut(spike, "one", 0.0, vr.QuadratureConfig(
                q_max=1000.0, rel_tol=rel, abs_tol=1e-300, max_subdivisions=4000))
            err = abs(r.value - exact)
            assert err <= rel * abs(exact)
            assert err <= prev + 1e-15
            prev = err

    def test_truncation_estimate_bounds_tail(self):
        small = vr.QuadratureConfig(q_max=5.0, rel_tol=1e-10, abs_tol=1e-14,
                                    max_subdivisions=400)
        r = vr.integrate_cut(lambda q: np.exp(-q), "exp", 1.0, small,
                             decay_hint=1.0)
        actual_tail = math.exp(-10.0) / 2.0
        assert r.truncation_estimate >= 0.99 * actual_tail
        assert r.truncation_estimate <= 10.0 * actual_tail


class TestCutIntegrands:
    def test_hooke_vanishes(self):
        p = vr.MaterialParams(0.1, 0.1)
        q = np.geomspace(1e-6, 900.0, 40)
        np.testing.assert_array_equal(vr.cut_integrand_P(0.5, q, p), 0.0)
        np.testing.assert_array_equal(vr.cut_integrand_T(0.5, q, p), 0.0)

    def test_x_one_vanishes_P(self, paper_params):
        q = np.geomspace(1e-6, 900.0, 40)
        np.testing.assert_allclose(vr.cut_integrand_P(1.0, q, paper_params),
                                   0.0, atol=1e-15)

    def test_against_mp(self, paper_params):
        for q in (1e-3, 0.7, 1.0, 3.0, 40.0):
            got = float(vr.cut_integrand_P(0.5, np.array([q]), paper_params)[0])
            want = mp_cut_integrand_P(0.5, q, 0.045, 0.5)
            assert got == pytest.approx(want, rel=1e-11, abs=1e-16)
            got_t = float(vr.cut_integrand_T(0.25, np.array([q]), paper_params)[0])
            want_t = mp_cut_integrand_T(0.25, q, 0.045, 0.5)
            assert got_t == pytest.approx(want_t, rel=1e-11, abs=1e-16)

    def test_two_sided_difference_P(self, paper_params):
        # the real integrand equals the (lower - upper) boundary-value jump
        # of the displacement transfer divided by 2 pi i
        for q, x in ((1.0, 0.5), (0.2, 0.3), (12.0, 0.8)):
            up = vr.eval_P_tilde(x, vr.CutPlanePoint.upper_cut(q), paper_params).value
            lo = vr.eval_P_tilde(x, vr.CutPlanePoint.lower_cut(q), paper_params).value
            jump = (lo - up) / (2j * math.pi)
            assert abs(jump.imag) < 1e-15
            got = float(vr.cut_integrand_P(x, np.array([q]), paper_params)[0])
            assert got == pytest.approx(jump.real, rel=1e-12, abs=1e-18)

    def test_two_sided_difference_T(self, paper_params):
        # display integrand is (upper - lower)/(2 pi i) of
        # cosh(x q M)/(M sinh(q M)), which is minus the transfer's own
        # boundary value at q e^{+/- i pi}
        for q, x in ((1.0, 0.25), (0.05, 0.0), (7.0, 0.6)):
            up_disp = -vr.eval_T_tilde(x, vr.CutPlanePoint.upper_cut(q), paper_params).value
            lo_disp = -vr.eval_T_tilde(x, vr.CutPlanePoint.lower_cut(q), paper_params).value
            jump = (up_disp - lo_disp) / (2j * math.pi)
            assert abs(jump.imag) < 1e-14
            got = float(vr.cut_integrand_T(x, np.array([q]), paper_params)[0])
            assert got == pytest.approx(jump.real, rel=1e-12, abs=1e-18)

    def test_T_integrand_decays(self, paper_params):
        assert abs(float(vr.cut_integrand_T(0.0, np.array([3000.0]), paper_params)[0])) < 1e-10

    def test_small_q_mass_closed_form(self, paper_params):
        # closed-form mass over (d1, d2] must match direct quadrature of the
        # integrand between the same endpoints (e^{-q t} ~ 1 there)
        d1, d2 = 1e-10, 1e-6
        want = (vr.stress_cut_small_q_mass(d2, paper_params)
                - vr.stress_cut_small_q_mass(d1, paper_params))
        cfg = vr.QuadratureConfig(q_max=d2, rel_tol=1e-11, abs_tol=1e-16,
                                  max_subdivisions=800)
        got = vr.integrate_cut(lambda q: vr.cut_integrand_T(0.4, q, paper_params),
                               "one", 0.0, cfg, q_min=d1)
        assert got.value == pytest.approx(want, rel=1e-5)

    def test_small_q_mass_hooke(self):
        assert vr.stress_cut_small_q_mass(1e-10, vr.MaterialParams(0.2, 0.2)) == 0.0


class TestWeightIdentity:
    def test_fubini_consistency(self):
        # the time-integrated weight equals the time integral of the plain
        # weight on a smooth stub integrand
        f = lambda q: np.exp(-q) / (1.0 + q)
        t = 2.0
        lhs = vr.integrate_cut(f, "one_minus_exp_over_q", t, CFG).value
        nodes, weights = np.polynomial.legendre.leggauss(64)
        taus = 0.5 * t * (nodes + 1.0)
        vals = [vr.integrate_cut(f, "exp", float(tau), CFG).value for tau in taus]
        rhs = 0.5 * t * float(np.dot(weights, vals))
        assert lhs == pytest.approx(rhs, rel=1e-9)


class TestFieldLevelQuadrature:
    def test_qmax_doubling_negligible(self, paper_params, paper_poles):
        # truncation adequacy of the default cut at the reference parameters
        for x, t in ((0.3, 1.0), (0.75, 5.0)):
            v1 = vr.compute_u_H(x, t, 1.0, paper_params, paper_poles,
                                vr.SolverConfig(q_max=1000.0)).value
            v2 = vr.compute_u_H(x, t, 1.0, paper_params, paper_poles,
                                vr.SolverConfig(q_max=2000.0)).value
            assert abs(v1 - v2) / abs(v1) < 1e-6

    def test_cut_part_matches_oracle_minus_modes(self, paper_params, paper_poles):
        # default truncation on the displacement cut integrand: the cut part
        # must equal the independently inverted kernel minus the mode sum
        sample = vr.compute_P(0.25, 1.0, paper_params, paper_poles, vr.SolverConfig())
        oracle = vr.invert(
            lambda s: np.asarray(vr.eval_P_tilde(0.25, s, paper_params).value),
            1.0, vr.OracleConfig(nodes=60))
        assert sample.cut_part == pytest.approx(oracle.value - sample.residue_part,
                                                abs=5e-7 + 10 * oracle.error_estimate)

    def test_mp_quadrature_cross_check(self, paper_params):
        got = vr.integrate_cut(
            lambda q: vr.cut_integrand_P(0.3, q, paper_params), "exp", 1.2,
            CFG, q_min=Q_FLOOR, edge_markers=(2.0, 1 / 0.045))
        want = mp_quad_cut_P(0.3, 1.2, 0.045, 0.5, Q_FLOOR, 1000.0)
        assert got.value == pytest.approx(want, rel=1e-8)
