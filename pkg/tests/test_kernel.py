import math

import numpy as np
import pytest

import viscorod as vr
from viscorod.errors import DomainError, PoleProximityError

from reference import mp_M


def random_cut_plane_points(rng, n):
    """Random points of the cut plane, biased over many magnitude scales."""
    mag = 10.0 ** rng.uniform(-6, 6, n)
    arg = rng.uniform(-math.pi * 0.999, math.pi * 0.999, n)
    return mag * np.exp(1j * arg)


class TestMaterialParams:
    def test_accepts_hooke_limit(self):
        p = vr.MaterialParams(0.1, 0.1)
        assert p.hooke

    @pytest.mark.parametrize("a,b", [(0.0, 0.5), (-0.1, 0.5), (0.5, 0.045),
                                     (float("nan"), 1.0), (1.0, float("inf"))])
    def test_rejects_bad_bases(self, a, b):
        with pytest.raises(ValueError):
            vr.MaterialParams(a, b)


class TestCutPlanePoint:
    def test_from_complex_rejects_negative_axis(self):
        with pytest.raises(DomainError):
            vr.CutPlanePoint.from_complex(-2.0 + 0.0j)
        with pytest.raises(DomainError):
            vr.CutPlanePoint.from_complex(0.0j)

    def test_cut_flags(self):
        up = vr.CutPlanePoint.upper_cut(3.0)
        lo = vr.CutPlanePoint.lower_cut(3.0)
        assert up.argument == math.pi and lo.argument == -math.pi
        assert up.to_complex() == -3.0 + 0.0j
        with pytest.raises(DomainError):
            vr.CutPlanePoint(1.0, math.pi)  # unflagged negative axis
        with pytest.raises(DomainError):
            vr.CutPlanePoint(1.0, math.pi, on_upper_cut=True, on_lower_cut=True)
        with pytest.raises(DomainError):
            vr.CutPlanePoint(1.0, 0.5, on_upper_cut=True)

    def test_roundtrip(self, rng):
        for s in random_cut_plane_points(rng, 20):
            pt = vr.CutPlanePoint.from_complex(s)
            assert abs(pt.to_complex() - s) <= 1e-15 * abs(s)


class TestKernelM:
    def test_value_at_one(self, paper_params):
        # frozen: mpmath evaluation of the defining formula at s = 1
        got = vr.eval_M(1.0 + 0.0j, paper_params)
        assert got == pytest.approx(0.65338932323234085, rel=1e-14)
        assert got.imag == 0.0

    def test_frozen_complex_values(self, paper_params):
        # frozen from 30-digit mpmath arithmetic
        cases = [
            (1.7 + 2.3j, complex(0.59408217978324255, -0.053424040790450999)),
            (0.02 - 0.15j, complex(0.75438573895266187, 0.060025659221523995)),
        ]
        for s, want in cases:
            assert vr.eval_M(s, paper_params) == pytest.approx(want, rel=1e-13)

    def test_matches_mp_at_random_points(self, paper_params, rng):
        for s in random_cut_plane_points(rng, 25):
            want = complex(mp_M(complex(s), paper_params.a, paper_params.b))
            assert vr.eval_M(complex(s), paper_params) == pytest.approx(want, rel=1e-12)

    def test_hooke_limit_exact(self, rng):
        p = vr.MaterialParams(0.37, 0.37)
        s = random_cut_plane_points(rng, 1000)
        assert np.all(vr.eval_M(s, p) == 1.0)

    def test_limits_small_and_large(self, paper_params):
        # Convergence toward both limits is logarithmic in |s| (the kernel's
        # logs dominate), so only modest closeness is reachable in float
        # range; the approach itself must be monotone.
        e_small = abs(vr.eval_M(1e-300 + 0j, paper_params) - 1.0)
        e_small_2 = abs(vr.eval_M(1e-100 + 0j, paper_params) - 1.0)
        assert e_small < 2e-3
        assert e_small < e_small_2 < 6e-3
        lim = math.sqrt(paper_params.a / paper_params.b)
        e_big = abs(vr.eval_M(1e12 + 0j, paper_params) - lim)
        e_big_2 = abs(vr.eval_M(1e300 + 0j, paper_params) - lim)
        assert e_big < 2e-2
        assert e_big_2 < e_big

    def test_conjugate_symmetry(self, paper_params, rng):
        s = random_cut_plane_points(rng, 200)
        up = vr.eval_M(s, paper_params)
        dn = vr.eval_M(np.conj(s), paper_params)
        np.testing.assert_allclose(dn, np.conj(up), rtol=1e-14, atol=0.0)

    def test_cut_sides_conjugate(self, paper_params):
        for q in (1e-4, 0.3, 2.0, 1 / 0.045, 900.0):
            up = vr.eval_M(vr.CutPlanePoint.upper_cut(q), paper_params)
            lo = vr.eval_M(vr.CutPlanePoint.lower_cut(q), paper_params)
            assert lo == pytest.approx(np.conj(up), rel=1e-14)

    def test_removable_points(self, paper_params):
        a, b = paper_params.a, paper_params.b
        # finite limits at s = 1/a and s = 1/b from the series continuation
        m2_a = vr.eval_M(1.0 / a + 0.0j, paper_params) ** 2
        assert m2_a == pytest.approx(math.log(b / a) / (b / a - 1.0), rel=1e-12)
        m2_b = vr.eval_M(1.0 / b + 0.0j, paper_params) ** 2
        assert m2_b == pytest.approx((a / b - 1.0) / math.log(a / b), rel=1e-12)
        # continuity: values at eps and 10 eps from the point differ by O(eps)
        for s0 in (1.0 / a, 1.0 / b):
            for eps in (1e-7, 1e-9):
                d = abs(vr.eval_M(s0 + eps + 0j, paper_params)
                        - vr.eval_M(s0 + 10 * eps + 0j, paper_params))
                assert d < 20.0 * eps

    def test_series_switchover_is_seamless(self, paper_params):
        # both sides of the series-radius boundary must match the
        # high-precision direct evaluation
        a = paper_params.a
        for s in ((1.0 + 0.99e-4) / a, (1.0 + 1.01e-4) / a):
            want = complex(mp_M(s, paper_params.a, paper_params.b))
            assert vr.eval_M(s + 0j, paper_params) == pytest.approx(want, rel=1e-11)

    def test_domain_errors(self, paper_params):
        with pytest.raises(DomainError):
            vr.eval_M(0.0j, paper_params)
        with pytest.raises(DomainError):
            vr.eval_M(-1.0 + 0.0j, paper_params)
        with pytest.raises(DomainError):
            vr.eval_M(np.array([1.0 + 1j, -2.0 + 0j]), paper_params)


class TestKernelAsymptotic:
    def test_hooke_is_one(self):
        p = vr.MaterialParams(0.2, 0.2)
        assert vr.eval_M_asymptotic(1.0, 1e7, +1, p) == pytest.approx(1.0, rel=1e-12)

    def test_conjugate_pair(self, paper_params):
        up = vr.eval_M_asymptotic(1.0, 1e6, +1, paper_params)
        dn = vr.eval_M_asymptotic(1.0, 1e6, -1, paper_params)
        assert dn == pytest.approx(np.conj(up), rel=1e-14)

    def test_against_eval_M(self, paper_params):
        for R, tol in ((1e6, 1e-2), (1e8, 5e-3)):
            direct = vr.eval_M(complex(1.0, R), paper_params)
            asym = vr.eval_M_asymptotic(1.0, R, +1, paper_params)
            assert abs(direct - asym) / abs(direct) < tol
        # error shrinks with R
        e6 = abs(vr.eval_M(complex(1.0, 1e6), paper_params)
                 - vr.eval_M_asymptotic(1.0, 1e6, +1, paper_params))
        e8 = abs(vr.eval_M(complex(1.0, 1e8), paper_params)
                 - vr.eval_M_asymptotic(1.0, 1e8, +1, paper_params))
        assert e8 < e6

    def test_sign_validation(self, paper_params):
        with pytest.raises(ValueError):
            vr.eval_M_asymptotic(1.0, 1e6, 0, paper_params)


class TestTransferFunctions:
    def test_P_at_endpoints(self, paper_params, rng):
        for s in random_cut_plane_points(rng, 30):
            assert vr.eval_P_tilde(1.0, complex(s), paper_params).value == 1.0 + 0.0j
            assert vr.eval_P_tilde(0.0, complex(s), paper_params).value == 0.0 + 0.0j

    def test_P_frozen_value(self, paper_params):
        s = 2.0 * np.exp(1j * math.pi / 4)
        got = vr.eval_P_tilde(0.5, complex(s), paper_params).value
        assert got == pytest.approx(
            complex(0.47305125539038479, -0.087865657080463663), rel=1e-13)

    def test_P_bounded_on_big_rays(self, paper_params):
        # uniform bound on the closed right half plane at large |s|
        for theta in np.linspace(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3, 11):
            for mag in (1e3, 1e6, 1e9):
                s = mag * complex(math.cos(theta), math.sin(theta))
                for x in (0.1, 0.6, 0.97):
                    assert abs(vr.eval_P_tilde(x, s, paper_params).value) <= 3.0

    def test_T_hooke_forms(self):
        p = vr.MaterialParams(0.2, 0.2)
        for s in (0.7, 2.0, 9.0):
            t0 = vr.eval_T_tilde(0.0, complex(s), p).value
            assert t0 == pytest.approx(1.0 / math.sinh(s), rel=1e-13)
            t1 = vr.eval_T_tilde(1.0, complex(s), p).value
            assert t1 == pytest.approx(1.0 / math.tanh(s), rel=1e-13)

    def test_T_frozen_value(self, paper_params):
        got = vr.eval_T_tilde(0.25, 1.0 + 1.0j, paper_params).value
        assert got == pytest.approx(
            complex(1.2489437543763043, -1.1724766664943595), rel=1e-13)

    def test_conjugate_symmetry(self, paper_params, rng):
        for s in random_cut_plane_points(rng, 40):
            up = vr.eval_P_tilde(0.4, complex(s), paper_params).value
            dn = vr.eval_P_tilde(0.4, complex(np.conj(s)), paper_params).value
            assert dn == pytest.approx(np.conj(up), rel=1e-13)
            ut = vr.eval_T_tilde(0.4, complex(s), paper_params).value
            dt = vr.eval_T_tilde(0.4, complex(np.conj(s)), paper_params).value
            assert dt == pytest.approx(np.conj(ut), rel=1e-13)

    def test_x_validation(self, paper_params):
        with pytest.raises(ValueError):
            vr.eval_P_tilde(1.5, 1.0 + 1j, paper_params)

    def test_pole_proximity_raises(self, paper_params, paper_poles):
        s1 = paper_poles.pole(1).location
        with pytest.raises(PoleProximityError):
            vr.eval_P_tilde(0.5, s1 + 1e-11, paper_params)

    def test_condition_estimate_scales(self, paper_params, paper_poles):
        s1 = paper_poles.pole(1).location
        near = vr.eval_P_tilde(0.5, s1 + 1e-6, paper_params)
        far = vr.eval_P_tilde(0.5, 3.0 + 3.0j, paper_params)
        assert near.condition_estimate > 1e5
        assert far.condition_estimate < 1e2
        assert np.isfinite(far.value).all()

    def test_cancellation_safe_large_sM(self, paper_params):
        # naive sinh ratio overflows near |s M| ~ 700; the factored form must not
        s = 1e4 + 5e3j
        v = vr.eval_P_tilde(0.3, s, paper_params).value
        assert np.isfinite(v.real) and np.isfinite(v.imag)
        assert abs(v) <= 3.0
