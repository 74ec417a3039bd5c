import cmath
import math

import mpmath as mp
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from qconnect import (
    BadLowerParameter,
    DivergentSeries,
    E_exp,
    OutsideRadius,
    PoleHit,
    QModulus,
    Spiral,
    SpiralProximity,
    TermLog,
    Truncation,
    TruncationExceeded,
    ZeroArgument,
    as_modulus,
    e_exp,
    qpochhammer_inf,
    qpochhammer_inf_shifted_pole,
    qpochhammer_n,
    rphis,
    theta,
    theta_product,
    theta_sum,
    theta_sum_with_condition,
)
from conftest import rel_err

mp.mp.dps = 40


def mp_qp(a, q, n=None):
    return complex(mp.qp(mp.mpc(a), mp.mpc(q), n))


def mp_theta(q, x):
    q, x = mp.mpc(q), mp.mpc(x)
    return complex(mp.qp(q, q) * mp.qp(-x, q) * mp.qp(-q / x, q))


annulus_points = st.builds(
    cmath.rect,
    st.floats(min_value=0.1, max_value=10.0),
    st.floats(min_value=-math.pi, max_value=math.pi),
)


class TestQModulus:
    def test_accepts_interior(self):
        qm = QModulus(0.5)
        assert qm.q == 0.5 + 0j
        assert qm.q2 == 0.25 + 0j
        assert abs(qm.p * qm.p - qm.q) <= 2e-16

    def test_complex_base(self):
        qm = QModulus(0.3 + 0.2j)
        assert abs(qm.q2) < abs(qm.q) < 1
        assert qm.sqrt().q == cmath.sqrt(0.3 + 0.2j)

    @pytest.mark.parametrize("bad", [0, 1, -1, 1.2, 2j, cmath.exp(0.4j)])
    def test_rejects_outside(self, bad):
        with pytest.raises(ValueError):
            QModulus(bad)

    def test_derived_base_objects(self):
        qm = QModulus(0.8)
        assert qm.squared().q == pytest.approx(0.64)
        assert qm.sqrt().q == pytest.approx(math.sqrt(0.8))

    def test_as_modulus_passthrough(self):
        qm = QModulus(0.4)
        assert as_modulus(qm) is qm
        assert as_modulus(0.4).q == qm.q


class TestTruncation:
    @pytest.mark.parametrize("kw", [{"eps": 0}, {"eps": -1e-3}, {"n_max": 0}, {"streak": 0}])
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            Truncation(**kw)

    def test_term_log_counts(self):
        log = TermLog()
        tr = Truncation(log=log)
        qpochhammer_inf(0.5, 0.5, tr)
        assert log.terms > 10


class TestSpiral:
    def test_contains_spiral_points(self, qmod):
        sp = Spiral(0.7 + 0.2j, qmod)
        for k in range(-6, 7):
            assert sp.contains((0.7 + 0.2j) * qmod.q**k)

    def test_rejects_off_spiral(self, qmod):
        sp = Spiral(0.7, qmod)
        assert not sp.contains(0.7 * qmod.q**2 * cmath.exp(0.3j))
        assert not sp.contains(0.7 * 1.01)

    def test_zero_anchor_rejected(self):
        with pytest.raises(ValueError):
            Spiral(0, as_modulus(0.5))

    def test_zero_point_far(self):
        assert not Spiral(1, as_modulus(0.5)).contains(0)

    def test_nearest_exponent(self):
        sp = Spiral(1, as_modulus(0.5))
        k, d = sp.nearest(0.5**-4 * 1.0000001)
        assert k == -4 and d < 1e-6


class TestQPochhammerN:
    def test_empty_product(self):
        assert qpochhammer_n(123 + 4j, 0.5, 0) == 1

    def test_vanishing_factor(self):
        # (1 - a q) = 0 at a=2, q=0.5
        assert qpochhammer_n(2, 0.5, 2) == 0

    def test_three_term_product(self):
        # (0.5)(0.75)(0.875)
        assert qpochhammer_n(0.5, 0.5, 3) == pytest.approx(0.328125, abs=0)

    @pytest.mark.parametrize("a", [0.3 - 0.8j, 2.5, -4])
    def test_matches_mpmath(self, qmod, a):
        assert rel_err(qpochhammer_n(a, qmod, 7), mp_qp(a, qmod.q, 7)) < 1e-13


class TestQPochhammerInf:
    def test_zero_argument(self, qmod):
        assert qpochhammer_inf(0, qmod) == 1

    def test_unit_argument(self, qmod):
        assert qpochhammer_inf(1, qmod) == 0

    def test_direct_product_oracle(self):
        # partial product with 200 factors; tail below 2^-200
        want = 1 + 0j
        for j in range(200):
            want *= 1 - 0.5 * 0.5**j
        assert rel_err(qpochhammer_inf(0.5, 0.5), want) < 1e-15

    def test_multi_argument_folds(self, qmod):
        single = qpochhammer_inf(0.3, qmod) * qpochhammer_inf(-0.4 + 0.1j, qmod)
        assert rel_err(qpochhammer_inf((0.3, -0.4 + 0.1j), qmod), single) < 1e-14

    def test_truncation_exceeded(self):
        with pytest.raises(TruncationExceeded):
            qpochhammer_inf(0.9, 0.99, Truncation(eps=1e-15, n_max=20))

    @pytest.mark.parametrize("a", [2 - 1j, -3.5, 0.9j])
    def test_matches_mpmath(self, qmod, a):
        assert rel_err(qpochhammer_inf(a, qmod), mp_qp(a, qmod.q)) < 1e-13

    def test_complex_base(self):
        qm = as_modulus(0.4 + 0.3j)
        assert rel_err(qpochhammer_inf(1.5 - 2j, qm), mp_qp(1.5 - 2j, qm.q)) < 1e-13


class TestShiftedPoleContinuation:
    def test_k_zero_reduces_to_reciprocal(self, qmod):
        lhs = qpochhammer_inf_shifted_pole(0.35, qmod, 0)
        assert rel_err(lhs, 1 / qpochhammer_inf(0.35, qmod)) < 1e-14

    @pytest.mark.parametrize("lam", [0.35, 2 * cmath.exp(0.7j)])
    @pytest.mark.parametrize("k", range(9))
    def test_matches_defining_product(self, qmod, lam, k):
        # the defining product still converges at lam q^-k
        direct = 1 / qpochhammer_inf(lam * qmod.q**-k, qmod)
        closed = qpochhammer_inf_shifted_pole(lam, qmod, k)
        assert rel_err(closed, direct) < 1e-10

    def test_rejects_lambda_on_spiral(self, qmod):
        with pytest.raises(SpiralProximity):
            qpochhammer_inf_shifted_pole(qmod.q**2, qmod, 3)
        with pytest.raises(SpiralProximity):
            qpochhammer_inf_shifted_pole(1.0, qmod, 1)

    def test_rejects_negative_k(self):
        with pytest.raises(ValueError):
            qpochhammer_inf_shifted_pole(0.3, 0.5, -1)


class TestTheta:
    def test_zero_argument_rejected(self, qmod):
        with pytest.raises(ZeroArgument):
            theta(qmod, 0)

    @pytest.mark.parametrize("k", range(-3, 5))
    def test_zero_spiral(self, qmod, k):
        # zeros exactly on -q^Z
        val = theta(qmod, -qmod.q**k)
        assert abs(val) < 1e-13

    def test_sum_equals_product(self, qmod):
        for x in (2 + 0.3j, -0.7 + 1.1j, 0.45, 3.9j):
            s, cond = theta_sum_with_condition(qmod, x)
            p = theta_product(qmod, x)
            assert rel_err(s, p) < 1e-12 * max(cond, 1.0)

    @settings(max_examples=40, deadline=None)
    @given(x=annulus_points)
    def test_sum_product_mutual_oracle(self, x):
        qm = as_modulus(0.5)
        assume(Spiral(-1, qm, 1e-3).distance(x) > 1e-3)
        s, cond = theta_sum_with_condition(qm, x)
        p = theta(qm, x)
        assert rel_err(s, p) < 1e-12 * max(cond, 1.0)

    def test_matches_mpmath(self, qmod):
        for x in (1.3 + 0.4j, -2.5 + 0.2j, 0.08 + 0.03j, 40 - 5j):
            assert rel_err(theta(qmod, x), mp_theta(qmod.q, x)) < 5e-13

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_shift_law(self, qmod, k):
        # theta(q^k x) = q^(-k(k-1)/2) x^-k theta(x), both sides by bilateral sum
        x = 1.3 + 0.4j
        lhs = theta_sum(qmod, qmod.q**k * x)
        rhs = qmod.q ** (-k * (k - 1) // 2) * x**-k * theta_sum(qmod, x)
        assert rel_err(lhs, rhs) < 1e-12

    def test_inversion(self, qmod):
        for x in (1.7 - 0.6j, 0.4 + 0.2j):
            assert rel_err(theta(qmod, 1 / x), theta(qmod, x) / x) < 1e-13

    def test_renormalized_far_values(self, qmod):
        # auto renormalization agrees with the direct bilateral sum
        for x in (30 + 7j, 0.011 - 0.004j):
            s, cond = theta_sum_with_condition(qmod, x)
            assert rel_err(theta(qmod, x), s) < 1e-11 * max(cond, 1.0)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            theta(0.5, 1.0, method="magic")


class TestRphis:
    def test_x_zero_is_one(self, qmod):
        assert rphis((0.3, -2), (0.7,), qmod, 0) == 1

    def test_2phi1_hand_expansion(self):
        # 2phi1(a,b;c;q,x): first four coefficients written out at
        # (a,b,c,q,x) = (-4, 3, 0.5, 0.5, 0.1)
        a, b, c, q, x = -4, 3, 0.5, 0.5, 0.1

        def coeff(n):
            num = den = 1.0
            for j in range(n):
                num *= (1 - a * q**j) * (1 - b * q**j)
                den *= (1 - c * q**j) * (1 - q ** (j + 1))
            return num / den

        partial = sum(coeff(n) * x**n for n in range(4))
        tail = sum(coeff(n) * x**n for n in range(4, 60))
        assert rel_err(rphis((a, b), (c,), 0.5, x), partial + tail) < 1e-14
        # the 4-term expansion already carries most of the value at x=0.1
        assert abs(tail) < 1e-2 * abs(partial)

    def test_1phi1_entire_brute_force(self):
        # 1phi1(0; q; q^2, q^2/x) at q=0.5, x=3
        q, x = 0.5, 3.0
        q2 = q * q
        total = 0.0
        for n in range(80):
            num = (-1) ** n * q2 ** (n * (n - 1) / 2)
            den = 1.0
            for j in range(n):
                den *= (1 - q * q2**j) * (1 - q2 ** (j + 1))
            total += num / den * (q2 / x) ** n
        got = rphis((0j,), (q,), as_modulus(q2), q2 / x)
        assert rel_err(got, total) < 1e-14

    @pytest.mark.parametrize(
        "up,low,x",
        [((0.5,), (2.25,), 4.0), ((), (3,), 0.5), ((1 + 1j,), (2, 3 + 0.5j), 3 + 4j)],
    )
    def test_matches_mpmath_qhyper(self, up, low, x):
        got = rphis(up, low, 0.25, x)
        want = complex(mp.qhyper(list(up), list(low), mp.mpf("0.25"), x))
        assert rel_err(got, want) < 1e-12

    def test_divergent_rejected(self, qmod):
        with pytest.raises(DivergentSeries):
            rphis((0.3, 0.4), (), qmod, 0.1)
        with pytest.raises(DivergentSeries):
            rphis((0j, 0j), (), qmod, -0.1)

    def test_terminating_divergent_allowed(self):
        # upper parameter q^-3 cuts the series at degree 3
        q = 0.5
        a = q**-3
        got = rphis((a, 2), (), as_modulus(q), 0.3)
        total = 0.0
        for n in range(4):
            num = 1.0
            den = 1.0
            for j in range(n):
                num *= (1 - a * q**j) * (1 - 2 * q**j)
                den *= 1 - q ** (j + 1)
            total += num / den * ((-1) ** n * q ** (n * (n - 1) / 2)) ** -1 * 0.3**n
        assert rel_err(got, total) < 1e-13

    def test_outside_radius(self, qmod):
        with pytest.raises(OutsideRadius):
            rphis((0.3, 0.4), (0.6,), qmod, 1.0)

    def test_bad_lower_parameter(self, qmod):
        with pytest.raises(BadLowerParameter):
            rphis((0.3,), (qmod.q**-2,), qmod, 0.1)
        with pytest.raises(BadLowerParameter):
            rphis((0.3,), (1.0,), qmod, 0.1)


class TestQExponentials:
    def test_at_zero(self, qmod):
        assert e_exp(qmod, 0) == 1
        assert E_exp(qmod, 0) == 1

    def test_product_oracle(self):
        got = e_exp(0.5, 0.3)
        assert rel_err(got, 1 / qpochhammer_inf(0.3, 0.5)) < 1e-14

    def test_reciprocal_pair(self):
        assert rel_err(e_exp(0.5, 0.3) * E_exp(0.5, -0.3), 1.0) < 1e-14

    @settings(max_examples=30, deadline=None)
    @given(
        x=st.builds(
            cmath.rect,
            st.floats(min_value=0.01, max_value=0.95),
            st.floats(min_value=-math.pi, max_value=math.pi),
        )
    )
    def test_reciprocal_pair_property(self, x):
        qm = as_modulus(0.5)
        assert rel_err(e_exp(qm, x) * E_exp(qm, -x), 1.0) < 1e-12

    def test_series_vs_product_modes(self, qmod):
        x = 0.6 * cmath.exp(0.9j)
        s = e_exp(qmod, x, mode="series")
        p = e_exp(qmod, x, mode="product")
        assert rel_err(s, p) < 1e-13

    def test_product_mode_beyond_disc(self, qmod):
        x = 3.7 * cmath.exp(0.4j)
        assert rel_err(e_exp(qmod, x), 1 / qpochhammer_inf(x, qmod)) < 1e-14

    def test_series_mode_outside_radius(self, qmod):
        with pytest.raises(OutsideRadius):
            e_exp(qmod, 1.2, mode="series")

    def test_pole_hit(self, qmod):
        with pytest.raises(PoleHit):
            e_exp(qmod, qmod.q**-2, mode="product")
        # mirror point on the negative half is fine
        e_exp(qmod, -(qmod.q**-2), mode="product")

    def test_E_entire_modes_agree(self, qmod):
        for x in (4.2 - 1.1j, 0.3 + 0.1j):
            s = E_exp(qmod, x, mode="series")
            p = E_exp(qmod, x, mode="product")
            # the series cancels internally far out; compare loosely there
            tol = 1e-13 if abs(x) <= 1 else 1e-9
            assert rel_err(s, p) < tol

    def test_inverse_base_coefficient_identity(self):
        # coefficient n of sum x^n/(q^-1;q^-1)_n equals coefficient n of
        # E_q(-qx), i.e. (-1)^n q^(n(n+1)/2)/(q;q)_n, for n <= 30
        q = 0.5
        poch_inv = 1.0  # (q^-1; q^-1)_n
        poch = 1.0  # (q; q)_n
        for n in range(31):
            if n:
                poch_inv *= 1 - q ** -n
                poch *= 1 - q**n
            lhs = 1 / poch_inv
            rhs = (-1) ** n * q ** (n * (n + 1) / 2) / poch
            assert rel_err(lhs, rhs) < 1e-13
