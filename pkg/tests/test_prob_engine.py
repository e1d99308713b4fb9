"""Unit and property tests for the exact probability machinery."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecoc.errors import ModelError
from ecoc.prob_engine import (
    ErrorProfile,
    ExchangeableModel,
    Independent,
    PairModel,
    bahadur_range,
    binomial_pmf,
    enumerate_outcomes,
    exchangeable_pmf,
    exchangeable_tail,
    pair_correlated_pmf,
    pair_correlated_tail,
    pair_f_range,
    poisson_binomial_pmf,
    tail_iid,
    tail_independent,
    valid_correlation_range,
)


def brute_independent(rates):
    """Primitive subset-sum oracle, independent of both the DP route and the
    vectorized enumeration."""
    n = len(rates)
    dist = [0.0] * (n + 1)
    for bits in itertools.product((0, 1), repeat=n):
        p = 1.0
        for b, e in zip(bits, rates):
            p *= e if b else 1.0 - e
        dist[sum(bits)] += p
    return dist


class TestPoissonBinomial:
    def test_three_rate_example(self):
        profile = ErrorProfile((0.1, 0.2, 0.3))
        assert poisson_binomial_pmf(profile, 0) == pytest.approx(0.504, abs=1e-12)
        assert poisson_binomial_pmf(profile, 1) == pytest.approx(0.398, abs=1e-12)

    def test_iid_collapse(self):
        profile = ErrorProfile.iid(7, 0.23)
        for k in range(8):
            assert poisson_binomial_pmf(profile, k) == pytest.approx(
                binomial_pmf(7, k, 0.23), abs=1e-14
            )

    def test_matches_primitive_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            n = int(rng.integers(1, 9))
            rates = tuple(rng.uniform(0, 1, n))
            ref = brute_independent(rates)
            profile = ErrorProfile(rates)
            for k in range(n + 1):
                assert poisson_binomial_pmf(profile, k) == pytest.approx(
                    ref[k], abs=1e-12
                )

    def test_k_out_of_range(self):
        with pytest.raises(ValueError):
            poisson_binomial_pmf(ErrorProfile((0.1,)), 2)

    @given(
        st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=12)
    )
    @settings(max_examples=60, deadline=None)
    def test_normalizes(self, rates):
        profile = ErrorProfile(tuple(rates))
        total = sum(poisson_binomial_pmf(profile, k) for k in range(profile.n + 1))
        assert total == pytest.approx(1.0, abs=1e-12)


class TestBinomial:
    def test_exact_values(self):
        assert binomial_pmf(4, 2, 0.5) == pytest.approx(0.375, abs=0)
        assert binomial_pmf(9, 0, 0.13) == pytest.approx(0.87**9, abs=1e-15)
        # Exact-rational oracle for the frozen literal.
        exact = Fraction(math.comb(10, 4)) * Fraction(1, 10) ** 4 * Fraction(9, 10) ** 6
        assert float(exact) == pytest.approx(0.011160261, abs=5e-10)
        assert binomial_pmf(10, 4, 0.1) == pytest.approx(float(exact), rel=1e-13)

    def test_log_space_regime_consistent(self):
        # n=60 crosses into the lgamma path; compare against exact rationals.
        exact = Fraction(math.comb(60, 7)) * Fraction(3, 100) ** 7 * Fraction(97, 100) ** 53
        assert binomial_pmf(60, 7, 0.03) == pytest.approx(float(exact), rel=1e-12)

    def test_degenerate_rates(self):
        assert binomial_pmf(5, 0, 0.0) == 1.0
        assert binomial_pmf(5, 3, 0.0) == 0.0
        assert binomial_pmf(5, 5, 1.0) == 1.0

    def test_argument_errors(self):
        with pytest.raises(ValueError):
            binomial_pmf(4, 5, 0.2)
        with pytest.raises(ValueError):
            binomial_pmf(4, 2, 1.2)


class TestIndependentTails:
    def test_degenerate_m_zero(self):
        assert tail_independent(ErrorProfile((0.4, 0.9)), 0) == 1.0
        assert tail_iid(6, 0, 0.3) == 1.0

    def test_product_case(self):
        assert tail_independent(ErrorProfile((0.1, 0.2)), 2) == pytest.approx(
            0.02, abs=1e-15
        )

    def test_brute_force_value(self):
        ref = sum(brute_independent([0.1] * 10)[4:])
        assert ref == pytest.approx(0.012795, abs=5e-7)
        assert tail_independent(ErrorProfile.iid(10, 0.1), 4) == pytest.approx(
            ref, abs=1e-12
        )
        assert tail_iid(10, 4, 0.1) == pytest.approx(ref, abs=1e-12)

    def test_iid_edge_cases(self):
        assert tail_iid(8, 1, 0.2) == pytest.approx(1 - 0.8**8, abs=1e-12)
        assert tail_iid(8, 3, 0.0) == 0.0

    def test_range_errors(self):
        with pytest.raises(ValueError):
            tail_iid(5, 6, 0.1)
        with pytest.raises(ValueError):
            tail_independent(ErrorProfile.iid(5, 0.1), -1)


class TestPairModel:
    def test_f_range(self):
        assert pair_f_range(0.3, 0.4) == (0.0, 0.3)
        assert pair_f_range(0.8, 0.7) == pytest.approx((0.5, 0.7))

    def test_invalid_f_rejected(self):
        with pytest.raises(ModelError):
            PairModel(ErrorProfile((0.1, 0.2)), 0.15)
        with pytest.raises(ModelError):
            PairModel(ErrorProfile((0.8, 0.9)), 0.5)

    def test_full_joint_case(self):
        # With n=2 the count-2 probability is the joint cell itself.
        model = PairModel(ErrorProfile((0.3, 0.4)), 0.12)
        assert pair_correlated_pmf(model, 2) == pytest.approx(0.12, abs=1e-15)

    def test_independence_collapse(self):
        rates = (0.15, 0.3, 0.2, 0.25)
        model = PairModel(ErrorProfile(rates), 0.2 * 0.25)
        profile = ErrorProfile(rates)
        for k in range(5):
            assert pair_correlated_pmf(model, k) == pytest.approx(
                poisson_binomial_pmf(profile, k), abs=1e-14
            )

    def test_heterogeneous_against_enumeration(self):
        model = PairModel(ErrorProfile((0.1, 0.1, 0.2, 0.2)), 0.03)
        ref = enumerate_outcomes(model)
        for k in range(5):
            assert pair_correlated_pmf(model, k) == pytest.approx(ref[k], abs=1e-12)

    @given(
        st.integers(min_value=2, max_value=8),
        st.floats(min_value=0.01, max_value=0.99),
    )
    @settings(max_examples=40, deadline=None)
    def test_matches_enumeration_iid(self, n, e):
        lo, hi = pair_f_range(e, e)
        for f in np.linspace(lo, hi, 4):
            model = PairModel(ErrorProfile.iid(n, e), float(f))
            ref = enumerate_outcomes(model)
            for k in range(n + 1):
                assert pair_correlated_pmf(model, k) == pytest.approx(
                    ref[k], abs=1e-11
                )


class TestPairTail:
    def test_independence_reduces_to_iid(self):
        for n, m, e in ((4, 2, 0.2), (8, 3, 0.1), (6, 6, 0.35)):
            assert pair_correlated_tail(n, m, e, e * e) == pytest.approx(
                tail_iid(n, m, e), abs=1e-13
            )

    def test_matches_pmf_route(self):
        model = PairModel(ErrorProfile.iid(4, 0.2), 0.05)
        expect = sum(pair_correlated_pmf(model, k) for k in (2, 3, 4))
        assert pair_correlated_tail(4, 2, 0.2, 0.05) == pytest.approx(
            expect, abs=1e-13
        )

    def test_all_errors_needs_joint(self):
        assert pair_correlated_tail(5, 5, 0.3, 0.0) == 0.0

    def test_invalid_f(self):
        with pytest.raises(ModelError):
            pair_correlated_tail(6, 3, 0.2, 0.3)

    def test_monotone_in_f_small_ebar(self):
        # Below (m-1)/(n-1) the tail is non-decreasing in the joint error
        # probability; above it the direction flips.
        n, m = 10, 4
        pivot = (m - 1) / (n - 1)
        for e in (0.05, 0.15, 0.25):
            fs = np.linspace(*pair_f_range(e, e), 12)
            vals = [pair_correlated_tail(n, m, e, float(f)) for f in fs]
            diffs = np.diff(vals)
            if e <= pivot:
                assert (diffs >= -1e-12).all()
            else:
                assert (diffs <= 1e-12).all()


class TestExchangeable:
    def test_zero_correlation_collapse(self):
        for k in range(7):
            assert exchangeable_pmf(6, k, 0.3, 0.0) == pytest.approx(
                binomial_pmf(6, k, 0.3), abs=1e-15
            )

    def test_hand_computed_value(self):
        # (1/8) * (1 + 2c * (k^2 - 3k + 1.5)) at k=0, c=0.1.
        assert exchangeable_pmf(3, 0, 0.5, 0.1) == pytest.approx(0.1625, abs=1e-14)

    def test_symmetric_distribution_example(self):
        ref = {0: 0.1625, 1: 0.3375, 2: 0.3375, 3: 0.1625}
        got = enumerate_outcomes(ExchangeableModel(3, 0.5, 0.1))
        for k, v in ref.items():
            assert got[k] == pytest.approx(v, abs=1e-13)

    def test_normalizes(self):
        for e in (0.1, 0.3, 0.5):
            lo, hi = valid_correlation_range(9, e)
            for c in np.linspace(lo, hi, 5):
                total = sum(exchangeable_pmf(9, k, e, float(c)) for k in range(10))
                assert total == pytest.approx(1.0, abs=1e-12)

    def test_tail_closed_form_equals_sum(self):
        n, m, e, c = 10, 4, 0.1, 0.05
        by_sum = sum(exchangeable_pmf(n, k, e, c) for k in range(m, n + 1))
        by_enum = sum(
            v for k, v in enumerate_outcomes(ExchangeableModel(n, e, c)).items()
            if k >= m
        )
        closed = exchangeable_tail(n, m, e, c)
        assert closed == pytest.approx(by_sum, abs=1e-12)
        assert closed == pytest.approx(by_enum, abs=1e-12)

    def test_tail_reduces_when_uncorrelated(self):
        assert exchangeable_tail(12, 5, 0.2, 0.0) == pytest.approx(
            tail_iid(12, 5, 0.2), abs=1e-14
        )

    def test_tail_pivot_rate_kills_correction(self):
        n, m = 10, 4
        e = (m - 1) / (n - 1)
        for c in (0.0, 0.05, 0.1):
            assert exchangeable_tail(n, m, e, c) == pytest.approx(
                tail_iid(n, m, e), abs=1e-14
            )

    def test_degenerate_rate_rejected(self):
        with pytest.raises(ModelError):
            ExchangeableModel(5, 0.0, 0.0)
        with pytest.raises(ModelError):
            exchangeable_pmf(5, 2, 1.0, 0.0)

    def test_invalid_correlation_rejected(self):
        # Inside the published lower range but induces a negative weight.
        with pytest.raises(ModelError):
            ExchangeableModel(3, 0.05, -1.0)


class TestBahadurRange:
    def test_symmetric_case(self):
        c_min, c_max = bahadur_range(3, 0.5)
        assert c_min == pytest.approx(-1 / 3, abs=1e-15)
        assert c_max == pytest.approx(1.0, abs=1e-15)

    def test_gamma_never_exceeds_quarter(self):
        for n in range(2, 13):
            for e in np.linspace(0.02, 0.98, 25):
                gamma = min((k - (n - 1) * e - 0.5) ** 2 for k in range(n + 1))
                assert gamma <= 0.25 + 1e-15

    def test_upper_end_keeps_weights_nonnegative(self):
        for n in range(2, 13):
            for e in (0.05, 0.15, 0.3, 0.5):
                _, c_max = bahadur_range(n, e)
                model = ExchangeableModel(n, e, c_max)  # must not raise
                total = sum(
                    exchangeable_pmf(n, k, e, c_max) for k in range(n + 1)
                )
                assert total == pytest.approx(1.0, abs=1e-10)
                assert model.c == c_max

    def test_valid_range_is_subset(self):
        for n in (3, 6, 10):
            for e in (0.05, 0.2, 0.5, 0.8):
                c_min, c_max = bahadur_range(n, e)
                v_min, v_max = valid_correlation_range(n, e)
                assert v_min >= c_min - 1e-15
                assert v_max == pytest.approx(c_max, abs=1e-15)

    def test_degenerate_rate(self):
        with pytest.raises(ModelError):
            bahadur_range(4, 0.0)


class TestEnumerationOracle:
    def test_fair_coins(self):
        got = enumerate_outcomes(Independent(ErrorProfile.iid(3, 0.5)))
        assert got == pytest.approx({0: 1 / 8, 1: 3 / 8, 2: 3 / 8, 3: 1 / 8})

    def test_against_primitive_loop(self):
        rates = (0.12, 0.5, 0.81, 0.33)
        ref = brute_independent(rates)
        got = enumerate_outcomes(Independent(ErrorProfile(rates)))
        for k in range(5):
            assert got[k] == pytest.approx(ref[k], abs=1e-14)

    def test_size_cap(self):
        with pytest.raises(ValueError):
            enumerate_outcomes(Independent(ErrorProfile.iid(21, 0.1)))


class TestNormalization:
    def test_every_model_and_route_sums_to_one(self):
        # Grid over n <= 12 and e in {0.05, ..., 0.5}; each route's full
        # distribution carries total mass 1 to 1e-12.
        for n in (2, 4, 8, 12):
            for e in np.arange(0.05, 0.501, 0.05):
                e = float(e)
                profile = ErrorProfile.iid(n, e)
                dp = sum(poisson_binomial_pmf(profile, k) for k in range(n + 1))
                assert dp == pytest.approx(1.0, abs=1e-12)
                for f in np.linspace(*pair_f_range(e, e), 3):
                    model = PairModel(profile, float(f))
                    rec = sum(pair_correlated_pmf(model, k) for k in range(n + 1))
                    oracle = sum(enumerate_outcomes(model).values())
                    assert rec == pytest.approx(1.0, abs=1e-12)
                    assert oracle == pytest.approx(1.0, abs=1e-12)
                lo, hi = valid_correlation_range(n, e)
                for c in np.linspace(lo + 1e-12, hi, 3):
                    c = float(c)
                    closed = exchangeable_tail(n, 1, e, c) + exchangeable_pmf(n, 0, e, c)
                    assert closed == pytest.approx(1.0, abs=1e-12)
                    oracle = sum(
                        enumerate_outcomes(ExchangeableModel(n, e, c)).values()
                    )
                    assert oracle == pytest.approx(1.0, abs=1e-12)


class TestDominanceAndMonotonicity:
    def test_single_rate_monotone(self):
        # Raising any one rate inside (0, k/n) raises the count-k mass.
        rng = np.random.default_rng(5)
        for _ in range(25):
            n = int(rng.integers(2, 10))
            k = int(rng.integers(1, n + 1))
            rates = list(rng.uniform(0.001, k / n - 1e-9, n))
            i = int(rng.integers(0, n))
            base = poisson_binomial_pmf(ErrorProfile(tuple(rates)), k)
            bumped = rates.copy()
            bumped[i] = min(bumped[i] + 1e-6, k / n - 1e-12)
            higher = poisson_binomial_pmf(ErrorProfile(tuple(bumped)), k)
            assert higher >= base - 1e-15

    def test_pmf_dominated_by_max_rate_binomial(self):
        rng = np.random.default_rng(6)
        for _ in range(40):
            n = int(rng.integers(2, 12))
            k = int(rng.integers(1, n))
            rates = tuple(rng.uniform(0.0, k / n, n))
            lhs = poisson_binomial_pmf(ErrorProfile(rates), k)
            rhs = binomial_pmf(n, k, max(rates))
            assert lhs <= rhs + 1e-12

    def test_tail_dominated_by_max_rate_tail(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            n = int(rng.integers(2, 12))
            m = int(rng.integers(1, n + 1))
            rates = tuple(rng.uniform(0.0, m / n, n))
            lhs = tail_independent(ErrorProfile(rates), m)
            rhs = tail_iid(n, m, max(rates))
            assert lhs <= rhs + 1e-12

    def test_pair_pmf_monotone_in_f_on_stated_interval(self):
        # The count-k mass grows with f for e below k/n - sqrt(k(n-k)/(n-1))/n
        # (k <= n-2), below 1 - 2/n (k = n-1), and everywhere (k = n).
        for n in (5, 8, 10):
            for k in range(1, n + 1):
                if k <= n - 2:
                    top = k / n - math.sqrt(k * (n - k) / (n - 1)) / n
                elif k == n - 1:
                    top = 1 - 2 / n
                else:
                    top = 1.0
                if top <= 0.0:
                    continue
                for e in np.linspace(0.01, top, 5):
                    e = float(e)
                    fs = np.linspace(*pair_f_range(e, e), 6)
                    vals = [
                        pair_correlated_pmf(PairModel(ErrorProfile.iid(n, e), float(f)), k)
                        for f in fs
                    ]
                    assert (np.diff(vals) >= -1e-12).all(), (n, k, e)

    def test_pair_tail_decay_bound(self):
        # tail <= lambda^(n-2) with the ratio shifted to (m-2)/(n-2).
        from ecoc.bounds import chernoff_lambda

        for n, m in ((8, 3), (10, 4), (16, 6)):
            r = (m - 2) / (n - 2)
            for e in np.linspace(0.01, r * 0.99, 8):
                e = float(e)
                for f in np.linspace(*pair_f_range(e, e), 5):
                    t = pair_correlated_tail(n, m, e, float(f))
                    assert t <= chernoff_lambda(r, e) ** (n - 2) + 1e-12
