import math
from itertools import product

import mpmath as mp
import pytest

from bincoupling import (
    DomainError,
    lambda_n,
    log_tail_beta_integral,
    log_tail_exact,
    log_tail_exact_all,
    tail_beta_integral,
)
from bincoupling.binom_exact import log_big_int


def enumerate_tail(n: int, k: int) -> int:
    """Brute-force oracle: count coin-flip outcomes with >= k heads."""
    return sum(1 for flips in product((0, 1), repeat=n) if sum(flips) >= k)


class TestLogTailExact:
    def test_single_outcome(self):
        t = log_tail_exact(2, 2)
        assert t.numerator == 1
        assert math.exp(t.log_prob) == pytest.approx(0.25, rel=1e-14)

    def test_full_space(self):
        for n in (1, 7, 100):
            t = log_tail_exact(n, 0)
            assert t.numerator == 2 ** n
            assert t.log_prob == 0.0

    def test_against_enumeration(self):
        for n in (1, 2, 4, 7, 10):
            for k in range(n + 1):
                assert log_tail_exact(n, k).numerator == enumerate_tail(n, k)

    def test_example_n4_k3(self):
        t = log_tail_exact(4, 3)
        assert t.numerator == 5
        assert math.exp(t.log_prob) == pytest.approx(5 / 16, rel=1e-14)

    def test_batch_matches_single(self):
        n = 73
        batch = log_tail_exact_all(n)
        for k in (0, 1, 36, 37, 72, 73):
            single = log_tail_exact(n, k)
            assert batch[k].numerator == single.numerator
            assert batch[k].log_prob == single.log_prob

    def test_complement_identity_exact(self):
        for n in (5, 28, 129):
            batch = log_tail_exact_all(n)
            for k in range(1, n + 1):
                lower = 2 ** n - batch[k].numerator  # sum_{j<k} C(n,j)
                assert batch[k].numerator + lower == 2 ** n
                # symmetry: sum_{j>=k} = sum_{j<=n-k}
                assert batch[k].numerator == 2 ** n - batch[n - k + 1].numerator

    def test_monotone_decreasing(self):
        # numerators decrease strictly (exact); log_prob can tie in double
        # precision where neighbouring tails differ by less than 1 ulp
        batch = log_tail_exact_all(200)
        for a, b in zip(batch, batch[1:]):
            assert b.numerator < a.numerator
            assert b.log_prob <= a.log_prob

    def test_domain(self):
        with pytest.raises(DomainError):
            log_tail_exact(10, 11)
        with pytest.raises(DomainError):
            log_tail_exact(10, -1)
        with pytest.raises(DomainError):
            log_tail_exact(0, 0)

    def test_log_accuracy_against_mpmath(self):
        t = log_tail_exact(1000, 700)
        with mp.workdps(40):
            ref = float(mp.log(mp.mpf(t.numerator)) - 1000 * mp.log(2))
        assert t.log_prob == pytest.approx(ref, rel=1e-14)


class TestLogBigInt:
    def test_small(self):
        assert log_big_int(1) == 0.0
        assert log_big_int(2) == pytest.approx(math.log(2.0), rel=1e-15)

    def test_huge(self):
        m = 3 ** 5000
        with mp.workdps(40):
            ref = float(5000 * mp.log(3))
        assert log_big_int(m) == pytest.approx(ref, rel=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            log_big_int(0)


class TestBetaIntegral:
    def test_example_n4_k3(self):
        assert tail_beta_integral(4, 3) == pytest.approx(0.3125, rel=1e-8)

    def test_example_n2_k2(self):
        assert tail_beta_integral(2, 2) == pytest.approx(0.25, rel=1e-8)

    def test_matches_exact_n28_k20(self):
        exact = log_tail_exact(28, 20).log_prob
        assert tail_beta_integral(28, 20) == pytest.approx(
            math.exp(exact), rel=1e-8)

    def test_log_agreement_all_k_n28(self):
        batch = log_tail_exact_all(28)
        for k in range(1, 29):
            lb = log_tail_beta_integral(28, k)
            assert abs(lb - batch[k].log_prob) <= 1e-8 * max(
                1.0, abs(batch[k].log_prob))

    def test_domain(self):
        with pytest.raises(DomainError):
            log_tail_beta_integral(10, 0)
        with pytest.raises(DomainError):
            log_tail_beta_integral(5000, 10)


class TestLambdaN:
    def test_lambda_1(self):
        # log 1! = 0, so lambda_1 = 1 - log(2 pi)/2
        ref = 1.0 - 0.5 * math.log(2 * math.pi)
        assert lambda_n(1).lam == pytest.approx(ref, rel=1e-13)

    @pytest.mark.parametrize("n", [1, 2, 3, 10, 100, 1000, 4095, 4096])
    def test_bracket_exact_route(self, n):
        lam = lambda_n(n).lam
        assert 1.0 / (12 * n + 1) <= lam <= 1.0 / (12 * n)

    def test_bracket_instance_4096(self):
        lam = lambda_n(4096).lam
        assert 1.0 / 49153 <= lam <= 1.0 / 49152

    def test_series_route_continuity(self):
        # exact route at 4096 and series route at 4097 must line up
        gap = lambda_n(4096).lam - lambda_n(4097).lam
        assert 0.0 < gap < 1e-8

    @pytest.mark.parametrize("n", [5000, 10 ** 6])
    def test_bracket_series_route(self, n):
        lam = lambda_n(n).lam
        assert 1.0 / (12 * n + 1) <= lam <= 1.0 / (12 * n)

    def test_domain(self):
        with pytest.raises(DomainError):
            lambda_n(0)
