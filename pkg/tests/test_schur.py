from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from unigap.errors import RefusalError, ValidationError
from unigap.partitions import Partition, SkewShape, partitions_of
from unigap.schur import (
    char_eval,
    dim_schur,
    skew_count,
    ssyt_brute,
    weyl_dimension_product,
)


def sub_partitions(lam, max_parts=None):
    """All partitions contained in lam, optionally with a part-count cap."""
    cap = len(lam) if max_parts is None else min(len(lam), max_parts)

    def rec(i, prev):
        if i == cap:
            yield ()
            return
        hi = min(lam.part(i + 1), prev)
        for v in range(hi, -1, -1):
            for rest in rec(i + 1, v):
                yield (v,) + rest

    for parts in rec(0, lam.part(1) if lam.parts else 0):
        yield Partition(parts)


@st.composite
def partitions(draw, max_weight=8, max_parts=6):
    w = draw(st.integers(min_value=0, max_value=max_weight))
    opts = list(partitions_of(w, w, max_parts))
    return Partition(draw(st.sampled_from(opts)))


def test_dim_defining_is_n():
    for n in range(1, 9):
        assert dim_schur(Partition([1]), n) == n


def test_dim_frozen_values():
    # brute-force tableau counts frozen as oracles
    assert dim_schur(Partition([2, 1]), 3) == 8
    assert dim_schur(Partition([1, 1, 1]), 2) == 0
    assert dim_schur(Partition(), 5) == 1
    assert dim_schur(Partition([2]), 2) == 3
    assert ssyt_brute(SkewShape(Partition([2, 1])), 3) == 8
    assert ssyt_brute(SkewShape(Partition([2])), 2) == 3
    assert ssyt_brute(SkewShape(Partition([1])), 0) == 0


def test_dim_matches_brute_exhaustive():
    for w in range(0, 9):
        for parts in partitions_of(w, w, 8):
            lam = Partition(parts)
            for m in range(0, 6):
                assert dim_schur(lam, m) == ssyt_brute(SkewShape(lam), m), (lam, m)


def test_dim_matches_pairwise_weyl_product():
    for w in range(0, 9):
        for parts in partitions_of(w, w, 8):
            for m in range(0, 7):
                assert dim_schur(Partition(parts), m) == weyl_dimension_product(parts, m)


def test_skew_frozen_values():
    col3 = Partition([1, 1, 1])
    assert skew_count(SkewShape(col3), 3) == 1
    assert skew_count(SkewShape(col3), 4) == 4
    assert skew_count(SkewShape(col3, Partition([1, 1])), 2) == 2
    assert skew_count(SkewShape(Partition([3, 2]), Partition([3, 2])), 7) == 1


def test_skew_empty_shape_is_one():
    for parts in ((), (2, 1), (4,)):
        lam = Partition(parts)
        assert skew_count(SkewShape(lam, lam), 3) == 1


def test_skew_column_family():
    # a column of height n-1-k filled strictly from n-k symbols
    for n in range(4, 9):
        for k in range(1, n - 1):
            shape = SkewShape(Partition([1] * (n - 1)), Partition([1] * k))
            assert skew_count(shape, n - k) == n - k


def test_skew_matches_brute_small():
    for w in range(0, 8):
        for parts in partitions_of(w, w, 7):
            lam = Partition(parts)
            for mu in sub_partitions(lam):
                shape = SkewShape(lam, mu)
                for m in range(0, 5):
                    assert skew_count(shape, m) == ssyt_brute(shape, m), (lam, mu, m)


def test_branching_identity_small():
    # splitting each filling at the symbol k factors the count
    for w in range(0, 7):
        for parts in partitions_of(w, w, 6):
            lam = Partition(parts)
            for n in range(2, 7):
                for k in range(1, n):
                    total = sum(
                        dim_schur(mu, k) * skew_count(SkewShape(lam, mu), n - k)
                        for mu in sub_partitions(lam, max_parts=k)
                    )
                    assert total == dim_schur(lam, n), (lam, n, k)


@given(partitions(), st.integers(min_value=0, max_value=6))
@settings(max_examples=150)
def test_dim_weakly_increasing_in_vars(lam, m):
    assert dim_schur(lam, m) <= dim_schur(lam, m + 1)


@given(partitions(max_weight=10, max_parts=5), st.integers(min_value=1, max_value=8))
@settings(max_examples=150)
def test_weyl_factors_at_least_one(lam, m):
    padded = [lam.part(i) for i in range(1, m + 1)]
    for i in range(m):
        for j in range(i + 1, m):
            num = padded[i] - padded[j] + j - i
            assert Fraction(num, j - i) >= 1


def test_ssyt_brute_refuses_large_shapes():
    with pytest.raises(RefusalError):
        ssyt_brute(SkewShape(Partition([21])), 2)


def test_char_eval_defining():
    assert char_eval(Partition([1]), [1, 2, 3]) == pytest.approx(6)
    t = [0.5 + 0.5j, -1.0, 2.0j]
    assert char_eval(Partition([1]), t) == pytest.approx(sum(t))


def test_char_eval_e2():
    t1, t2, t3 = 1j, 2.0, 3.0
    expected = t1 * t2 + t1 * t3 + t2 * t3
    assert char_eval(Partition([1, 1]), [t1, t2, t3]) == pytest.approx(expected)


def test_char_eval_at_ones_matches_dim():
    for parts in ((), (1,), (2, 1), (3, 1, 1), (2, 2, 2)):
        lam = Partition(parts)
        for n in range(max(1, len(lam)), 7):
            value = char_eval(lam, [1.0] * n)
            dim = dim_schur(lam, n)
            assert abs(value - dim) <= 1e-9 * max(1, dim)


def test_char_eval_brute_sum_cross_check():
    # sum of t^T over explicit fillings of (2,1) with 3 symbols
    lam = Partition([2, 1])
    t = [0.3 + 0.1j, -0.7 + 0.2j, 1.1 - 0.5j]
    fillings = []
    for a in range(1, 4):
        for b in range(a, 4):
            for c in range(a + 1, 4):
                fillings.append((a, b, c))
    expected = sum(t[a - 1] * t[b - 1] * t[c - 1] for a, b, c in fillings)
    assert len(fillings) == 8
    assert char_eval(lam, t) == pytest.approx(expected)


def test_char_eval_validation():
    with pytest.raises(ValidationError):
        char_eval(Partition([1, 1, 1]), [1.0, 2.0])


def test_negative_vars_rejected():
    with pytest.raises(ValidationError):
        dim_schur(Partition([1]), -1)
