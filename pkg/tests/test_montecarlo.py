import math

import numpy as np
import pytest

from unigap.errors import RefusalError, ValidationError
from unigap.montecarlo import (
    clopper_pearson,
    jackknife_mean,
    khintchine_estimate,
    ks_invariance_pvalue,
    psi2_estimate,
    rng_stream,
    sample_haar_unitary,
    sg_check,
    tail_check,
    trace_moment_exact_small,
    trace_moments,
    u2_moment_quadrature,
)
from unigap.montecarlo import _haar_batch


def test_unitarity_residual():
    for d in (1, 2, 5, 9):
        u = sample_haar_unitary(d, rng_stream(42, d))
        residual = np.max(np.abs(u.conj().T @ u - np.eye(d)))
        assert residual <= 1e-12


def test_d1_is_unit_modulus():
    u = sample_haar_unitary(1, rng_stream(7))
    assert abs(abs(u[0, 0]) - 1) <= 1e-12


def test_entry_mean_vanishes():
    # phase invariance u -> zu makes every entry mean zero
    batch = _haar_batch(3, 100_000, rng_stream(11))
    entries = batch[:, 0, 0].real
    mean, se = jackknife_mean(entries)
    assert abs(mean) <= 3 * se


def test_zero_dimension_rejected():
    with pytest.raises(ValidationError):
        sample_haar_unitary(0, rng_stream(1))


def test_determinism_bit_for_bit():
    a = trace_moments(3, 4, 5000, 99)
    b = trace_moments(3, 4, 5000, 99)
    assert a == b
    c = trace_moments(3, 4, 5000, 100)
    assert c.estimate != a.estimate


def test_streams_do_not_collide():
    x = rng_stream(5, 0).standard_normal(4)
    y = rng_stream(5, 1).standard_normal(4)
    assert not np.allclose(x, y)


def test_trace_second_moment_is_one():
    for d in (1, 2, 3, 6):
        stats = trace_moments(d, 2, 40_000, 21)
        assert abs(stats.estimate - 1.0) <= 3 * stats.stderr, (d, stats)


def test_trace_fourth_moment_d1_exact():
    stats = trace_moments(1, 4, 2000, 3)
    assert stats.estimate == 1.0 and stats.stderr == 0.0


def test_moment_ladder_matches_factorial():
    for d in (2, 3, 6):
        for k in (1, 2, 3):
            if k > d:
                continue
            stats = trace_moments(d, 2 * k, 60_000, 17)
            target = trace_moment_exact_small(d, k)
            assert abs(stats.estimate - target) <= 3 * stats.stderr, (d, k, stats)


def test_u2_quadrature_oracle():
    assert u2_moment_quadrature(2) == pytest.approx(1.0, abs=1e-10)
    assert u2_moment_quadrature(4) == pytest.approx(2.0, abs=1e-10)
    assert u2_moment_quadrature(0) == pytest.approx(1.0, abs=1e-10)


def test_trace_moments_validation():
    with pytest.raises(ValidationError):
        trace_moments(3, 3, 5000, 1)
    with pytest.raises(RefusalError):
        trace_moments(3, 2, 10, 1)


def test_psi2_constant():
    assert psi2_estimate(np.ones(20_000)) == pytest.approx(1 / math.sqrt(2))


def test_psi2_gaussian_near_theory():
    g = rng_stream(3).standard_normal(100_000)
    value = psi2_estimate(g)
    # max over even p of p^{-1/2} ((p-1)!!)^{1/p} is attained at p = 2
    assert value == pytest.approx(1 / math.sqrt(2), abs=0.02)


def test_psi2_homogeneity():
    x = rng_stream(8).standard_normal(20_000)
    assert psi2_estimate(3.5 * x) == pytest.approx(3.5 * psi2_estimate(x), rel=1e-12)


def test_psi2_refuses_small_samples():
    with pytest.raises(RefusalError):
        psi2_estimate(np.ones(100))


def test_sg_gaussian_passes_at_s1():
    g = rng_stream(12).standard_normal(100_000)
    report = sg_check(g, 1.0)
    assert report.passed


def test_sg_trace_passes_at_s1():
    tr = np.real(
        np.trace(_haar_batch(4, 80_000, rng_stream(13)), axis1=-2, axis2=-1)
    )
    assert sg_check(tr, 1.0).passed


def test_sg_fails_for_undersized_s():
    g = rng_stream(14).standard_normal(100_000)
    assert not sg_check(g, 0.2).passed


def test_sg_refuses_uncentered():
    with pytest.raises(RefusalError):
        sg_check(np.ones(20_000), 1.0)


def test_tail_d1_matches_arccos():
    for delta in (0.0, 0.5, 0.9):
        report = tail_check(1, delta, 200_000, 123)
        target = math.acos(delta) / math.pi
        lo, hi = report.interval
        assert lo <= target <= hi, (delta, report)


def test_tail_no_events_reported_as_vacuous():
    report = tail_check(8, 0.9, 20_000, 1)
    assert report.events == 0
    assert report.consistency(0.5) == "consistent (no events)"
    assert report.bound_rhs(0.5) == pytest.approx(math.e * 0.5**64)


def test_tail_violation_detected():
    report = tail_check(1, 0.0, 100_000, 5)  # probability 1/2
    assert report.consistency(1e-6) == "violated"
    assert report.consistency(0.999) == "consistent"


def test_clopper_pearson_edges():
    lo, hi = clopper_pearson(0, 100)
    assert lo == 0.0 and 0 < hi < 0.2
    lo, hi = clopper_pearson(100, 100)
    assert hi == 1.0 and 0.8 < lo < 1
    lo, hi = clopper_pearson(50, 100, alpha=0.05)
    assert lo < 0.5 < hi


def test_khintchine_single_coordinate():
    stats = khintchine_estimate(4, (3,), 4, 30_000, 77)
    assert abs(stats.estimate - 2.0) <= 3 * stats.stderr


def test_khintchine_p2_is_exactly_one():
    stats = khintchine_estimate(2, (3, 3), 3, 5000, 77)
    assert stats.estimate == 1.0


def test_khintchine_clt_regime():
    stats = khintchine_estimate(4, (3, 3, 3), 6, 30_000, 42)
    assert abs(stats.estimate - 2.0) <= 3 * stats.stderr


def test_khintchine_validation():
    with pytest.raises(ValidationError):
        khintchine_estimate(3, (3,), 2, 5000, 1)
    with pytest.raises(RefusalError):
        khintchine_estimate(4, (3,), 0, 5000, 1)


def test_ks_invariance():
    assert ks_invariance_pvalue(4, 10_000, 2024) > 0.01


def test_sample_stats_doc():
    stats = trace_moments(2, 2, 5000, 1)
    doc = stats.to_doc()
    assert set(doc) == {"estimator", "estimate", "stderr", "interval", "samples", "seed"}
    assert doc["interval"][0] == pytest.approx(stats.estimate - 3 * stats.stderr)
