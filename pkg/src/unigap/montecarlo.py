"""Monte Carlo checks of the trace-moment, subGaussian and Khintchine-type
behaviour of Haar-random unitaries.

Sampling is exactly Haar: complex Ginibre, QR, then the per-column phase
correction (without it the QR factor is not Haar-distributed).  Streams
use a counter-based generator keyed by (seed, stream index) so that every
estimate is bit-for-bit reproducible and parallel streams never overlap.
Reductions use numpy's fixed pairwise summation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import exp, sqrt
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import stats

from .errors import RefusalError, ValidationError

_BATCH = 4096


def rng_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for an independent, reproducible stream."""
    key = np.array([np.uint64(seed & (2**64 - 1)), np.uint64(stream)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """One d x d unitary drawn from normalized Haar measure."""
    return _haar_batch(d, 1, rng)[0]


def _haar_batch(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    if d < 1:
        raise ValidationError(f"dimension must be >= 1, got {d}")
    z = rng.standard_normal((count, d, d)) + 1j * rng.standard_normal((count, d, d))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[:, np.newaxis, :]


def _traces(d: int, samples: int, seed: int, stream: int = 0) -> np.ndarray:
    """tr(u) for `samples` independent Haar unitaries."""
    rng = rng_stream(seed, stream)
    out = np.empty(samples, dtype=complex)
    done = 0
    while done < samples:
        count = min(_BATCH, samples - done)
        batch = _haar_batch(d, count, rng)
        out[done : done + count] = np.trace(batch, axis1=-2, axis2=-1)
        done += count
    return out


def jackknife_mean(values: np.ndarray) -> tuple[float, float]:
    """Mean and its leave-one-out jackknife standard error."""
    n = len(values)
    total = float(np.sum(values))
    mean = total / n
    loo = (total - values) / (n - 1)
    se = sqrt((n - 1) / n * float(np.sum((loo - np.mean(loo)) ** 2)))
    return mean, se


@dataclass(frozen=True)
class SampleStats:
    estimate: float
    stderr: float
    samples: int
    seed: int
    estimator_id: str

    @property
    def interval(self) -> tuple[float, float]:
        return (self.estimate - 3 * self.stderr, self.estimate + 3 * self.stderr)

    def to_doc(self) -> dict:
        lo, hi = self.interval
        return {
            "estimator": self.estimator_id,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "interval": [lo, hi],
            "samples": self.samples,
            "seed": self.seed,
        }


def trace_moments(d: int, p: int, samples: int, seed: int) -> SampleStats:
    """Monte Carlo estimate of E|tr u|^p on U(d) with jackknife error."""
    if p % 2 != 0 or p < 2:
        raise ValidationError(f"moment order must be a positive even integer, got {p}")
    if samples < 1000:
        raise RefusalError(f"need at least 1000 samples, got {samples}")
    values = np.abs(_traces(d, samples, seed)) ** p
    mean, se = jackknife_mean(values)
    return SampleStats(mean, se, samples, seed, f"trace_abs_moment_d{d}_p{p}")


def psi2_estimate(values: Sequence[float], max_even_p: int = 12) -> float:
    """Even-moment proxy for the subGaussian norm of |f|:
    max over even p <= max_even_p of p^{-1/2} (E|f|^p)^{1/p}."""
    x = np.abs(np.asarray(values, dtype=float))
    if len(x) < 10**4:
        raise RefusalError(f"need at least 10^4 samples, got {len(x)}")
    best = 0.0
    for p in range(2, max_even_p + 1, 2):
        moment = float(np.mean(x**p))
        best = max(best, moment ** (1.0 / p) / sqrt(p))
    return best


@dataclass(frozen=True)
class SGReport:
    passed: bool
    s: float
    t_grid: tuple[float, ...]
    mgf: tuple[float, ...]
    bound: tuple[float, ...]

    def to_doc(self) -> dict:
        return {
            "passed": self.passed,
            "s": self.s,
            "t_grid": list(self.t_grid),
            "mgf": list(self.mgf),
            "bound": list(self.bound),
        }


def sg_check(
    values: Sequence[float], s: float, t_grid: Optional[Sequence[float]] = None
) -> SGReport:
    """Check the subGaussian moment-generating-function inequality
    E exp(t f) <= exp(s^2 t^2 / 2) on a grid, with 3-sigma sampling slack
    on the empirical side.  Refuses inputs that are not centered."""
    x = np.asarray(values, dtype=float)
    mean, se = jackknife_mean(x)
    if abs(mean) > 3 * se:
        raise RefusalError(
            f"input mean {mean:.4g} is not within 3 stderr ({se:.4g}) of zero"
        )
    if t_grid is None:
        t_grid = np.linspace(-3.0, 3.0, 25)
    t_grid = tuple(float(t) for t in t_grid)
    mgf = []
    bound = []
    ok = True
    for t in t_grid:
        m, m_se = jackknife_mean(np.exp(t * x))
        rhs = exp(s * s * t * t / 2.0) * (1.0 + 3.0 * m_se / max(m, 1e-300))
        mgf.append(m)
        bound.append(rhs)
        if m > rhs:
            ok = False
    return SGReport(ok, float(s), t_grid, tuple(mgf), tuple(bound))


def clopper_pearson(events: int, trials: int, alpha: float = 1e-3) -> tuple[float, float]:
    """Exact two-sided binomial confidence interval."""
    lo = 0.0 if events == 0 else float(stats.beta.ppf(alpha / 2, events, trials - events + 1))
    hi = (
        1.0
        if events == trials
        else float(stats.beta.ppf(1 - alpha / 2, events + 1, trials - events))
    )
    return lo, hi


@dataclass(frozen=True)
class TailReport:
    d: int
    delta: float
    events: int
    samples: int
    seed: int
    empirical_prob: float
    interval: tuple[float, float]
    alpha: float

    def bound_rhs(self, theta: float) -> float:
        """The claimed tail bound e * theta^(d^2)."""
        return float(np.e * theta ** (self.d * self.d))

    def consistency(self, theta: float) -> str:
        """How the sample relates to the bound at this theta: 'violated'
        when even the lower confidence limit exceeds the bound,
        'consistent (no events)' when the event was never observed."""
        rhs = self.bound_rhs(theta)
        if self.interval[0] > rhs:
            return "violated"
        if self.events == 0:
            return "consistent (no events)"
        return "consistent"

    def to_doc(self) -> dict:
        return {
            "d": self.d,
            "delta": self.delta,
            "events": self.events,
            "samples": self.samples,
            "seed": self.seed,
            "empirical_prob": self.empirical_prob,
            "interval": list(self.interval),
            "alpha": self.alpha,
        }


def tail_check(
    d: int, delta: float, samples: int, seed: int, alpha: float = 1e-3
) -> TailReport:
    """Empirical P(Re tr u > delta * d) with an exact binomial interval."""
    if not (0 <= delta < 1):
        raise ValidationError(f"delta must be in [0, 1), got {delta}")
    re_tr = np.real(_traces(d, samples, seed))
    events = int(np.sum(re_tr > delta * d))
    interval = clopper_pearson(events, samples, alpha)
    return TailReport(
        d, float(delta), events, samples, seed, events / samples, interval, alpha
    )


def khintchine_estimate(
    p: int, dims: Sequence[int], trials: int, samples: int, seed: int
) -> SampleStats:
    """Largest observed ratio E|f|^p / (E|f|^2)^{p/2} over random central
    test functions f = sum_k x_k tr(u_k) with x uniform on the complex
    unit sphere and independent Haar u_k; the moment-ratio convention
    (for p = 4 the complex-Gaussian benchmark value is 2)."""
    if p % 2 != 0 or p < 2:
        raise ValidationError(f"exponent must be a positive even integer, got {p}")
    if trials < 1 or samples < 1000:
        raise RefusalError("need trials >= 1 and samples >= 1000")
    dims = tuple(int(d) for d in dims)
    best: Optional[tuple[float, float]] = None
    for trial in range(trials):
        rng = rng_stream(seed, 2 * trial)
        x = rng.standard_normal(len(dims)) + 1j * rng.standard_normal(len(dims))
        x /= np.linalg.norm(x)
        f = np.zeros(samples, dtype=complex)
        for j, d in enumerate(dims):
            f += x[j] * _traces(d, samples, seed, stream=2 * trial * len(dims) + 2 + j)
        abs2 = np.abs(f) ** 2
        num = abs2 ** (p // 2)
        n = samples
        num_tot = float(np.sum(num))
        den_tot = float(np.sum(abs2))
        ratio = (num_tot / n) / (den_tot / n) ** (p / 2)
        # leave-one-out jackknife of the ratio statistic
        loo_num = (num_tot - num) / (n - 1)
        loo_den = (den_tot - abs2) / (n - 1)
        loo = loo_num / loo_den ** (p / 2)
        se = sqrt((n - 1) / n * float(np.sum((loo - np.mean(loo)) ** 2)))
        if best is None or ratio > best[0]:
            best = (ratio, se)
    dims_id = "x".join(str(d) for d in dims)
    return SampleStats(
        best[0],
        best[1],
        samples,
        seed,
        f"khintchine_ratio_p{p}_dims{dims_id}_trials{trials}",
    )


def trace_moment_exact_small(d: int, k: int) -> int:
    """E|tr u|^{2k} on U(d) equals k! when k <= d; independent benchmark
    for the sampled moments."""
    if k > d:
        raise ValidationError(f"closed form requires k <= d, got k={k}, d={d}")
    out = 1
    for j in range(2, k + 1):
        out *= j
    return out


def u2_moment_quadrature(p: int, grid: int = 512) -> float:
    """E|tr u|^p on U(2) by quadrature over the eigenvalue density
    |e^{i a} - e^{i b}|^2 / (2 (2 pi)^2); deterministic cross-check of the
    sampled moments, independent of any unitary sampling."""
    if p % 2 != 0 or p < 0:
        raise ValidationError(f"moment order must be even and >= 0, got {p}")
    theta = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    a, b = np.meshgrid(theta, theta, indexing="ij")
    tr = np.exp(1j * a) + np.exp(1j * b)
    weight = np.abs(np.exp(1j * a) - np.exp(1j * b)) ** 2
    values = np.abs(tr) ** p * weight
    # mean over the torus handles the (2 pi)^-2 normalization; the extra
    # 1/2 is the Weyl integration constant for U(2)
    return float(np.mean(values) / 2.0)


def ks_invariance_pvalue(d: int, samples: int, seed: int) -> float:
    """Two-sample Kolmogorov-Smirnov p-value comparing Re tr(u) with
    Re tr(vu) for a fixed unitary v; Haar invariance makes the two
    distributions identical."""
    rng_v = rng_stream(seed, 999)
    v = sample_haar_unitary(d, rng_v)
    rng = rng_stream(seed, 0)
    u = _haar_batch(d, samples, rng)
    plain = np.real(np.trace(u, axis1=-2, axis2=-1))
    rng2 = rng_stream(seed, 1)
    u2 = _haar_batch(d, samples, rng2)
    rotated = np.real(np.trace(v @ u2, axis1=-2, axis2=-1))
    return float(stats.ks_2samp(plain, rotated).pvalue)
