"""Spectral-gap certification for the half-block measures on U(n).

For even n the measure is the block average mu(n/2, n); for odd n it is
the half-half mixture of mu((n-1)/2, n) and mu((n+1)/2, n).  Its transform
equals 1/2 exactly on the defining signature and its conjugate.  The
certificate bounds every other nontrivial coefficient by an exact
rational gamma < 1/2 obtained from a finite table of case bounds, one per
predicate class of canonical signatures (lam, d), and cross-checks the
bound by exhaustive enumeration over a finite signature window.

The case analysis splits on d = 0 vs d >= 1 and on the shape thresholds
lam_1, lam_2, lam_k, lam_{n-k+1}, lam_{n-1}.  Two bound tables exist: one
valid when the block is at least half the group (n - k <= k), one for the
narrow block k = (n-1)/2 of odd n.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .errors import RefusalError, ValidationError
from .partitions import (
    Partition,
    Signature,
    conjugate_defining_signature,
    defining_signature,
    enumerate_signatures,
    partitions_of,
)
from .spectra import (
    BlockHaar,
    CentralSpectrum,
    Mix,
    format_fraction,
    format_spectrum,
    mu_kn_eval,
)

VARIANT_EVEN = "even"
VARIANT_ODD = "odd"

CASE_PREDICATES = {
    "D0_L1GE2": "d = 0, lam_1 >= 2",
    "D0_L1EQ1": "d = 0, lam_1 = 1, lam not the defining signature",
    "DGE1_LKGE2": "d >= 1, lam_k >= 2",
    "DGE1_LK1_L1EQ1": "d = 1, lam_k = lam_1 = 1, lam not the conjugate defining signature",
    "DGE1_LK1_L1GE2_LN1EQ0": "d = 1, lam_k = 1, lam_1 >= 2, lam_{n-1} = 0",
    "DGE1_LK1_L1GE2_LN1GE1": "d = 1, lam_k = 1, lam_1 >= 2, lam_{n-1} >= 1",
}

# Extra case for the narrow block k = (n-1)/2: when lam_{k+1} > d the
# coefficient is dominated by its value at the signature with lam_{k+1} - d
# columns removed from the first k+1 rows (equal tableau count, smaller
# dimension), whose worst case is the conjugate defining signature.
NARROW_REDUCTION = "DGE1_LK1PLUS_GT_D"
NARROW_REDUCTION_PREDICATE = "d >= 1, lam_{k+1} > d (column reduction to lam_{k+1} = d)"

IN_S = "in_s"
ZERO = "zero"
BOUNDED = "bounded"


def _case_value(case_id: str, variant: str, n: int, k: int) -> Fraction:
    """Exact value of one case bound as a function of (n, k).

    The wide-block values (valid when n - k <= k) follow from row
    estimates on the Weyl quotient.  For the narrow block k = (n-1)/2 the
    same four d >= 1 values remain valid on the region lam_{k+1} <= d,
    where the extra evaluation variable is absorbed by the j = k+1 column
    of the quotient; the region lam_{k+1} > d carries the column-reduction
    bound (n-k)/n instead."""
    if case_id == "D0_L1GE2":
        return Fraction((n - k) * (n - k + 1), n * (n + 1))
    if case_id == "D0_L1EQ1":
        return Fraction((n - k) * (n - k - 1), n * (n - 1))
    if variant == VARIANT_ODD and case_id == NARROW_REDUCTION:
        return Fraction(n - k, n)
    if case_id == "DGE1_LKGE2":
        return Fraction((n - k) * (n - k + 1), n * (n + 1))
    if case_id == "DGE1_LK1_L1EQ1":
        return Fraction((n - k) * (n - k - 1), n * (n - 1))
    if case_id == "DGE1_LK1_L1GE2_LN1EQ0":
        if variant == VARIANT_ODD:
            return Fraction((n - k) * (n - k - 1), n * (n + 1))
        return Fraction((n - k) * (n - k - 1), n * (n - 1))
    if case_id == "DGE1_LK1_L1GE2_LN1GE1":
        if variant == VARIANT_ODD:
            return Fraction((k + 1) * (n - k), (n + 1) * (n - 1))
        return Fraction(k * (n - k), (n + 1) * (n - 1))
    raise ValidationError(f"unknown case {case_id!r} / variant {variant!r}")


@dataclass(frozen=True)
class CaseBound:
    case_id: str
    variant: str
    k: int
    bound: Fraction
    predicate: str

    def to_doc(self) -> dict:
        return {
            "case_id": self.case_id,
            "variant": self.variant,
            "k": self.k,
            "bound": format_fraction(self.bound),
            "predicate": self.predicate,
        }


@dataclass(frozen=True)
class Classification:
    """Outcome of classifying one canonical signature for one block size:
    membership in the distinguished set, a forced zero coefficient, or a
    case bound."""

    kind: str
    case_id: Optional[str] = None
    bound: Optional[Fraction] = None

    @property
    def value(self) -> Fraction:
        """The usable upper bound: 0 for forced zeros, the case bound
        otherwise; undefined on the distinguished set."""
        if self.kind == ZERO:
            return Fraction(0)
        if self.kind == BOUNDED:
            return self.bound
        raise ValidationError("no bound applies on the distinguished set")


def _validate_variant(n: int, k: int, d: int, variant: str) -> None:
    if variant == VARIANT_EVEN:
        if d >= 1 and n - k > k:
            raise ValidationError(
                f"wide-block table needs n - k <= k for d >= 1, got n={n}, k={k}"
            )
    elif variant == VARIANT_ODD:
        if n != 2 * k + 1 or n <= 3 or k <= 1:
            raise ValidationError(
                f"narrow-block table needs n = 2k+1, n > 3, k > 1, got n={n}, k={k}"
            )
    else:
        raise ValidationError(f"unknown variant {variant!r}")


def analytic_bound(
    n: int, k: int, lam: Partition, d: int, variant: str = VARIANT_EVEN
) -> Classification:
    """Classify the canonical signature (lam, d) and return the case bound
    that dominates the block-average coefficient mu(k, n)^ there."""
    _validate_variant(n, k, d, variant)
    if len(lam) > n - 1:
        raise ValidationError(f"partition {lam} is not canonical for U({n})")
    a1 = lam.part(1)
    ak = lam.part(k)
    an1 = lam.part(n - 1)
    # distinguished set: trivial, defining, conjugate defining
    if d == 0 and a1 == 0:
        return Classification(IN_S)
    if d == 0 and a1 == 1 and lam.part(2) == 0:
        return Classification(IN_S)
    if d == 1 and a1 == 1 and an1 == 1:
        return Classification(IN_S)
    if d < 0:
        return Classification(ZERO)
    if ak < d or d < lam.part(n - k + 1):
        return Classification(ZERO)
    if d == 0:
        case = "D0_L1GE2" if a1 >= 2 else "D0_L1EQ1"
    elif variant == VARIANT_ODD and lam.part(k + 1) > d:
        case = NARROW_REDUCTION
    elif ak >= 2:
        case = "DGE1_LKGE2"
    elif a1 == 1:
        case = "DGE1_LK1_L1EQ1"
    elif an1 == 0:
        # a filled column of height n-1 is impossible here, so k < n-1
        assert n - 1 > k
        case = "DGE1_LK1_L1GE2_LN1EQ0"
    else:
        case = "DGE1_LK1_L1GE2_LN1GE1"
    return Classification(BOUNDED, case, _case_value(case, variant, n, k))


def _constituents(n: int) -> list[tuple[int, Fraction, str]]:
    """Block sizes, mixture weights and bound-table variants of the
    half-block measure on U(n)."""
    if n % 2 == 0:
        return [(n // 2, Fraction(1), VARIANT_EVEN)]
    k_minus = (n - 1) // 2
    return [
        (k_minus, Fraction(1, 2), VARIANT_ODD),
        (k_minus + 1, Fraction(1, 2), VARIANT_EVEN),
    ]


def half_block_measure(n: int) -> CentralSpectrum:
    """The certified measure on U(n): mu(n/2, n) for even n, the half-half
    mixture of the two middle block averages for odd n."""
    if n < 4:
        raise RefusalError(f"certification requires n > 3, got {n}")
    parts = _constituents(n)
    if len(parts) == 1:
        return BlockHaar(parts[0][0], n)
    return Mix([w for _, w, _ in parts], [BlockHaar(k, n) for k, _, _ in parts])


def _residual_family_bound(n: int) -> Fraction:
    """Joint bound for the d = 1 signatures with lam_{k-} = lam_{k+} = 1
    and lam_1 >= 2 (one long first row over a column of ones reaching row
    s).  The two coefficients share the tableau split into the reduced
    first rows and the trailing column, giving for tail length s

        nu^ <= (1/2) (1 + k_-(s - k_+ + 1)/k_+^2)
               * k_+(s+1)/(n(n+1)) * prod_{i=2..k_-} (s-i+1)/(n-i+1),

    which increases in s; the maximum over s in [k_+, n-1] stays below
    (n+1)/(4n)."""
    k_minus = (n - 1) // 2
    k_plus = k_minus + 1
    best = Fraction(0)
    for s in range(k_plus, n):
        ratio_cap = 1 + Fraction(k_minus * (s - k_plus + 1), k_plus * k_plus)
        value = Fraction(k_plus * (s + 1), n * (n + 1))
        for i in range(2, k_minus + 1):
            value *= Fraction(s - i + 1, n - i + 1)
        best = max(best, ratio_cap * value / 2)
    return best


def _gamma_odd(n: int) -> Fraction:
    """Maximum of the joint class bounds for the odd half-half mixture.
    Classes split on d and on which constituents survive; each entry
    averages the applicable case bounds of the two blocks.  Three classes
    attain (n+1)/(4n) exactly: the d = 0 wide class, the column-reduction
    region, and the d >= 2 rectangle class."""
    k_minus = (n - 1) // 2
    k_plus = k_minus + 1

    def minus(case_id):
        return _case_value(case_id, VARIANT_ODD, n, k_minus)

    def plus(case_id):
        return _case_value(case_id, VARIANT_EVEN, n, k_plus)

    n13_minus = minus("DGE1_LKGE2")
    # refined value on the class lam_{k-} >= 2, lam_{n-1} = 1: every top
    # row strictly exceeds the trailing ones, which adds the j = n-1
    # column to the row estimate
    n13_refined = n13_minus * Fraction(k_minus, n - 1)
    candidates = [
        (minus("D0_L1GE2") + plus("D0_L1GE2")) / 2,
        (minus("D0_L1EQ1") + plus("D0_L1EQ1")) / 2,
        # k+ coefficient vanishes (lam_{k+} < d): strongest narrow bound alone
        n13_minus / 2,
        # column-reduction region lam_{k+} > d (k+ vanishes there too)
        minus(NARROW_REDUCTION) / 2,
        # both alive with d >= 2: forces lam_{k-} >= lam_{k+} = d >= 2
        (n13_minus + plus("DGE1_LKGE2")) / 2,
        # d = 1, lam_{k+} = 1 = lam_{n-1}, lam_{k-} >= 2
        (n13_refined + plus("DGE1_LK1_L1GE2_LN1GE1")) / 2,
        # d = 1, lam_{k+} = 1, lam_{k-} >= 2, lam_{n-1} = 0
        (n13_minus + plus("DGE1_LK1_L1GE2_LN1EQ0")) / 2,
        # d = 1, all-ones shapes
        (minus("DGE1_LK1_L1EQ1") + plus("DGE1_LK1_L1EQ1")) / 2,
        _residual_family_bound(n),
    ]
    return max(candidates)


def gamma_analytic(n: int) -> Fraction:
    """The certified off-set bound: the maximum of the case-bound table
    over all joint predicate classes outside the distinguished set.  For
    even n this is the plain maximum of the six wide-block bounds; for odd
    n the classes pair the two constituents' bounds."""
    if n < 4:
        raise RefusalError(f"certification requires n > 3, got {n}")
    if n % 2 == 0:
        k = n // 2
        return max(
            _case_value(case_id, VARIANT_EVEN, n, k) for case_id in CASE_PREDICATES
        )
    return _gamma_odd(n)


def case_table(n: int) -> list[CaseBound]:
    """All case bounds entering gamma_analytic(n), evaluated."""
    table = []
    for k, _, variant in _constituents(n):
        for case_id, predicate in CASE_PREDICATES.items():
            table.append(
                CaseBound(case_id, variant, k, _case_value(case_id, variant, n, k), predicate)
            )
        if variant == VARIANT_ODD:
            table.append(
                CaseBound(
                    NARROW_REDUCTION,
                    variant,
                    k,
                    _case_value(NARROW_REDUCTION, variant, n, k),
                    NARROW_REDUCTION_PREDICATE,
                )
            )
    return table


# ---------------------------------------------------------------------------
# exhaustive enumeration


def _sup_weight_class(
    spec: CentralSpectrum, n: int, w: int, d_cap: int, excluded: frozenset
) -> tuple[Fraction, Optional[tuple[tuple[int, ...], int]]]:
    best = Fraction(-1)
    arg = None
    for parts in partitions_of(w, w, n - 1):
        lam = Partition(parts)
        for d in range(d_cap + 1):
            sig = Signature.from_lambda_d(n, lam, d)
            if sig.is_trivial or sig in excluded:
                continue
            v = abs(spec.eval(sig))
            if v > best:
                best = v
                arg = (parts, d)
    return best, arg


def exact_sup(
    spec: CentralSpectrum,
    exclude: Iterable[Signature] = (),
    weight_cap: int = 12,
    d_cap: int = 12,
    workers: int = 1,
) -> tuple[Fraction, tuple[Partition, int]]:
    """Exact maximum of |transform| over all enumerated nontrivial
    signatures outside `exclude`, with the argmax at the first attaining
    signature in (weight, lex, d) order."""
    if len(spec.group) != 1:
        raise ValidationError("exact_sup enumerates single-factor groups only")
    if weight_cap < 1 or d_cap < 1:
        raise ValidationError("caps must be >= 1")
    n = spec.group[0]
    excluded = frozenset(exclude)
    weights = range(weight_cap + 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    _sup_weight_class,
                    itertools.repeat(spec),
                    itertools.repeat(n),
                    weights,
                    itertools.repeat(d_cap),
                    itertools.repeat(excluded),
                )
            )
    else:
        results = [_sup_weight_class(spec, n, w, d_cap, excluded) for w in weights]
    best = Fraction(-1)
    arg = None
    for local_best, local_arg in results:
        if local_arg is not None and local_best > best:
            best = local_best
            arg = local_arg
    if arg is None:
        raise ValidationError("enumeration domain is empty")
    return best, (Partition(arg[0]), arg[1])


@dataclass
class EnumerationReport:
    weight_cap: int
    d_cap: int
    max_value: Fraction
    argmax: tuple[Partition, int]
    signatures_checked: int
    domination_violations: list[str] = field(default_factory=list)

    def to_doc(self) -> dict:
        lam, d = self.argmax
        return {
            "weight_cap": self.weight_cap,
            "d_cap": self.d_cap,
            "max_value": format_fraction(self.max_value),
            "argmax": {"lambda": str(lam), "d": d},
            "signatures_checked": self.signatures_checked,
            "domination_violations": list(self.domination_violations),
        }


@dataclass
class GapCertificate:
    """Machine-checkable record of the gap property for one group size.

    gamma_analytic is the case-table bound, valid for every signature; the
    enumeration is a finite consistency cross-check of that bound, not the
    certificate's source of validity."""

    n: int
    measure: str
    delta: Fraction
    gamma_analytic: Fraction
    case_table: list[CaseBound]
    enumeration: Optional[EnumerationReport]
    verdict: bool
    failures: list[str] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {
            "n": self.n,
            "measure": self.measure,
            "delta": format_fraction(self.delta),
            "gamma_analytic": format_fraction(self.gamma_analytic),
            "gamma_lt_half": self.gamma_analytic < Fraction(1, 2),
            "case_table": [c.to_doc() for c in self.case_table],
            "enumeration": self.enumeration.to_doc() if self.enumeration else None,
            "verdict": self.verdict,
            "failures": list(self.failures),
        }


def certify_gap(
    n: int,
    weight_cap: int = 12,
    d_cap: int = 12,
    enumeration: bool = True,
    workers: int = 1,
) -> GapCertificate:
    """Build the half-block measure on U(n), verify its transform is
    exactly 1/2 on the defining pair, compute the analytic bound, and
    (optionally) cross-check it by exhaustive enumeration with
    per-signature case-bound domination."""
    if n < 4:
        raise RefusalError(f"certification requires n > 3, got {n}")
    spec = half_block_measure(n)
    sigma = defining_signature(n)
    sigma_bar = conjugate_defining_signature(n)
    failures: list[str] = []

    half = Fraction(1, 2)
    delta = spec.eval(sigma)
    if delta != half:
        failures.append(f"transform at the defining signature is {delta}, not 1/2")
    if spec.eval(sigma_bar) != half:
        failures.append("transform at the conjugate defining signature is not 1/2")

    gamma = gamma_analytic(n)
    if gamma >= half:
        failures.append(f"analytic bound {gamma} is not below 1/2")

    report = None
    if enumeration:
        max_value, argmax = exact_sup(
            spec, {sigma, sigma_bar}, weight_cap, d_cap, workers=workers
        )
        violations: list[str] = []
        checked = 0
        constituents = _constituents(n)
        for lam, d in enumerate_signatures(n, weight_cap, d_cap):
            sig = Signature.from_lambda_d(n, lam, d)
            if sig.is_trivial or sig == sigma or sig == sigma_bar:
                continue
            checked += 1
            total = Fraction(0)
            for k, weight, variant in constituents:
                value = mu_kn_eval(k, n, lam, d)
                cls = analytic_bound(n, k, lam, d, variant)
                if cls.kind == IN_S:
                    violations.append(f"(lam={lam}, d={d}) misclassified as distinguished for k={k}")
                    continue
                if value > cls.value:
                    violations.append(
                        f"(lam={lam}, d={d}): coefficient {value} exceeds "
                        f"{cls.case_id or 'zero'} bound {cls.value} for k={k}"
                    )
                total += weight * value
            if total > gamma:
                violations.append(
                    f"(lam={lam}, d={d}): mixture coefficient {total} exceeds gamma {gamma}"
                )
        report = EnumerationReport(
            weight_cap, d_cap, max_value, argmax, checked, violations
        )
        if max_value > gamma:
            failures.append(
                f"enumeration max {max_value} at {argmax} exceeds analytic bound {gamma}"
            )
        if violations:
            failures.append(f"{len(violations)} case-bound domination violations")

    return GapCertificate(
        n=n,
        measure=format_spectrum(spec),
        delta=delta,
        gamma_analytic=gamma,
        case_table=case_table(n),
        enumeration=report,
        verdict=not failures,
        failures=failures,
    )
