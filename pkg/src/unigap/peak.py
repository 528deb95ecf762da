"""Peak-set plans on products of unitary groups.

A spectral gap (delta, gamma) converts into a transform that is exactly 1
on the distinguished signatures and at most epsilon = gamma/delta in
modulus elsewhere, at total-variation cost (|mu| + 1)/delta.  Convolution
powers amplify (epsilon, w) to (epsilon^m, w^m), and the center twist
keeps only the total-weight-1 signatures, cutting the conjugate half of
the target set.  Every step's exact (epsilon, w) arithmetic is recorded
in an audit trail."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import RefusalError, ValidationError
from .gap import GapCertificate, gamma_analytic, half_block_measure
from .partitions import Signature, defining_signature, trivial_signature
from .spectra import (
    CentralSpectrum,
    PeakNormalize,
    Power,
    Product,
    ProductSignature,
    RieszFactor,
    Twist,
    format_fraction,
    format_spectrum,
    parse_spectrum,
)

SMALL_DIM_THRESHOLD = 4


@dataclass(frozen=True)
class PeakPlan:
    """A measure recipe whose transform is 1 on the target signatures and
    at most epsilon in modulus on every other nontrivial signature, with
    total variation at most weight_w."""

    dims: tuple[int, ...]
    spectrum: CentralSpectrum
    epsilon: Fraction
    weight_w: Fraction
    steps: tuple[dict, ...]
    include_conjugates: bool

    def target_signatures(self) -> list[ProductSignature]:
        targets = []
        for idx, d in enumerate(self.dims):
            comps = [trivial_signature(m) for m in self.dims]
            comps[idx] = defining_signature(d)
            targets.append(ProductSignature(comps))
            if self.include_conjugates:
                comps = [trivial_signature(m) for m in self.dims]
                comps[idx] = defining_signature(d).conjugate()
                targets.append(ProductSignature(comps))
        return targets

    def to_doc(self) -> dict:
        return {
            "dims": list(self.dims),
            "epsilon": format_fraction(self.epsilon),
            "weight": format_fraction(self.weight_w),
            "include_conjugates": self.include_conjugates,
            "spectrum": format_spectrum(self.spectrum),
            "steps": list(self.steps),
        }


def gap_to_peak(cert: GapCertificate) -> PeakPlan:
    """Normalize a certified gap measure into a peak plan: transform
    (mu - Haar)/delta is 1 on the distinguished pair and gamma/delta
    elsewhere, with weight (|mu| + 1)/delta."""
    if not cert.verdict:
        raise RefusalError("cannot build a peak plan from a failed certificate")
    return _normalize_gap(
        spectrum=parse_spectrum(cert.measure),
        delta=cert.delta,
        gamma=cert.gamma_analytic,
        dims=(cert.n,),
        steps=[
            {
                "step": "gap-certificate",
                "measure": cert.measure,
                "delta": format_fraction(cert.delta),
                "gamma": format_fraction(cert.gamma_analytic),
            }
        ],
    )


def _normalize_gap(
    spectrum: CentralSpectrum,
    delta: Fraction,
    gamma: Fraction,
    dims: tuple[int, ...],
    steps: list[dict],
) -> PeakPlan:
    if gamma >= delta:
        raise RefusalError(
            f"gamma {gamma} >= delta {delta}: normalized off-target level "
            "would reach 1 and powers could not shrink it"
        )
    epsilon = gamma / delta
    weight = (spectrum.tv_bound + 1) / delta
    normalized = PeakNormalize(spectrum, delta)
    steps = steps + [
        {
            "step": "normalize",
            "delta": format_fraction(delta),
            "epsilon": format_fraction(epsilon),
            "weight": format_fraction(weight),
        }
    ]
    return PeakPlan(
        dims=tuple(dims),
        spectrum=normalized,
        epsilon=epsilon,
        weight_w=weight,
        steps=tuple(steps),
        include_conjugates=True,
    )


def amplify(plan: PeakPlan, m: int) -> PeakPlan:
    """m-th convolution power: target values stay exactly 1, the off-target
    level and the weight are raised to the m-th power."""
    if m < 1:
        raise ValidationError(f"power must be >= 1, got {m}")
    if m == 1:
        return plan
    steps = plan.steps + (
        {
            "step": "amplify",
            "m": m,
            "epsilon": format_fraction(plan.epsilon**m),
            "weight": format_fraction(plan.weight_w**m),
        },
    )
    return PeakPlan(
        dims=plan.dims,
        spectrum=Power(plan.spectrum, m),
        epsilon=plan.epsilon**m,
        weight_w=plan.weight_w**m,
        steps=steps,
        include_conjugates=plan.include_conjugates,
    )


def minimal_power(epsilon0: Fraction, epsilon_target: Fraction) -> int:
    """Smallest m >= 1 with epsilon0^m <= epsilon_target."""
    if epsilon0 <= epsilon_target:
        return 1
    m = 1
    value = epsilon0
    while value > epsilon_target:
        value *= epsilon0
        m += 1
    return m


def apply_twist(plan: PeakPlan) -> PeakPlan:
    """Center twist: keeps exactly the total-weight-1 signatures, so the
    conjugate half of the target set is dropped; epsilon and weight are
    unchanged."""
    steps = plan.steps + ({"step": "twist"},)
    return PeakPlan(
        dims=plan.dims,
        spectrum=Twist(plan.spectrum),
        epsilon=plan.epsilon,
        weight_w=plan.weight_w,
        steps=steps,
        include_conjugates=False,
    )


def build_product_peak(dims, epsilon_target) -> PeakPlan:
    """Full pipeline on prod_k U(d_k): small factors (d < 4) get tuned
    Riesz factors, large factors get the certified half-block measures
    raised to a common gap level, the product is normalized into a peak
    plan, amplified below epsilon_target, and twisted so only the defining
    signatures remain at value 1."""
    dims = tuple(int(d) for d in dims)
    epsilon_target = Fraction(epsilon_target)
    if not dims:
        raise ValidationError("need at least one group factor")
    if any(d < 1 for d in dims):
        raise ValidationError(f"factor sizes must be >= 1, got {dims}")
    if not (0 < epsilon_target < 1):
        raise RefusalError(f"epsilon target must be in (0, 1), got {epsilon_target}")

    small = [d for d in dims if d < SMALL_DIM_THRESHOLD]
    large = [d for d in dims if d >= SMALL_DIM_THRESHOLD]
    steps: list[dict] = []

    if large and small:
        # Joint level: the largest Riesz level valid for every small factor
        # is 1/(2 N^2); five convolution powers bring the 1/2-level block
        # measures down to the same 2^-5 = 1/(2 N^2).
        level = Fraction(1, 2 * SMALL_DIM_THRESHOLD**2)
        block_power = 5
        assert Fraction(1, 2) ** block_power == level
    elif large:
        level = Fraction(1, 2)
        block_power = 1
    else:
        level = Fraction(1, 2 * SMALL_DIM_THRESHOLD**2)
        block_power = 1

    factors: list[CentralSpectrum] = []
    gamma_blocks = Fraction(0)
    for d in dims:
        if d < SMALL_DIM_THRESHOLD:
            riesz_delta = level * d
            factors.append(RieszFactor(riesz_delta, d))
            steps.append(
                {
                    "step": "factor-riesz",
                    "dim": d,
                    "riesz_delta": format_fraction(riesz_delta),
                    "level": format_fraction(level),
                }
            )
        else:
            gamma_d = gamma_analytic(d)
            gamma_blocks = max(gamma_blocks, gamma_d**block_power)
            spec_d = half_block_measure(d)
            if block_power > 1:
                spec_d = Power(spec_d, block_power)
            factors.append(spec_d)
            steps.append(
                {
                    "step": "factor-block",
                    "dim": d,
                    "measure": format_spectrum(spec_d),
                    "gamma": format_fraction(gamma_d),
                    "power": block_power,
                    "level": format_fraction(level),
                }
            )

    combined = Product(*factors) if len(factors) > 1 else factors[0]
    # Product rule: off the joint target set either some factor is off its
    # own pair (bounded by its gamma) or at least two factors sit on their
    # pairs (bounded by level^2).
    gamma_combined = max(gamma_blocks, level**2)
    steps.append(
        {
            "step": "combine",
            "delta": format_fraction(level),
            "gamma": format_fraction(gamma_combined),
        }
    )

    plan = _normalize_gap(combined, level, gamma_combined, dims, steps)
    plan = amplify(plan, minimal_power(plan.epsilon, epsilon_target))
    plan = apply_twist(plan)
    assert plan.epsilon <= epsilon_target
    return plan


def replay_steps(steps) -> tuple[Optional[Fraction], Optional[Fraction]]:
    """Recompute the final (epsilon, weight) from the audit trail alone;
    used to check that a plan's stored values match its history."""
    delta: Optional[Fraction] = None
    gamma: Optional[Fraction] = None
    epsilon: Optional[Fraction] = None
    weight: Optional[Fraction] = None
    tv = Fraction(1)

    def frac(text):
        num, den = text.split("/")
        return Fraction(int(num), int(den))

    for step in steps:
        kind = step["step"]
        if kind == "gap-certificate":
            delta = frac(step["delta"])
            gamma = frac(step["gamma"])
        elif kind == "factor-riesz":
            level = frac(step["level"])
            if delta is not None and level != delta:
                raise ValidationError("riesz factor level differs from the joint level")
            delta = level
            gamma = max(gamma, Fraction(0)) if gamma is not None else Fraction(0)
        elif kind == "factor-block":
            level = frac(step["level"])
            if delta is not None and level != delta:
                raise ValidationError("block factor level differs from the joint level")
            delta = level
            g = frac(step["gamma"]) ** step["power"]
            gamma = g if gamma is None else max(gamma, g)
        elif kind == "combine":
            if delta is None or frac(step["delta"]) != delta:
                raise ValidationError("combine level mismatch")
            gamma = max(gamma if gamma is not None else Fraction(0), delta**2)
            if gamma != frac(step["gamma"]):
                raise ValidationError("combine gamma mismatch")
        elif kind == "normalize":
            if delta is None or gamma is None:
                raise ValidationError("normalize before any gap step")
            epsilon = gamma / delta
            weight = (tv + 1) / delta
            if epsilon != frac(step["epsilon"]) or weight != frac(step["weight"]):
                raise ValidationError("normalize arithmetic mismatch")
        elif kind == "amplify":
            if epsilon is None:
                raise ValidationError("amplify before normalize")
            epsilon **= step["m"]
            weight **= step["m"]
            if epsilon != frac(step["epsilon"]) or weight != frac(step["weight"]):
                raise ValidationError("amplify arithmetic mismatch")
        elif kind == "twist":
            pass
        else:
            raise ValidationError(f"unknown audit step {kind!r}")
    return epsilon, weight


def verify_plan(
    plan: PeakPlan,
    weight_cap: int = 6,
    d_cap: int = 6,
    max_nontrivial: int = 2,
) -> dict:
    """Exhaustively confirm the plan on a finite window: transform exactly
    1 on every target signature, and |transform| <= epsilon at every
    enumerated off-target signature with at most `max_nontrivial`
    nontrivial factors."""
    from itertools import combinations

    from .partitions import enumerate_signatures

    failures: list[str] = []
    one = Fraction(1)
    for target in plan.target_signatures():
        value = plan.spectrum.eval(target)
        if value != one:
            failures.append(f"target {target} has transform {value}, not 1")

    per_factor: list[list[Signature]] = []
    for d in plan.dims:
        sigs = [
            Signature.from_lambda_d(d, lam, dd)
            for lam, dd in enumerate_signatures(d, weight_cap, d_cap)
        ]
        per_factor.append([s for s in sigs if not s.is_trivial])

    targets = set(plan.target_signatures())
    checked = 0
    r = len(plan.dims)
    for count in range(1, min(max_nontrivial, r) + 1):
        for positions in combinations(range(r), count):
            def rec(idx: int, comps: list):
                nonlocal checked
                if idx == count:
                    pi = ProductSignature(comps)
                    if pi in targets:
                        return
                    value = abs(plan.spectrum.eval(pi))
                    checked += 1
                    if value > plan.epsilon:
                        failures.append(
                            f"off-target {pi} has |transform| {value} > {plan.epsilon}"
                        )
                    return
                pos = positions[idx]
                for sig in per_factor[pos]:
                    comps2 = comps[:]
                    comps2[positions[idx]] = sig
                    rec(idx + 1, comps2)

            base = [trivial_signature(d) for d in plan.dims]
            rec(0, base)
    return {
        "targets": len(targets),
        "off_target_checked": checked,
        "failures": failures,
        "ok": not failures,
    }
