"""Exact spectral-gap certificates and peak-set plans for central measures
on unitary groups, with Monte Carlo verification of the related
trace-moment and subGaussian estimates."""

from .errors import RefusalError, ValidationError
from .partitions import (
    Partition,
    Signature,
    SkewShape,
    canonicalize_signature,
    conjugate_defining_signature,
    conjugate_signature,
    defining_signature,
    enumerate_signatures,
    trivial_signature,
)
from .schur import char_eval, dim_schur, skew_count, ssyt_brute
from .spectra import (
    BlockHaar,
    CentralSpectrum,
    Convolve,
    DiracIdentity,
    Haar,
    Mix,
    PeakNormalize,
    Power,
    Product,
    ProductSignature,
    RieszFactor,
    Twist,
    central_twist,
    format_spectrum,
    mu_kn_eval,
    parse_product_signature,
    parse_spectrum,
    riesz_eval,
)
from .gap import (
    CaseBound,
    GapCertificate,
    analytic_bound,
    certify_gap,
    exact_sup,
    gamma_analytic,
    half_block_measure,
)
from .peak import (
    PeakPlan,
    amplify,
    apply_twist,
    build_product_peak,
    gap_to_peak,
    minimal_power,
    replay_steps,
    verify_plan,
)
from .montecarlo import (
    SampleStats,
    SGReport,
    TailReport,
    clopper_pearson,
    khintchine_estimate,
    ks_invariance_pvalue,
    psi2_estimate,
    rng_stream,
    sample_haar_unitary,
    sg_check,
    tail_check,
    trace_moments,
)

__version__ = "0.1.0"
