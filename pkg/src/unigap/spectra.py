"""Fourier-side algebra of central measures on products of unitary groups.

A central measure is represented symbolically by an expression tree whose
leaves are atoms with known scalar Fourier transforms and whose internal
nodes are the measure operations (convolution = pointwise product on the
transform side, convex mixture, convolution power, product over group
factors, the center twist, and peak normalization).  Spectra are never
materialized: they are evaluated lazily at one signature at a time, in
exact rational arithmetic.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache

from .errors import ValidationError
from .partitions import (
    Partition,
    Signature,
    conjugate_defining_signature,
    defining_signature,
    trivial_signature,
)
from .schur import dim_schur, skew_count, SkewShape


# ---------------------------------------------------------------------------
# atom transforms


@lru_cache(maxsize=None)
def _mu_kn_cached(k: int, n: int, parts: tuple[int, ...], d: int) -> Fraction:
    lam = Partition(parts)
    if d < 0:
        return Fraction(0)
    if lam.part(k) < d:  # [d]^k not contained in lam
        return Fraction(0)
    if d < lam.part(n - k + 1):
        return Fraction(0)
    inner = Partition([d] * k) if d > 0 else Partition()
    num = skew_count(SkewShape(lam, inner), n - k)
    den = dim_schur(lam, n)
    return Fraction(num, den)


def mu_kn_eval(k: int, n: int, lam: Partition, d: int) -> Fraction:
    """Fourier coefficient of the block-average measure mu_{k,n} (Haar on
    the embedded U(k) block, averaged over conjugation) at the canonical
    signature (lam, d): zero when d < 0, when the k x d rectangle is not
    contained in lam, or when d < lam_{n-k+1}; otherwise the exact ratio
    s_{lam/[d]^k}(1^{n-k}) / s_lam(1^n), a rational in [0, 1]."""
    if not (1 <= k < n):
        raise ValidationError(f"need 1 <= k < n, got k={k}, n={n}")
    if len(lam) > n - 1:
        raise ValidationError(f"partition {lam} is not canonical for U({n})")
    return _mu_kn_cached(k, n, lam.parts, d)


def riesz_eval(delta: Fraction, n: int, lam: Partition, d: int) -> Fraction:
    """Fourier coefficient of the Riesz-type factor with density
    1 + delta(tr + conj tr) on U(n): 1 at the trivial signature, delta/n at
    the defining signature and its conjugate, 0 elsewhere."""
    delta = Fraction(delta)
    if not (0 < delta <= Fraction(1, 2 * n)):
        raise ValidationError(f"need 0 < delta <= 1/(2n), got {delta} for n={n}")
    if len(lam) > n - 1:
        raise ValidationError(f"partition {lam} is not canonical for U({n})")
    sig = Signature.from_lambda_d(n, lam, d)
    if sig.is_trivial:
        return Fraction(1)
    if sig == defining_signature(n) or sig == conjugate_defining_signature(n):
        return Fraction(delta, n)
    return Fraction(0)


# ---------------------------------------------------------------------------
# product signatures


class ProductSignature:
    """One signature per factor of a product group prod_k U(d_k)."""

    __slots__ = ("components",)

    def __init__(self, components):
        comps = tuple(components)
        if not comps:
            raise ValidationError("product signature needs at least one component")
        for c in comps:
            if not isinstance(c, Signature):
                raise ValidationError(f"component {c!r} is not a Signature")
        object.__setattr__(self, "components", comps)

    def __setattr__(self, name, value):
        raise AttributeError("ProductSignature is immutable")

    def __reduce__(self):
        return (ProductSignature, (self.components,))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c.n for c in self.components)

    @property
    def weight(self) -> int:
        """Total central-circle weight: sum over factors of sum(m_i)."""
        return sum(c.weight for c in self.components)

    @property
    def is_trivial(self) -> bool:
        return all(c.is_trivial for c in self.components)

    def __eq__(self, other) -> bool:
        return isinstance(other, ProductSignature) and self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __repr__(self) -> str:
        return f"ProductSignature({list(self.components)})"

    def __str__(self) -> str:
        return "|".join(format_signature(c) for c in self.components)


def format_signature(sig: Signature) -> str:
    lam, d = sig.to_lambda_d()
    return f"lambda={lam};d={d}"


def parse_signature(text: str, n: int) -> Signature:
    """Parse one "lambda=2,1,0;d=1" component for a given factor size."""
    m = re.fullmatch(r"\s*lambda=([0-9,\s]*);\s*d=(-?\d+)\s*", text)
    if not m:
        raise ValidationError(f"bad signature text {text!r}")
    lam = Partition.parse(m.group(1))
    d = int(m.group(2))
    return Signature.from_lambda_d(n, lam, d)


def parse_product_signature(text: str, dims: tuple[int, ...]) -> ProductSignature:
    """Parse "lambda=..;d=..|lambda=..;d=.." against the factor sizes."""
    pieces = text.split("|")
    if len(pieces) != len(dims):
        raise ValidationError(
            f"signature has {len(pieces)} factors but the group has {len(dims)}"
        )
    return ProductSignature(
        parse_signature(piece, n) for piece, n in zip(pieces, dims)
    )


# ---------------------------------------------------------------------------
# expression tree


class CentralSpectrum:
    """Base class for the symbolic transform of a central measure.

    Every node knows the factor sizes of the group it lives on and an
    exact upper bound on the total-variation norm of the measure it
    represents; both are fixed at construction."""

    __slots__ = ("group", "tv_bound")

    def __init__(self, group: tuple[int, ...], tv_bound: Fraction):
        object.__setattr__(self, "group", tuple(int(d) for d in group))
        object.__setattr__(self, "tv_bound", Fraction(tv_bound))

    def __setattr__(self, name, value):
        raise AttributeError("spectra are immutable")

    def eval(self, pi) -> Fraction:
        """Exact transform value at a signature.  A bare Signature is
        accepted for single-factor groups."""
        if isinstance(pi, Signature):
            pi = ProductSignature([pi])
        if pi.dims != self.group:
            raise ValidationError(
                f"signature dims {pi.dims} do not match group {self.group}"
            )
        return self._eval(pi)

    def _eval(self, pi: ProductSignature) -> Fraction:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({format_spectrum(self)!r})"

    def __str__(self):
        return format_spectrum(self)


class BlockHaar(CentralSpectrum):
    """mu(k, n): Haar measure on the embedded U(k) block of U(n), averaged
    over conjugation.  A central probability measure."""

    __slots__ = ("k", "n")

    def __init__(self, k: int, n: int):
        if not (1 <= k < n):
            raise ValidationError(f"need 1 <= k < n, got k={k}, n={n}")
        super().__init__((n,), Fraction(1))
        object.__setattr__(self, "k", int(k))
        object.__setattr__(self, "n", int(n))

    def __reduce__(self):
        return (BlockHaar, (self.k, self.n))

    def _eval(self, pi):
        lam, d = pi.components[0].to_lambda_d()
        return mu_kn_eval(self.k, self.n, lam, d)


class RieszFactor(CentralSpectrum):
    """riesz(delta, n): density 1 + delta(tr + conj tr) on U(n)."""

    __slots__ = ("delta", "n")

    def __init__(self, delta, n: int):
        delta = Fraction(delta)
        if not (0 < delta <= Fraction(1, 2 * int(n))):
            raise ValidationError(f"need 0 < delta <= 1/(2n), got {delta} for n={n}")
        super().__init__((int(n),), Fraction(1))
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "n", int(n))

    def __reduce__(self):
        return (RieszFactor, (self.delta, self.n))

    def _eval(self, pi):
        lam, d = pi.components[0].to_lambda_d()
        return riesz_eval(self.delta, self.n, lam, d)


class Haar(CentralSpectrum):
    """Normalized Haar measure on U(n): transform 1 at the trivial
    signature, 0 elsewhere."""

    __slots__ = ("n",)

    def __init__(self, n: int):
        super().__init__((int(n),), Fraction(1))
        object.__setattr__(self, "n", int(n))

    def __reduce__(self):
        return (Haar, (self.n,))

    def _eval(self, pi):
        return Fraction(1) if pi.components[0].is_trivial else Fraction(0)


class DiracIdentity(CentralSpectrum):
    """Point mass at the identity of U(n): transform 1 everywhere."""

    __slots__ = ("n",)

    def __init__(self, n: int):
        super().__init__((int(n),), Fraction(1))
        object.__setattr__(self, "n", int(n))

    def __reduce__(self):
        return (DiracIdentity, (self.n,))

    def _eval(self, pi):
        return Fraction(1)


class Convolve(CentralSpectrum):
    """Convolution of measures on the same group: pointwise product of
    transforms; total variation multiplies."""

    __slots__ = ("children",)

    def __init__(self, *children: CentralSpectrum):
        if not children:
            raise ValidationError("convolution needs at least one operand")
        group = children[0].group
        for c in children:
            if c.group != group:
                raise ValidationError("convolution operands live on different groups")
        bound = Fraction(1)
        for c in children:
            bound *= c.tv_bound
        super().__init__(group, bound)
        object.__setattr__(self, "children", tuple(children))

    def __reduce__(self):
        return (Convolve, self.children)

    def _eval(self, pi):
        v = Fraction(1)
        for c in self.children:
            v *= c._eval(pi)
            if v == 0:
                break
        return v


class Mix(CentralSpectrum):
    """Convex mixture: weights are non-negative rationals summing to 1."""

    __slots__ = ("weights", "children")

    def __init__(self, weights, children):
        weights = tuple(Fraction(w) for w in weights)
        children = tuple(children)
        if len(weights) != len(children) or not children:
            raise ValidationError("mixture needs matching weights and operands")
        if any(w < 0 for w in weights):
            raise ValidationError("mixture weights must be non-negative")
        if sum(weights) != 1:
            raise ValidationError(f"mixture weights sum to {sum(weights)}, not 1")
        group = children[0].group
        for c in children:
            if c.group != group:
                raise ValidationError("mixture operands live on different groups")
        bound = sum((w * c.tv_bound for w, c in zip(weights, children)), Fraction(0))
        super().__init__(group, bound)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "children", children)

    def __reduce__(self):
        return (Mix, (self.weights, self.children))

    def _eval(self, pi):
        return sum(
            (w * c._eval(pi) for w, c in zip(self.weights, self.children)),
            Fraction(0),
        )


class Power(CentralSpectrum):
    """m-th convolution power: transform raised to the m-th power."""

    __slots__ = ("child", "m")

    def __init__(self, child: CentralSpectrum, m: int):
        m = int(m)
        if m < 1:
            raise ValidationError(f"power must be >= 1, got {m}")
        super().__init__(child.group, child.tv_bound**m)
        object.__setattr__(self, "child", child)
        object.__setattr__(self, "m", m)

    def __reduce__(self):
        return (Power, (self.child, self.m))

    def _eval(self, pi):
        return self.child._eval(pi) ** self.m


class Product(CentralSpectrum):
    """Product measure over disjoint blocks of group factors: the transform
    at a product signature is the product of per-block values."""

    __slots__ = ("children",)

    def __init__(self, *children: CentralSpectrum):
        if not children:
            raise ValidationError("product needs at least one operand")
        group = tuple(d for c in children for d in c.group)
        bound = Fraction(1)
        for c in children:
            bound *= c.tv_bound
        super().__init__(group, bound)
        object.__setattr__(self, "children", tuple(children))

    def __reduce__(self):
        return (Product, self.children)

    def _eval(self, pi):
        v = Fraction(1)
        pos = 0
        for c in self.children:
            width = len(c.group)
            sub = ProductSignature(pi.components[pos : pos + width])
            v *= c._eval(sub)
            pos += width
            if v == 0:
                break
        return v


class Twist(CentralSpectrum):
    """Center twist: integrate z * (translate by zI) over the central
    circle.  Keeps exactly the signatures of total weight 1 and kills the
    rest; the total-variation bound is unchanged."""

    __slots__ = ("child",)

    def __init__(self, child: CentralSpectrum):
        super().__init__(child.group, child.tv_bound)
        object.__setattr__(self, "child", child)

    def __reduce__(self):
        return (Twist, (self.child,))

    def _eval(self, pi):
        if pi.weight != 1:
            return Fraction(0)
        return self.child._eval(pi)


class PeakNormalize(CentralSpectrum):
    """The signed measure (mu - Haar) / delta: transform 0 at the trivial
    signature and value/delta elsewhere.  Turns a spectral gap at level
    delta into a transform that is exactly 1 on the gap set."""

    __slots__ = ("child", "delta")

    def __init__(self, child: CentralSpectrum, delta):
        delta = Fraction(delta)
        if not (0 < delta <= 1):
            raise ValidationError(f"need 0 < delta <= 1, got {delta}")
        super().__init__(child.group, (child.tv_bound + 1) / delta)
        object.__setattr__(self, "child", child)
        object.__setattr__(self, "delta", delta)

    def __reduce__(self):
        return (PeakNormalize, (self.child, self.delta))

    def _eval(self, pi):
        v = self.child._eval(pi)
        if pi.is_trivial:
            v -= 1
        return v / self.delta


def central_twist(spec: CentralSpectrum) -> CentralSpectrum:
    """Apply the center twist to a spectrum."""
    return Twist(spec)


# ---------------------------------------------------------------------------
# text grammar


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def format_spectrum(spec: CentralSpectrum) -> str:
    if isinstance(spec, BlockHaar):
        return f"mu({spec.k},{spec.n})"
    if isinstance(spec, RieszFactor):
        return f"riesz({format_fraction(spec.delta)},{spec.n})"
    if isinstance(spec, Haar):
        return f"haar({spec.n})"
    if isinstance(spec, DiracIdentity):
        return f"dirac({spec.n})"
    if isinstance(spec, Convolve):
        return "conv(" + ", ".join(format_spectrum(c) for c in spec.children) + ")"
    if isinstance(spec, Mix):
        inner = ", ".join(
            f"{format_fraction(w)}: {format_spectrum(c)}"
            for w, c in zip(spec.weights, spec.children)
        )
        return f"mix({inner})"
    if isinstance(spec, Power):
        return f"pow({format_spectrum(spec.child)}, {spec.m})"
    if isinstance(spec, Product):
        return "prod(" + ", ".join(format_spectrum(c) for c in spec.children) + ")"
    if isinstance(spec, Twist):
        return f"twist({format_spectrum(spec.child)})"
    if isinstance(spec, PeakNormalize):
        return f"norm({format_spectrum(spec.child)}, {format_fraction(spec.delta)})"
    raise ValidationError(f"unknown spectrum node {type(spec).__name__}")


class _Parser:
    """Recursive-descent parser for the spectrum text grammar:

        expr  := mu(k, n) | riesz(frac, n) | haar(n) | dirac(n)
               | conv(expr, ...) | mix(frac: expr, ...) | pow(expr, int)
               | prod(expr, ...) | twist(expr) | norm(expr, frac)
        frac  := int | int/int
    """

    def __init__(self, text: str):
        self.tokens = re.findall(r"[A-Za-z_]+|-?\d+|[(),:/]", text)
        self.pos = 0
        rest = re.sub(r"[A-Za-z_]+|-?\d+|[(),:/]|\s+", "", text)
        if rest:
            raise ValidationError(f"unexpected characters {rest!r} in spectrum text")

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None:
            raise ValidationError("unexpected end of spectrum text")
        if expected is not None and tok != expected:
            raise ValidationError(f"expected {expected!r}, got {tok!r}")
        self.pos += 1
        return tok

    def parse_int(self) -> int:
        tok = self.take()
        try:
            return int(tok)
        except ValueError as exc:
            raise ValidationError(f"expected integer, got {tok!r}") from exc

    def parse_fraction(self) -> Fraction:
        num = self.parse_int()
        if self.peek() == "/":
            self.take("/")
            return Fraction(num, self.parse_int())
        return Fraction(num)

    def parse_expr(self) -> CentralSpectrum:
        head = self.take()
        self.take("(")
        if head == "mu":
            k = self.parse_int()
            self.take(",")
            n = self.parse_int()
            node = BlockHaar(k, n)
        elif head == "riesz":
            delta = self.parse_fraction()
            self.take(",")
            n = self.parse_int()
            node = RieszFactor(delta, n)
        elif head == "haar":
            node = Haar(self.parse_int())
        elif head == "dirac":
            node = DiracIdentity(self.parse_int())
        elif head == "conv":
            node = Convolve(*self._expr_list())
        elif head == "prod":
            node = Product(*self._expr_list())
        elif head == "mix":
            weights = []
            children = []
            while True:
                weights.append(self.parse_fraction())
                self.take(":")
                children.append(self.parse_expr())
                if self.peek() != ",":
                    break
                self.take(",")
            node = Mix(weights, children)
        elif head == "pow":
            child = self.parse_expr()
            self.take(",")
            node = Power(child, self.parse_int())
        elif head == "twist":
            node = Twist(self.parse_expr())
        elif head == "norm":
            child = self.parse_expr()
            self.take(",")
            node = PeakNormalize(child, self.parse_fraction())
        else:
            raise ValidationError(f"unknown spectrum operator {head!r}")
        self.take(")")
        return node

    def _expr_list(self):
        exprs = [self.parse_expr()]
        while self.peek() == ",":
            self.take(",")
            exprs.append(self.parse_expr())
        return exprs


def parse_spectrum(text: str) -> CentralSpectrum:
    """Parse the text grammar, e.g. "mix(1/2: mu(2,5), 1/2: mu(3,5))"."""
    parser = _Parser(text)
    node = parser.parse_expr()
    if parser.peek() is not None:
        raise ValidationError(f"trailing tokens after spectrum: {parser.tokens[parser.pos:]}")
    return node


def trivial_product_signature(dims) -> ProductSignature:
    return ProductSignature(trivial_signature(d) for d in dims)
