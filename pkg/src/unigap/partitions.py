"""Partitions, skew shapes and highest-weight signatures of U(n).

A signature is a weakly decreasing integer n-tuple m = (m_1, ..., m_n)
labelling an irreducible representation of U(n).  Factoring out the
determinant character puts it in canonical form (lam, d) with
d = -m_n and lam_j = m_j + d, so lam is a partition whose n-th part is 0.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .errors import ValidationError


class Partition:
    """A weakly decreasing tuple of non-negative integers, stored without
    trailing zeros.  The empty partition is the unique weight-0 value."""

    __slots__ = ("parts",)

    def __init__(self, parts: Iterable[int] = ()):
        p = tuple(int(x) for x in parts)
        for a, b in zip(p, p[1:]):
            if a < b:
                raise ValidationError(f"parts not weakly decreasing: {p}")
        if p and p[-1] < 0:
            raise ValidationError(f"negative part in {p}")
        while p and p[-1] == 0:
            p = p[:-1]
        object.__setattr__(self, "parts", p)

    def __setattr__(self, name, value):
        raise AttributeError("Partition is immutable")

    def __reduce__(self):
        return (Partition, (self.parts,))

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def part(self, i: int) -> int:
        """1-based part access; indices beyond the length read as 0."""
        if i < 1:
            raise ValidationError(f"part index must be >= 1, got {i}")
        return self.parts[i - 1] if i <= len(self.parts) else 0

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self.parts == other.parts

    def __hash__(self) -> int:
        return hash(self.parts)

    def __le__(self, other: "Partition") -> bool:
        """Containment of Young diagrams: self_i <= other_i for all i."""
        if len(self.parts) > len(other.parts):
            return False
        return all(a <= b for a, b in zip(self.parts, other.parts))

    def contains(self, inner: "Partition") -> bool:
        return inner <= self

    def conjugate(self) -> "Partition":
        """Transpose of the Young diagram (column lengths)."""
        if not self.parts:
            return Partition()
        cols = [0] * self.parts[0]
        for p in self.parts:
            for j in range(p):
                cols[j] += 1
        return Partition(cols)

    def __repr__(self) -> str:
        return f"Partition({list(self.parts)})"

    def __str__(self) -> str:
        return ",".join(str(p) for p in self.parts) if self.parts else "0"

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse the comma-separated text form, e.g. "2,1,0".  "0" and the
        empty string both denote the empty partition."""
        text = text.strip()
        if text in ("", "0"):
            return cls()
        try:
            parts = [int(tok) for tok in text.split(",")]
        except ValueError as exc:
            raise ValidationError(f"bad partition text {text!r}") from exc
        return cls(parts)


class SkewShape:
    """A pair of nested partitions inner <= outer; its cells are the boxes
    of outer not in inner."""

    __slots__ = ("outer", "inner")

    def __init__(self, outer: Partition, inner: Partition = Partition()):
        if not inner <= outer:
            raise ValidationError(f"inner {inner} not contained in outer {outer}")
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "inner", inner)

    def __setattr__(self, name, value):
        raise AttributeError("SkewShape is immutable")

    def __reduce__(self):
        return (SkewShape, (self.outer, self.inner))

    @property
    def cells(self) -> int:
        return self.outer.weight - self.inner.weight

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SkewShape)
            and self.outer == other.outer
            and self.inner == other.inner
        )

    def __hash__(self) -> int:
        return hash((self.outer, self.inner))

    def __repr__(self) -> str:
        return f"SkewShape({self.outer!r}, {self.inner!r})"


class Signature:
    """Highest weight of a U(n) irrep: n and a weakly decreasing integer
    n-tuple m (entries may be negative)."""

    __slots__ = ("n", "m")

    def __init__(self, n: int, m: Iterable[int]):
        n = int(n)
        if n < 1:
            raise ValidationError(f"group size must be >= 1, got {n}")
        mt = tuple(int(x) for x in m)
        if len(mt) != n:
            raise ValidationError(f"signature length {len(mt)} != n = {n}")
        for a, b in zip(mt, mt[1:]):
            if a < b:
                raise ValidationError(f"signature not weakly decreasing: {mt}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", mt)

    def __setattr__(self, name, value):
        raise AttributeError("Signature is immutable")

    def __reduce__(self):
        return (Signature, (self.n, self.m))

    @classmethod
    def from_lambda_d(cls, n: int, lam: Partition, d: int) -> "Signature":
        """Rebuild m_j = lam_j - d from the canonical pair."""
        if len(lam) > n - 1:
            raise ValidationError(f"partition {lam} has too many parts for U({n})")
        return cls(n, [lam.part(j) - d for j in range(1, n + 1)])

    def to_lambda_d(self) -> tuple[Partition, int]:
        """Canonical pair (lam, d): d = -m_n, lam_j = m_j + d, lam_n = 0."""
        d = -self.m[-1]
        return Partition(x + d for x in self.m), d

    def conjugate(self) -> "Signature":
        """Signature of the conjugate (contragredient) irrep."""
        return Signature(self.n, [-x for x in reversed(self.m)])

    @property
    def weight(self) -> int:
        """Action weight of the central circle zI: sum of the m_j."""
        return sum(self.m)

    @property
    def is_trivial(self) -> bool:
        return all(x == 0 for x in self.m)

    def __eq__(self, other) -> bool:
        return isinstance(other, Signature) and self.n == other.n and self.m == other.m

    def __hash__(self) -> int:
        return hash((self.n, self.m))

    def __repr__(self) -> str:
        return f"Signature({self.n}, {list(self.m)})"

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.m)

    @classmethod
    def parse(cls, n: int, text: str) -> "Signature":
        """Parse the "m1,m2,...,mn" text form."""
        try:
            m = [int(tok) for tok in text.strip().split(",")]
        except ValueError as exc:
            raise ValidationError(f"bad signature text {text!r}") from exc
        return cls(n, m)


def canonicalize_signature(sig: Signature) -> tuple[Partition, int]:
    """Canonical (lam, d) form of a signature; inverse of
    Signature.from_lambda_d."""
    return sig.to_lambda_d()


def conjugate_signature(sig: Signature) -> Signature:
    return sig.conjugate()


def trivial_signature(n: int) -> Signature:
    return Signature(n, [0] * n)


def defining_signature(n: int) -> Signature:
    """The defining irrep u -> u of U(n), m = (1, 0, ..., 0)."""
    return Signature(n, [1] + [0] * (n - 1))


def conjugate_defining_signature(n: int) -> Signature:
    """The conjugate u -> u-bar of the defining irrep, m = (0, ..., 0, -1)."""
    return defining_signature(n).conjugate()


def partitions_of(weight: int, max_part: int, max_parts: int) -> Iterator[tuple[int, ...]]:
    """All partitions of `weight` with parts <= max_part and at most
    max_parts parts, as decreasing tuples in lexicographically ascending
    order ((1,1,1) before (2,1) before (3))."""
    if weight == 0:
        yield ()
        return
    if max_parts <= 0 or max_part <= 0:
        return
    first_min = -(-weight // max_parts)  # ceil: smallest feasible leading part
    for first in range(first_min, min(weight, max_part) + 1):
        for rest in partitions_of(weight - first, first, max_parts - 1):
            yield (first,) + rest


def enumerate_signatures(
    n: int, weight_cap: int, d_cap: int
) -> Iterator[tuple[Partition, int]]:
    """All canonical pairs (lam, d) for U(n) with |lam| <= weight_cap,
    at most n-1 nonzero parts and 0 <= d <= d_cap, in (weight, lex, d)
    order.  The order is total and deterministic so downstream argmax
    tie-breaking is reproducible."""
    if n < 1:
        raise ValidationError(f"group size must be >= 1, got {n}")
    if weight_cap < 0 or d_cap < 0:
        raise ValidationError("caps must be >= 0")
    for w in range(weight_cap + 1):
        for parts in partitions_of(w, w, n - 1):
            lam = Partition(parts)
            for d in range(d_cap + 1):
                yield lam, d
