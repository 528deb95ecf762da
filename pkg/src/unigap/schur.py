"""Exact Schur and skew-Schur evaluations at 1^m, and numeric character
values at arbitrary torus points.

All counts are exact big integers.  Two independent routes are provided
for each count: a closed-form / determinant route (dim_schur, skew_count)
and an exhaustive tableau enumeration (ssyt_brute) used as an oracle in
the tests.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .errors import RefusalError, ValidationError
from .partitions import Partition, SkewShape

SSYT_CELL_CAP = 20


@lru_cache(maxsize=None)
def _dim_schur_cached(parts: tuple[int, ...], m: int) -> int:
    if len(parts) > m:
        return 0
    # hook-content formula: prod over cells of (m + content) / hook;
    # O(|lam|) instead of the O(m^2) pairwise Weyl product.
    cols = [0] * (parts[0] if parts else 0)
    for p in parts:
        for j in range(p):
            cols[j] += 1
    num = 1
    den = 1
    for i, p in enumerate(parts):
        for j in range(p):
            num *= m + j - i
            den *= (p - j) + (cols[j] - i) - 1
    q, r = divmod(num, den)
    assert r == 0
    return q


def weyl_dimension_product(parts: tuple[int, ...], m: int) -> int:
    """s_lam(1^m) by the pairwise Weyl quotient
    prod_{i<j<=m} (lam_i - lam_j + j - i)/(j - i); independent route used
    to cross-check the hook-content product."""
    if len(parts) > m:
        return 0
    lam = parts + (0,) * (m - len(parts))
    num = 1
    den = 1
    for i in range(m):
        for j in range(i + 1, m):
            num *= lam[i] - lam[j] + j - i
            den *= j - i
    q, r = divmod(num, den)
    assert r == 0
    return q


def dim_schur(lam: Partition, m: int) -> int:
    """s_lam(1^m): the number of semistandard fillings of lam with entries
    in {1..m}, equal to the dimension of the U(m) irrep with highest
    weight lam.  Zero when lam has more than m nonzero parts."""
    if m < 0:
        raise ValidationError(f"variable count must be >= 0, got {m}")
    return _dim_schur_cached(lam.parts, m)


def _h_unit(r: int, m: int) -> int:
    """Complete homogeneous symmetric polynomial h_r at 1^m."""
    if r < 0:
        return 0
    if r == 0:
        return 1
    if m == 0:
        return 0
    return comb(m + r - 1, r)


def _e_unit(r: int, m: int) -> int:
    """Elementary symmetric polynomial e_r at 1^m."""
    if r < 0:
        return 0
    return comb(m, r)


def _det_bareiss(a: list[list[int]]) -> int:
    """Exact integer determinant (fraction-free Gaussian elimination)."""
    n = len(a)
    if n == 0:
        return 1
    a = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@lru_cache(maxsize=None)
def _skew_count_cached(outer: tuple[int, ...], inner: tuple[int, ...], m: int) -> int:
    lam = Partition(outer)
    mu = Partition(inner)
    if not mu.parts:
        return _dim_schur_cached(outer, m)
    rows = len(lam)
    cols = lam.part(1)
    if cols <= rows:
        # dual Jacobi-Trudi on the conjugate shape: det[e_{lam'_i - mu'_j - i + j}]
        lc = lam.conjugate()
        mc = mu.conjugate()
        mat = [
            [_e_unit(lc.part(i) - mc.part(j) - i + j, m) for j in range(1, cols + 1)]
            for i in range(1, cols + 1)
        ]
    else:
        # Jacobi-Trudi: det[h_{lam_i - mu_j - i + j}]
        mat = [
            [_h_unit(lam.part(i) - mu.part(j) - i + j, m) for j in range(1, rows + 1)]
            for i in range(1, rows + 1)
        ]
    return _det_bareiss(mat)


def skew_count(shape: SkewShape, m: int) -> int:
    """s_{lam/mu}(1^m): the number of semistandard fillings of the skew
    diagram with entries in {1..m}, via the skew Jacobi-Trudi determinant
    (the smaller of the h- and e-forms is used).  Equals 1 when the shape
    is empty."""
    if m < 0:
        raise ValidationError(f"variable count must be >= 0, got {m}")
    return _skew_count_cached(shape.outer.parts, shape.inner.parts, m)


def ssyt_brute(shape: SkewShape, m: int) -> int:
    """Count semistandard fillings by exhaustive backtracking: entries in
    {1..m}, weakly increasing along rows, strictly increasing down
    columns.  Independent oracle for dim_schur and skew_count; refuses
    shapes with more than SSYT_CELL_CAP cells."""
    if m < 0:
        raise ValidationError(f"variable count must be >= 0, got {m}")
    if shape.cells > SSYT_CELL_CAP:
        raise RefusalError(
            f"{shape.cells} cells exceeds brute-force cap {SSYT_CELL_CAP}"
        )
    outer, inner = shape.outer, shape.inner
    cells = [
        (i, j)
        for i in range(len(outer))
        for j in range(inner.part(i + 1), outer.part(i + 1))
    ]
    if not cells:
        return 1
    if m == 0:
        return 0
    fill: dict[tuple[int, int], int] = {}

    def extend(idx: int) -> int:
        if idx == len(cells):
            return 1
        i, j = cells[idx]
        lo = 1
        left = fill.get((i, j - 1))
        if left is not None:
            lo = max(lo, left)
        up = fill.get((i - 1, j))
        if up is not None:
            lo = max(lo, up + 1)
        if lo > m:
            return 0
        total = 0
        for v in range(lo, m + 1):
            fill[(i, j)] = v
            total += extend(idx + 1)
        del fill[(i, j)]
        return total

    return extend(0)


def char_eval(lam: Partition, t: tuple[complex, ...] | list[complex]) -> complex:
    """Schur polynomial s_lam(t_1..t_n) via the Jacobi-Trudi determinant in
    complete homogeneous polynomials; for unit-modulus t this is the
    character of the U(n) irrep lam at a diagonal unitary with those
    eigenvalues."""
    t = tuple(complex(x) for x in t)
    n = len(t)
    if len(lam) > n:
        raise ValidationError(
            f"partition {lam} has more parts than the {n} provided eigenvalues"
        )
    rows = len(lam)
    if rows == 0:
        return 1.0 + 0.0j
    rmax = lam.part(1) + rows
    # h_r in all n variables by the generating recurrence
    # h_r(t_1..t_k) = h_r(t_1..t_{k-1}) + t_k h_{r-1}(t_1..t_k).
    h = [0j] * (rmax + 1)
    h[0] = 1.0 + 0.0j
    for x in t:
        for r in range(1, rmax + 1):
            h[r] += x * h[r - 1]

    def h_at(r: int) -> complex:
        return h[r] if 0 <= r <= rmax else 0j

    mat = np.array(
        [
            [h_at(lam.part(i) - i + j) for j in range(1, rows + 1)]
            for i in range(1, rows + 1)
        ],
        dtype=complex,
    )
    return complex(np.linalg.det(mat))


def schur_unit_ratio(outer: Partition, inner: Partition, m_skew: int, m_full: int) -> Fraction:
    """Exact ratio s_{outer/inner}(1^m_skew) / s_outer(1^m_full); zero
    denominator raises."""
    den = dim_schur(outer, m_full)
    if den == 0:
        raise ValidationError(f"vanishing dimension for {outer} in {m_full} variables")
    return Fraction(skew_count(SkewShape(outer, inner), m_skew), den)
