"""
Exact rational scalars, vectors and matrices.

Everything here is built on :class:`fractions.Fraction`, which is always kept in lowest terms
with a positive denominator, so structural equality is numerical equality.
Vectors and matrices are plain tuples, hence immutable and safe to share.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import factorial
from typing import Iterable, Sequence, Tuple, Union


Rat = Fraction
RatVec = Tuple[Fraction, ...]
RatMat = Tuple[RatVec, ...]

RatIsh = Union[Fraction, int, str]


class ExactError(Exception):
    pass


class NotSymmetric(ExactError):
    pass


class NotPositiveDefinite(ExactError):
    pass


class Singular(ExactError):
    pass


class DimensionMismatch(ExactError):
    pass


ZERO = Fraction(0)
ONE = Fraction(1)


def parse_rat(x: RatIsh | float) -> Fraction:
    """
    >>> parse_rat('3/6')
    Fraction(1, 2)
    >>> parse_rat(-4)
    Fraction(-4, 1)
    >>> parse_rat('0.25')
    Fraction(1, 4)
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError(f'not a rational: {x!r}')
    if isinstance(x, float):
        # go through the shortest repr, so 0.1 means 1/10 rather than its binary expansion
        return Fraction(repr(x))
    if isinstance(x, (int, str)):
        return Fraction(x.strip() if isinstance(x, str) else x)
    raise TypeError(f'not a rational: {x!r}')


def format_rat(x: Fraction | int) -> str:
    """
    >>> format_rat(Fraction(6, 4))
    '3/2'
    >>> format_rat(Fraction(-2))
    '-2'
    """
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f'{x.numerator}/{x.denominator}'


def format_decimal(x: Fraction, digits: int = 12) -> str:
    """
    Exact rounding (half away from zero) to a fixed number of decimals.

    >>> format_decimal(Fraction(5, 4), 3)
    '1.250'
    >>> format_decimal(Fraction(-1, 3), 4)
    '-0.3333'
    """
    sign = '-' if x < 0 else ''
    scaled = abs(x) * 10 ** digits
    q, r = divmod(scaled.numerator, scaled.denominator)
    if 2 * r >= scaled.denominator:
        q += 1
    whole, frac = divmod(q, 10 ** digits)
    if digits == 0:
        return f'{sign}{whole}'
    return f'{sign}{whole}.{frac:0{digits}d}'


def vec(xs: Iterable[RatIsh | float]) -> RatVec:
    return tuple(parse_rat(x) for x in xs)


def mat(rows: Iterable[Iterable[RatIsh | float]]) -> RatMat:
    m = tuple(vec(r) for r in rows)
    if len(m) == 0:
        raise DimensionMismatch('empty matrix')
    width = len(m[0])
    if width == 0 or any(len(r) != width for r in m):
        raise DimensionMismatch(f'ragged matrix: {[len(r) for r in m]}')
    return m


def zeros(n: int) -> RatVec:
    return (ZERO,) * n


def identity(n: int) -> RatMat:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def diag(entries: Iterable[RatIsh]) -> RatMat:
    es = vec(entries)
    n = len(es)
    return tuple(tuple(es[i] if i == j else ZERO for j in range(n)) for i in range(n))


def _check_same(a: Sequence, b: Sequence) -> None:
    if len(a) != len(b):
        raise DimensionMismatch(f'{len(a)} != {len(b)}')


def add(a: RatVec, b: RatVec) -> RatVec:
    _check_same(a, b)
    return tuple(x + y for x, y in zip(a, b))


def sub(a: RatVec, b: RatVec) -> RatVec:
    _check_same(a, b)
    return tuple(x - y for x, y in zip(a, b))


def neg(a: RatVec) -> RatVec:
    return tuple(-x for x in a)


def scale(k: RatIsh, a: RatVec) -> RatVec:
    kk = parse_rat(k)
    return tuple(kk * x for x in a)


def dot(a: Sequence[Fraction | int], b: Sequence[Fraction | int]) -> Fraction:
    _check_same(a, b)
    return Fraction(sum((x * y for x, y in zip(a, b)), ZERO))


def vsum(vs: Iterable[RatVec], n: int) -> RatVec:
    acc = [ZERO] * n
    for v in vs:
        for i, x in enumerate(v):
            acc[i] += x
    return tuple(acc)


def transpose(m: RatMat) -> RatMat:
    return tuple(zip(*m))


def mat_vec(m: RatMat, v: Sequence[Fraction | int]) -> RatVec:
    return tuple(dot(row, v) for row in m)


def matmul(a: RatMat, b: RatMat) -> RatMat:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def is_square(m: RatMat) -> bool:
    return all(len(r) == len(m) for r in m)


def is_symmetric(m: RatMat) -> bool:
    n = len(m)
    return is_square(m) and all(m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n))


def ldl_decompose(g: RatMat) -> Tuple[RatMat, RatMat]:
    """
    Square-root-free Cholesky: G = L·D·Lᵀ with L unit lower triangular and D diagonal.
    Raises NotPositiveDefinite as soon as a pivot is not strictly positive.
    """
    if not is_symmetric(g):
        raise NotSymmetric(f'gram matrix is not symmetric: {g}')
    n = len(g)
    l = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    d = [ZERO] * n
    for j in range(n):
        dj = g[j][j] - sum((l[j][k] ** 2 * d[k] for k in range(j)), ZERO)
        if dj <= 0:
            raise NotPositiveDefinite(f'pivot {j} is {format_rat(dj)}')
        d[j] = dj
        for i in range(j + 1, n):
            lij = g[i][j] - sum((l[i][k] * l[j][k] * d[k] for k in range(j)), ZERO)
            l[i][j] = lij / dj
    return tuple(map(tuple, l)), diag(d)


def _eliminate(rows: Sequence[Sequence[Fraction]]) -> Tuple[list[list[Fraction]], list[int], int]:
    """
    Gaussian elimination with row swaps. Returns the echelon form, the pivot columns and the
    number of swaps performed.
    """
    m = [list(r) for r in rows]
    if not m:
        return m, [], 0
    ncols = len(m[0])
    pivots: list[int] = []
    swaps = 0
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            m[r], m[p] = m[p], m[r]
            swaps += 1
        piv = m[r][c]
        for i in range(r + 1, len(m)):
            f = m[i][c]
            if f != 0:
                f /= piv
                row_r = m[r]
                m[i] = [x - f * y for x, y in zip(m[i], row_r)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots, swaps


def det(m: RatMat) -> Fraction:
    if not is_square(m):
        raise DimensionMismatch('det of a non-square matrix')
    ech, pivots, swaps = _eliminate(m)
    if len(pivots) < len(m):
        return ZERO
    res = ONE
    for i in range(len(m)):
        res *= ech[i][i]
    return -res if swaps % 2 else res


def int_det(m: Sequence[Sequence[int]]) -> int:
    """
    Fraction-free (Bareiss) elimination, every intermediate stays an integer.

    >>> int_det([[2, 1], [1, 2]])
    3
    >>> int_det([[0, 1, 0], [1, 0, 0], [0, 0, 5]])
    -5
    """
    a = [list(row) for row in m]
    n = len(a)
    if any(len(row) != n for row in a):
        raise DimensionMismatch('det of a non-square matrix')
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(_eliminate(rows)[1])


def affine_rank(points: Sequence[RatVec]) -> int:
    """Dimension of the affine hull; -1 for the empty set."""
    if len(points) == 0:
        return -1
    p0 = points[0]
    return rank([sub(p, p0) for p in points[1:]])


def solve(a: RatMat, b: Sequence[Fraction | int]) -> RatVec:
    n = len(a)
    if not is_square(a) or len(b) != n:
        raise DimensionMismatch(f'cannot solve {n}x{len(a[0])} system with rhs of length {len(b)}')
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(a, b)]
    ech, pivots, _ = _eliminate(aug)
    if pivots[:n] != list(range(n)) or len(pivots) > n:
        raise Singular(f'singular system: {a}')
    x = [ZERO] * n
    for i in reversed(range(n)):
        s = ech[i][n] - sum((ech[i][j] * x[j] for j in range(i + 1, n)), ZERO)
        x[i] = s / ech[i][i]
    return tuple(x)


def inverse(a: RatMat) -> RatMat:
    n = len(a)
    cols = [solve(a, tuple(ONE if i == j else ZERO for i in range(n))) for j in range(n)]
    return transpose(tuple(cols))


def simplex_volume(points: Sequence[RatVec]) -> Fraction:
    """|det(v1 - v0, ..., vn - v0)| / n!"""
    p0 = points[0]
    n = len(p0)
    if len(points) != n + 1:
        raise DimensionMismatch(f'{len(points)} points do not span an {n}-simplex')
    d = det(tuple(sub(p, p0) for p in points[1:]))
    return abs(d) / factorial(n)


def binary_vectors(n: int) -> list[Tuple[int, ...]]:
    return list(product((0, 1), repeat=n))
