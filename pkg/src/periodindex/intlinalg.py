"""Exact linear algebra over the integers.

Matrices are tuples of tuples of Python ints (rows).  The workhorses are a
fraction-free Bareiss determinant and a Smith normal form with both
transformation matrices, from which integer kernels, solvability of linear
systems and quotient-group structure all follow.
"""
from __future__ import annotations

from collections.abc import Sequence

Vec = tuple[int, ...]
Mat = tuple[Vec, ...]


def mat(rows: Sequence[Sequence[int]]) -> Mat:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity(n: int) -> Mat:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(a: Mat) -> Mat:
    return tuple(zip(*a)) if a else ()


def mat_vec(a: Mat, v: Sequence[int]) -> Vec:
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in a)


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def is_symmetric(a: Mat) -> bool:
    n = len(a)
    return all(len(row) == n for row in a) and all(
        a[i][j] == a[j][i] for i in range(n) for j in range(i)
    )


def det(a: Mat) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise ValueError("det expects a square matrix")
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pivot_row = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if pivot_row is None:
                return 0
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def smith_normal_form(a: Mat) -> tuple[Mat, Mat, Mat]:
    """Return (s, u, v) with u * a * v = s in Smith normal form.

    u and v are unimodular; s is diagonal with non-negative entries, each
    dividing the next.  Entry growth is controlled by always pivoting on the
    smallest-magnitude nonzero entry of the working block.
    """
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    s = [list(row) for row in a]
    if any(len(row) != ncols for row in s):
        raise ValueError("ragged matrix")
    u = [[int(i == j) for j in range(nrows)] for i in range(nrows)]
    v = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        s[dst] = [x + c * y for x, y in zip(s[dst], s[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, c):
        for row in s:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    def negate_row(i):
        s[i] = [-x for x in s[i]]
        u[i] = [-x for x in u[i]]

    for t in range(min(nrows, ncols)):
        while True:
            pivot = None
            for i in range(t, nrows):
                for j in range(t, ncols):
                    if s[i][j] != 0 and (
                        pivot is None or abs(s[i][j]) < abs(s[pivot[0]][pivot[1]])
                    ):
                        pivot = (i, j)
            if pivot is None:
                break
            if pivot != (t, t):
                if pivot[0] != t:
                    swap_rows(t, pivot[0])
                if pivot[1] != t:
                    swap_cols(t, pivot[1])
            dirty = False
            for i in range(t + 1, nrows):
                if s[i][t] != 0:
                    add_row(t, i, -(s[i][t] // s[t][t]))
                    if s[i][t] != 0:
                        dirty = True
            for j in range(t + 1, ncols):
                if s[t][j] != 0:
                    add_col(t, j, -(s[t][j] // s[t][t]))
                    if s[t][j] != 0:
                        dirty = True
            if dirty:
                continue
            # row and column are clean; force divisibility into the rest
            offender = None
            for i in range(t + 1, nrows):
                for j in range(t + 1, ncols):
                    if s[i][j] % s[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(offender, t, 1)
        if t < nrows and t < ncols and s[t][t] < 0:
            negate_row(t)

    return mat(s), mat(u), mat(v)


def elementary_divisors(a: Mat) -> tuple[int, ...]:
    """Nonzero diagonal entries of the Smith normal form, in chain order."""
    s, _, _ = smith_normal_form(a)
    out = []
    for i in range(min(len(s), len(s[0]) if s else 0)):
        if s[i][i] != 0:
            out.append(s[i][i])
    return tuple(out)


def rank(a: Mat) -> int:
    return len(elementary_divisors(a))


def right_kernel_basis(a: Mat) -> tuple[Vec, ...]:
    """Basis of {x : a x = 0} over the integers (a saturated sublattice)."""
    if not a:
        raise ValueError("empty matrix")
    ncols = len(a[0])
    s, _, v = smith_normal_form(a)
    r = len(elementary_divisors(a))
    cols = transpose(v)
    return tuple(cols[j] for j in range(r, ncols))


def solve_integer(a: Mat, target: Sequence[int]) -> Vec | None:
    """One integer solution x of a x = target, or None if none exists."""
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    if len(target) != nrows:
        raise ValueError("target length does not match row count")
    s, u, v = smith_normal_form(a)
    y = mat_vec(u, target)
    z = [0] * ncols
    for i in range(nrows):
        d = s[i][i] if i < ncols else 0
        if d != 0:
            if y[i] % d != 0:
                return None
            z[i] = y[i] // d
        elif y[i] != 0:
            return None
    return mat_vec(v, z)


def block_diag(*blocks: Mat) -> Mat:
    """Block-diagonal assembly of square integer matrices."""
    size = sum(len(b) for b in blocks)
    out = [[0] * size for _ in range(size)]
    offset = 0
    for b in blocks:
        n = len(b)
        for i in range(n):
            if len(b[i]) != n:
                raise ValueError("block_diag expects square blocks")
            for j in range(n):
                out[offset + i][offset + j] = b[i][j]
        offset += n
    return mat(out)
