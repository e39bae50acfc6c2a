"""Exact integer matrix arithmetic and normal forms.

Everything in this module works with arbitrary-precision Python integers;
no floating point is ever involved and no overflow can occur.  The module
provides

* ``IntMatrix``       -- an immutable row-major integer matrix,
* ``snf``             -- Smith normal form with unimodular transforms,
* ``column_hnf``      -- the canonical column-style Hermite normal form,
                         used as the canonical basis of a column lattice,
* ``kernel_basis``    -- a basis of the integer kernel of a matrix,
* ``solve``           -- a particular integer solution of ``A x = b``,
* ``lattice_solve``   -- coordinates of a vector in an HNF lattice basis.

Lattices (subgroups of Z^n) are always represented by the columns of a
matrix; two generating matrices span the same lattice exactly when their
column HNFs coincide, which is how all lattice comparisons are done.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd


def gcdex(a: int, b: int) -> tuple[int, int, int]:
    """Extended gcd: return ``(g, x, y)`` with ``g = x*a + y*b`` and ``g >= 0``."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


@dataclass(frozen=True)
class IntMatrix:
    """An immutable integer matrix with explicit row and column counts.

    ``entries`` is a tuple of row tuples.  Zero-row and zero-column
    matrices are legal (and common: a free group has a relation matrix
    with zero columns), which is why the dimensions are stored explicitly.
    """

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix dimensions")
        if len(self.entries) != self.rows:
            raise ValueError("row count mismatch")
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError("column count mismatch")

    @classmethod
    def from_rows(cls, rows: list[list[int]], cols: int | None = None) -> "IntMatrix":
        r = len(rows)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(r, cols, tuple(tuple(int(x) for x in row) for row in rows))

    @classmethod
    def from_cols(cls, cols: list[list[int]], rows: int | None = None) -> "IntMatrix":
        c = len(cols)
        if rows is None:
            rows = len(cols[0]) if cols else 0
        return cls(rows, c, tuple(tuple(int(col[i]) for col in cols) for i in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self) -> list[tuple[int, ...]]:
        return [self.col(j) for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(tuple(self.entries[i][j] for i in range(self.rows))
                               for j in range(self.cols)))

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ot = other.transpose().entries
        return IntMatrix(self.rows, other.cols,
                         tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in ot)
                               for row in self.entries))

    def apply(self, vec: tuple[int, ...] | list[int]) -> tuple[int, ...]:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(row, vec)) for row in self.entries)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in addition")
        return IntMatrix(self.rows, self.cols,
                         tuple(tuple(a + b for a, b in zip(r1, r2))
                               for r1, r2 in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols,
                         tuple(tuple(-a for a in row) for row in self.entries))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scaled(self, c: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols,
                         tuple(tuple(c * a for a in row) for row in self.entries))

    def det(self) -> int:
        """Determinant by the Bareiss fraction-free algorithm (exact)."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = [list(row) for row in self.entries]
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
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.entries[i][i] for i in range(min(self.rows, self.cols)))

    def __str__(self) -> str:
        return "[" + "; ".join(" ".join(str(x) for x in row) for row in self.entries) + "]"


def hstack(*ms: IntMatrix) -> IntMatrix:
    if not ms:
        raise ValueError("hstack of nothing")
    rows = ms[0].rows
    if any(m.rows != rows for m in ms):
        raise ValueError("row mismatch in hstack")
    return IntMatrix(rows, sum(m.cols for m in ms),
                     tuple(tuple(x for m in ms for x in m.entries[i]) for i in range(rows)))


def vstack(*ms: IntMatrix) -> IntMatrix:
    if not ms:
        raise ValueError("vstack of nothing")
    cols = ms[0].cols
    if any(m.cols != cols for m in ms):
        raise ValueError("column mismatch in vstack")
    return IntMatrix(sum(m.rows for m in ms), cols,
                     tuple(row for m in ms for row in m.entries))


def block_diag(*ms: IntMatrix) -> IntMatrix:
    rows = sum(m.rows for m in ms)
    cols = sum(m.cols for m in ms)
    out = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for m in ms:
        for i in range(m.rows):
            out[r0 + i][c0:c0 + m.cols] = list(m.entries[i])
        r0 += m.rows
        c0 += m.cols
    return IntMatrix.from_rows(out, cols=cols)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def snf(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form with transforms.

    Returns ``(U, S, V)`` where ``U`` and ``V`` are unimodular
    (``|det| = 1``), ``S = U @ m @ V`` is (rectangular) diagonal with
    nonnegative entries ``d_1 | d_2 | ...`` forming a divisibility chain.

    The pivot at each stage is the entry of smallest nonzero absolute
    value in the remaining submatrix, which keeps intermediate entries
    small.
    """
    n, k = m.rows, m.cols
    a = [list(row) for row in m.entries]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    v = [[1 if i == j else 0 for j in range(k)] for i in range(k)]

    def swap_rows(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        if i != j:
            for row in a:
                row[i], row[j] = row[j], row[i]
            for row in v:
                row[i], row[j] = row[j], row[i]

    def combine_rows(i, j, x, y, p, q):
        # rows (i, j) <- (x*row_i + y*row_j, -q*row_i + p*row_j); det = xp + yq
        for t in range(k):
            ai, aj = a[i][t], a[j][t]
            a[i][t] = x * ai + y * aj
            a[j][t] = -q * ai + p * aj
        for t in range(n):
            ui, uj = u[i][t], u[j][t]
            u[i][t] = x * ui + y * uj
            u[j][t] = -q * ui + p * uj

    def combine_cols(i, j, x, y, p, q):
        for row in a:
            ai, aj = row[i], row[j]
            row[i] = x * ai + y * aj
            row[j] = -q * ai + p * aj
        for row in v:
            vi, vj = row[i], row[j]
            row[i] = x * vi + y * vj
            row[j] = -q * vi + p * vj

    def add_row_multiple(dst, src, c):
        for t in range(k):
            a[dst][t] += c * a[src][t]
        for t in range(n):
            u[dst][t] += c * u[src][t]

    def negate_row(i):
        for t in range(k):
            a[i][t] = -a[i][t]
        for t in range(n):
            u[i][t] = -u[i][t]

    dim = min(n, k)
    t = 0
    while t < dim:
        # pivot: smallest nonzero absolute value in the trailing submatrix
        piv = None
        best = None
        for i in range(t, n):
            for j in range(t, k):
                x = a[i][j]
                if x != 0 and (best is None or abs(x) < best):
                    best = abs(x)
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            for i in range(t + 1, n):
                if a[i][t] != 0:
                    p0, e = a[t][t], a[i][t]
                    if e % p0 == 0:
                        add_row_multiple(i, t, -(e // p0))
                    else:
                        g, x, y = gcdex(p0, e)
                        combine_rows(t, i, x, y, p0 // g, e // g)
            col_clean = all(a[i][t] == 0 for i in range(t + 1, n))
            for j in range(t + 1, k):
                if a[t][j] != 0:
                    p0, e = a[t][t], a[t][j]
                    if e % p0 == 0:
                        c = -(e // p0)
                        for row in a:
                            row[j] += c * row[t]
                        for row in v:
                            row[j] += c * row[t]
                    else:
                        g, x, y = gcdex(p0, e)
                        combine_cols(t, j, x, y, p0 // g, e // g)
            row_clean = all(a[t][j] == 0 for j in range(t + 1, k))
            col_clean = col_clean and all(a[i][t] == 0 for i in range(t + 1, n))
            if not (row_clean and col_clean):
                continue
            # force the divisibility chain: the pivot must divide the rest
            d = a[t][t]
            bad = None
            for i in range(t + 1, n):
                for j in range(t + 1, k):
                    if a[i][j] % d != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row_multiple(t, bad, 1)
        if a[t][t] < 0:
            negate_row(t)
        t += 1
    um = IntMatrix.from_rows(u, cols=n)
    vm = IntMatrix.from_rows(v, cols=k)
    sm = IntMatrix.from_rows(a, cols=k)
    return um, sm, vm


def invariant_diagonal(m: IntMatrix) -> tuple[int, ...]:
    """The diagonal of the Smith form of ``m`` (nonnegative chain)."""
    _, s, _ = snf(m)
    return s.diagonal()


# ---------------------------------------------------------------------------
# Hermite normal form (column style) and lattice computations
# ---------------------------------------------------------------------------

def column_hnf(m: IntMatrix) -> IntMatrix:
    """Canonical column HNF of the lattice spanned by the columns of ``m``.

    The result has one column per lattice rank, pivots positive and on
    strictly increasing rows, entries left of a pivot reduced into
    ``[0, pivot)``, and zero columns dropped.  Two generating matrices
    span the same lattice iff their column HNFs are identical.
    """
    n, k = m.rows, m.cols
    a = [list(row) for row in m.entries]
    j = 0
    for i in range(n):
        if j >= k:
            break
        piv = None
        for l in range(j, k):
            if a[i][l] != 0:
                if piv is None:
                    piv = l
                else:
                    p0, e = a[i][piv], a[i][l]
                    g, x, y = gcdex(p0, e)
                    p, q = p0 // g, e // g
                    for t in range(n):
                        ap, al = a[t][piv], a[t][l]
                        a[t][piv] = x * ap + y * al
                        a[t][l] = -q * ap + p * al
        if piv is None:
            continue
        if piv != j:
            for row in a:
                row[piv], row[j] = row[j], row[piv]
        if a[i][j] < 0:
            for t in range(n):
                a[t][j] = -a[t][j]
        d = a[i][j]
        for c in range(j):
            q = a[i][c] // d
            if q:
                for t in range(n):
                    a[t][c] -= q * a[t][j]
        j += 1
    return IntMatrix(n, j, tuple(tuple(row[:j]) for row in a))


def hnf_pivots(h: IntMatrix) -> list[int]:
    """Pivot row of each column of a column-HNF matrix."""
    pivots = []
    for j in range(h.cols):
        for i in range(h.rows):
            if h.entries[i][j] != 0:
                pivots.append(i)
                break
    return pivots


def lattice_solve(h: IntMatrix, vec: tuple[int, ...] | list[int]) -> tuple[int, ...] | None:
    """Coordinates of ``vec`` in the columns of the HNF basis ``h``.

    Returns ``None`` when the vector is not in the lattice.  Because the
    pivots sit on strictly increasing rows the solution, when it exists,
    is unique and found by forward substitution.
    """
    if len(vec) != h.rows:
        raise ValueError("vector length mismatch")
    res = list(vec)
    coords = [0] * h.cols
    pivots = hnf_pivots(h)
    for j in range(h.cols):
        i = pivots[j]
        d = h.entries[i][j]
        if res[i] % d != 0:
            return None
        c = res[i] // d
        coords[j] = c
        if c:
            for t in range(h.rows):
                res[t] -= c * h.entries[t][j]
    if any(x != 0 for x in res):
        return None
    return tuple(coords)


def lattice_contains(h: IntMatrix, vec) -> bool:
    return lattice_solve(h, vec) is not None


def lattice_equal(a: IntMatrix, b: IntMatrix) -> bool:
    """Do the columns of ``a`` and ``b`` span the same lattice?"""
    if a.rows != b.rows:
        return False
    return column_hnf(a).entries == column_hnf(b).entries


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """A basis (as columns) of the integer kernel ``{x : m x = 0}``."""
    _, s, v = snf(m)
    diag = s.diagonal()
    free = [i for i in range(m.cols) if i >= len(diag) or diag[i] == 0]
    return IntMatrix.from_cols([list(v.col(i)) for i in free], rows=m.cols)


def solve(m: IntMatrix, b: tuple[int, ...] | list[int]) -> tuple[int, ...] | None:
    """One integer solution of ``m x = b``, or ``None`` if there is none.

    The solution returned is deterministic: free coordinates of the
    Smith-form parametrization are set to zero.
    """
    if len(b) != m.rows:
        raise ValueError("vector length mismatch")
    u, s, v = snf(m)
    c = u.apply(tuple(b))
    y = [0] * m.cols
    diag = s.diagonal()
    for i in range(len(diag)):
        d = diag[i]
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d != 0:
                return None
            y[i] = c[i] // d
    for i in range(len(diag), m.rows):
        if c[i] != 0:
            return None
    return v.apply(tuple(y))
