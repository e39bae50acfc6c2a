import random
from hypothesis import given, settings
from hypothesis import strategies as st

from igl.matrices import (IntMatrix, column_hnf, gcdex, hstack, kernel_basis,
                          lattice_equal, lattice_solve, snf, solve)
from oracles import cofactor_det, minors_invariant_factors

small_matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(
            st.lists(st.integers(-9, 9), min_size=c, max_size=c),
            min_size=r, max_size=r)))


def mat(rows):
    return IntMatrix.from_rows([list(r) for r in rows])


def test_snf_identity():
    u, s, v = snf(IntMatrix.identity(2))
    assert s.diagonal() == (1, 1)
    assert u.entries == IntMatrix.identity(2).entries
    assert v.entries == IntMatrix.identity(2).entries


def test_snf_zero():
    u, s, v = snf(IntMatrix.zeros(2, 3))
    assert s.is_zero()


def test_snf_worked_example():
    m = mat([[2, 4], [6, 8]])
    u, s, v = snf(m)
    assert s.diagonal() == (2, 4)
    assert (u @ m @ v).entries == s.entries


@given(small_matrices)
@settings(max_examples=80, deadline=None)
def test_snf_properties(rows):
    m = mat(rows)
    u, s, v = snf(m)
    assert (u @ m @ v).entries == s.entries
    assert abs(u.det()) == 1
    assert abs(v.det()) == 1
    diag = s.diagonal()
    for i in range(m.rows):
        for j in range(m.cols):
            if i != j:
                assert s.entries[i][j] == 0
    for a, b in zip(diag, diag[1:]):
        assert a >= 0 and b >= 0
        if a != 0:
            assert b % a == 0
        else:
            assert b == 0
    assert diag == minors_invariant_factors(m)


@given(small_matrices)
@settings(max_examples=50, deadline=None)
def test_kernel_and_solve(rows):
    m = mat(rows)
    kb = kernel_basis(m)
    for j in range(kb.cols):
        assert all(x == 0 for x in m.apply(kb.col(j)))
    rng = random.Random(7)
    x = [rng.randint(-3, 3) for _ in range(m.cols)]
    b = m.apply(x)
    sol = solve(m, b)
    assert sol is not None
    assert m.apply(sol) == tuple(b)


def test_solve_unsolvable():
    m = mat([[2]])
    assert solve(m, [1]) is None
    assert solve(m, [4]) == (2,)


@given(small_matrices, small_matrices)
@settings(max_examples=40, deadline=None)
def test_hnf_canonical(rows_a, rows_b):
    a = mat(rows_a)
    h = column_hnf(a)
    # the HNF spans the same lattice: each generates the other
    for j in range(a.cols):
        assert lattice_solve(h, a.col(j)) is not None
    assert lattice_equal(a, h)
    b = mat(rows_b)
    if a.rows == b.rows:
        joined = hstack(a, b)
        assert lattice_equal(joined, hstack(b, a))


@given(small_matrices, st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_hnf_invariant_under_column_transforms(rows, seed):
    # unimodular column operations do not change the lattice, so they must
    # not change the canonical basis either
    rng = random.Random(seed)
    a = mat(rows)
    u = [[1 if i == j else 0 for j in range(a.cols)] for i in range(a.cols)]
    for _ in range(4):
        if a.cols < 2:
            break
        i, j = rng.sample(range(a.cols), 2)
        c = rng.randint(-2, 2)
        for t in range(a.cols):
            u[t][j] += c * u[t][i]
    transformed = a @ IntMatrix.from_rows(u, cols=a.cols)
    assert column_hnf(a).entries == column_hnf(transformed).entries


def test_lattice_membership():
    basis = column_hnf(mat([[2, 0], [0, 3]]))
    assert lattice_solve(basis, (2, 3)) is not None
    assert lattice_solve(basis, (1, 0)) is None


@given(st.integers(-40, 40), st.integers(-40, 40))
def test_gcdex(a, b):
    g, x, y = gcdex(a, b)
    assert g == x * a + y * b
    assert g >= 0


@given(small_matrices)
@settings(max_examples=40, deadline=None)
def test_det_matches_cofactor(rows):
    m = mat(rows)
    if m.rows == m.cols:
        assert m.det() == cofactor_det([list(r) for r in rows])
