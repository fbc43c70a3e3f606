"""Tests for the exact rational linear algebra core.

The rank/nullity oracle here is an independent dense fraction-free (Bareiss)
elimination over integers, written first and kept frozen; the sparse code is
checked against it on random matrices.
"""

from fractions import Fraction
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfcyc.exactla import (
    INCONSISTENT,
    DescentFailure,
    Echelon,
    ShapeError,
    SparseMatrix,
    Subspace,
    kernel_basis,
    quotient,
    rank,
    solve,
)

F = Fraction


# ---------------------------------------------------------------------------
# frozen oracle: dense fraction-free Bareiss elimination over the integers
# ---------------------------------------------------------------------------

def bareiss_rank(rows):
    """Rank of an integer matrix by fraction-free Gaussian elimination."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    nr, nc = len(m), len(m[0])
    r = 0
    prev = 1
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, nr):
            for j in range(c + 1, nc):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        r += 1
        if r == nr:
            break
    return r


def rand_int_matrix(rng, nr, nc, lo=-5, hi=5):
    return [[rng.randint(lo, hi) for _ in range(nc)] for _ in range(nr)]


def mat_mul(a, b):
    return [[sum(x * y for x, y in zip(ra, cb)) for cb in zip(*b)] for ra in a]


# ---------------------------------------------------------------------------
# rank
# ---------------------------------------------------------------------------

def test_rank_proportional_rows():
    m = SparseMatrix.from_rows([[1, 2], [2, 4]])
    assert rank(m) == 1


def test_rank_identity():
    assert rank(SparseMatrix.identity(3)) == 3


def test_rank_low_rank_product_vs_oracle():
    rng = random.Random(7)
    a = rand_int_matrix(rng, 6, 4)
    b = rand_int_matrix(rng, 4, 9)
    while bareiss_rank(a) < 4 or bareiss_rank(b) < 4:
        a = rand_int_matrix(rng, 6, 4)
        b = rand_int_matrix(rng, 4, 9)
    prod = mat_mul(a, b)
    assert bareiss_rank(prod) == 4
    assert rank(SparseMatrix.from_rows(prod)) == 4


def test_rank_random_vs_oracle():
    rng = random.Random(11)
    for _ in range(25):
        nr = rng.randint(1, 7)
        nc = rng.randint(1, 7)
        m = rand_int_matrix(rng, nr, nc)
        assert rank(SparseMatrix.from_rows(m)) == bareiss_rank(m)


# ---------------------------------------------------------------------------
# kernel
# ---------------------------------------------------------------------------

def test_kernel_zero_matrix():
    k = kernel_basis(SparseMatrix.zero(3, 3))
    assert k.dim == 3


def test_kernel_identity():
    assert kernel_basis(SparseMatrix.identity(4)).dim == 0


def test_kernel_weil_degree2_boundary():
    # basis of degree-2 words over one coalgebra generator: {i*i, w};
    # d(ii) = (w - ii)i - i(w - ii) = wi - iw  (degree-3 basis {iii, iw, wi})
    # d(w) = wi - iw
    d = SparseMatrix.from_rows([
        [0, 0],    # iii
        [-1, -1],  # iw
        [1, 1],    # wi
    ])
    k = kernel_basis(d)
    dense = [[0, 0], [-1, -1], [1, 1]]
    assert k.dim == 2 - bareiss_rank(dense) == 1
    for v in k.basis.columns():
        assert d.apply(v) == {}


def test_rank_nullity_random():
    rng = random.Random(5)
    for _ in range(20):
        nr, nc = rng.randint(1, 6), rng.randint(1, 6)
        m = SparseMatrix.from_rows(rand_int_matrix(rng, nr, nc))
        k = kernel_basis(m)
        assert rank(m) + k.dim == nc
        for v in k.basis.columns():
            assert m.apply(v) == {}


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def test_solve_identity():
    x = solve(SparseMatrix.identity(2), [1, 2])
    assert x == [F(1), F(2)]


def test_solve_inconsistent():
    assert solve(SparseMatrix.zero(2, 2), [1, 0]) is INCONSISTENT


def test_solve_shape_error():
    with pytest.raises(ShapeError):
        solve(SparseMatrix.identity(2), [1, 2, 3])


def test_solve_substitution_random():
    rng = random.Random(3)
    for _ in range(20):
        nr, nc = rng.randint(1, 6), rng.randint(1, 6)
        m = SparseMatrix.from_rows(rand_int_matrix(rng, nr, nc))
        x0 = [F(rng.randint(-3, 3)) for _ in range(nc)]
        b = m.apply({i: c for i, c in enumerate(x0) if c})
        x = solve(m, b)
        assert x is not INCONSISTENT
        assert m.apply({i: c for i, c in enumerate(x) if c}) == b


def test_solve_canonical_free_vars_zero():
    # x + y = 1 with free variable y: canonical solution sets y = 0
    m = SparseMatrix.from_rows([[1, 1]])
    assert solve(m, [1]) == [F(1), F(0)]


# ---------------------------------------------------------------------------
# quotients
# ---------------------------------------------------------------------------

def test_quotient_trivial_relations():
    q = quotient(3, Subspace.zero(3))
    assert q.dim == 3
    assert q.projection == SparseMatrix.identity(3)


def test_quotient_identify_two_coords():
    rel = Subspace.from_vectors(2, [{0: F(1), 1: F(-1)}])
    q = quotient(2, rel)
    assert q.dim == 1
    assert q.project({0: F(1)}) == q.project({1: F(1)})


def test_quotient_projection_section_identity():
    rng = random.Random(9)
    for _ in range(10):
        n = rng.randint(1, 6)
        rels = Subspace.from_vectors(
            n, [{i: F(rng.randint(-2, 2)) for i in range(n)} for _ in range(2)])
        q = quotient(n, rels)
        assert q.dim == n - rels.dim
        assert q.projection @ q.section == SparseMatrix.identity(q.dim)
        for v in rels.basis.columns():
            assert q.project(v) == {}


def test_induced_map_commutes():
    # operator preserving span(e0 - e1): the swap
    rel = Subspace.from_vectors(2, [{0: F(1), 1: F(-1)}])
    q = quotient(2, rel)
    swap = SparseMatrix.from_rows([[0, 1], [1, 0]])
    ind = q.induced_map(swap)
    assert ind @ q.projection == q.projection @ swap


def test_induced_map_descent_failure():
    rel = Subspace.from_vectors(2, [{0: F(1), 1: F(-1)}])
    q = quotient(2, rel)
    bad = SparseMatrix.from_rows([[1, 0], [0, 2]])  # does not preserve e0-e1
    with pytest.raises(DescentFailure) as exc:
        q.induced_map(bad)
    w = exc.value.witness
    assert not rel.contains(bad.apply(w))


# ---------------------------------------------------------------------------
# echelon / subspace canonicality
# ---------------------------------------------------------------------------

def test_subspace_canonical_under_reordering():
    vs = [{0: F(1), 2: F(3)}, {1: F(2)}, {0: F(2), 1: F(2), 2: F(6)}]
    s1 = Subspace.from_vectors(3, vs)
    s2 = Subspace.from_vectors(3, list(reversed(vs)))
    assert s1 == s2
    assert s1.dim == 2


def test_subspace_echelon_pivots_increasing():
    rng = random.Random(1)
    for _ in range(10):
        n = 5
        s = Subspace.from_vectors(
            n, [{i: F(rng.randint(-3, 3)) for i in range(n)} for _ in range(3)])
        pivots = []
        for v in s.basis.columns():
            assert v, "zero basis column"
            p = min(v)
            assert v[p] == 1
            pivots.append(p)
        assert pivots == sorted(pivots)
        # reduced: every basis vector vanishes at every other pivot
        for j, v in enumerate(s.basis.columns()):
            for p in pivots:
                if p != pivots[j]:
                    assert p not in v


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4),
                min_size=1, max_size=5))
def test_property_rank_matches_oracle(rows):
    assert rank(SparseMatrix.from_rows(rows)) == bareiss_rank(rows)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3),
                min_size=3, max_size=3),
       st.lists(st.integers(-4, 4), min_size=3, max_size=3))
def test_property_solve_exact_or_inconsistent(rows, rhs):
    m = SparseMatrix.from_rows(rows)
    x = solve(m, rhs)
    if x is INCONSISTENT:
        # rank of augmented must exceed rank of m
        aug = [r + [t] for r, t in zip(rows, rhs)]
        assert bareiss_rank(aug) == bareiss_rank(rows) + 1
    else:
        got = m.apply({i: c for i, c in enumerate(x) if c})
        want = {i: F(t) for i, t in enumerate(rhs) if t}
        assert got == want


def test_echelon_membership():
    e = Echelon()
    e.add({0: F(1), 1: F(1)})
    e.add({1: F(1), 2: F(1)})
    assert e.contains({0: F(1), 2: F(-1)})
    assert not e.contains({0: F(1)})
