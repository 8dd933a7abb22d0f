import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from malcevly import exactla as x

from oracles import brute_hnf, det, is_hnf, matmul, same_lattice

P = 101


def small_matrices(max_rows=6, max_cols=6, lo=-4, hi=4):
    return st.integers(1, max_rows).flatmap(lambda m: st.integers(1, max_cols).flatmap(
        lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n),
                           min_size=m, max_size=m)))


def _naive_rref_mod(m, p):
    """Textbook Gauss-Jordan over F_p on Python integers."""
    a = [[v % p for v in row] for row in m]
    r = 0
    for c in range(len(a[0])):
        sel = next((i for i in range(r, len(a)) if a[i][c]), None)
        if sel is None:
            continue
        a[r], a[sel] = a[sel], a[r]
        inv = pow(a[r][c], p - 2, p)
        a[r] = [v * inv % p for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(u - f * v) % p for u, v in zip(a[i], a[r])]
        r += 1
        if r == len(a):
            break
    return r, [row for row in a[:r]]


def test_rcf_trivial_cases():
    assert x.rcf(np.zeros((3, 4), dtype=int))[0] == 0
    rank, m = x.rcf(np.eye(5, dtype=int))
    assert rank == 5 and np.array_equal(m, np.eye(5, dtype=int))


def test_rcf_mixed_degree3_display():
    m = [[1, 0, 0, 0, 0, -1], [0, 1, 0, 0, 0, 1], [0, 0, 1, 0, 0, -1],
         [0, 0, 0, 1, 0, -1], [0, 0, 0, 0, 1, 1]]
    scrambled = np.array([[2, 1, 0, 0, 0, -1], [0, 1, 1, 0, 0, 0], [1, 0, 0, 0, 1, 0],
                          [0, 0, 0, 3, 0, -3], [0, 0, 1, 0, 0, -1], [1, 1, 1, 1, 1, -1]])
    rank, r = x.rcf(scrambled)
    assert rank == 5
    assert np.array_equal(x.symmetric(r), m)


@settings(max_examples=60, deadline=None)
@given(small_matrices(8, 8, -50, 50))
def test_rcf_matches_naive_elimination(m):
    rank, r = x.rcf(m, P)
    nrank, nr = _naive_rref_mod(m, P)
    assert rank == nrank
    assert r.tolist() == nr


@settings(max_examples=60, deadline=None)
@given(small_matrices(8, 8))
def test_rcf_idempotent_and_rational_rank(m):
    rank, r = x.rcf(m, P)
    again, r2 = x.rcf(r, P)
    assert again == rank and np.array_equal(r, r2)
    assert rank == x.rank_rational(m)


@settings(max_examples=40, deadline=None)
@given(small_matrices(6, 9))
def test_nullspace_basis_annihilates(m):
    rank, r = x.rcf(m, P)
    null = x.nullspace_basis(r, P)
    assert len(null) == len(m[0]) - rank
    assert np.all(np.remainder(np.array(m) @ null.T, P) == 0)
    basis = x.EchelonBasis(len(m[0]), P)
    basis.add(m)
    assert np.array_equal(basis.nullspace(), null)


def test_nullspace_full_rank_is_empty():
    assert len(x.nullspace_basis(np.eye(4, dtype=int))) == 0


def test_incremental_basis_equals_batch():
    rng = np.random.default_rng(3)
    m = rng.integers(0, P, size=(300, 200))
    m[:, 150:] = m[:, :50] * 3 % P
    basis = x.EchelonBasis(200, P, chunk=16)
    for s in range(0, 300, 37):
        basis.add(m[s:s + 37])
    assert basis.rank == 150
    rank, r = x.rcf(m, P)
    assert rank == 150 and np.array_equal(basis.matrix(), r)
    assert basis.contains(m[:5]).all()


def test_product_splitting_is_exact():
    # a large prime forces the float contraction to be split
    p = 46337
    rng = np.random.default_rng(1)
    a = rng.integers(0, p, size=(4, 9000)).astype(np.float64)
    b = rng.integers(0, p, size=(9000, 3)).astype(np.float64)
    want = (a.astype(object) @ b.astype(object)) % p
    assert np.array_equal(x._mulmod(a, b, p).astype(np.int64), want.astype(np.int64))


def test_prime_checks():
    with pytest.raises(ValueError):
        x.EchelonBasis(3, 100)
    with pytest.raises(ValueError):
        x.EchelonBasis(3, 65537)


def test_sort_by_support():
    v = np.array([[1, 1, 0], [0, 0, 100], [0, 1, 0], [1, 0, 0]])
    assert x.sort_by_support(v).tolist() == [[0, 0, 100], [0, 1, 0], [1, 0, 0], [1, 1, 0]]


def test_rref_primitive_matches_rational():
    rng = np.random.default_rng(5)
    m = rng.integers(-9, 10, size=(6, 9)).tolist()
    m.append([a + 2 * b for a, b in zip(m[0], m[1])])
    rows, piv = x.rref_primitive(m)
    rat, piv2 = x.rref_rational(m)
    assert piv == piv2
    assert rows == [x.primitive(r) for r in rat]


# --- Hermite normal form -----------------------------------------------------


def test_hnf_example():
    h, u = x.hnf_with_transform([[2, 4], [1, 2]])
    assert h == [[1, 2], [0, 0]]
    assert matmul(u, [[2, 4], [1, 2]]) == h
    assert all(v == 0 for v in matmul([u[1]], [[2], [1]])[0])


def test_hnf_identity():
    eye = [[int(i == j) for j in range(4)] for i in range(4)]
    assert x.hnf_with_transform(eye) == (eye, eye)


def test_hnf_against_brute_force_oracle():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(100):
        a = rng.integers(-3, 4, size=(2, int(rng.integers(1, 4)))).tolist()
        h, u = x.hnf_with_transform(a)
        assert matmul(u, a) == h
        assert abs(det(u)) == 1
        assert is_hnf(h)
        want = brute_hnf(a)
        if want is not None:
            assert h == want
            checked += 1
    assert checked >= 90


@settings(max_examples=100, deadline=None)
@given(small_matrices(5, 5, -6, 6))
def test_hnf_transform_is_unimodular(a):
    h, u = x.hnf_with_transform(a)
    assert matmul(u, a) == h
    assert abs(det(u)) == 1
    assert is_hnf(h)
    rank = x.hnf_rank(h)
    assert rank == x.rank_rational(a)
    for row in u[rank:]:
        assert all(v == 0 for v in matmul([row], a)[0])


def test_integer_kernel_is_saturated():
    ker = x.integer_kernel([[2, 4, 6]])
    assert len(ker) == 2
    assert all(2 * a + 4 * b + 6 * c == 0 for a, b, c in ker)
    # (1, 1, -1) lies in the kernel, so it must be an integer combination
    h, _ = x.hnf_with_transform(ker)
    assert _solve_lattice(h, [1, 1, -1]) is not None
    assert _solve_lattice(h, [2, -1, 0]) is not None


def _solve_lattice(h, v):
    """Integer coefficients c with c h = v for h in row HNF, or None."""
    v = list(v)
    coeffs = []
    for row in h:
        nz = [j for j, t in enumerate(row) if t]
        if not nz:
            continue
        c = nz[0]
        if v[c] % row[c]:
            return None
        q = v[c] // row[c]
        coeffs.append(q)
        v = [a - q * b for a, b in zip(v, row)]
    return coeffs if not any(v) else None


# --- LLL ----------------------------------------------------------------------


def _shortest_in_box(basis, box=6):
    best = None
    for c in itertools.product(range(-box, box + 1), repeat=len(basis)):
        if any(c):
            v = [sum(ci * b[j] for ci, b in zip(c, basis)) for j in range(len(basis[0]))]
            n = sum(t * t for t in v)
            best = n if best is None else min(best, n)
    return best


def _gram_schmidt(b):
    bs, mu = [], []
    for i, v in enumerate(b):
        w = [Fraction(t) for t in v]
        row = []
        for j in range(i):
            m = sum(Fraction(s) * t for s, t in zip(v, bs[j])) / sum(t * t for t in bs[j])
            row.append(m)
            w = [s - m * t for s, t in zip(w, bs[j])]
        bs.append(w)
        mu.append(row)
    return bs, mu


def _is_lll_reduced(b, delta):
    """Size reduction and the Lovasz condition, checked with exact Gram-Schmidt."""
    bs, mu = _gram_schmidt(b)
    norm = [sum(t * t for t in v) for v in bs]
    for i in range(len(b)):
        if any(abs(m) > Fraction(1, 2) for m in mu[i]):
            return False
        if i and norm[i] < (delta - mu[i][i - 1] ** 2) * norm[i - 1]:
            return False
    return True


def test_lll_example():
    red = x.lll_reduce([[1, 0], [4, 1]])
    assert sorted(map(tuple, map(lambda v: [abs(t) for t in v], red))) == [(0, 1), (1, 0)]


def test_lll_orthogonal_unchanged():
    basis = [[0, 3, 0], [2, 0, 0], [0, 0, 5]]
    assert sorted(x.lll_reduce(basis)) == sorted(basis)


def test_lll_rejects_dependent_input():
    with pytest.raises(ValueError):
        x.lll_reduce([[1, 2], [2, 4]])
    with pytest.raises(ValueError):
        x.lll_reduce([[1, 0]], delta=Fraction(1, 5))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-20, 20), min_size=2, max_size=2), min_size=2, max_size=2))
def test_lll_two_dimensions_finds_shortest(basis):
    if basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0] == 0:
        return
    red = x.lll_reduce(basis, Fraction(99, 100))
    assert same_lattice(red, basis)
    first = sum(t * t for t in red[0])
    assert first == _shortest_in_box(red, box=8)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5).flatmap(lambda n: st.lists(
    st.lists(st.integers(-30, 30), min_size=n + 1, max_size=n + 1), min_size=n, max_size=n)))
def test_lll_preserves_lattice_and_reduces(basis):
    if x.rank_rational(basis) < len(basis):
        return
    for delta in (Fraction(3, 4), Fraction(99, 100)):
        red = x.lll_reduce(basis, delta)
        assert same_lattice(red, basis)
        raw = x.lll_reduce(basis, delta, sort=False)
        assert _is_lll_reduced(raw, delta)
        assert sorted(map(tuple, raw)) == sorted(map(tuple, red))
        assert sorted(sum(t * t for t in v) for v in red) == [sum(t * t for t in v) for v in red]


def test_lll_output_is_reduced_before_sorting():
    rng = np.random.default_rng(2)
    basis = rng.integers(-40, 40, size=(5, 6)).tolist()
    red = x.lll_reduce(basis, Fraction(3, 4))
    # classical bound on the first vector of a reduced basis
    shortest = _shortest_in_box(red, box=2)
    assert sum(t * t for t in red[0]) <= 2 ** (len(basis) - 1) * shortest


def test_matrix_dump_round_trip():
    m = [[1, -2, 3], [0, 5, -6]]
    text = x.dump_matrix(m, 101)
    assert text.splitlines()[0] == "2 3 101"
    assert x.load_matrix(text) == (m, 101)
    with pytest.raises(ValueError):
        x.load_matrix("2 2 0\n1 2\n")
