import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from klab.exactla import (
    CompositionNotZero,
    GradedSpace,
    NoSolution,
    PrimeField,
    echelon,
    euler_characteristic,
    homology_at,
    image,
    inverse,
    is_prime,
    kernel,
    matmul,
    rank,
    rref,
    select_independent,
    solve_preimage,
)

P = 7


def naive_rank(m, p):
    # plain Gaussian elimination on Python ints
    rows = [[int(x) % p for x in r] for r in m]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


small = arrays(np.int64, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=st.integers(0, P - 1))


@given(small)
def test_rank_matches_naive_elimination(m):
    assert rank(m, P) == naive_rank(m.tolist(), P)


@given(small)
def test_rank_nullity(m):
    k = kernel(m, P)
    assert rank(m, P) + k.shape[0] == m.shape[1]
    assert not np.any(matmul(m, k.T, P))


@given(small)
def test_rref_is_reduced(m):
    r, piv = rref(m, P)
    for i, c in enumerate(piv):
        assert r[i, c] == 1
        col = r[:, c].copy()
        col[i] = 0
        assert not np.any(col)
    assert piv == sorted(piv)


@given(small)
def test_image_spans_columns(m):
    img = image(m, P)
    assert img.shape[0] == rank(m, P)
    both = np.concatenate([img, m.T], axis=0)
    assert rank(both, P) == img.shape[0]


@given(small, st.data())
def test_solve_preimage(m, data):
    x = data.draw(arrays(np.int64, m.shape[1], elements=st.integers(0, P - 1)))
    b = matmul(m, x, P)
    y = solve_preimage(m, b, P)
    assert np.array_equal(matmul(m, y, P), b)


def test_solve_preimage_no_solution():
    with pytest.raises(NoSolution):
        solve_preimage(np.array([[1, 0], [0, 0]]), np.array([0, 1]), P)


@given(arrays(np.int64, (4, 4), elements=st.integers(0, P - 1)))
def test_inverse(m):
    if rank(m, P) < 4:
        with pytest.raises(NoSolution):
            inverse(m, P)
    else:
        assert np.array_equal(matmul(m, inverse(m, P), P), np.eye(4, dtype=np.int64))


def test_select_independent_is_greedy():
    rows = np.array([[1, 0, 0], [2, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 3]])
    assert select_independent(rows, P) == [0, 2, 4]


@pytest.mark.parametrize("p", [2, 3, 101, 32003, 2147483647])
def test_matmul_exact_for_large_primes(p):
    rng = np.random.default_rng(1)
    a = rng.integers(0, p, size=(5, 40))
    b = rng.integers(0, p, size=(40, 3))
    want = (a.astype(object) @ b.astype(object)) % p
    assert np.array_equal(matmul(a, b, p), np.asarray(want, dtype=np.int64))


def test_is_prime():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert is_prime(32003)


def test_homology_of_a_small_complex():
    # 0 -> k -> k^2 -> k -> 0 with d = (1,0), (0 1)
    d1 = np.array([[0, 1]])
    d2 = np.array([[1], [0]])
    h = homology_at(d2, d1, P)
    assert h.dim == 0
    h0 = homology_at(d1, np.zeros((0, 1), dtype=np.int64), P)
    assert h0.dim == 0
    h_top = homology_at(np.zeros((1, 0), dtype=np.int64), np.array([[0]]), P)
    assert h_top.dim == 1


def test_homology_rejects_nonzero_composition():
    with pytest.raises(CompositionNotZero):
        homology_at(np.array([[1]]), np.array([[1]]), P)


@settings(max_examples=30)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5), st.data())
def test_homology_dimension_formula(a, b, c, data):
    # random d2 with d1 d2 = 0: d1 kills the image of d2 by construction
    d2 = data.draw(arrays(np.int64, (b, c), elements=st.integers(0, P - 1)))
    ker_rows = kernel(image(d2, P), P) if rank(d2, P) else np.eye(b, dtype=np.int64)
    coeff = data.draw(arrays(np.int64, (a, ker_rows.shape[0]), elements=st.integers(0, P - 1)))
    d1 = matmul(coeff, ker_rows, P) if ker_rows.shape[0] else np.zeros((a, b), dtype=np.int64)
    h = homology_at(d2, d1, P)
    assert h.dim == b - rank(d1, P) - rank(d2, P)
    if h.dim:
        assert np.array_equal(h.classes(h.reps, P), np.eye(h.dim, dtype=np.int64))


def test_echelon_membership():
    e = echelon(np.array([[1, 2, 0], [0, 0, 1]]), P)
    assert e.contains(np.array([2, 4, 5]), P)
    assert not e.contains(np.array([0, 1, 0]), P)
    assert list(e.coordinates(np.array([2, 4, 5]), P)) == [2, 5]


def test_graded_space_and_euler():
    V = GradedSpace.from_dims(-1, (2, 0, 3))
    assert V.hi == 1 and V.total == 5 and V.support() == (-1, 1)
    assert euler_characteristic(V) == -2 + 0 - 3
    assert euler_characteristic({0: 1, 1: 3, 2: 3, 3: 1}) == 0


def test_prime_field_facade():
    F = PrimeField(5)
    assert F.rank(np.array([[1, 2], [2, 4]])) == 1
    with pytest.raises(ValueError):
        PrimeField(6)
