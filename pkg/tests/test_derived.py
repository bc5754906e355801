import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klab.build import exterior_algebra, k_algebra, square_zero, table_algebra
from klab.derived import (
    BudgetExceeded,
    Finite,
    NotTerminatedBy,
    Resolution,
    homology_dims,
    pd_certificate,
    poincare,
    prop31_sequence,
    resolve,
    rhom_dims,
    soft_truncation,
    tor,
)
from klab.dgcore import graded_dual, regular_module, residue_module, shift
from klab.exactla import rank
from klab.sdmod import extension_by_point, random_module


def series(coeffs, n):
    """Power series of 1 / (1 - sum coeffs[d] t^d) up to t^n."""
    out = [0] * (n + 1)
    out[0] = 1
    for i in range(1, n + 1):
        out[i] = sum(c * out[i - d] for d, c in coeffs.items() if d <= i)
    return out


def test_series_oracle():
    assert series({2: 1}, 6) == [1, 0, 1, 0, 1, 0, 1]
    assert series({2: 2}, 4) == [1, 0, 2, 0, 4]


def test_betti_of_residue_over_exterior():
    res = resolve(residue_module(exterior_algebra(1)), 10)
    assert res.minimal
    assert [res.betti()[i] for i in range(11)] == series({2: 1}, 10)


def test_tor_over_exterior_on_two_generators():
    A = exterior_algebra(2)
    k = residue_module(A)
    # divided powers on two degree-2 generators: 1 / (1 - t^2)^2
    want = [1, 0, 2, 0, 3, 0, 4, 0, 5]
    assert tor(k, k, 0, 8).as_list(0, 8) == want


def test_poincare_over_square_zero():
    A = square_zero(32003, (2,))
    # tensor coalgebra on a 2-dimensional space in degree 2
    assert poincare(residue_module(A), 8).as_list() == series({2: 2}, 8)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_poincare_over_point_extensions(n):
    A = extension_by_point(k_algebra(), n)
    assert poincare(residue_module(A), 12).as_list() == series({n + 1: 1}, 12)


def test_rhom_of_residue_field():
    A = exterior_algebra(1)
    k = residue_module(A)
    r = rhom_dims(k, k, -6, 0)
    assert r.as_list(-6, 0) == [1, 0, 1, 0, 1, 0, 1]


def test_rhom_into_dual_matches_graded_dual():
    A = table_algebra("T", (), ())
    R = regular_module(A)
    D = graded_dual(R)
    r = rhom_dims(R, D)
    assert r.complete
    assert {i: d for i, d in r.dims.items() if d} == {i: d for i, d in homology_dims(D).items() if d}


def test_pd_certificates():
    A = exterior_algebra(2)
    assert pd_certificate(regular_module(A)) == Finite(0)
    assert pd_certificate(shift(regular_module(A), 2)) == Finite(2)
    assert pd_certificate(residue_module(A), 10) == NotTerminatedBy(10)


def test_budget_exceeded_reports_window():
    A = exterior_algebra(2)
    k = residue_module(A)
    with pytest.raises(BudgetExceeded) as err:
        tor(k, k, 0, 20, N=4)
    assert err.value.window == (0, 4)


def test_cap_shrinks_the_window():
    A = square_zero(32003, (3,))
    res = resolve(residue_module(A), 12, cap=60)
    assert res.budget_hit
    assert res.G < 13
    # whatever was computed is still correct
    want = series({2: 3}, int(res.G))
    assert [res.num_gens(i) for i in range(int(res.G) + 1)] == want


def test_soft_truncation_keeps_low_homology():
    A = table_algebra("G", (2,), ())
    X = graded_dual(regular_module(A))
    T, pi = soft_truncation(X, -1)
    hx, ht = homology_dims(X), homology_dims(T)
    assert all(ht.get(i, 0) == hx.get(i, 0) for i in range(X.lo, 0))
    assert T.hi <= -1


@pytest.mark.parametrize("label,params", [("C", (2,)), ("G", (2,)), ("B", ())])
def test_prop31_sequence_checks(label, params):
    A = table_algebra(label, params, ())
    for X in (residue_module(A), graded_dual(regular_module(A))):
        seq = prop31_sequence(X)
        c = seq.checks
        assert c["exact"] and c["image_in_mL"] and c["truncation_quasi_iso"] and c["annihilator"]
        assert c["finite_semibasis"] >= 1


def _cone_exact_through(res, top):
    for n in range(res.lo, top + 1):
        dim = res.cone_dim(n)
        if not dim:
            continue
        r_out = rank(res.cone_diff(n), res.p) if res.cone_dim(n - 1) else 0
        r_in = rank(res.cone_diff(n + 1), res.p) if res.cone_dim(n + 1) else 0
        if dim - r_out - r_in:
            return False
    return True


@settings(max_examples=20)
@given(st.integers(0, 10_000), st.sampled_from(["E1", "E2", "G2", "S2"]))
def test_resolution_is_quasi_isomorphism(seed, name):
    A = {"E1": lambda: exterior_algebra(1), "E2": lambda: exterior_algebra(2),
         "G2": lambda: table_algebra("G", (2,), ()), "S2": lambda: square_zero(32003, (2,))}[name]()
    X = random_module(A, np.random.default_rng(seed))
    res = Resolution(X).extend(X.lo + 6)
    top = res.quasi_iso_through
    assert _cone_exact_through(res, int(min(top, X.hi + 8)))


@settings(max_examples=15)
@given(st.integers(0, 10_000))
def test_tor_is_symmetric(seed):
    A = exterior_algebra(2)
    rng = np.random.default_rng(seed)
    X, Y = random_module(A, rng), random_module(A, rng)
    lo = X.lo + Y.lo
    a, b = tor(X, Y, lo, lo + 5), tor(Y, X, lo, lo + 5)
    assert a.dims == b.dims


@settings(max_examples=15)
@given(st.integers(0, 10_000))
def test_tor_with_residue_field_counts_generators(seed):
    A = table_algebra("G", (2,), ())
    X = random_module(A, np.random.default_rng(seed))
    res = resolve(X, 6)
    if res.minimal:
        t = tor(X, residue_module(A), X.lo, X.lo + 5, res=res)
        assert all(t.dims[i] == res.num_gens(i) for i in t.dims)


@settings(max_examples=10)
@given(st.integers(0, 10_000), st.integers(-2, 2))
def test_tor_shifts_with_the_module(seed, i):
    A = exterior_algebra(1)
    X = random_module(A, np.random.default_rng(seed))
    k = residue_module(A)
    a = tor(X, k, X.lo, X.lo + 6)
    b = tor(shift(X, i), k, X.lo + i, X.lo + i + 6)
    assert [a.dims[j] for j in range(X.lo, X.lo + 7)] == [b.dims[j + i] for j in range(X.lo, X.lo + 7)]
