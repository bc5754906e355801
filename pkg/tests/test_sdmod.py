import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klab.build import RingPresentation, exterior_algebra, k_algebra, ring_algebra, square_zero, table_algebra
from klab.dgcore import find_isomorphism, module_to_json, regular_module, residue_module, shift
from klab.sdmod import (
    Inconclusive,
    NoneFound,
    Refuted,
    Verified,
    check_base_change,
    check_biduality,
    check_dagger_duality,
    check_lemma33,
    dagger,
    dualizing_module,
    extension_by_point,
    is_semidualizing,
    koszul_base_change,
    random_module,
    search_thm34_counterexample,
    self_duality_isomorphism,
    thm34_trial,
)
from klab.suites import syzygy_module


def verdict(A, X, **kw):
    return is_semidualizing(A, X, **kw).verdict


def test_dualizing_module_of_a_field():
    k = k_algebra()
    D = dualizing_module(k)
    assert D.dims() == (1,) and D.lo == 0


def test_exterior_algebra_is_self_dual_up_to_shift():
    A = exterior_algebra(3)
    assert find_isomorphism(regular_module(A), shift(dualizing_module(A), 3)) is not None


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_class_g_self_duality(r):
    A = table_algebra("G", (r,), ())
    f = self_duality_isomorphism(A)
    assert f is not None and f.is_isomorphism()
    assert isinstance(verdict(A, shift(regular_module(A), 3)), Verified)


def test_non_gorenstein_algebra_is_not_self_dual():
    A = table_algebra("T", (), ())
    assert self_duality_isomorphism(A) is None


@pytest.mark.parametrize("label,params,W", [
    ("C", (2,), ()), ("S", (), (2,)), ("T", (), ()), ("B", (), (1,)), ("G", (3,), ()), ("H", (2, 1), (1,)),
])
def test_regular_and_dualizing_modules_are_semidualizing(label, params, W):
    A = table_algebra(label, params, W)
    assert isinstance(verdict(A, regular_module(A)), Verified)
    assert isinstance(verdict(A, dualizing_module(A)), Verified)


def test_residue_field_is_refuted():
    A = exterior_algebra(1)
    v = verdict(A, residue_module(A))
    assert isinstance(v, Refuted)
    assert v.degree <= 0


def test_small_budget_is_inconclusive_not_wrong():
    A = table_algebra("T", (), ())
    v = verdict(A, dualizing_module(A), N=1)
    assert isinstance(v, Inconclusive)


@pytest.mark.parametrize("i", [-2, -1, 1, 3])
def test_verdict_is_shift_invariant(i):
    A = table_algebra("B", (), (1,))
    for X in (regular_module(A), dualizing_module(A), residue_module(A)):
        assert type(verdict(A, X)) is type(verdict(A, shift(X, i)))


def test_dagger_basics():
    A = table_algebra("G", (2,), ())
    R = regular_module(A)
    assert dagger(A, R).dims() == dualizing_module(A).dims()
    assert find_isomorphism(dagger(A, dagger(A, R)), R) is not None
    X = random_module(A, np.random.default_rng(3))
    assert dagger(A, X).dims() == tuple(reversed(X.dims()))
    assert dagger(A, X).lo == -X.hi


@pytest.mark.parametrize("label,params,W", [("S", (), (3, 2)), ("B", (), (1,))])
def test_dagger_duality(label, params, W):
    A = table_algebra(label, params, W)
    rep = check_dagger_duality(A, dualizing_module(A), N=10)
    assert rep.verdict == "pass"
    rep = check_dagger_duality(A, regular_module(A), N=10)
    assert rep.verdict == "pass"


def test_dagger_duality_is_vacuous_for_non_semidualizing():
    A = exterior_algebra(1)
    assert check_dagger_duality(A, residue_module(A), N=6).verdict == "vacuous"


def test_biduality_examples():
    A = exterior_algebra(1)
    assert check_biduality(A, residue_module(A)).passed
    plus = syzygy_module(A)
    assert plus.dims() == (1,) and check_biduality(A, plus).passed


@settings(max_examples=20)
@given(st.integers(0, 10_000), st.sampled_from([("T", ()), ("G", (2,)), ("H", (1, 1))]))
def test_biduality_on_random_modules(seed, lp):
    A = table_algebra(lp[0], lp[1], ())
    X = random_module(A, np.random.default_rng(seed))
    assert check_biduality(A, X).passed


def x2():
    return RingPresentation.from_json({"vars": ["x"], "ideal": ["x^2"]})


def test_base_change_examples():
    C = ring_algebra(x2())
    assert check_base_change(C, ["x"], regular_module(C)).verdict == "pass"
    rep = check_base_change(C, ["x"], residue_module(C))
    assert rep.verdict == "pass" and rep.data["B"]["verdict"] == "Refuted"
    E = exterior_algebra(1)
    assert check_base_change(E, [], residue_module(E)).verdict == "pass"


def test_base_change_of_regular_module_is_regular():
    C = ring_algebra(x2())
    B, BX = koszul_base_change(C, [C.base_action["x"]], regular_module(C))
    assert BX.dims() == B.dims()
    assert find_isomorphism(BX, regular_module(B)) is not None


@pytest.mark.parametrize("n,want", [(1, [1, 0] * 6 + [1]), (2, [1, 0, 0] * 4 + [1])])
def test_lemma33_over_a_field(n, want):
    k = k_algebra()
    rep = check_lemma33(k, n, residue_module(k), residue_module(k))
    assert rep.passed
    assert [rep.left[i] for i in range(13)] == want


def test_lemma33_over_exterior():
    B = exterior_algebra(1)
    rep = check_lemma33(B, 1, residue_module(B), residue_module(B), N=8)
    assert rep.passed and rep.window[0] == 0 and rep.window[1] >= 8


@settings(max_examples=10)
@given(st.integers(0, 10_000), st.integers(0, 3))
def test_lemma33_on_random_modules(seed, n):
    B = square_zero(32003, (1,))
    rng = np.random.default_rng(seed)
    X, Y = random_module(B, rng), random_module(B, rng)
    assert check_lemma33(B, n, X, Y, N=8).passed


def test_free_modules_are_never_candidates():
    A = extension_by_point(k_algebra(), 1)
    R = regular_module(A)
    X = random_module(A, np.random.default_rng(0))
    assert thm34_trial(R, X, 12) == "pd_finite"


def test_thm34_search_small():
    res = search_thm34_counterexample(exterior_algebra(1), 2, trials=40, N=12, seed=0)
    assert isinstance(res, NoneFound)
    assert sum(res.stats.values()) == 40
    with pytest.raises(ValueError):
        search_thm34_counterexample(k_algebra(), 0, trials=1)


def test_random_module_is_deterministic():
    A = table_algebra("T", (), ())
    a = random_module(A, np.random.default_rng(5))
    b = random_module(A, np.random.default_rng(5))
    assert module_to_json(a) == module_to_json(b)


