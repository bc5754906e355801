import numpy as np
import pytest

from klab.build import (
    ParameterOutOfRange,
    RingParseError,
    RingPresentation,
    _body,
    exterior_algebra,
    homology_algebra,
    koszul_complex,
    parse_monomial,
    ring_algebra,
    square_zero,
    table_algebra,
)
from klab.dgcore import find_isomorphism, regular_module
from klab.exactla import euler_characteristic


def ring(vars_, ideal, char=None):
    return RingPresentation.from_json({"vars": vars_, "ideal": ideal}, char=char)


def test_parse_monomial():
    assert parse_monomial("x^2*y", ("x", "y")) == (2, 1)
    assert parse_monomial("y*x", ("x", "y")) == (1, 1)


@pytest.mark.parametrize("text,col", [("x^", 3), ("x^a", 3), ("q", 1), ("x*", 3)])
def test_parse_errors_report_column(text, col):
    with pytest.raises(RingParseError) as err:
        parse_monomial(text, ("x", "y"))
    assert err.value.position == col


def test_ring_validation():
    with pytest.raises(ValueError):
        ring(["x", "y"], ["x^2"])  # not m-primary
    with pytest.raises(ValueError):
        ring(["x"], ["x"])  # not in (x)^2
    with pytest.raises(ValueError):
        ring(["x"], ["x^2", "x^3"])  # not minimal


def test_standard_monomials():
    R = ring(["x", "y"], ["x^2", "x*y", "y^3"])
    assert R.length == 4
    assert R.labels()[0] == "1"
    A = ring_algebra(R)
    assert A.dims() == (4,)


@pytest.mark.parametrize("vars_,ideal,dims", [
    (["x"], ["x^2"], (1, 1)),
    (["x", "y"], ["x^2", "y^2"], (1, 2, 1)),
    (["x", "y"], ["x^2", "x*y", "y^2"], (1, 3, 2)),
    (["x", "y", "z"], ["x^2", "y^2", "z^2"], (1, 3, 3, 1)),
])
def test_koszul_homology(vars_, ideal, dims):
    R = ring(vars_, ideal)
    K = koszul_complex(R)
    assert K.dims() == tuple(R.length * np.array([1, len(vars_), len(vars_) * (len(vars_) - 1) // 2, 1][:len(vars_) + 1]))
    H = homology_algebra(K)
    assert H.dims == dims
    assert euler_characteristic(H.algebra.space) == 0


def test_complete_intersection_homology_is_exterior():
    R = ring(["x", "y", "z"], ["x^2", "y^2", "z^2"])
    H = homology_algebra(koszul_complex(R)).algebra
    E = exterior_algebra(3)
    assert find_isomorphism(regular_module(H), regular_module(E)) is not None
    # e_i e_j are nonzero in H_2
    assert np.count_nonzero(H.m(1, 1) % H.p) > 0


def test_exterior_algebra_signs():
    E = exterior_algebra(2)
    t = E.m(1, 1)
    assert t[0, 0, 1] == 1 and t[0, 1, 0] == E.p - 1
    assert E.dims() == (1, 2, 1)
    with pytest.raises(ParameterOutOfRange):
        exterior_algebra(9)


@pytest.mark.parametrize("label,params,W,dims", [
    ("C", (3,), (), (1, 3, 3, 1)),
    ("S", (), (2, 1), (1, 2, 1)),
    ("T", (), (), (1, 3, 3)),
    ("B", (), (), (1, 2, 3, 1)),
    ("G", (2,), (), (1, 2, 2, 1)),
    ("G", (3,), (1,), (1, 4, 3, 1)),
    ("H", (1, 1), (), (1, 2, 2, 1)),
    ("H", (2, 1), (1,), (1, 4, 3, 1)),
])
def test_table_dims(label, params, W, dims):
    assert table_algebra(label, params, W).dims() == dims


def test_table_parameter_errors():
    with pytest.raises(ParameterOutOfRange):
        table_algebra("C", (4,))
    with pytest.raises(ParameterOutOfRange):
        table_algebra("C", (2,), (1,))
    with pytest.raises(ParameterOutOfRange):
        table_algebra("G", (0,))
    with pytest.raises(ParameterOutOfRange):
        table_algebra("Z", ())


def test_body_euler_characteristics():
    assert euler_characteristic(_body("T", (), 32003).space) == 1
    assert euler_characteristic(_body("B", (), 32003).space) == 1
    assert euler_characteristic(exterior_algebra(3).space) == 0


def test_square_zero_products_vanish():
    A = square_zero(32003, (2, 1))
    assert not np.any(A.m(1, 1))


def test_characteristic_is_respected():
    R = ring(["x", "y"], ["x^2", "y^2"], char=7)
    assert koszul_complex(R).p == 7
