import pytest

from klab.build import RingPresentation, homology_algebra, koszul_complex, table_algebra
from klab.classify import (
    OutOfScope,
    audit_grid,
    classify,
    classify_ring,
    decision_table,
    grid_roundtrip,
    invariants,
    is_golod,
    is_gorenstein,
    sdc_bound,
)
from klab.exactla import euler_characteristic
from klab.suites import RINGS, ring


def rp(vars_, ideal, p=32003):
    return RingPresentation.from_json({"vars": vars_, "ideal": ideal}, char=p)


@pytest.mark.parametrize("name,label,params,W,gor", [
    ("x2", "C", (1,), (), True),
    ("x3", "C", (1,), (), True),
    ("ci2", "C", (2,), (), True),
    ("ci3", "C", (3,), (), True),
    ("golod2", "S", (), (3, 2), False),
    ("m2_3", "S", (), (6, 8, 3), False),
])
def test_known_rings(name, label, params, W, gor):
    cls, rep = classify_ring(ring(name, 32003))
    assert (cls.label, cls.params, cls.W) == (label, params, W)
    assert cls.gorenstein is gor
    assert rep["sdc_bound"] == (1 if gor else 2)


def test_golod_flag():
    assert classify_ring(ring("golod2", 32003))[0].golod
    assert not classify_ring(ring("ci2", 32003))[0].golod


def test_ci_plus_relation_is_class_t_or_h():
    cls, _ = classify_ring(ring("ci3_xy", 32003))
    assert cls.label in ("T", "B", "H", "G")
    assert not cls.gorenstein


def test_four_variables_out_of_scope():
    R = rp(["w", "x", "y", "z"], ["w^2", "x^2", "y^2", "z^2"])
    with pytest.raises(OutOfScope) as err:
        classify_ring(R)
    assert err.value.report["koszul_dims"] == [1, 4, 6, 4, 1]


def test_grid_roundtrip_is_exact():
    pts = list(grid_roundtrip())
    assert len(pts) > 60
    for point, cls, expect in pts:
        assert (cls.label, cls.params, cls.W) == expect, point


def test_coincidences_are_between_labels():
    coin = audit_grid()
    labels = {(c["canonical"][0], c["others"][0][0]) for c in coin}
    assert ("C", "S") in labels and ("G", "H") in labels
    for c in coin:
        assert all(o[0] != c["canonical"][0] for o in c["others"])


@pytest.mark.parametrize("p", [32003, 101, 7])
def test_classification_does_not_depend_on_characteristic(p):
    base = {k: (e.label, e.params) for k, es in decision_table(32003).entries.items() for e in es}
    other = {k: (e.label, e.params) for k, es in decision_table(p).entries.items() for e in es}
    assert base == other
    for name in ("ci3", "golod2", "x2"):
        assert classify_ring(ring(name, p))[0].name == classify_ring(ring(name, 32003))[0].name


@pytest.mark.parametrize("label", ["T", "B"])
def test_bodies_have_euler_characteristic_one(label):
    from klab.build import _body
    assert euler_characteristic(_body(label, (), 32003).space) == 1


@pytest.mark.parametrize("name", [n for n in RINGS])
def test_koszul_homology_of_artinian_rings_has_zero_euler(name):
    H = homology_algebra(koszul_complex(ring(name, 32003)), check=False)
    assert euler_characteristic(H.algebra.space) == 0


def test_gorenstein_means_poincare_duality():
    for label, params in [("C", (2,)), ("G", (3,))]:
        assert is_gorenstein(table_algebra(label, params, ()))
    for label, params, W in [("T", (), ()), ("S", (), (2,)), ("G", (2,), (1,))]:
        assert not is_gorenstein(table_algebra(label, params, W))


def test_invariants_of_exterior_body():
    inv = invariants(table_algebra("C", (3,), ()))
    assert inv.dims == (1, 3, 3, 1)
    assert (inv.p, inv.q, inv.r, inv.s) == (3, 1, 3, 3)
    assert is_golod(table_algebra("S", (), (3, 2)))


def test_sdc_bound_follows_gorenstein_flag():
    for point, cls, _ in grid_roundtrip():
        assert sdc_bound(cls)["bound"] == (1 if cls.gorenstein else 2)


def test_classify_accepts_an_algebra_directly():
    A = table_algebra("H", (2, 1), (1,))
    assert classify(A).name == "H(2,1)"
