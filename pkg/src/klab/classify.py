"""Classification of Tor algebras of embedding codepth at most three.

A Tor algebra in scope has the form ``body ⋉ W`` with ``W`` killed by the
maximal ideal, so products only see the body.  The decision table is built by
running the class constructors over a parameter grid and recording the
product invariants of each body; a record is matched against the table and
``W`` is read off as the leftover dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .build import (
    HomologyAlgebra,
    RingPresentation,
    class_name,
    homology_algebra,
    koszul_complex,
    table_algebra,
)
from .dgcore import DGAlgebra
from .exactla import DEFAULT_CHAR, rank

PRIORITY = ("C", "T", "B", "G", "H", "S")

# (label, params) grid for the body constructors
GRID_C = tuple((c,) for c in range(4))
GRID_G = tuple((r,) for r in range(1, 5))
GRID_H = tuple((p, q) for p in range(4) for q in range(4) if (p, q) != (0, 0))
GRID_W = ((), (1,), (2,))


class OutOfScope(ValueError):
    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report


class Unrecognized(ValueError):
    def __init__(self, message: str, record: "Invariants"):
        super().__init__(f"{message}: {record.to_json()}")
        self.record = record


class TableCollision(RuntimeError):
    pass


@dataclass(frozen=True)
class Invariants:
    h1: int
    h2: int
    h3: int
    p: int
    q: int
    r: int
    s: int

    @property
    def key(self):
        return (self.p, self.q, self.r, self.s)

    @property
    def dims(self):
        return (1, self.h1, self.h2, self.h3)

    def to_json(self) -> dict:
        return {"h1": self.h1, "h2": self.h2, "h3": self.h3, "p": self.p, "q": self.q, "r": self.r, "s": self.s}


@dataclass(frozen=True)
class ToralgClass:
    label: str
    params: tuple
    W: tuple
    invariants: Invariants
    golod: bool
    gorenstein: bool
    note: str = ""

    @property
    def name(self) -> str:
        return class_name(self.label, self.params)

    def to_json(self) -> dict:
        out = {
            "class": self.name,
            "label": self.label,
            "params": list(self.params),
            "W": list(self.W),
            "invariants": self.invariants.to_json(),
            "golod": self.golod,
            "gorenstein": self.gorenstein,
        }
        if self.note:
            out["note"] = self.note
        return out


def _algebra(H) -> DGAlgebra:
    return H.algebra if isinstance(H, HomologyAlgebra) else H


def _block(A: DGAlgebra, i: int, j: int) -> np.ndarray:
    if i + j > A.top or A.dim(i) == 0 or A.dim(j) == 0:
        return np.zeros((A.dim(i + j), A.dim(i), A.dim(j)), dtype=np.int64)
    return A.m(i, j)


def invariants(H) -> Invariants:
    """Dimensions and product ranks of a Tor algebra (zero differential)."""
    A = _algebra(H)
    P = A.p
    h = [A.dim(i) for i in range(4)]
    m11, m12 = _block(A, 1, 1), _block(A, 1, 2)

    def rk(mat, shape):
        return rank(mat.reshape(shape) % P, P) if mat.size else 0

    p = rk(m11, (h[2], h[1] * h[1]))
    q = rk(m12, (h[3], h[1] * h[2]))
    # H2 -> Hom(H1, H3) and H1 -> Hom(H1, H2)
    r = rk(m12, (h[3] * h[1], h[2]))
    s = rk(m11, (h[2] * h[1], h[1]))
    return Invariants(h[1], h[2], h[3], p, q, r, s)


def is_golod(H) -> bool:
    A = _algebra(H)
    for i in range(1, A.top + 1):
        for j in range(1, A.top + 1 - i):
            if np.any(_block(A, i, j) % A.p):
                return False
    return True


def is_gorenstein(H) -> bool:
    """Top homology is one-dimensional and every pairing into it is perfect."""
    A = _algebra(H)
    top = max(i for i in A.space.degrees() if A.dim(i))
    if A.dim(top) != 1:
        return False
    for i in range(top + 1):
        if A.dim(i) != A.dim(top - i):
            return False
        if A.dim(i) == 0:
            continue
        pair = _block(A, i, top - i)[0]
        if rank(pair % A.p, A.p) != A.dim(i):
            return False
    return True


def _scope(A: DGAlgebra, ecodepth: int | None):
    if ecodepth is not None and ecodepth > 3:
        raise OutOfScope(f"embedding codepth {ecodepth} exceeds 3")
    if any(A.dim(i) for i in range(4, A.top + 1)):
        raise OutOfScope("homology in degrees above 3")


# --------------------------------------------------------------------------
# the decision table


@dataclass(frozen=True)
class TableEntry:
    label: str
    params: tuple
    dims: tuple
    golod: bool
    gorenstein: bool


def _bodies(p: int):
    for c in GRID_C:
        yield "C", c
    yield "S", ()
    yield "T", ()
    yield "B", ()
    for r in GRID_G:
        yield "G", r
    for pq in GRID_H:
        yield "H", pq


def _pad(dims):
    return tuple(dims) + (0,) * (4 - len(dims))


@dataclass
class DecisionTable:
    entries: dict
    coincidences: list = field(default_factory=list)

    def candidates(self, record: Invariants):
        out = []
        for e in self.entries.get(record.key, ()):
            W = tuple(h - b for h, b in zip(record.dims, e.dims))
            if any(w < 0 for w in W) or W[0]:
                continue
            if e.label == "C" and any(W):
                continue
            out.append((e, W[1:]))
        out.sort(key=lambda t: (PRIORITY.index(t[0].label), t[0].params))
        return out


@lru_cache(maxsize=None)
def decision_table(p: int = DEFAULT_CHAR) -> DecisionTable:
    """Invariant records of the class bodies, keyed by their product ranks."""
    entries = {}
    for label, params in _bodies(p):
        H = homology_algebra(table_algebra(label, params, (), p), check=False)
        inv = invariants(H)
        e = TableEntry(label, params, _pad(H.algebra.dims()), is_golod(H), is_gorenstein(H))
        entries.setdefault(inv.key, []).append(e)
    return DecisionTable(entries, audit_grid(p))


def _grid_points():
    for label, params in _bodies(DEFAULT_CHAR):
        for W in GRID_W:
            if label == "C" and W:
                continue
            yield label, params, W


def audit_grid(p: int = DEFAULT_CHAR) -> list:
    """Grid points whose full invariant records coincide across labels.

    The highest-priority point is the canonical representative; two points
    with the same label competing for one record raise ``TableCollision``.
    """
    records = {}
    for label, params, W in _grid_points():
        H = homology_algebra(table_algebra(label, params, W, p), check=False)
        records.setdefault(invariants(H), []).append((label, params, W))
    out = []
    for rec, pts in records.items():
        if len({(l, pr) for l, pr, _ in pts}) > 1:
            pts = sorted(pts, key=lambda t: (PRIORITY.index(t[0]), t[1]))
            if pts[0][0] == pts[1][0]:
                raise TableCollision(f"{pts[0]} and {pts[1]} share the record {rec.to_json()}")
            out.append({"record": rec.to_json(),
                        "canonical": [pts[0][0], list(pts[0][1]), list(pts[0][2])],
                        "others": [[l, list(pr), list(W)] for l, pr, W in pts[1:]]})
    return out


def _trim(W) -> tuple:
    W = tuple(W)
    while W and not W[-1]:
        W = W[:-1]
    return W


def classify(H, ecodepth: int | None = None, p: int | None = None) -> ToralgClass:
    """Class of a Tor algebra; ``H`` is a ``HomologyAlgebra`` or a zero-differential algebra."""
    A = _algebra(H)
    if ecodepth is None and isinstance(H, HomologyAlgebra):
        ecodepth = H.source.top
    _scope(A, ecodepth)
    if A.dim(0) != 1:
        raise Unrecognized("degree zero is not the field", invariants(A))
    record = invariants(A)
    table = decision_table(p or A.p)
    found = table.candidates(record)
    if not found:
        raise Unrecognized("record matches no grid entry", record)
    entry, W = found[0]
    note = ""
    if len(found) > 1:
        note = "coincides with " + ", ".join(
            class_name(e.label, e.params) + (f"⋉W{_trim(w)}" if any(w) else "") for e, w in found[1:])
    W = _trim(W)
    return ToralgClass(entry.label, entry.params, W, record, is_golod(A), is_gorenstein(A), note)


def sdc_bound(cls: ToralgClass) -> dict:
    if cls.gorenstein:
        return {"bound": 1, "attained_by": ["R (every dualizing complex is a shift of R)"]}
    return {"bound": 2, "attained_by": ["R", "a dualizing complex D^R"]}


def classify_ring(R: RingPresentation) -> tuple[ToralgClass | None, dict]:
    """Koszul homology, invariants and class of ``R``.

    Rings of embedding codepth above three get a homology-only report and
    raise ``OutOfScope`` with that report attached.
    """
    K = koszul_complex(R)
    H = homology_algebra(K)
    dims = list(H.algebra.dims()) + [0] * (R.edim + 1 - len(H.algebra.dims()))
    report = {"ring": R.to_json(), "koszul_dims": dims}
    if R.ecodepth > 3:
        raise OutOfScope(f"embedding codepth {R.ecodepth} exceeds 3", report)
    cls = classify(H, R.ecodepth, R.p)
    inv = cls.invariants.to_json()
    report.update({
        "invariants": inv,
        "class": cls.name,
        "params": list(cls.params),
        "W": list(cls.W),
        "golod": cls.golod,
        "gorenstein": cls.gorenstein,
        "sdc_bound": sdc_bound(cls)["bound"],
    })
    if cls.note:
        report["note"] = cls.note
    return cls, report


def grid_roundtrip(p: int = DEFAULT_CHAR):
    """Classify every grid point; yields (point, class, expected canonical point)."""
    table = decision_table(p)
    canon = {}
    for c in table.coincidences:
        for other in c["others"]:
            canon[(other[0], tuple(other[1]), tuple(other[2]))] = tuple(
                tuple(x) if isinstance(x, list) else x for x in c["canonical"])
    for label, params, W in _grid_points():
        H = homology_algebra(table_algebra(label, params, W, p), check=False)
        cls = classify(H, 3, p)
        expect = canon.get((label, params, W), (label, params, W))
        yield (label, params, W), cls, expect
