"""Finite-dimensional DG algebras and DG modules over a prime field.

Structure constants are dense per-degree tensors:

* ``mult[i, j]`` has shape ``(dim A_{i+j}, dim A_i, dim A_j)``;
* ``act[i, j]`` has shape ``(dim X_{i+j}, dim A_i, dim X_j)``;
* ``diff[i]`` is the matrix ``A_i -> A_{i-1}``.

Every axiom is checked exhaustively on basis tuples when an object is built
through :meth:`DGAlgebra.validated` / :meth:`DGModule.validated`.

Sign conventions: ``Sigma^i X`` has differential ``(-1)^i d`` and action
``a . s(x) = (-1)^{i|a|} s(a x)``; the graded dual has differential
``(d f)(x) = -(-1)^{|f|} f(d x)`` and action ``(a f)(x) = (-1)^{|a||f|} f(a x)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exactla import (
    DEFAULT_CHAR,
    GradedSpace,
    echelon,
    euler_characteristic,
    is_prime,
    kernel,
    matmul,
    quotient_projection,
    complement_basis,
    rank,
    zeros,
)

__all__ = [
    "DGAxiomError",
    "DifferentialSquareViolation",
    "UnitViolation",
    "AssociativityViolation",
    "GradedCommutativityViolation",
    "LeibnizViolation",
    "AugmentationViolation",
    "DGAlgebra",
    "DGModule",
    "DGMorphism",
    "make_algebra",
    "make_module",
    "shift",
    "graded_dual",
    "tensor_algebras",
    "euler_characteristic",
    "annihilator_check",
]


class DGAxiomError(ValueError):
    """A structure table violates one of the DG axioms."""

    def __init__(self, message: str, offending=None):
        super().__init__(message if offending is None else f"{message}: {offending}")
        self.offending = offending


class DifferentialSquareViolation(DGAxiomError):
    pass


class UnitViolation(DGAxiomError):
    pass


class AssociativityViolation(DGAxiomError):
    pass


class GradedCommutativityViolation(DGAxiomError):
    pass


class LeibnizViolation(DGAxiomError):
    pass


class AugmentationViolation(DGAxiomError):
    pass


class LinearityViolation(DGAxiomError):
    pass


# tensor-built algebras larger than this skip the (implied) product axioms
TRUST_ABOVE = 64


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _first_nonzero(arr: np.ndarray):
    idx = np.argwhere(arr)
    return tuple(int(v) for v in idx[0]) if idx.size else None


# --------------------------------------------------------------------------
# tensor helpers (all exact mod p)


def _assoc_mismatch(o1: np.ndarray, i1: np.ndarray, o2: np.ndarray, i2: np.ndarray, p: int):
    """First ``(a, b, c)`` with ``sum o1[:, s, c] i1[s, a, b] != sum o2[:, a, s] i2[s, b, c]``.

    Works in slices of ``a`` so memory stays bounded.
    """
    k, s1, c = o1.shape
    _, na, b = i1.shape
    s2 = o2.shape[2]
    if k == 0 or na == 0 or b == 0 or c == 0:
        return None
    step = max(1, 4_000_000 // (k * b * c))
    y = o1.transpose(0, 2, 1).reshape(k * c, s1)
    rhs = i2.reshape(s2, b * c)
    for start in range(0, na, step):
        sl = slice(start, min(na, start + step))
        ca = sl.stop - sl.start
        left = matmul(y, i1[:, sl, :].reshape(s1, ca * b), p).reshape(k, c, ca, b).transpose(0, 2, 3, 1)
        right = matmul(o2[:, sl, :].reshape(k * ca, s2), rhs, p).reshape(k, ca, b, c)
        if not np.array_equal(left, right):
            _, x, y_, z = _first_nonzero((left - right) % p)
            return x + start, y_, z
    return None


def _apply_left(mat: np.ndarray, t: np.ndarray, p: int) -> np.ndarray:
    """``mat`` applied to the output index of a bilinear tensor."""
    k, a, b = t.shape
    return matmul(mat, t.reshape(k, a * b), p).reshape(mat.shape[0], a, b)


def _apply_first(t: np.ndarray, mat: np.ndarray, p: int) -> np.ndarray:
    """``T'[k, a, b] = sum_s t[k, s, b] mat[s, a]``."""
    k, s, b = t.shape
    y = t.transpose(0, 2, 1).reshape(k * b, s)
    return matmul(y, mat, p).reshape(k, b, mat.shape[1]).transpose(0, 2, 1)


def _apply_second(t: np.ndarray, mat: np.ndarray, p: int) -> np.ndarray:
    """``T'[k, a, b] = sum_s t[k, a, s] mat[s, b]``."""
    k, a, s = t.shape
    return matmul(t.reshape(k * a, s), mat, p).reshape(k, a, mat.shape[1])


# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DGAlgebra:
    """A validated finite-dimensional DG algebra concentrated in degrees ``0..top``.

    The augmentation sends the unit to 1 and every other degree-0 basis vector
    to 0, so the augmentation ideal is spanned by basis vectors.
    """

    p: int
    space: GradedSpace
    diff: dict
    mult: dict
    unit: int = 0
    base_action: dict | None = field(default=None, compare=False)
    name: str = ""

    # -- shape helpers -----------------------------------------------------
    @property
    def top(self) -> int:
        return self.space.hi

    def dim(self, i: int) -> int:
        return self.space.dim(i)

    def dims(self) -> tuple[int, ...]:
        return self.space.dims()

    def d(self, i: int) -> np.ndarray:
        blk = self.diff.get(i)
        return blk if blk is not None else zeros(self.dim(i - 1), self.dim(i))

    def m(self, i: int, j: int) -> np.ndarray:
        blk = self.mult.get((i, j))
        if blk is None:
            return np.zeros((self.dim(i + j), self.dim(i), self.dim(j)), dtype=np.int64)
        return blk

    def unit_vector(self) -> np.ndarray:
        v = np.zeros(self.dim(0), dtype=np.int64)
        v[self.unit] = 1
        return v

    def max_ideal_indices(self, i: int) -> list[int]:
        """Basis indices in degree ``i`` spanning the augmentation ideal."""
        if i == 0:
            return [k for k in range(self.dim(0)) if k != self.unit]
        return list(range(self.dim(i)))

    def multiply(self, u: np.ndarray, i: int, v: np.ndarray, j: int) -> np.ndarray:
        """Product of ``u`` in degree ``i`` with ``v`` in degree ``j``."""
        t = self.m(i, j)
        if t.size == 0:
            return np.zeros(self.dim(i + j), dtype=np.int64)
        y = matmul(t.reshape(-1, t.shape[2]), np.asarray(v).reshape(-1, 1), self.p)
        y = y.reshape(t.shape[0], t.shape[1])
        return matmul(y, np.asarray(u).reshape(-1, 1), self.p).reshape(-1)

    @property
    def is_formal_zero_diff(self) -> bool:
        return all(not np.any(b) for b in self.diff.values())

    # -- construction ------------------------------------------------------
    @classmethod
    def validated(cls, p, space, diff, mult, unit=0, base_action=None, name="", trusted=False):
        """Build and check every axiom.

        ``trusted`` skips commutativity and associativity, for products
        assembled from already validated factors (tensor products).
        """
        if space.lo != 0:
            raise ValueError("DG algebras are concentrated in non-negative degrees")
        if space.dim(0) == 0:
            raise ValueError("a DG algebra needs a unit in degree 0")
        diff = {i: np.asarray(b, dtype=np.int64) % p for i, b in diff.items() if space.dim(i)}
        full = {}
        for i in space.degrees():
            for j in space.degrees():
                if i + j > space.hi:
                    continue
                blk = mult.get((i, j))
                shape = (space.dim(i + j), space.dim(i), space.dim(j))
                if blk is None:
                    blk = np.zeros(shape, dtype=np.int64)
                blk = np.asarray(blk, dtype=np.int64) % p
                if blk.shape != shape:
                    raise ValueError(f"multiplication block {(i, j)} has shape {blk.shape}, expected {shape}")
                full[(i, j)] = blk
        alg = cls(p, space, diff, full, unit, base_action, name)
        alg.check_axioms(products=not trusted)
        return alg

    def check_axioms(self, products: bool = True) -> None:
        p = self.p
        sp = self.space
        lab = sp.label
        for i in sp.degrees():
            blk = self.d(i)
            if blk.shape != (self.dim(i - 1), self.dim(i)):
                raise ValueError(f"differential block {i} has shape {blk.shape}")
            sq = matmul(self.d(i - 1), blk, p)
            if np.any(sq):
                _, col = _first_nonzero(sq)
                raise DifferentialSquareViolation("d∘d != 0", lab(i, col))
        u = self.unit
        for j in sp.degrees():
            eye = np.eye(self.dim(j), dtype=np.int64)
            if not np.array_equal(self.m(0, j)[:, u, :], eye):
                raise UnitViolation("1·a != a", lab(0, u))
            if not np.array_equal(self.m(j, 0)[:, :, u], eye):
                raise UnitViolation("a·1 != a", lab(0, u))
        for i in sp.degrees():
            for j in sp.degrees():
                if i + j > self.top or not products:
                    continue
                a = self.m(i, j)
                b = self.m(j, i).transpose(0, 2, 1)
                if _sign(i * j) == -1:
                    b = (-b) % p
                if not np.array_equal(a, b):
                    _, x, y = _first_nonzero((a - b) % p)
                    raise GradedCommutativityViolation("ab != (-1)^{|a||b|} ba", (lab(i, x), lab(j, y)))
                if i == j and i % 2 == 1:
                    diag = a[:, np.arange(self.dim(i)), np.arange(self.dim(i))]
                    if np.any(diag):
                        _, x = _first_nonzero(diag)
                        raise GradedCommutativityViolation("odd element squares to nonzero", (lab(i, x), lab(i, x)))
        for i in sp.degrees():
            for j in sp.degrees():
                for l in sp.degrees():
                    if i + j + l > self.top or not products:
                        continue
                    bad = _assoc_mismatch(self.m(i + j, l), self.m(i, j), self.m(i, j + l), self.m(j, l), p)
                    if bad:
                        x, y, z = bad
                        raise AssociativityViolation("(ab)c != a(bc)", (lab(i, x), lab(j, y), lab(l, z)))
        for i in sp.degrees():
            for j in sp.degrees():
                if i + j > self.top or i + j == 0:
                    continue
                lhs = _apply_left(self.d(i + j), self.m(i, j), p)
                rhs = np.zeros_like(lhs)
                if i > 0:
                    rhs = rhs + _apply_first(self.m(i - 1, j), self.d(i), p)
                if j > 0:
                    rhs = rhs + _sign(i) * _apply_second(self.m(i, j - 1), self.d(j), p)
                rhs %= p
                if not np.array_equal(lhs, rhs):
                    _, x, y = _first_nonzero((lhs - rhs) % p)
                    raise LeibnizViolation("d(ab) != d(a)b + (-1)^{|a|} a d(b)", (lab(i, x), lab(j, y)))
        self._check_augmentation()

    def _check_augmentation(self) -> None:
        u = self.unit
        m0 = self.max_ideal_indices(0)
        m00 = self.m(0, 0)
        if m0 and np.any(m00[u][np.ix_(m0, range(self.dim(0)))]):
            raise AugmentationViolation("kernel of the augmentation is not an ideal")
        if self.dim(1) and np.any(self.d(1)[u]):
            raise AugmentationViolation("d(A_1) is not in the augmentation ideal")
        # nilpotency of m_{A_0}
        span = np.eye(self.dim(0), dtype=np.int64)[m0]
        for _ in range(self.dim(0) + 1):
            if span.shape[0] == 0:
                return
            prods = []
            for a in m0:
                for row in span:
                    prods.append(matmul(m00[:, a, :], row, self.p))
            span = echelon(np.array(prods), self.p, self.dim(0)).rows if prods else span[:0]
        raise AugmentationViolation("degree-0 part is not local: augmentation ideal is not nilpotent")

    def __repr__(self) -> str:
        nm = f" {self.name}" if self.name else ""
        return f"<DGAlgebra{nm} over F_{self.p} dims={self.dims()}>"


@dataclass(frozen=True, eq=False)
class DGModule:
    """A validated finite-dimensional DG module over ``algebra``."""

    algebra: DGAlgebra
    space: GradedSpace
    diff: dict
    act: dict
    name: str = ""

    @property
    def p(self) -> int:
        return self.algebra.p

    @property
    def lo(self) -> int:
        return self.space.lo

    @property
    def hi(self) -> int:
        return self.space.hi

    def dim(self, i: int) -> int:
        return self.space.dim(i)

    def dims(self) -> tuple[int, ...]:
        return self.space.dims()

    @property
    def total(self) -> int:
        return self.space.total

    def d(self, i: int) -> np.ndarray:
        blk = self.diff.get(i)
        return blk if blk is not None else zeros(self.dim(i - 1), self.dim(i))

    def a(self, i: int, j: int) -> np.ndarray:
        blk = self.act.get((i, j))
        if blk is None:
            return np.zeros((self.dim(i + j), self.algebra.dim(i), self.dim(j)), dtype=np.int64)
        return blk

    def act_by(self, vec: np.ndarray, i: int, j: int) -> np.ndarray:
        """Matrix of multiplication by ``vec`` (in ``A_i``) on ``X_j``."""
        t = self.a(i, j)
        k, n, m = t.shape
        y = matmul(t.transpose(0, 2, 1).reshape(k * m, n), np.asarray(vec).reshape(-1, 1), self.p)
        return y.reshape(k, m)

    def support(self):
        return self.space.support()

    @classmethod
    def validated(cls, algebra, space, diff, act, name=""):
        p = algebra.p
        diff = {i: np.asarray(b, dtype=np.int64) % p for i, b in diff.items() if space.dim(i) and space.dim(i - 1)}
        full = {}
        for i in algebra.space.degrees():
            for j in space.degrees():
                if not (space.lo <= i + j <= space.hi):
                    continue
                shape = (space.dim(i + j), algebra.dim(i), space.dim(j))
                blk = act.get((i, j))
                if blk is None:
                    blk = np.zeros(shape, dtype=np.int64)
                blk = np.asarray(blk, dtype=np.int64) % p
                if blk.shape != shape:
                    raise ValueError(f"action block {(i, j)} has shape {blk.shape}, expected {shape}")
                full[(i, j)] = blk
        mod = cls(algebra, space, diff, full, name)
        mod.check_axioms()
        return mod

    def check_axioms(self) -> None:
        A = self.algebra
        p = self.p
        sp = self.space
        lab = sp.label
        alab = A.space.label
        for i in sp.degrees():
            blk = self.d(i)
            if blk.shape != (self.dim(i - 1), self.dim(i)):
                raise ValueError(f"differential block {i} has shape {blk.shape}")
            if np.any(matmul(self.d(i - 1), blk, p)):
                _, col = _first_nonzero(matmul(self.d(i - 1), blk, p))
                raise DifferentialSquareViolation("d∘d != 0", lab(i, col))
        for j in sp.degrees():
            if not np.array_equal(self.a(0, j)[:, A.unit, :], np.eye(self.dim(j), dtype=np.int64)):
                raise UnitViolation("1·x != x", lab(j, 0) if self.dim(j) else j)
        for i in A.space.degrees():
            for j in A.space.degrees():
                if i + j > A.top:
                    continue
                for l in sp.degrees():
                    if i + j + l > sp.hi:
                        continue
                    bad = _assoc_mismatch(self.a(i + j, l), A.m(i, j), self.a(i, j + l), self.a(j, l), p)
                    if bad:
                        x, y, z = bad
                        raise AssociativityViolation("(ab)x != a(bx)", (alab(i, x), alab(j, y), lab(l, z)))
        for i in A.space.degrees():
            for j in sp.degrees():
                if i + j > sp.hi:
                    continue
                lhs = _apply_left(self.d(i + j), self.a(i, j), p)
                rhs = np.zeros_like(lhs)
                if i > 0:
                    rhs = rhs + _apply_first(self.a(i - 1, j), A.d(i), p)
                if j > sp.lo:
                    rhs = rhs + _sign(i) * _apply_second(self.a(i, j - 1), self.d(j), p)
                rhs %= p
                if not np.array_equal(lhs, rhs):
                    _, x, y = _first_nonzero((lhs - rhs) % p)
                    raise LeibnizViolation("d(ax) != d(a)x + (-1)^{|a|} a d(x)", (alab(i, x), lab(j, y)))

    def __repr__(self) -> str:
        nm = f" {self.name}" if self.name else ""
        return f"<DGModule{nm} lo={self.lo} dims={self.dims()}>"


@dataclass(frozen=True, eq=False)
class DGMorphism:
    """Degree-0 morphism of DG modules; ``blocks[n]`` maps ``source_n -> target_n``."""

    source: DGModule
    target: DGModule
    blocks: dict

    def block(self, n: int) -> np.ndarray:
        b = self.blocks.get(n)
        return b if b is not None else zeros(self.target.dim(n), self.source.dim(n))

    def degrees(self):
        lo = min(self.source.lo, self.target.lo)
        hi = max(self.source.hi, self.target.hi)
        return range(lo, hi + 1)

    def is_chain_map(self) -> bool:
        p = self.source.p
        for n in self.degrees():
            lhs = matmul(self.target.d(n), self.block(n), p)
            rhs = matmul(self.block(n - 1), self.source.d(n), p)
            if not np.array_equal(lhs, rhs):
                return False
        return True

    def is_linear(self) -> bool:
        X, Y = self.source, self.target
        A = X.algebra
        p = A.p
        for i in A.space.degrees():
            for j in X.space.degrees():
                n = i + j
                lhs = _apply_left(self.block(n), X.a(i, j), p)
                rhs = _apply_second(Y.a(i, j), self.block(j), p)
                if not np.array_equal(lhs, rhs):
                    return False
        return True

    def is_isomorphism(self) -> bool:
        for n in self.degrees():
            b = self.block(n)
            if b.shape[0] != b.shape[1] or rank(b, self.source.p) != b.shape[0]:
                return False
        return self.is_chain_map() and self.is_linear()

    def check(self) -> "DGMorphism":
        if not self.is_chain_map():
            raise DGAxiomError("morphism does not commute with differentials")
        if not self.is_linear():
            raise LinearityViolation("morphism is not A-linear")
        return self


# --------------------------------------------------------------------------
# standard modules


def regular_module(A: DGAlgebra) -> DGModule:
    """``A`` as a DG module over itself."""
    act = {(i, j): A.m(i, j) for i in A.space.degrees() for j in A.space.degrees() if i + j <= A.top}
    return DGModule.validated(A, A.space, dict(A.diff), act, name="A")


def trivial_module(A: DGAlgebra, lo: int, dims, prefix: str = "w") -> DGModule:
    """Graded vector space with zero differential on which ``m_A`` acts as zero."""
    space = GradedSpace.from_dims(lo, dims, prefix)
    act = {}
    for j in space.degrees():
        t = np.zeros((space.dim(j), A.dim(0), space.dim(j)), dtype=np.int64)
        t[:, A.unit, :] = np.eye(space.dim(j), dtype=np.int64)
        act[(0, j)] = t
    return DGModule.validated(A, space, {}, act, name="k-space")


def residue_module(A: DGAlgebra) -> DGModule:
    """The residue field ``k = A / m_A``."""
    mod = trivial_module(A, 0, (1,), prefix="k")
    return DGModule(A, GradedSpace(0, (("k",),)), mod.diff, mod.act, name="k")


def zero_module(A: DGAlgebra) -> DGModule:
    return DGModule(A, GradedSpace(0, ()), {}, {}, name="0")


def _sub_labels(space: GradedSpace, dims: dict, prefix: str) -> GradedSpace:
    degs = sorted(dims)
    if not degs:
        return GradedSpace(0, ())
    lo, hi = degs[0], degs[-1]
    labels = tuple(tuple(f"{prefix}{n}_{k}" for k in range(dims.get(n, 0))) for n in range(lo, hi + 1))
    return GradedSpace(lo, labels)


def _as_rows(r, n: int) -> np.ndarray:
    r = np.asarray(r, dtype=np.int64)
    return r.reshape(-1, n) if n else zeros(0, 0)


def _trim(dims: dict) -> dict:
    nz = [n for n, d in dims.items() if d]
    if not nz:
        return {}
    return {n: dims.get(n, 0) for n in range(min(nz), max(nz) + 1)}


def submodule(X: DGModule, rows: dict, name: str = "sub") -> tuple[DGModule, DGMorphism]:
    """DG submodule spanned by ``rows[n]`` (row bases) and its inclusion.

    The caller guarantees that the span is closed under ``d`` and the action;
    the result is re-validated.
    """
    p = X.p
    A = X.algebra
    ech = {n: echelon(_as_rows(r, X.dim(n)), p, X.dim(n)) for n, r in rows.items()}
    dims = _trim({n: e.rank for n, e in ech.items()})
    space = _sub_labels(X.space, dims, name)
    basis = {n: ech[n].rows if n in ech else zeros(0, X.dim(n)) for n in space.degrees()}
    diff = {}
    for n in space.degrees():
        if n - 1 in basis and basis[n].shape[0] and basis[n - 1].shape[0]:
            img = matmul(basis[n], X.d(n).T, p)
            diff[n] = ech[n - 1].coordinates(img, p).T
    act = {}
    for i in A.space.degrees():
        for j in space.degrees():
            n = i + j
            if n not in basis:
                continue
            t = X.a(i, j)
            out = np.zeros((basis[n].shape[0], A.dim(i), basis[j].shape[0]), dtype=np.int64)
            for a in range(A.dim(i)):
                img = matmul(basis[j], t[:, a, :].T, p)
                if img.size:
                    out[:, a, :] = ech[n].coordinates(img, p).T if basis[n].shape[0] else 0
            act[(i, j)] = out
    S = DGModule.validated(A, space, diff, act, name=name)
    incl = DGMorphism(S, X, {n: basis[n].T.copy() for n in space.degrees()})
    return S, incl


def quotient_module(X: DGModule, rows: dict, name: str = "quot") -> tuple[DGModule, DGMorphism]:
    """``X / S`` for the DG submodule ``S`` spanned by ``rows`` and the projection."""
    p = X.p
    A = X.algebra
    ech = {n: echelon(_as_rows(rows.get(n, zeros(0, X.dim(n))), X.dim(n)), p, X.dim(n))
           for n in X.space.degrees()}
    proj = {n: quotient_projection(e, p) for n, e in ech.items()}
    sect = {n: complement_basis(e).T for n, e in ech.items()}
    dims = _trim({n: proj[n].shape[0] for n in X.space.degrees()})
    space = _sub_labels(X.space, dims, name)
    diff = {}
    for n in space.degrees():
        if n - 1 in proj and space.dim(n) and space.dim(n - 1):
            diff[n] = matmul(proj[n - 1], matmul(X.d(n), sect[n], p), p)
    act = {}
    for i in A.space.degrees():
        for j in space.degrees():
            n = i + j
            if not space.lo <= n <= space.hi:
                continue
            t = X.a(i, j)
            out = np.zeros((space.dim(n), A.dim(i), space.dim(j)), dtype=np.int64)
            for a in range(A.dim(i)):
                out[:, a, :] = matmul(proj[n], matmul(t[:, a, :], sect[j], p), p)
            act[(i, j)] = out
    Q = DGModule.validated(A, space, diff, act, name=name)
    pi = DGMorphism(X, Q, {n: proj[n] for n in space.degrees()})
    return Q, pi


def generated_submodule(X: DGModule, vectors: dict) -> dict:
    """Row bases of the smallest DG submodule containing ``vectors[n]``."""
    p = X.p
    A = X.algebra
    span = {n: echelon(_as_rows(v, X.dim(n)), p, X.dim(n))
            for n, v in vectors.items() if X.dim(n)}
    changed = True
    while changed:
        changed = False
        for n in list(span):
            rows = span[n].rows
            if rows.shape[0] == 0:
                continue
            new = {}
            if X.dim(n - 1):
                new.setdefault(n - 1, []).append(matmul(rows, X.d(n).T, p))
            for i in A.space.degrees():
                if X.dim(n + i) == 0:
                    continue
                t = X.a(i, n)
                for a in range(A.dim(i)):
                    new.setdefault(n + i, []).append(matmul(rows, t[:, a, :].T, p))
            for m, blocks in new.items():
                cur = span.get(m, echelon(zeros(0, X.dim(m)), p, X.dim(m)))
                stacked = np.concatenate([cur.rows] + blocks, axis=0)
                e = echelon(stacked, p, X.dim(m))
                if e.rank > cur.rank:
                    span[m] = e
                    changed = True
    return {n: e.rows for n, e in span.items() if e.rank}


def direct_sum(X: DGModule, Y: DGModule, name: str = "sum") -> DGModule:
    A = X.algebra
    if X.total == 0:
        return Y
    if Y.total == 0:
        return X
    lo, hi = min(X.lo, Y.lo), max(X.hi, Y.hi)
    labels = tuple(
        tuple(f"{l}" for l in (X.space.labels[n - X.lo] if X.dim(n) else ()))
        + tuple(f"{l}'" for l in (Y.space.labels[n - Y.lo] if Y.dim(n) else ()))
        for n in range(lo, hi + 1)
    )
    space = GradedSpace(lo, labels)

    def blockdiag(a, b):
        out = zeros(a.shape[0] + b.shape[0], a.shape[1] + b.shape[1])
        out[: a.shape[0], : a.shape[1]] = a
        out[a.shape[0]:, a.shape[1]:] = b
        return out

    diff = {n: blockdiag(X.d(n), Y.d(n)) for n in space.degrees()}
    act = {}
    for i in A.space.degrees():
        for j in space.degrees():
            n = i + j
            if n > hi:
                continue
            tx, ty = X.a(i, j), Y.a(i, j)
            out = np.zeros((space.dim(n), A.dim(i), space.dim(j)), dtype=np.int64)
            out[: tx.shape[0], :, : tx.shape[2]] = tx
            out[tx.shape[0]:, :, tx.shape[2]:] = ty
            act[(i, j)] = out
    return DGModule.validated(A, space, diff, act, name=name)


def restrict_scalars(Y: DGModule, A: DGAlgebra, phi: dict) -> DGModule:
    """View a DG ``B``-module as an ``A``-module along ``phi: A -> B``.

    ``phi[i]`` is the matrix ``A_i -> B_i`` of an algebra morphism.
    """
    p = A.p
    act = {}
    for i in A.space.degrees():
        for j in Y.space.degrees():
            if i + j > Y.hi:
                continue
            t = Y.a(i, j) if i <= Y.algebra.top else np.zeros((Y.dim(i + j), 0, Y.dim(j)), dtype=np.int64)
            f = phi.get(i, zeros(t.shape[1], A.dim(i)))
            act[(i, j)] = _apply_first(t, f, p) if t.shape[1] else np.zeros((Y.dim(i + j), A.dim(i), Y.dim(j)), dtype=np.int64)
    return DGModule.validated(A, Y.space, dict(Y.diff), act, name=Y.name)


# --------------------------------------------------------------------------
# shift, dual, tensor


def shift(X: DGModule, i: int) -> DGModule:
    """``Sigma^i X``: degree ``n`` holds ``X_{n-i}``."""
    if i == 0:
        return X
    p = X.p
    space = GradedSpace(X.lo + i, X.space.labels)
    s = _sign(i)
    diff = {n + i: (s * b) % p for n, b in X.diff.items()}
    act = {}
    for (a, j), t in X.act.items():
        act[(a, j + i)] = (_sign(i * a) * t) % p
    return DGModule(X.algebra, space, diff, act, name=f"Σ^{i}{X.name}")


def graded_dual(X: DGModule) -> DGModule:
    """``Hom_k(X, k)``: degree ``n`` holds the dual of ``X_{-n}``."""
    p = X.p
    A = X.algebra
    if X.total == 0:
        return X
    labels = tuple(tuple(f"{l}*" for l in X.space.labels[-n - X.lo]) for n in range(-X.hi, -X.lo + 1))
    space = GradedSpace(-X.hi, labels)
    diff = {}
    for n in space.degrees():
        blk = X.d(1 - n)
        if blk.size:
            diff[n] = (-_sign(n) * blk.T) % p
    act = {}
    for i in A.space.degrees():
        for n in space.degrees():
            if n + i > space.hi:
                continue
            t = X.a(i, -n - i)
            act[(i, n)] = (_sign(i * n) * t.transpose(2, 1, 0)) % p
    return DGModule(A, space, diff, act, name=f"{X.name}*")


def double_dual_map(X: DGModule) -> DGMorphism:
    """Natural map ``X -> X**``, ``x -> (f -> (-1)^{|x||f|} f(x))``."""
    XX = graded_dual(graded_dual(X))
    blocks = {n: (_sign(n) * np.eye(X.dim(n), dtype=np.int64)) % X.p for n in X.space.degrees()}
    return DGMorphism(X, XX, blocks)


def _tensor_labels(C: DGAlgebra, D: DGAlgebra, pairs_by_deg):
    clabels = {l for deg in C.space.labels for l in deg}
    dlabels = {l for deg in D.space.labels for l in deg}
    cu, du = C.space.label(0, C.unit), D.space.label(0, D.unit)
    clash = (clabels - {cu}) & (dlabels - {du})

    def dl(l):
        return f"{l}'" if l in clash else l

    out = []
    for deg in pairs_by_deg:
        row = []
        for (ci, cj), (di, dj) in deg:
            c, d = C.space.label(ci, cj), D.space.label(di, dj)
            if c == cu and d == du:
                row.append("1")
            elif d == du:
                row.append(c)
            elif c == cu:
                row.append(dl(d))
            else:
                row.append(f"{c}*{dl(d)}")
        out.append(tuple(row))
    flat = [l for deg in out for l in deg]
    if len(set(flat)) != len(flat):
        out = [tuple(f"t{n}_{k}" for k in range(len(deg))) for n, deg in enumerate(out)]
    return tuple(out)


def tensor_parts(C: DGAlgebra, D: DGAlgebra):
    """Basis pairs, index maps, space, product and differential of ``C ⊗_k D``.

    Degree ``n`` has basis pairs ``((i, a), (j, b))`` with ``i + j = n``, ordered
    by ``i`` then ``a``, ``b``; the unit pair comes first in degree 0.
    """
    if C.p != D.p:
        raise ValueError("algebras over different fields")
    p = C.p
    top = C.top + D.top
    pairs = []
    for n in range(top + 1):
        row = []
        for i in range(max(0, n - D.top), min(n, C.top) + 1):
            j = n - i
            ci = range(C.dim(i))
            dj = range(D.dim(j))
            if n == 0:
                ci = [C.unit] + [x for x in ci if x != C.unit]
                dj = [D.unit] + [x for x in dj if x != D.unit]
            for a in ci:
                for b in dj:
                    row.append(((i, a), (j, b)))
        pairs.append(row)
    index = [{pr: k for k, pr in enumerate(row)} for row in pairs]
    space = GradedSpace(0, _tensor_labels(C, D, pairs))

    mult = {}
    for n1 in range(top + 1):
        for n2 in range(top + 1 - n1):
            t = np.zeros((space.dim(n1 + n2), space.dim(n1), space.dim(n2)), dtype=np.int64)
            for x, ((i1, a1), (j1, b1)) in enumerate(pairs[n1]):
                for y, ((i2, a2), (j2, b2)) in enumerate(pairs[n2]):
                    if i1 + i2 > C.top or j1 + j2 > D.top:
                        continue
                    cc = C.m(i1, i2)[:, a1, a2]
                    dd = D.m(j1, j2)[:, b1, b2]
                    if not (np.any(cc) and np.any(dd)):
                        continue
                    s = _sign(j1 * i2)
                    for c in np.flatnonzero(cc):
                        for d in np.flatnonzero(dd):
                            z = index[n1 + n2][((i1 + i2, int(c)), (j1 + j2, int(d)))]
                            t[z, x, y] = (t[z, x, y] + s * cc[c] * dd[d]) % p
            mult[(n1, n2)] = t
    diff = {}
    for n in range(1, top + 1):
        mat = zeros(space.dim(n - 1), space.dim(n))
        for x, ((i, a), (j, b)) in enumerate(pairs[n]):
            if i > 0:
                col = C.d(i)[:, a]
                for c in np.flatnonzero(col):
                    z = index[n - 1][((i - 1, int(c)), (j, b))]
                    mat[z, x] = (mat[z, x] + col[c]) % p
            if j > 0:
                col = D.d(j)[:, b]
                for d in np.flatnonzero(col):
                    z = index[n - 1][((i, a), (j - 1, int(d)))]
                    mat[z, x] = (mat[z, x] + _sign(i) * col[d]) % p
        diff[n] = mat
    return pairs, index, space, mult, diff


def tensor_algebras(C: DGAlgebra, D: DGAlgebra, name: str = "") -> DGAlgebra:
    """Graded tensor product ``C ⊗_k D`` with the Koszul sign rule."""
    _, _, space, mult, diff = tensor_parts(C, D)
    return DGAlgebra.validated(C.p, space, diff, mult, unit=0, trusted=space.total > TRUST_ABOVE, name=name or (f"({C.name})⊗({D.name})" if C.name and D.name else ""))


# --------------------------------------------------------------------------
# morphism spaces, isomorphism search, annihilators


def module_homs(X: DGModule, Y: DGModule) -> list[DGMorphism]:
    """Basis of the space of degree-0 DG module morphisms ``X -> Y``."""
    p = X.p
    A = X.algebra
    degs = [n for n in X.space.degrees() if X.dim(n) and Y.dim(n)]
    offs = {}
    total = 0
    for n in degs:
        offs[n] = total
        total += X.dim(n) * Y.dim(n)
    if total == 0:
        return []
    rows = []

    def embed(n, mat):
        # mat acts on vec(Phi_n) (row-major, shape Y_n x X_n)
        out = zeros(mat.shape[0], total)
        out[:, offs[n]: offs[n] + mat.shape[1]] = mat
        return out

    for n in range(min(X.lo, Y.lo), max(X.hi, Y.hi) + 2):
        # d_Y Phi_n - Phi_{n-1} d_X = 0, as maps X_n -> Y_{n-1}
        ny1, nx = Y.dim(n - 1), X.dim(n)
        if ny1 == 0 or nx == 0:
            continue
        eq = zeros(ny1 * nx, total)
        if n in offs:
            eq += embed(n, np.kron(Y.d(n), np.eye(nx, dtype=np.int64)))
        if n - 1 in offs:
            eq -= embed(n - 1, np.kron(np.eye(ny1, dtype=np.int64), X.d(n).T))
        rows.append(eq % p)
    for i in A.space.degrees():
        for j in X.space.degrees():
            n = i + j
            ny, nx = Y.dim(n), X.dim(j)
            if ny == 0 or nx == 0:
                continue
            tx, ty = X.a(i, j), Y.a(i, j)
            for a in range(A.dim(i)):
                # Phi_n (a x) = a Phi_j(x), as maps X_j -> Y_n
                eq = zeros(ny * nx, total)
                if n in offs:
                    eq += embed(n, np.kron(np.eye(ny, dtype=np.int64), tx[:, a, :].T))
                if j in offs:
                    eq -= embed(j, np.kron(ty[:, a, :], np.eye(nx, dtype=np.int64)))
                rows.append(eq % p)
    system = np.concatenate(rows, axis=0) if rows else zeros(0, total)
    ker = kernel(system, p)
    out = []
    for vec in ker:
        blocks = {n: vec[offs[n]: offs[n] + X.dim(n) * Y.dim(n)].reshape(Y.dim(n), X.dim(n)) for n in degs}
        out.append(DGMorphism(X, Y, blocks))
    return out


def find_isomorphism(X: DGModule, Y: DGModule, tries: int = 32, seed: int = 0) -> DGMorphism | None:
    """Search the morphism space for an isomorphism ``X -> Y``."""
    if X.space.support() is None and Y.space.support() is None:
        return DGMorphism(X, Y, {})
    for n in range(min(X.lo, Y.lo), max(X.hi, Y.hi) + 1):
        if X.dim(n) != Y.dim(n):
            return None
    basis = module_homs(X, Y)
    if not basis:
        return None
    p = X.p
    for f in basis:
        if f.is_isomorphism():
            return f
    rng = np.random.default_rng(seed)
    degs = set().union(*(f.blocks.keys() for f in basis))
    for _ in range(tries):
        coeffs = rng.integers(0, p, size=len(basis))
        blocks = {n: sum(int(c) * f.block(n) for c, f in zip(coeffs, basis)) % p for n in degs}
        f = DGMorphism(X, Y, blocks)
        if f.is_isomorphism():
            return f
    return None


def annihilator_basis(A: DGAlgebra, ideal: str = "augmentation") -> dict:
    """Row bases, per degree, of ``Ann_A(m_A) = {a : a m_A = 0}``."""
    p = A.p
    out = {}
    for i in A.space.degrees():
        blocks = []
        for j in A.space.degrees():
            if i + j > A.top:
                continue
            idx = A.max_ideal_indices(j)
            if not idx:
                continue
            t = A.m(i, j)[:, :, idx]  # (dim_{i+j}, dim_i, |m_j|)
            blocks.append(t.transpose(0, 2, 1).reshape(-1, A.dim(i)))
        system = np.concatenate(blocks, axis=0) if blocks else zeros(0, A.dim(i))
        ker = kernel(system, p)
        if ker.shape[0]:
            out[i] = ker
    return out


def annihilator_check(X: DGModule) -> bool:
    """True iff ``Ann_A(m_A)`` acts as zero on ``X``."""
    ann = annihilator_basis(X.algebra)
    for i, rows in ann.items():
        for j in X.space.degrees():
            if X.dim(i + j) == 0 or X.dim(j) == 0:
                continue
            for vec in rows:
                if np.any(X.act_by(vec, i, j)):
                    return False
    return True


# --------------------------------------------------------------------------
# JSON formats


def algebra_to_json(A: DGAlgebra) -> dict:
    sp = A.space
    diff = []
    for i in sp.degrees():
        blk = A.d(i)
        for c in range(blk.shape[1]):
            for r in np.flatnonzero(blk[:, c]):
                diff.append([sp.label(i, c), sp.label(i - 1, int(r)), int(blk[r, c])])
    mult = []
    for (i, j), t in sorted(A.mult.items()):
        for a in range(t.shape[1]):
            for b in range(t.shape[2]):
                for c in np.flatnonzero(t[:, a, b]):
                    mult.append([sp.label(i, a), sp.label(j, b), sp.label(i + j, int(c)), int(t[c, a, b])])
    out = {
        "char": A.p,
        "basis": [list(deg) for deg in sp.labels],
        "unit": sp.label(0, A.unit),
        "diff": diff,
        "mult": mult,
    }
    if A.name:
        out["name"] = A.name
    return out


def _index_labels(space: GradedSpace) -> dict:
    idx = {}
    for n in space.degrees():
        for k, l in enumerate(space.labels[n - space.lo]):
            if l in idx:
                raise ValueError(f"duplicate basis label {l!r}")
            idx[l] = (n, k)
    return idx


def make_algebra(raw: dict) -> DGAlgebra:
    """Build and validate an algebra from its JSON description."""
    p = int(raw.get("char", DEFAULT_CHAR))
    if not is_prime(p) or p >= 2**31:
        raise ValueError(f"characteristic {p} is not a prime below 2**31")
    space = GradedSpace(0, tuple(tuple(str(l) for l in deg) for deg in raw["basis"]))
    idx = _index_labels(space)
    unit_deg, unit = idx[str(raw["unit"])]
    if unit_deg != 0:
        raise UnitViolation("the unit must have degree 0", raw["unit"])
    diff = {i: zeros(space.dim(i - 1), space.dim(i)) for i in space.degrees() if i > 0}
    for src, dst, coeff in raw.get("diff", []):
        (i, a), (j, b) = idx[str(src)], idx[str(dst)]
        if j != i - 1:
            raise ValueError(f"differential entry {src}->{dst} does not lower degree by one")
        diff[i][b, a] = (diff[i][b, a] + int(coeff)) % p
    mult = {}
    for a_l, b_l, c_l, coeff in raw.get("mult", []):
        (i, a), (j, b), (n, c) = idx[str(a_l)], idx[str(b_l)], idx[str(c_l)]
        if a_l == b_l and i % 2 == 1 and int(coeff) % p:
            raise GradedCommutativityViolation("odd element squares to nonzero", (a_l, b_l))
        if n != i + j:
            raise ValueError(f"product {a_l}*{b_l} -> {c_l} is not homogeneous")
        t = mult.setdefault((i, j), np.zeros((space.dim(n), space.dim(i), space.dim(j)), dtype=np.int64))
        t[c, a, b] = (t[c, a, b] + int(coeff)) % p
    return DGAlgebra.validated(p, space, diff, mult, unit=unit, name=str(raw.get("name", "")))


def module_to_json(X: DGModule) -> dict:
    sp = X.space
    A = X.algebra
    diff = []
    for n in sp.degrees():
        blk = X.d(n)
        for c in range(blk.shape[1]):
            for r in np.flatnonzero(blk[:, c]):
                diff.append([sp.label(n, c), sp.label(n - 1, int(r)), int(blk[r, c])])
    action = []
    for (i, j), t in sorted(X.act.items()):
        for a in range(t.shape[1]):
            for x in range(t.shape[2]):
                for y in np.flatnonzero(t[:, a, x]):
                    action.append([A.space.label(i, a), sp.label(j, x), sp.label(i + j, int(y)), int(t[y, a, x])])
    return {"char": X.p, "lo": sp.lo, "basis": [list(d) for d in sp.labels], "diff": diff, "action": action}


def make_module(A: DGAlgebra, raw: dict) -> DGModule:
    """Build and validate a module over ``A`` from its JSON description."""
    if int(raw.get("char", A.p)) != A.p:
        raise ValueError("module and algebra characteristics differ")
    space = GradedSpace(int(raw.get("lo", 0)), tuple(tuple(str(l) for l in d) for d in raw["basis"]))
    idx = _index_labels(space)
    aidx = _index_labels(A.space)
    p = A.p
    diff = {n: zeros(space.dim(n - 1), space.dim(n)) for n in space.degrees()}
    for src, dst, coeff in raw.get("diff", []):
        (i, a), (j, b) = idx[str(src)], idx[str(dst)]
        if j != i - 1:
            raise ValueError(f"differential entry {src}->{dst} does not lower degree by one")
        diff[i][b, a] = (diff[i][b, a] + int(coeff)) % p
    act = {}
    for a_l, x_l, y_l, coeff in raw.get("action", []):
        (i, a), (j, x), (n, y) = aidx[str(a_l)], idx[str(x_l)], idx[str(y_l)]
        if n != i + j:
            raise ValueError(f"action {a_l}.{x_l} -> {y_l} is not homogeneous")
        t = act.setdefault((i, j), np.zeros((space.dim(n), A.dim(i), space.dim(j)), dtype=np.int64))
        t[y, a, x] = (t[y, a, x] + int(coeff)) % p
    return DGModule.validated(A, space, diff, act, name=str(raw.get("name", "")))


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
