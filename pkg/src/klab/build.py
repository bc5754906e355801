"""Constructors: rings, exterior algebras, trivial extensions, Koszul complexes,
homology algebras and the codepth-three class table."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .dgcore import (
    TRUST_ABOVE,
    DGAlgebra,
    DGModule,
    _sign,
    graded_dual,
    quotient_module,
    regular_module,
    shift,
    submodule,
    tensor_algebras,
    tensor_parts,
    trivial_module,
)
from .exactla import (
    DEFAULT_CHAR,
    GradedSpace,
    _coordinate_rows,
    echelon,
    homology_at,
    is_prime,
    matmul,
    select_independent,
    zeros,
)


class RingParseError(ValueError):
    """Malformed ring description; ``position`` is a 1-based column."""

    def __init__(self, message: str, text: str = "", position: int | None = None):
        where = f" at column {position} of {text!r}" if position is not None else ""
        super().__init__(message + where)
        self.text = text
        self.position = position


class NonMonomialInput(RingParseError):
    pass


class ParameterOutOfRange(ValueError):
    pass


class RepresentativeDependence(RuntimeError):
    """Products on homology changed under a change of representatives."""


# --------------------------------------------------------------------------
# rings


_VAR = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


def parse_monomial(text: str, variables) -> tuple[int, ...]:
    """Exponent vector of ``var('^'int)?('*'var('^'int)?)*``."""
    pos = {v: k for k, v in enumerate(variables)}
    exps = [0] * len(variables)
    i = 0
    s = text
    if not s:
        raise RingParseError("empty monomial", text, 1)
    while True:
        m = _VAR.match(s, i)
        if not m:
            if i < len(s) and s[i] in "+-":
                raise NonMonomialInput("only monomial generators are supported", text, i + 1)
            raise RingParseError("expected a variable", text, i + 1)
        name = m.group()
        if name not in pos:
            raise RingParseError(f"unknown variable {name!r}", text, i + 1)
        i = m.end()
        e = 1
        if i < len(s) and s[i] == "^":
            i += 1
            d = re.compile(r"[0-9]+").match(s, i)
            if not d:
                raise RingParseError("expected an exponent after '^'", text, i + 1)
            e = int(d.group())
            if e < 1:
                raise RingParseError("exponents must be positive", text, i + 1)
            i = d.end()
        exps[pos[name]] += e
        if i == len(s):
            return tuple(exps)
        if s[i] == "*":
            i += 1
            continue
        if s[i] in "+-":
            raise NonMonomialInput("only monomial generators are supported", text, i + 1)
        raise RingParseError(f"unexpected character {s[i]!r}", text, i + 1)


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_str(exps, variables) -> str:
    parts = []
    for v, e in zip(variables, exps):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class RingPresentation:
    """``k[x_1..x_n] / I`` for an m-primary monomial ideal ``I ⊆ (x)^2``."""

    p: int
    variables: tuple[str, ...]
    generators: tuple[tuple[int, ...], ...]
    basis: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        if not is_prime(self.p) or self.p >= 2**31:
            raise ValueError(f"characteristic {self.p} is not a prime below 2**31")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        n = len(self.variables)
        for g in self.generators:
            if sum(g) < 2:
                raise ValueError(f"generator {monomial_str(g, self.variables)} is not in (x)^2")
        for a, b in itertools.permutations(self.generators, 2):
            if _divides(a, b):
                raise ValueError(
                    f"generators are not minimal: {monomial_str(a, self.variables)} divides "
                    f"{monomial_str(b, self.variables)}"
                )
        bounds = []
        for k in range(n):
            pure = [g[k] for g in self.generators if sum(g) == g[k]]
            if not pure:
                raise ValueError(f"ideal is not m-primary: no power of {self.variables[k]} lies in it")
            bounds.append(min(pure))
        std = [e for e in itertools.product(*(range(b) for b in bounds))
               if not any(_divides(g, e) for g in self.generators)]
        std.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
        object.__setattr__(self, "basis", tuple(std))

    @classmethod
    def from_json(cls, raw: dict, char: int | None = None) -> "RingPresentation":
        if not isinstance(raw, dict) or "vars" not in raw or "ideal" not in raw:
            raise RingParseError("ring description needs 'vars' and 'ideal'")
        variables = tuple(str(v) for v in raw["vars"])
        for v in variables:
            if not _VAR.fullmatch(v):
                raise RingParseError(f"bad variable name {v!r}", v, 1)
        gens = tuple(parse_monomial(str(g).replace(" ", ""), variables) for g in raw["ideal"])
        p = int(char if char is not None else raw.get("char", DEFAULT_CHAR))
        return cls(p, variables, gens)

    def to_json(self) -> dict:
        return {"char": self.p, "vars": list(self.variables),
                "ideal": [monomial_str(g, self.variables) for g in self.generators]}

    @property
    def edim(self) -> int:
        return len(self.variables)

    @property
    def ecodepth(self) -> int:
        # artinian: depth is 0
        return len(self.variables)

    @property
    def length(self) -> int:
        return len(self.basis)

    @property
    def is_regular(self) -> bool:
        return self.edim == 0

    def labels(self) -> tuple[str, ...]:
        return tuple(monomial_str(e, self.variables) for e in self.basis)


def ring_algebra(R: RingPresentation) -> DGAlgebra:
    """``R`` as a DG algebra concentrated in degree 0, with its variables as base action."""
    idx = {e: k for k, e in enumerate(R.basis)}
    n = len(R.basis)
    t = np.zeros((n, n, n), dtype=np.int64)
    for a, ea in enumerate(R.basis):
        for b, eb in enumerate(R.basis):
            prod = tuple(x + y for x, y in zip(ea, eb))
            if prod in idx:
                t[idx[prod], a, b] = 1
    action = {}
    for k, v in enumerate(R.variables):
        e = tuple(int(j == k) for j in range(R.edim))
        vec = np.zeros(n, dtype=np.int64)
        if e in idx:
            vec[idx[e]] = 1
        action[v] = vec
    space = GradedSpace(0, (R.labels(),))
    return DGAlgebra.validated(R.p, space, {}, {(0, 0): t}, unit=0, base_action=action, name="R")


# --------------------------------------------------------------------------
# exterior algebras and trivial extensions


def _subset_label(J) -> str:
    if not J:
        return "1"
    sep = "" if max(J) < 9 else "_"
    return sep.join(f"e{j + 1}" for j in J)


def _subsets(c: int):
    return [list(itertools.combinations(range(c), i)) for i in range(c + 1)]


def _merge_sign(I, J) -> int:
    inv = sum(1 for i in I for j in J if i > j)
    return _sign(inv)


def exterior_algebra(c: int, p: int = DEFAULT_CHAR) -> DGAlgebra:
    """``Λ(Σk^c)`` with zero differential."""
    if c < 0:
        raise ParameterOutOfRange("c must be non-negative")
    if c > 8:
        raise ParameterOutOfRange("exterior algebras are limited to c <= 8")
    subs = _subsets(c)
    index = [{J: k for k, J in enumerate(row)} for row in subs]
    space = GradedSpace(0, tuple(tuple(_subset_label(J) for J in row) for row in subs))
    mult = {}
    for i in range(c + 1):
        for j in range(c + 1 - i):
            t = np.zeros((comb(c, i + j), comb(c, i), comb(c, j)), dtype=np.int64)
            for a, I in enumerate(subs[i]):
                for b, J in enumerate(subs[j]):
                    if set(I) & set(J):
                        continue
                    K = tuple(sorted(I + J))
                    t[index[i + j][K], a, b] = _merge_sign(I, J) % p
            mult[(i, j)] = t
    return DGAlgebra.validated(p, space, {}, mult, unit=0, name=f"Λ(Σk^{c})")


def adjoin_exterior(C: DGAlgebra, elements, name: str = "") -> DGAlgebra:
    """Koszul complex ``C ⊗ Λ(e_1..e_m)`` with ``d e_i = t_i`` for ``t_i`` in ``C_0``."""
    p = C.p
    m = len(elements)
    E = exterior_algebra(m, p)
    pairs, index, space, mult, diff = tensor_parts(C, E)
    subs = _subsets(m)
    sub_index = [{J: k for k, J in enumerate(row)} for row in subs]
    ts = [np.asarray(t, dtype=np.int64) % p for t in elements]
    for n in range(1, space.hi + 1):
        mat = diff[n]
        for x, ((i, a), (j, b)) in enumerate(pairs[n]):
            if j == 0:
                continue
            J = subs[j][b]
            for s, js in enumerate(J):
                rest = J[:s] + J[s + 1:]
                b2 = sub_index[j - 1][rest]
                # c * t_{js} in C_i
                vec = matmul(C.m(i, 0)[:, a, :], ts[js], p)
                for c in np.flatnonzero(vec):
                    z = index[n - 1][((i, int(c)), (j - 1, b2))]
                    mat[z, x] = (mat[z, x] + _sign(i + s) * vec[c]) % p
    return DGAlgebra.validated(p, space, diff, mult, unit=0, base_action=C.base_action,
                               name=name or f"K({C.name})", trusted=space.total > TRUST_ABOVE)


def koszul_complex(R: RingPresentation) -> DGAlgebra:
    """``K^R(x_1..x_n)`` on the variables of ``R``."""
    C = ring_algebra(R)
    return adjoin_exterior(C, [C.base_action[v] for v in R.variables], name="K")


def _unique_labels(existing, labels):
    taken = set(existing)
    flat = [l for deg in labels for l in deg]
    if len(set(flat)) != len(flat):
        labels = tuple(tuple(f"w{n}_{k}" for k in range(len(deg))) for n, deg in enumerate(labels))
    while not taken.isdisjoint(l for deg in labels for l in deg):
        labels = tuple(tuple(l + "'" for l in deg) for deg in labels)
    return labels


def trivial_extension(B: DGAlgebra, W: DGModule, name: str = "") -> DGAlgebra:
    """Square-zero extension ``B ⋉ W``: basis of ``B`` first, then ``W``; ``W·W = 0``."""
    p = B.p
    if W.total == 0:
        return B
    if W.space.support()[0] < 0:
        raise ValueError("W must live in non-negative degrees")
    top = max(B.top, W.hi)
    wl = tuple(tuple(W.space.labels[n - W.lo]) if W.dim(n) else () for n in range(0, top + 1))
    wl = _unique_labels([l for deg in B.space.labels for l in deg], wl)
    space = GradedSpace(0, tuple(
        (tuple(B.space.labels[n]) if n <= B.top else ()) + wl[n] for n in range(top + 1)))

    def nb(n):
        return B.dim(n)

    mult = {}
    for i in range(top + 1):
        for j in range(top + 1 - i):
            n = i + j
            t = np.zeros((space.dim(n), space.dim(i), space.dim(j)), dtype=np.int64)
            if i <= B.top and j <= B.top and n <= B.top:
                t[: nb(n), : nb(i), : nb(j)] = B.m(i, j)
            if i <= B.top and W.dim(j) and W.dim(n):
                t[nb(n):, : nb(i), nb(j):] = W.a(i, j)
            if j <= B.top and W.dim(i) and W.dim(n):
                t[nb(n):, nb(i):, : nb(j)] = (_sign(i * j) * W.a(j, i).transpose(0, 2, 1)) % p
            mult[(i, j)] = t
    diff = {}
    for n in range(1, top + 1):
        mat = zeros(space.dim(n - 1), space.dim(n))
        mat[: nb(n - 1), : nb(n)] = B.d(n)
        mat[nb(n - 1):, nb(n):] = W.d(n)
        diff[n] = mat
    return DGAlgebra.validated(p, space, diff, mult, unit=B.unit, name=name or f"{B.name}⋉W")


def trivial_extension_by_space(B: DGAlgebra, dims, lo: int = 1, name: str = "") -> DGAlgebra:
    """``B ⋉ W`` for a graded vector space ``W`` (``dims`` from degree ``lo``) killed by ``m_B``."""
    if not any(dims):
        return B
    W = trivial_module(B, lo, dims, prefix="w")
    return trivial_extension(B, W, name=name)


def square_zero(p: int, dims, name: str = "") -> DGAlgebra:
    """``k ⋉ W`` with ``dims[i]`` the dimension of ``W`` in degree ``i + 1``."""
    return trivial_extension_by_space(k_algebra(p), dims, 1, name=name or f"k⋉W{tuple(dims)}")


def k_algebra(p: int = DEFAULT_CHAR) -> DGAlgebra:
    one = np.ones((1, 1, 1), dtype=np.int64)
    return DGAlgebra.validated(p, GradedSpace(0, (("1",),)), {}, {(0, 0): one}, unit=0, name="k")


# --------------------------------------------------------------------------
# homology algebras


@dataclass(frozen=True)
class HomologyAlgebra:
    """``H(A)`` with induced products; ``reps[n]`` are cycles of ``source`` (rows)."""

    algebra: DGAlgebra
    source: DGAlgebra
    reps: dict
    projections: dict

    @property
    def dims(self):
        return self.algebra.dims()


def _homology_data(A: DGAlgebra):
    p = A.p
    reps, projs, bds = {}, {}, {}
    for n in A.space.degrees():
        h = homology_at(A.d(n + 1), A.d(n), p)
        if n == 0:
            # unit first, then a complement of the boundaries inside m_{A_0}
            m0 = np.eye(A.dim(0), dtype=np.int64)[A.max_ideal_indices(0)]
            stacked = np.concatenate([h.boundaries.rows, A.unit_vector()[None, :], m0], axis=0)
            keep = [k for k in select_independent(stacked, p) if k >= h.boundaries.rank]
            r = stacked[keep]
            reps[n] = r
            projs[n] = _coordinate_rows(h.boundaries.rows, r, p)
        else:
            reps[n] = h.reps
            projs[n] = h.projection
        bds[n] = h.boundaries.rows
    return reps, projs, bds


def _products(A: DGAlgebra, reps, projs, top):
    p = A.p
    mult = {}
    for i in range(top + 1):
        for j in range(top + 1 - i):
            n = i + j
            ri, rj = reps[i], reps[j]
            t = np.zeros((reps[n].shape[0], ri.shape[0], rj.shape[0]), dtype=np.int64)
            for a in range(ri.shape[0]):
                for b in range(rj.shape[0]):
                    prod = A.multiply(ri[a], i, rj[b], j)
                    t[:, a, b] = matmul(projs[n], prod, p) if projs[n].size else 0
            mult[(i, j)] = t
    return mult


def homology_algebra(A: DGAlgebra, check: bool = True, seed: int = 0) -> HomologyAlgebra:
    """Homology with induced products; representative-independence is re-checked."""
    p = A.p
    reps, projs, bds = _homology_data(A)
    nz = [n for n in A.space.degrees() if reps[n].shape[0]]
    top = max(nz)
    labels = []
    for n in range(top + 1):
        if n == 0:
            labels.append(("1",) + tuple(f"h0_{k}" for k in range(1, reps[0].shape[0])))
        else:
            labels.append(tuple(f"h{n}_{k}" for k in range(reps[n].shape[0])))
    space = GradedSpace(0, tuple(labels))
    mult = _products(A, reps, projs, top)
    if check and not A.is_formal_zero_diff:
        rng = np.random.default_rng(seed)
        alt = {}
        for n in range(top + 1):
            r = reps[n]
            b = bds[n]
            if b.shape[0] and r.shape[0]:
                coeff = rng.integers(0, p, size=(r.shape[0], b.shape[0]))
                if n == 0:
                    coeff[0] = 0  # keep the unit
                alt[n] = (r + matmul(coeff, b, p)) % p
            else:
                alt[n] = r
        mult2 = _products(A, alt, projs, top)
        for key in mult:
            if not np.array_equal(mult[key], mult2[key]):
                raise RepresentativeDependence(f"products in degrees {key} depend on representatives")
    H = DGAlgebra.validated(p, space, {}, mult, unit=0, name=f"H({A.name})" if A.name else "H")
    return HomologyAlgebra(H, A, {n: reps[n] for n in range(top + 1)}, {n: projs[n] for n in range(top + 1)})


# --------------------------------------------------------------------------
# the class table


def _body(label: str, params, p: int) -> DGAlgebra:
    label = label.upper()
    if label == "C":
        (c,) = params
        if not 0 <= c <= 3:
            raise ParameterOutOfRange("C(c) needs 0 <= c <= 3")
        return exterior_algebra(c, p)
    if label == "S":
        if params:
            raise ParameterOutOfRange("S takes no parameters")
        return k_algebra(p)
    if label in ("T", "B"):
        if params:
            raise ParameterOutOfRange(f"{label} takes no parameters")
        C = exterior_algebra(2, p)
        reg = regular_module(C)
        if label == "T":
            M, _ = quotient_module(reg, {2: np.eye(1, dtype=np.int64)}, name="u")
        else:
            M, _ = submodule(reg, {1: np.eye(2, dtype=np.int64), 2: np.eye(1, dtype=np.int64)}, name="u")
        return trivial_extension(C, shift(M, 1), name=label)
    if label == "G":
        (r,) = params
        if r < 1:
            raise ParameterOutOfRange("G(r) needs r >= 1")
        C = square_zero(p, (r,))
        dual = shift(graded_dual(regular_module(C)), 3)
        return trivial_extension(C, dual, name=f"G({r})")
    if label == "H":
        pp, q = params
        if pp < 0 or q < 0:
            raise ParameterOutOfRange("H(p,q) needs p, q >= 0")
        C = square_zero(p, (pp, q))
        D = square_zero(p, (1,))
        return tensor_algebras(C, D, name=f"H({pp},{q})")
    raise ParameterOutOfRange(f"unknown class {label!r}")


def table_algebra(label: str, params=(), W=(), p: int = DEFAULT_CHAR) -> DGAlgebra:
    """Row of the codepth-three table, wrapped as ``body ⋉ W``.

    ``W`` lists the dimensions of the graded space in degrees 1, 2, ...
    """
    params = tuple(int(x) for x in params)
    W = tuple(int(x) for x in W)
    if any(x < 0 for x in W):
        raise ParameterOutOfRange("W dimensions must be non-negative")
    body = _body(label, params, p)
    if label.upper() == "C" and any(W):
        raise ParameterOutOfRange("C(c) has no W summand")
    name = class_name(label, params)
    if any(W):
        name += f"⋉W{W}"
    A = trivial_extension_by_space(body, W, 1, name=name)
    return DGAlgebra(A.p, A.space, A.diff, A.mult, A.unit, A.base_action, name)


def class_name(label: str, params) -> str:
    label = label.upper()
    if params:
        return f"{label}({','.join(str(x) for x in params)})"
    return label
