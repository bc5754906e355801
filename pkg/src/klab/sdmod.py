"""Semidualizing modules: homothety checks, duality, base change and Tor decompositions.

``D^A`` is realized exactly as the graded dual of the regular module; all
``RHom(-, D^A)`` computations reduce to graded duals.  ``RHom(X, X)`` needs a
resolution of ``X`` and therefore carries a window.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .build import adjoin_exterior, exterior_algebra, trivial_extension
from .dgcore import (
    DGAlgebra,
    DGModule,
    DGMorphism,
    _sign,
    double_dual_map,
    find_isomorphism,
    generated_submodule,
    graded_dual,
    quotient_module,
    regular_module,
    residue_module,
    restrict_scalars,
    shift,
    tensor_parts,
    trivial_module,
)
from .derived import (
    DEFAULT_CAP,
    INF,
    Finite,
    NotTerminatedBy,
    Resolution,
    SemiFree,
    _complex_homology,
    homology_dims,
    homothety_data,
    pd_certificate,
    rhom_window,
    tensor_complex,
    tor,
    tor_window,
)
from .exactla import GradedSpace, kernel, matmul, zeros


def _num(x):
    """JSON-friendly window bound."""
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return int(x)


@dataclass
class Report:
    """Outcome of one verification; ``verdict`` is pass, fail, vacuous or inconclusive."""

    statement: str
    inputs: dict
    window: tuple
    data: dict
    verdict: str

    @property
    def passed(self) -> bool:
        return self.verdict != "fail"

    def to_json(self) -> dict:
        return {
            "statement": self.statement,
            "inputs": self.inputs,
            "window": [_num(w) for w in self.window],
            "data": self.data,
            "verdict": self.verdict,
        }


# --------------------------------------------------------------------------
# dualizing module and homothety verdicts


def dualizing_module(A: DGAlgebra) -> DGModule:
    """``D^A = Hom_k(A, k)``."""
    D = graded_dual(regular_module(A))
    return DGModule(A, D.space, D.diff, D.act, name="D^A")


@dataclass(frozen=True)
class Verified:
    pass


@dataclass(frozen=True)
class Refuted:
    degree: int
    reason: str


@dataclass(frozen=True)
class Inconclusive:
    window: tuple


@dataclass
class SemidualizingVerdict:
    subject: str
    window: tuple
    rows: dict
    verdict: object

    @property
    def label(self) -> str:
        return type(self.verdict).__name__

    def to_json(self) -> dict:
        out = {
            "subject": self.subject,
            "window": [_num(w) for w in self.window],
            "rows": {str(k): v for k, v in sorted(self.rows.items())},
            "verdict": self.label,
        }
        if isinstance(self.verdict, Refuted):
            out["degree"] = self.verdict.degree
            out["reason"] = self.verdict.reason
        return out


def _mismatch(row) -> str | None:
    a, h, r = row["H(A)"], row["H(RHom)"], row["rank"]
    if a == h == r:
        return None
    if a != h:
        return f"dim H(A) = {a} but dim H(RHom(X,X)) = {h}"
    return f"homothety has rank {r} on a space of dimension {a}"


def is_semidualizing(A: DGAlgebra, X: DGModule, N: int = 12, margin: int = 2,
                     cap: int = DEFAULT_CAP) -> SemidualizingVerdict:
    """Check that ``A -> RHom_A(X, X)`` is a quasi-isomorphism.

    The resolution is pushed until the RHom window reaches ``-margin`` (or the
    stage budget runs out).  Mismatches inside the window refute; a window
    that stops short of ``-margin`` without a mismatch is inconclusive.
    """
    if X.algebra is not A:
        raise ValueError("X is not a module over A")
    res = Resolution(X, cap)
    if X.total:
        res.extend(min(X.hi + margin + 1, X.lo + N + 1))
    wlo, whi = rhom_window(res, X)
    if res.complete:
        if res.n:
            lo = X.lo - max(res.gen_degrees)
            hi = X.hi - min(res.gen_degrees)
        else:
            lo, hi = 0, 0
        degrees = range(min(lo, 0), max(hi, A.top) + 1)
    else:
        degrees = range(int(wlo), max(int(whi), A.top) + 1)
    data = homothety_data(res, degrees)
    for k in degrees:
        why = _mismatch(data.rows[k])
        if why:
            return SemidualizingVerdict(X.name, (wlo, whi), data.rows, Refuted(k, why))
    if res.complete or wlo <= -margin:
        verdict = Verified()
    else:
        verdict = Inconclusive((wlo, whi))
    return SemidualizingVerdict(X.name, (wlo, whi), data.rows, verdict)


def self_duality_isomorphism(A: DGAlgebra, s: int | None = None, seed: int = 0) -> DGMorphism | None:
    """An isomorphism ``A -> Σ^s D^A`` (``s`` defaults to the top degree), if one exists."""
    s = A.top if s is None else s
    return find_isomorphism(regular_module(A), shift(dualizing_module(A), s), seed=seed)


# --------------------------------------------------------------------------
# dagger duality and biduality


def dagger(A: DGAlgebra, X: DGModule) -> DGModule:
    """``X† = RHom_A(X, D^A) ≅ Hom_k(X, k)``."""
    if X.algebra is not A:
        raise ValueError("X is not a module over A")
    Xd = graded_dual(X)
    return DGModule(A, Xd.space, Xd.diff, Xd.act, name=f"{X.name}†")


def check_dagger_duality(A: DGAlgebra, X: DGModule, N: int = 12, cap: int = DEFAULT_CAP) -> Report:
    """``X ⊗^L X† ≃ D^A`` within the Tor window, and ``X†`` semidualizing."""
    first = is_semidualizing(A, X, N, cap=cap)
    Xd = dagger(A, X)
    D = dualizing_module(A)
    t = tor(X, Xd, N=N, cap=cap)
    hD = homology_dims(D)
    agree = {i: (d, hD.get(i, 0)) for i, d in t.dims.items()}
    ok = all(a == b for a, b in agree.values())
    second = is_semidualizing(A, Xd, N, cap=cap)
    data = {
        "X": first.label,
        "X_dagger": second.label,
        "tor_vs_D": {str(i): list(v) for i, v in sorted(agree.items())},
    }
    if not isinstance(first.verdict, Verified):
        verdict = "vacuous"
    elif not ok or isinstance(second.verdict, Refuted):
        verdict = "fail"
    elif isinstance(second.verdict, Inconclusive):
        verdict = "inconclusive"
    else:
        verdict = "pass"
    return Report("X ⊗^L X† ≃ D^A and X† semidualizing",
                  {"algebra": A.name, "module": X.name, "N": N}, t.window, data, verdict)


def check_biduality(A: DGAlgebra, M: DGModule) -> Report:
    """The natural map ``M -> M††`` is an isomorphism of DG modules."""
    f = double_dual_map(M)
    Mdd = dagger(A, dagger(A, M))
    f = DGMorphism(M, Mdd, f.blocks)
    data = {"chain_map": f.is_chain_map(), "linear": f.is_linear(), "isomorphism": f.is_isomorphism()}
    verdict = "pass" if all(data.values()) else "fail"
    return Report("M -> M†† is an isomorphism", {"algebra": A.name, "module": M.name},
                  (M.lo, M.hi) if M.total else (0, -1), data, verdict)


# --------------------------------------------------------------------------
# base change along Koszul complexes


def koszul_base_change(C: DGAlgebra, elements, X: DGModule | None = None):
    """``B = C ⊗ Λ(e)`` with ``d e_j = t_j``, and optionally ``B ⊗_C X``."""
    B = adjoin_exterior(C, elements, name=f"K({C.name})")
    if X is None:
        return B, None
    return B, _extend_scalars(C, B, len(elements), X)


def _extend_scalars(C: DGAlgebra, B: DGAlgebra, m: int, X: DGModule) -> DGModule:
    """``B ⊗_C X`` as the quotient of ``B ⊗_k X`` by ``bc ⊗ x - b ⊗ cx``."""
    p = C.p
    pairs, index, _, _, _ = tensor_parts(C, exterior_algebra(m, p))
    E_unit = 0

    def iota(k, c):
        return index[k][((k, c), (0, E_unit))]

    lo, hi = X.lo, X.hi + B.top

    def blocks(n):
        return [(i, n - i) for i in range(B.top + 1) if X.dim(n - i) and B.dim(i)]

    offs = {}
    labels = []
    for n in range(lo, hi + 1):
        row, off = [], 0
        for i, j in blocks(n):
            offs[(n, i)] = off
            off += B.dim(i) * X.dim(j)
            row += [f"{B.space.label(i, b)}⊗{X.space.label(j, x)}"
                    for b in range(B.dim(i)) for x in range(X.dim(j))]
        labels.append(tuple(row))
    space = GradedSpace(lo, tuple(labels))
    diff = {}
    for n in range(lo + 1, hi + 1):
        mat = zeros(space.dim(n - 1), space.dim(n))
        for i, j in blocks(n):
            o = offs[(n, i)]
            w = B.dim(i) * X.dim(j)
            if i > 0 and (n - 1, i - 1) in offs:
                t = offs[(n - 1, i - 1)]
                mat[t:t + B.dim(i - 1) * X.dim(j), o:o + w] = np.kron(B.d(i), np.eye(X.dim(j), dtype=np.int64))
            if X.dim(j - 1):
                t = offs[(n - 1, i)]
                mat[t:t + B.dim(i) * X.dim(j - 1), o:o + w] = _sign(i) * np.kron(np.eye(B.dim(i), dtype=np.int64), X.d(j))
        diff[n] = mat % p
    act = {}
    for k in range(B.top + 1):
        for n in range(lo, hi + 1 - k):
            t = np.zeros((space.dim(n + k), B.dim(k), space.dim(n)), dtype=np.int64)
            for i, j in blocks(n):
                if i + k > B.top:
                    continue
                mk = B.m(k, i)
                blk = np.einsum("cab,xy->cxaby", mk, np.eye(X.dim(j), dtype=np.int64))
                blk = blk.reshape(B.dim(i + k) * X.dim(j), B.dim(k), B.dim(i) * X.dim(j))
                o, t0 = offs[(n, i)], offs[(n + k, i + k)]
                t[t0:t0 + blk.shape[0], :, o:o + blk.shape[2]] = blk
            act[(k, n)] = t % p
    BX = DGModule.validated(B, space, diff, act, name=f"B⊗{X.name}")
    rels = {}
    for n in range(lo, hi + 1):
        rows = []
        for i in range(B.top + 1):
            for k in range(C.top + 1):
                j = n - i - k
                if i + k > B.top or not X.dim(j) or not B.dim(i):
                    continue
                for b in range(B.dim(i)):
                    for c in range(C.dim(k)):
                        v = B.m(i, k)[:, b, iota(k, c)]
                        r = zeros(X.dim(j), space.dim(n))
                        o = offs[(n, i + k)]
                        r[:, o:o + B.dim(i + k) * X.dim(j)] = np.kron(v[None, :], np.eye(X.dim(j), dtype=np.int64))
                        if X.dim(j + k):
                            eb = np.zeros((1, B.dim(i)), dtype=np.int64)
                            eb[0, b] = 1
                            o = offs[(n, i)]
                            r[:, o:o + B.dim(i) * X.dim(j + k)] -= np.kron(eb, X.a(k, j)[:, c, :].T)
                        rows.append(r % p)
        if rows:
            rels[n] = np.concatenate(rows, axis=0)
    rels = generated_submodule(BX, rels)
    Q, _ = quotient_module(BX, rels, name=f"B⊗_C {X.name}")
    return Q


def check_base_change(C: DGAlgebra, t, X: DGModule, N: int = 12, cap: int = DEFAULT_CAP) -> Report:
    """``X`` semidualizing over ``C`` iff ``B ⊗_C X`` is over ``B = K(t) ⊗ C``.

    ``t`` lists variable names of the ring acting on ``C``.
    """
    elements = []
    for v in t:
        if v not in C.base_action:
            raise ValueError(f"{v!r} is not a variable acting on {C.name}")
        elements.append(C.base_action[v])
    if elements:
        B, BX = koszul_base_change(C, elements, X)
    else:
        B, BX = C, X
    left = is_semidualizing(C, X, N, cap=cap)
    right = is_semidualizing(B, BX, N, cap=cap)
    data = {"C": left.to_json(), "B": right.to_json()}
    if isinstance(left.verdict, Inconclusive) or isinstance(right.verdict, Inconclusive):
        verdict = "inconclusive"
    else:
        verdict = "pass" if left.label == right.label else "fail"
    win = (max(left.window[0], right.window[0]), min(left.window[1], right.window[1]))
    return Report("X ∈ S(C) iff B ⊗_C X ∈ S(B)",
                  {"algebra": C.name, "t": list(t), "module": X.name, "N": N}, win, data, verdict)


# --------------------------------------------------------------------------
# trivial extensions by Σ^n k and the Tor decomposition


def extension_by_point(B: DGAlgebra, n: int) -> DGAlgebra:
    """``A = B ⋉ Σ^n k``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    W = trivial_module(B, n, (1,), prefix="x")
    return trivial_extension(B, W, name=f"({B.name})⋉Σ^{n}k")


def projection(A: DGAlgebra, B: DGAlgebra) -> dict:
    """``A = B ⋉ W -> B``; the basis of ``B`` comes first in every degree."""
    return {i: np.eye(B.dim(i), A.dim(i), dtype=np.int64) for i in B.space.degrees()}


def along_projection(A: DGAlgebra, B: DGAlgebra, X: DGModule) -> DGModule:
    return restrict_scalars(X, A, projection(A, B))


class ResolutionCache:
    """Resolutions keyed by module identity, extended on demand."""

    def __init__(self, cap: int = DEFAULT_CAP):
        self.cap = cap
        self._store = {}

    def get(self, X: DGModule, G: int) -> Resolution:
        key = id(X)
        if key not in self._store:
            self._store[key] = (X, Resolution(X, self.cap))
        res = self._store[key][1]
        return res.extend(G)


def _betti_or_tor(res: Resolution, k: DGModule, degrees) -> dict:
    if res.minimal:
        return {d: res.num_gens(d) for d in degrees}
    layout, diff = tensor_complex(res, k)
    return _complex_homology(layout, diff, degrees, res.p)


@dataclass
class Lemma33Report:
    B: str
    n: int
    X: str
    Y: str
    left: dict
    right: dict
    window: tuple
    flags: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.window[1] >= self.window[0] and all(self.flags.values())

    def to_json(self) -> dict:
        return {
            "statement": "Tor^A(X,Y) = Tor^B(X,Y) + sum Tor^A_p(X,k) Tor^B_q(k,Y), p+q = i-n-1",
            "inputs": {"B": self.B, "n": self.n, "X": self.X, "Y": self.Y},
            "window": [_num(w) for w in self.window],
            "data": {str(i): [self.left[i], self.right[i]] for i in sorted(self.left)},
            "verdict": "pass" if self.passed else "fail",
        }


def check_lemma33(B: DGAlgebra, n: int, X: DGModule, Y: DGModule, N: int = 12,
                  cap: int = DEFAULT_CAP, A: DGAlgebra | None = None,
                  over_A: tuple | None = None, cache: ResolutionCache | None = None) -> Lemma33Report:
    """Compare both sides of the decomposition of ``Tor^A(X, Y)``, ``A = B ⋉ Σ^n k``.

    ``A`` and the restricted modules ``over_A = (X_A, Y_A)`` may be passed in to
    share resolutions across calls through ``cache``.
    """
    if A is None:
        A = extension_by_point(B, n)
    if over_A is None:
        over_A = (along_projection(A, B, X), along_projection(A, B, Y))
    XA, YA = over_A
    cache = cache or ResolutionCache(cap)
    lo = X.lo + Y.lo
    top = lo + N
    rA = cache.get(XA, top - Y.lo + 1)
    rBX = cache.get(X, top - Y.lo + 1)
    rBY = cache.get(Y, top - X.lo - n)
    hi = min(top, tor_window(rA, YA)[1], tor_window(rBX, Y)[1],
             rA.G + Y.lo + n + 1, rBY.G + X.lo + n + 1)
    hi = int(hi)
    degs = range(lo, hi + 1)
    left = tor(XA, YA, lo, hi, res=rA).dims if hi >= lo else {}
    tb = tor(X, Y, lo, hi, res=rBX).dims if hi >= lo else {}
    kA, kB = residue_module(A), residue_module(B)
    bA = _betti_or_tor(rA, kA, range(X.lo, max(hi - n - 1 - Y.lo, X.lo - 1) + 1))
    bB = _betti_or_tor(rBY, kB, range(Y.lo, max(hi - n - 1 - X.lo, Y.lo - 1) + 1))
    right = {}
    for i in degs:
        conv = sum(bA.get(q_, 0) * bB.get(i - n - 1 - q_, 0) for q_ in bA)
        right[i] = tb[i] + conv
    flags = {i: left[i] == right[i] for i in degs}
    return Lemma33Report(B.name, n, X.name, Y.name, left, right, (lo, hi), flags)


# --------------------------------------------------------------------------
# random modules and the Tor-rigidity search


def random_module(A: DGAlgebra, rng: np.random.Generator, max_dim: int = 4, max_degrees: int = 4,
                  tries: int = 500, name: str = "M") -> DGModule:
    """A random finite DG module with nonzero homology, by rejection.

    A random semi-free module on one to three generators in degrees 0..2 is
    cut down by the DG submodule generated by random vectors and everything in
    degrees at least ``max_degrees``; results with a degree of dimension above
    ``max_dim`` or with zero homology are rejected.
    """
    p = A.p
    for _ in range(tries):
        sf = SemiFree(A)
        degs = np.sort(rng.integers(0, 3, size=int(rng.integers(1, 4))))
        for d in np.unique(degs):
            d = int(d)
            c = int(np.sum(degs == d))
            m = sf.dim(d - 1)
            bd = zeros(c, m)
            if m and rng.random() < 0.75:
                Z = kernel(sf.diff(d - 1), p) if sf.dim(d - 2) else np.eye(m, dtype=np.int64)
                if Z.shape[0]:
                    bd = matmul(rng.integers(0, p, size=(c, Z.shape[0])), Z, p)
            sf.add_generators(d, bd)
        F = sf.truncation_module(2)
        lo = F.lo
        vectors = {}
        for m in F.space.degrees():
            if m >= lo + max_degrees:
                vectors[m] = np.eye(F.dim(m), dtype=np.int64)
                continue
            extra = F.dim(m) - int(rng.integers(1, max_dim + 1))
            k = max(0, extra) + int(rng.integers(0, 2))
            if k:
                vectors[m] = rng.integers(0, p, size=(k, F.dim(m)))
        rows = generated_submodule(F, vectors)
        Q, _ = quotient_module(F, rows, name=name)
        if Q.total == 0 or max(Q.dims()) > max_dim:
            continue
        if Q.hi - Q.lo + 1 > max_degrees:
            continue
        if not any(homology_dims(Q).values()):
            continue
        return Q
    raise RuntimeError("no valid random module found")


@dataclass(frozen=True)
class NoneFound:
    trials: int
    stats: dict


@dataclass(frozen=True)
class Candidate:
    X: DGModule
    Y: DGModule
    trial: int
    N: int
    escalated: object = None


def _tor_degree(res: Resolution, Y: DGModule, i: int) -> int:
    layout, diff = tensor_complex(res, Y)
    return _complex_homology(layout, diff, [i], res.p)[i]


def thm34_trial(X: DGModule, Y: DGModule, N: int, cap: int = DEFAULT_CAP) -> str:
    """Classify one pair: pd_finite, tor_nonzero, undecided or candidate."""
    rX = Resolution(X, cap)
    if rX.complete:
        return "pd_finite"
    for i in range(N // 2, N + 1):
        rX.extend(i - Y.lo + 1)
        if rX.complete:
            return "pd_finite"
        if tor_window(rX, Y)[1] < i:
            return "undecided"
        if _tor_degree(rX, Y, i):
            return "tor_nonzero"
    rX.extend(X.lo + N + 1)
    if isinstance(pd_certificate(X, N, res=rX), Finite):
        return "pd_finite"
    rY = Resolution(Y, cap).extend(Y.lo + N + 1)
    cert = pd_certificate(Y, N, res=rY)
    if isinstance(cert, Finite):
        return "pd_finite"
    if not isinstance(pd_certificate(X, N, res=rX), NotTerminatedBy) or rX.G < X.lo + N + 1 or rY.G < Y.lo + N + 1:
        return "undecided"
    return "candidate"


def thm34_pair(A: DGAlgebra, seed_seq: np.random.SeedSequence):
    rng = np.random.default_rng(seed_seq)
    return random_module(A, rng, name="X"), random_module(A, rng, name="Y")


def search_thm34_counterexample(B: DGAlgebra, n: int, trials: int = 500, N: int = 12, seed: int = 0,
                                cap: int = DEFAULT_CAP, escalate: int = 20):
    """Look for ``X, Y`` over ``B ⋉ Σ^n k`` with eventually vanishing Tor and both pd infinite."""
    if n < 1:
        raise ValueError("n must be at least 1")
    A = extension_by_point(B, n)
    stats = {"pd_finite": 0, "tor_nonzero": 0, "undecided": 0}
    for t, ss in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        X, Y = thm34_pair(A, ss)
        out = thm34_trial(X, Y, N, cap)
        if out == "candidate":
            again = thm34_trial(X, Y, escalate, cap) if escalate > N else None
            return Candidate(X, Y, t, N, again)
        stats[out] += 1
    return NoneFound(trials, stats)
