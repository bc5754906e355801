"""Minimal semi-free resolutions and the derived functors computed from them.

A resolution ``F -> X`` is stored by degree: ``V_d`` is the span of the
semibasis elements of degree ``d`` (``n_d`` of them) and

* ``dz[d][j]`` has shape ``(n_{d-1-j}, dim A_j, n_d)``: the ``A_j ⊗ V_{d-1-j}``
  component of ``d(e_g)`` for the generators ``e_g`` of degree ``d``;
* ``eps[d]`` has shape ``(dim X_d, n_d)``: the augmentation on generators.

``F_m = ⊕_i A_i ⊗ V_{m-i}``; basis order is by ``i`` ascending, then
generator, then basis of ``A_i``.

Every derived quantity carries the window of degrees on which it is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dgcore import (
    DGAlgebra,
    DGModule,
    DGMorphism,
    _sign,
    annihilator_check,
    quotient_module,
    submodule,
    zero_module,
)
from .exactla import (
    GradedSpace,
    echelon,
    homology_at,
    image,
    kernel,
    matmul,
    rank,
    select_independent,
    zeros,
)

# largest cone dimension a resolution stage may reach before the window is cut
DEFAULT_CAP = 2400


class BudgetExceeded(RuntimeError):
    """The requested degrees are not covered by an attainable window."""

    def __init__(self, message: str, window=None):
        super().__init__(message)
        self.window = window


INF = float("inf")


def _block_matrix(row_layout, col_layout, blocks) -> np.ndarray:
    """Assemble ``{(rkey, ckey): array}`` into a dense matrix."""
    rows = sum(sz for _, _, sz in row_layout)
    cols = sum(sz for _, _, sz in col_layout)
    out = zeros(rows, cols)
    roff = {k: (o, s) for k, o, s in row_layout}
    coff = {k: (o, s) for k, o, s in col_layout}
    for (rk, ck), blk in blocks.items():
        if rk not in roff or ck not in coff:
            continue
        ro, rs = roff[rk]
        co, cs = coff[ck]
        out[ro:ro + rs, co:co + cs] += blk
    return out


def _layout(sizes):
    out, off = [], 0
    for key, sz in sizes:
        if sz:
            out.append((key, off, sz))
            off += sz
    return out


class SemiFree:
    """Semi-free DG module ``⊕ A e_g`` given by generator counts and ``d(e_g)``."""

    def __init__(self, A: DGAlgebra):
        self.A = A
        self.p = A.p
        self.n = {}  # d -> number of generators of degree d
        self.dz = {}

    def add_generators(self, d: int, boundaries: np.ndarray) -> None:
        """Adjoin generators of degree ``d`` with ``d(e) = `` the rows of ``boundaries`` (in ``F_{d-1}``)."""
        if d in self.n:
            raise ValueError(f"generators of degree {d} already present")
        A = self.A
        k = boundaries.shape[0]
        self.n[d] = k
        dz = {}
        for (i, h), off, sz in self.layout(d - 1):
            blk = boundaries[:, off:off + sz].reshape(k, self.num_gens(h), A.dim(i))
            dz[i] = blk.transpose(1, 2, 0).copy() % self.p
        self.dz[d] = dz

    # -- shape --------------------------------------------------------------
    @property
    def gen_degrees(self):
        return sorted(d for d, k in self.n.items() if k)

    def num_gens(self, d: int) -> int:
        return self.n.get(d, 0)

    def layout(self, m: int, max_gen: float = INF):
        """``[((i, d), offset, size)]`` for ``F_m`` restricted to generators of degree <= max_gen."""
        A = self.A
        sizes = []
        for i in range(A.top + 1):
            d = m - i
            if d <= max_gen:
                sizes.append(((i, d), self.num_gens(d) * A.dim(i)))
        return _layout(sizes)

    def dim(self, m: int, max_gen: float = INF) -> int:
        return sum(s for _, _, s in self.layout(m, max_gen))

    # -- matrices -----------------------------------------------------------
    def diff(self, m: int, max_gen: float = INF) -> np.ndarray:
        """``d: F_m -> F_{m-1}``."""
        A, p = self.A, self.p
        blocks = {}
        for (i, d), _, _ in self.layout(m, max_gen):
            nd = self.num_gens(d)
            if i >= 1:
                blocks[((i - 1, d), (i, d))] = np.kron(np.eye(nd, dtype=np.int64), A.d(i))
            for j, z in self.dz.get(d, {}).items():
                if i + j > A.top or not z.size:
                    continue
                dh = d - 1 - j
                t = np.einsum("hbg,cab->hcga", z, A.m(i, j), optimize=True)
                t = t.reshape(z.shape[0] * A.dim(i + j), nd * A.dim(i))
                key = ((i + j, dh), (i, d))
                blk = (_sign(i) * t) % p
                blocks[key] = (blocks[key] + blk) % p if key in blocks else blk
        return _block_matrix(self.layout(m - 1, max_gen), self.layout(m, max_gen), blocks) % p

    def action(self, k: int, m: int, max_gen: float = INF) -> np.ndarray:
        """Tensor ``(dim F_{m+k}, dim A_k, dim F_m)`` of the left ``A``-action."""
        A = self.A
        lay_t = {key: (o, s) for key, o, s in self.layout(m + k, max_gen)}
        lay = self.layout(m, max_gen)
        out = np.zeros((self.dim(m + k, max_gen), A.dim(k), self.dim(m, max_gen)), dtype=np.int64)
        for (i, d), off, sz in lay:
            if (i + k, d) not in lay_t:
                continue
            to, ts = lay_t[(i + k, d)]
            nd = self.num_gens(d)
            mk = A.m(k, i)  # (c, b, a)
            blk = np.einsum("gh,cba->gcbha", np.eye(nd, dtype=np.int64), mk).reshape(ts, A.dim(k), sz)
            out[to:to + ts, :, off:off + sz] = blk
        return out

    # -- finite pieces as DG modules ---------------------------------------
    def truncation_module(self, s: int, name: str = "L") -> DGModule:
        """``F^(s)``: the DG submodule on generators of degree <= s."""
        A, p = self.A, self.p
        gens = [d for d in self.gen_degrees if d <= s]
        if not gens:
            return zero_module(A)
        lo, hi = min(gens), max(gens) + A.top
        labels = []
        for m in range(lo, hi + 1):
            row = []
            for (i, d), _, _ in self.layout(m, s):
                for g in range(self.num_gens(d)):
                    for a in range(A.dim(i)):
                        row.append(f"{A.space.label(i, a)}·e{d}_{g}")
            labels.append(tuple(row))
        space = GradedSpace(lo, tuple(labels))
        diff = {m: self.diff(m, s) for m in range(lo + 1, hi + 1)}
        act = {}
        for k in range(A.top + 1):
            for m in range(lo, hi + 1 - k):
                act[(k, m)] = self.action(k, m, s)
        return DGModule.validated(A, space, diff, act, name=name)


class Resolution(SemiFree):
    """Staged minimal semi-free resolution of ``X``; see the module docstring."""

    def __init__(self, X: DGModule, cap: int = DEFAULT_CAP):
        super().__init__(X.algebra)
        self.X = X
        self.cap = cap
        self.eps = {}
        self.lo = X.lo
        self.last = X.lo - 1  # cone degrees <= last are exact
        self.complete = X.total == 0
        self.minimal = True
        self.budget_hit = False
        if not self.complete and self._check_complete():
            self.complete = True

    @property
    def G(self) -> float:
        """Generators are final through this degree."""
        return INF if self.complete else self.last

    def augmentation(self, m: int, max_gen: float = INF) -> np.ndarray:
        """``eps: F_m -> X_m``."""
        X, A, p = self.X, self.A, self.p
        lay = self.layout(m, max_gen)
        out = zeros(X.dim(m), sum(s for _, _, s in lay))
        if X.dim(m) == 0:
            return out
        for (i, d), off, sz in lay:
            e = self.eps.get(d)
            if e is None or X.dim(d) == 0:
                continue
            t = np.einsum("yax,xg->yga", X.a(i, d), e, optimize=True).reshape(X.dim(m), sz)
            out[:, off:off + sz] = t % p
        return out

    def cone_diff(self, n: int) -> np.ndarray:
        """``cone_n = X_n ⊕ F_{n-1} -> cone_{n-1}``, ``(x, f) -> (dx + eps f, -df)``."""
        X, p = self.X, self.p
        top = np.concatenate([X.d(n), self.augmentation(n - 1)], axis=1)
        dF = self.diff(n - 1)
        bot = np.concatenate([zeros(dF.shape[0], X.dim(n)), (-dF) % p], axis=1)
        return np.concatenate([top, bot], axis=0)

    def cone_dim(self, n: int) -> int:
        return self.X.dim(n) + self.dim(n - 1)

    # -- construction -------------------------------------------------------
    def _max_cone_degree(self) -> int:
        hi = self.X.hi
        if self.n:
            hi = max(hi, max(self.gen_degrees) + self.A.top + 1)
        return hi

    def _check_complete(self) -> bool:
        """Is the whole (finite) cone acyclic?"""
        lo, hi = self.last + 1, self._max_cone_degree()
        dims = {m: self.cone_dim(m) for m in range(lo - 1, hi + 2)}
        chi = sum(_sign(m) * dims[m] for m in range(lo, hi + 1))
        if chi != 0:
            return False
        ranks = {}
        for m in range(lo, hi + 2):
            if dims[m] and dims[m - 1]:
                ranks[m] = rank(self.cone_diff(m), self.p)
            else:
                ranks[m] = 0
        return all(dims[m] - ranks[m] - ranks[m + 1] == 0 for m in range(lo, hi + 1))

    def _stage(self, n: int) -> None:
        X, A, p = self.X, self.A, self.p
        c_n = self.cone_dim(n)
        if c_n == 0:
            return
        Dn = self.cone_diff(n)
        Z = kernel(Dn, p) if Dn.shape[0] else np.eye(c_n, dtype=np.int64)
        if Z.shape[0] == 0:
            return
        Dn1 = self.cone_diff(n + 1)
        Bd = image(Dn1, p) if Dn1.shape[1] else zeros(0, c_n)
        if Z.shape[0] == Bd.shape[0]:
            return
        xn = X.dim(n)
        # m_{A_0} Z
        m0 = A.max_ideal_indices(0)
        mZ = []
        if m0:
            actF = self.action(0, n - 1)
            for a in m0:
                op = zeros(c_n, c_n)
                if xn:
                    op[:xn, :xn] = X.a(0, n)[:, a, :]
                op[xn:, xn:] = actF[:, a, :]
                mZ.append(matmul(Z, op.T, p))
        mZ = np.concatenate(mZ, axis=0) if mZ else zeros(0, c_n)
        # cycles whose lift has no unit coefficient on degree n-1 generators
        unit_cols = []
        for (i, d), off, sz in self.layout(n - 1):
            if i == 0:
                unit_cols = [xn + off + g * A.dim(0) + A.unit for g in range(self.num_gens(d))]
        if unit_cols:
            W = Z[:, unit_cols]
            left = kernel(W.T, p)
            V = matmul(left, Z, p) if left.shape[0] else zeros(0, c_n)
        else:
            V = Z
        stacked = np.concatenate([Bd, mZ, V, Z], axis=0)
        keep = select_independent(stacked, p)
        start_v = Bd.shape[0] + mZ.shape[0]
        start_z = start_v + V.shape[0]
        picks = [k for k in keep if k >= start_v]
        if not picks:
            return
        if any(k >= start_z for k in picks):
            self.minimal = False
        reps = stacked[picks]
        self.eps[n] = reps[:, :xn].T.copy() if xn else zeros(0, len(picks))
        self.add_generators(n, (-reps[:, xn:]) % p)

    def extend(self, G: int) -> "Resolution":
        """Process cone degrees through ``G`` (or until complete or over budget)."""
        while not self.complete and self.last < G:
            n = self.last + 1
            if self.cone_dim(n + 1) > self.cap or self.cone_dim(n) > self.cap:
                self.budget_hit = True
                break
            self._stage(n)
            self.last = n
            if n >= self.X.hi and self._check_complete():
                self.complete = True
        return self

    # -- windows ------------------------------------------------------------
    @property
    def quasi_iso_through(self) -> float:
        return INF if self.complete else self.last - 1

    def window(self) -> tuple[int, float]:
        return (self.lo, self.quasi_iso_through)

    @property
    def pd(self):
        if not self.complete:
            return None
        return max(self.gen_degrees) if self.n else -INF

    def betti(self, hi: int | None = None) -> dict:
        """Generator counts by degree (exact through ``G``)."""
        top = self.G if hi is None else min(hi, self.G)
        degs = range(self.lo, int(top) + 1) if top != INF else self.gen_degrees
        return {d: self.num_gens(d) for d in degs}


def resolve(X: DGModule, N: int = 12, cap: int = DEFAULT_CAP) -> Resolution:
    """Minimal semi-free resolution of ``X`` through cone degree ``lo(X) + N + 1``."""
    if N < 1:
        raise ValueError("stage budget must be at least 1")
    return Resolution(X, cap).extend(X.lo + N + 1)


# --------------------------------------------------------------------------
# derived functors


@dataclass
class GradedResult:
    """Dimensions per degree together with the window where they are exact."""

    dims: dict
    window: tuple
    complete: bool = False
    extra: dict = field(default_factory=dict)

    def as_list(self, a: int, b: int):
        return [self.dims.get(i, 0) for i in range(a, b + 1)]


def tensor_complex(res: Resolution, Y: DGModule):
    """Layouts and differential blocks of ``F ⊗_A Y``; returns (layout(i), diff(i))."""
    A, p = res.A, res.p

    def layout(i):
        sizes = []
        for d in res.gen_degrees:
            t = i - d
            sizes.append((d, res.num_gens(d) * Y.dim(t)))
        return _layout(sizes)

    def diff(i):
        blocks = {}
        for d, _, _ in layout(i):
            t = i - d
            nd = res.num_gens(d)
            if Y.dim(t - 1):
                blocks[(d, d)] = (_sign(d) * np.kron(np.eye(nd, dtype=np.int64), Y.d(t))) % p
            for j, z in res.dz.get(d, {}).items():
                dh = d - 1 - j
                if not z.size or not Y.dim(t + j):
                    continue
                blk = np.einsum("hbg,zby->hzgy", z, Y.a(j, t), optimize=True)
                blk = (_sign(j * dh) * blk.reshape(z.shape[0] * Y.dim(t + j), nd * Y.dim(t))) % p
                blocks[(dh, d)] = (blocks[(dh, d)] + blk) % p if (dh, d) in blocks else blk
        return _block_matrix(layout(i - 1), layout(i), blocks) % p

    return layout, diff


def _complex_homology(layout, diff, degrees, p):
    dims = {}
    for i in degrees:
        n = sum(s for _, _, s in layout(i))
        if n == 0:
            dims[i] = 0
            continue
        r_out = rank(diff(i), p) if sum(s for _, _, s in layout(i - 1)) else 0
        r_in = rank(diff(i + 1), p) if sum(s for _, _, s in layout(i + 1)) else 0
        dims[i] = n - r_out - r_in
    return dims


def tor_window(res: Resolution, Y: DGModule):
    lo = res.lo + Y.lo
    hi = res.G + Y.lo - 1 if not res.complete else INF
    return lo, hi


def tor(X: DGModule, Y: DGModule, a: int | None = None, b: int | None = None, N: int = 12,
        res: Resolution | None = None, cap: int = DEFAULT_CAP) -> GradedResult:
    """``dim Tor_i^A(X, Y)`` for ``i`` in ``[a, b]`` (default: the certified window)."""
    if res is None:
        target = X.lo + N + 1
        if b is not None:
            target = min(target, b - Y.lo + 1)
        res = Resolution(X, cap).extend(target)
    lo, hi = tor_window(res, Y)
    if Y.total == 0 or res.complete and not res.n:
        a_ = lo if a is None else a
        b_ = (lo + N if hi == INF else hi) if b is None else b
        return GradedResult({i: 0 for i in range(a_, int(b_) + 1)}, (a_, b_), res.complete)
    if a is None:
        a = lo
    if b is None:
        b = hi if hi != INF else max(res.gen_degrees) + Y.hi + 1
    if b > hi:
        raise BudgetExceeded(f"Tor window ends at {hi}, degree {b} requested", (lo, hi))
    layout, diff = tensor_complex(res, Y)
    dims = _complex_homology(layout, diff, range(a, int(b) + 1), res.p)
    return GradedResult(dims, (lo, hi), res.complete)


def hom_complex(res: Resolution, Y: DGModule):
    """Layouts and differentials of ``Hom_A(F, Y)``; degree ``k`` is ``⊕_d Hom(V_d, Y_{d+k})``."""
    p = res.p

    def layout(k):
        return _layout([(d, res.num_gens(d) * Y.dim(d + k)) for d in res.gen_degrees])

    def diff(k):
        blocks = {}
        for d, _, _ in layout(k):
            nd = res.num_gens(d)
            if Y.dim(d + k - 1):
                blocks[(d, d)] = np.kron(np.eye(nd, dtype=np.int64), Y.d(d + k))
        for d in res.gen_degrees:
            if not Y.dim(d + k - 1):
                continue
            nd = res.num_gens(d)
            for j, z in res.dz.get(d, {}).items():
                dh = d - 1 - j
                if not z.size or not Y.dim(dh + k):
                    continue
                blk = np.einsum("hbg,zby->gzhy", z, Y.a(j, dh + k), optimize=True)
                blk = blk.reshape(nd * Y.dim(d + k - 1), z.shape[0] * Y.dim(dh + k))
                blk = (-_sign(k) * _sign(j * k) * blk) % p
                key = (d, dh)
                blocks[key] = (blocks[key] + blk) % p if key in blocks else blk
        return _block_matrix(layout(k - 1), layout(k), blocks) % p

    return layout, diff


def rhom_window(res: Resolution, Y: DGModule):
    hi = Y.hi - min(res.gen_degrees) if res.n else -INF
    lo = -INF if res.complete else Y.hi - res.G + 1
    return lo, hi


def homothety_matrix(res: Resolution, i: int) -> np.ndarray:
    """``A_i -> Hom_A(F, X)_i``, ``a -> (e_g -> a eps(e_g))``."""
    X, A, p = res.X, res.A, res.p
    layout, _ = hom_complex(res, X)
    lay = layout(i)
    out = zeros(sum(s for _, _, s in lay), A.dim(i))
    for d, off, sz in lay:
        e = res.eps.get(d)
        if e is None or not X.dim(d):
            continue
        t = np.einsum("yax,xg->gya", X.a(i, d), e, optimize=True).reshape(sz, A.dim(i))
        out[off:off + sz] = t % p
    return out


def rhom_dims(X: DGModule, Y: DGModule, a: int | None = None, b: int | None = None, N: int = 12,
              res: Resolution | None = None, cap: int = DEFAULT_CAP) -> GradedResult:
    """``dim H_k Hom_A(F_X, Y)`` for ``k`` in ``[a, b]``."""
    if res is None:
        need = X.lo + N + 1
        if a is not None:
            need = min(need, Y.hi - a + 1)
        res = Resolution(X, cap).extend(need)
    lo, hi = rhom_window(res, Y)
    if a is None:
        a = int(lo) if lo != -INF else int(Y.lo - (max(res.gen_degrees) if res.n else 0)) - 1
    if b is None:
        b = hi if hi != -INF else a
    if a < lo:
        raise BudgetExceeded(f"RHom window starts at {lo}, degree {a} requested", (lo, hi))
    if not res.n:
        return GradedResult({k: 0 for k in range(a, int(b) + 1)}, (lo, hi), res.complete)
    layout, diff = hom_complex(res, Y)
    dims = _complex_homology(layout, diff, range(a, int(b) + 1), res.p)
    return GradedResult(dims, (lo, hi), res.complete)


@dataclass
class HomothetyData:
    """Per degree: ``dim H(A)``, ``dim H(Hom(F, X))`` and the rank of ``H(chi)``."""

    rows: dict
    window: tuple


def homothety_data(res: Resolution, degrees) -> HomothetyData:
    X, A, p = res.X, res.A, res.p
    layout, diff = hom_complex(res, X)
    rows = {}
    for k in degrees:
        n = sum(s for _, _, s in layout(k))
        if 0 <= k <= A.top:
            hA = homology_at(A.d(k + 1), A.d(k), p)
        else:
            hA = None
        dimA = hA.dim if hA else 0
        if n == 0:
            rows[k] = {"H(A)": dimA, "H(RHom)": 0, "rank": 0}
            continue
        d_in = diff(k + 1) if sum(s for _, _, s in layout(k + 1)) else zeros(n, 0)
        d_out = diff(k) if sum(s for _, _, s in layout(k - 1)) else zeros(0, n)
        hH = homology_at(d_in, d_out, p)
        r = 0
        if dimA and hH.dim:
            img = matmul(homothety_matrix(res, k), hA.reps.T, p)  # (n, dimA)
            cls = hH.classes(img.T, p)  # (dimA, dimH)
            r = rank(cls, p)
        rows[k] = {"H(A)": dimA, "H(RHom)": hH.dim, "rank": r}
    return HomothetyData(rows, rhom_window(res, X))


@dataclass
class PoincareCoeffs:
    coeffs: dict
    window: tuple
    exact: bool

    def as_list(self):
        return [self.coeffs[i] for i in sorted(self.coeffs)]


def poincare(X: DGModule, N: int = 12, res: Resolution | None = None, cap: int = DEFAULT_CAP) -> PoincareCoeffs:
    """Coefficients of ``P^A_X`` from the generator counts of the minimal resolution."""
    if res is None:
        res = resolve(X, N, cap)
    if not res.minimal:
        raise RuntimeError("resolution is not minimal; generator counts are not Betti numbers")
    hi = X.lo + N if res.complete else min(X.lo + N, res.G)
    coeffs = {i: res.num_gens(i) for i in range(X.lo, int(hi) + 1)}
    return PoincareCoeffs(coeffs, (X.lo, hi), res.complete)


@dataclass(frozen=True)
class Finite:
    d: int


@dataclass(frozen=True)
class NotTerminatedBy:
    N: int


def pd_certificate(X: DGModule, N: int = 12, res: Resolution | None = None, cap: int = DEFAULT_CAP):
    if res is None:
        res = resolve(X, N, cap)
    if res.complete:
        return Finite(res.pd if res.n else -1)
    return NotTerminatedBy(int(res.G) - X.lo - 1)


# --------------------------------------------------------------------------
# truncations and the exact-sequence construction


def homology_dims(X: DGModule) -> dict:
    p = X.p
    return {n: homology_at(X.d(n + 1), X.d(n), p).dim for n in X.space.degrees()}


def homology_sup(X: DGModule):
    nz = [n for n, d in homology_dims(X).items() if d]
    return max(nz) if nz else None


def soft_truncation(X: DGModule, s: int) -> tuple[DGModule, DGMorphism]:
    """``τ_{<=s} X``: ``X_i`` below ``s``, ``X_s / d(X_{s+1})`` at ``s``, zero above."""
    p = X.p
    rows = {}
    for n in X.space.degrees():
        if n > s:
            rows[n] = np.eye(X.dim(n), dtype=np.int64)
        elif n == s and X.dim(s + 1):
            rows[n] = image(X.d(s + 1), p)
    return quotient_module(X, rows, name="τ")


def is_quasi_isomorphism(f: DGMorphism) -> bool:
    X, Y = f.source, f.target
    p = X.p
    lo, hi = min(X.lo, Y.lo), max(X.hi, Y.hi)
    for n in range(lo, hi + 1):
        hx = homology_at(X.d(n + 1), X.d(n), p)
        hy = homology_at(Y.d(n + 1), Y.d(n), p)
        if hx.dim != hy.dim:
            return False
        if hx.dim == 0:
            continue
        img = matmul(f.block(n), hx.reps.T, p)
        if rank(hy.classes(img.T, p), p) != hx.dim:
            return False
    return True


@dataclass
class Prop31Sequence:
    X: DGModule
    s: int
    L: DGModule
    Xt: DGModule
    Xp: DGModule
    alpha: DGMorphism
    pi: DGMorphism
    res: Resolution
    checks: dict


def prop31_sequence(X: DGModule, N: int = 12, cap: int = DEFAULT_CAP) -> Prop31Sequence:
    """``0 -> X' -> L -> τ_{<=s} F -> 0`` with ``L = F^(s)`` and ``s = sup H(X)``."""
    p = X.p
    A = X.algebra
    s = homology_sup(X)
    if s is None:
        raise ValueError("X has zero homology")
    res = Resolution(X, cap).extend(s + 2)
    if res.G < s + 1:
        raise BudgetExceeded("resolution window does not reach sup H(X) + 1", res.window())
    L = res.truncation_module(s, name="L")
    big = res.truncation_module(s + 1, name="F")
    Xt, proj = soft_truncation(big, s)
    # L sits inside F^(s+1) as the first blocks of every degree
    blocks = {}
    for n in Xt.space.degrees():
        if not L.dim(n):
            continue
        incl = zeros(big.dim(n), L.dim(n))
        lay_big = {k: (o, sz) for k, o, sz in res.layout(n, s + 1)}
        for key, off, sz in res.layout(n, s):
            o, _ = lay_big[key]
            incl[o:o + sz, off:off + sz] = np.eye(sz, dtype=np.int64)
        blocks[n] = matmul(proj.block(n), incl, p)
    pi = DGMorphism(L, Xt, blocks)
    ker = {n: kernel(pi.block(n), p) if Xt.dim(n) else np.eye(L.dim(n), dtype=np.int64)
           for n in L.space.degrees()}
    Xp, alpha = submodule(L, {n: r for n, r in ker.items() if r.shape[0]}, name="X'")
    checks = _prop31_checks(X, L, Xt, Xp, alpha, pi, res, s)
    return Prop31Sequence(X, s, L, Xt, Xp, alpha, pi, res, checks)


def _max_ideal_times(L: DGModule) -> dict:
    """Row bases of ``m_A L`` per degree."""
    A, p = L.algebra, L.p
    out = {}
    for n in L.space.degrees():
        rows = []
        for i in A.space.degrees():
            idx = A.max_ideal_indices(i)
            if not idx or not L.dim(n - i):
                continue
            t = L.a(i, n - i)[:, idx, :]
            rows.append(t.transpose(1, 2, 0).reshape(-1, L.dim(n)))
        if rows:
            out[n] = echelon(np.concatenate(rows, axis=0), p, L.dim(n))
    return out


def _prop31_checks(X, L, Xt, Xp, alpha, pi, res, s) -> dict:
    p = X.p
    exact = True
    for n in range(min(L.lo, Xt.lo), max(L.hi, Xt.hi) + 1):
        a, b = alpha.block(n), pi.block(n)
        if Xt.dim(n) and rank(b, p) != Xt.dim(n):
            exact = False
        if Xp.dim(n) and rank(a, p) != Xp.dim(n):
            exact = False
        if Xp.dim(n) and Xt.dim(n) and np.any(matmul(b, a, p)):
            exact = False
        if L.dim(n) != Xp.dim(n) + Xt.dim(n):
            exact = False
    mL = _max_ideal_times(L)
    inside = True
    for n in Xp.space.degrees():
        if not Xp.dim(n):
            continue
        img = matmul(alpha.block(n), np.eye(Xp.dim(n), dtype=np.int64), p).T
        if n not in mL or not mL[n].contains(img, p):
            inside = False
    hx = {n: d for n, d in homology_dims(X).items() if d}
    ht = {n: d for n, d in homology_dims(Xt).items() if d}
    return {
        "exact": exact and alpha.is_chain_map() and pi.is_chain_map() and pi.is_linear() and alpha.is_linear(),
        "image_in_mL": inside,
        "finite_semibasis": sum(res.num_gens(d) for d in res.gen_degrees if d <= s),
        "truncation_quasi_iso": hx == ht,
        "annihilator": annihilator_check(Xp) if Xp.total else True,
    }


def window_overlap(w1, w2):
    return max(w1[0], w2[0]), min(w1[1], w2[1])
