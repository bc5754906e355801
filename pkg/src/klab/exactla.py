"""Exact linear algebra over prime fields.

Vectors are 1-d ``int64`` arrays and bases are stored as the *rows* of a
2-d array.  Every entry is a canonical residue in ``[0, p)``.  Pivoting is
always "first nonzero", so echelon forms and derived bases are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

DEFAULT_CHAR = 32003

# float64 represents integers exactly up to 2**53
_F64_EXACT = 2**53
_I64_SAFE = 2**62


class CompositionNotZero(ValueError):
    """Raised when consecutive differentials do not compose to zero."""


class NoSolution(ValueError):
    """Raised when a linear system has no solution."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Product ``a @ b`` reduced mod ``p``, exact for every ``p < 2**31``."""
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    inner = a.shape[-1] if a.ndim else 1
    bound = (p - 1) ** 2 * inner
    if bound < _F64_EXACT:
        out = np.matmul(a.astype(np.float64), b.astype(np.float64))
        return np.fmod(out, p).astype(np.int64)
    if bound < _I64_SAFE:
        return np.matmul(a, b) % p
    out = np.matmul(a.astype(object), b.astype(object)) % p
    return np.asarray(out, dtype=np.int64)


def contract(tensor: np.ndarray, vec: np.ndarray, axis: int, p: int) -> np.ndarray:
    """Contract ``tensor`` with ``vec`` along ``axis`` (mod p)."""
    t = np.moveaxis(np.asarray(tensor, dtype=np.int64), axis, -1)
    shape = t.shape
    flat = t.reshape(-1, shape[-1])
    return matmul(flat, np.asarray(vec, dtype=np.int64).reshape(-1, 1), p).reshape(shape[:-1])


@dataclass(frozen=True)
class EchelonForm:
    """Reduced row echelon form of a row space."""

    rows: np.ndarray
    pivots: tuple[int, ...]
    ncols: int

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v: np.ndarray, p: int) -> np.ndarray:
        """Remainder of ``v`` (or of every row of ``v``) modulo the row space."""
        v = np.array(v, dtype=np.int64) % p
        if not self.pivots:
            return v
        coeffs = v[..., list(self.pivots)]
        return (v - matmul(coeffs, self.rows, p)) % p

    def contains(self, v: np.ndarray, p: int) -> bool:
        return not np.any(self.reduce(v, p))

    def coordinates(self, v: np.ndarray, p: int) -> np.ndarray:
        """Coordinates of ``v`` against the echelon rows; raises if ``v`` is outside."""
        v = np.asarray(v, dtype=np.int64) % p
        if np.any(self.reduce(v, p)):
            raise NoSolution("vector is not in the row space")
        return v[..., list(self.pivots)].copy()


@njit(cache=True)
def _rref_inplace(a, p):
    nrows, ncols = a.shape
    piv = np.empty(min(nrows, ncols), np.int64)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        k = -1
        for i in range(r, nrows):
            if a[i, c] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(c, ncols):
                t = a[r, j]
                a[r, j] = a[k, j]
                a[k, j] = t
        x = a[r, c]
        e = p - 2
        inv = 1
        while e > 0:
            if e & 1:
                inv = inv * x % p
            x = x * x % p
            e >>= 1
        if inv != 1:
            for j in range(c, ncols):
                a[r, j] = a[r, j] * inv % p
        # only the nonzero columns of the pivot row take part in the update
        nzc = np.empty(ncols - c, np.int64)
        m = 0
        for j in range(c, ncols):
            if a[r, j] != 0:
                nzc[m] = j
                m += 1
        for i in range(nrows):
            if i != r:
                f = a[i, c]
                if f != 0:
                    f = p - f
                    for q in range(m):
                        j = nzc[q]
                        a[i, j] = (a[i, j] + f * a[r, j]) % p
        piv[r] = c
        r += 1
    return r, piv[:r].copy()


def rref(mat: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``mat`` over F_p.

    Returns the nonzero rows of the RREF and the list of pivot columns.
    """
    a = np.array(mat, dtype=np.int64) % p
    if a.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    if a.size == 0:
        return a[:0].copy(), []
    r, piv = _rref_inplace(a, p)
    return a[:r].copy(), [int(c) for c in piv]


def echelon(rows: np.ndarray, p: int, ncols: int | None = None) -> EchelonForm:
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim == 1:
        rows = rows.reshape(1, -1)
    if ncols is None:
        ncols = rows.shape[1]
    if rows.shape[0] == 0:
        return EchelonForm(zeros(0, ncols), (), ncols)
    r, piv = rref(rows, p)
    return EchelonForm(r, tuple(piv), ncols)


def rank(mat: np.ndarray, p: int) -> int:
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0
    if mat.shape[0] > mat.shape[1]:
        mat = mat.T
    return len(rref(mat, p)[1])


def kernel(mat: np.ndarray, p: int) -> np.ndarray:
    """Basis (rows) of the right kernel ``{x : mat @ x = 0}``, in RREF."""
    mat = np.asarray(mat, dtype=np.int64)
    ncols = mat.shape[1]
    if mat.shape[0] == 0:
        return np.eye(ncols, dtype=np.int64)
    r, piv = rref(mat, p)
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = zeros(len(free), ncols)
    for k, fcol in enumerate(free):
        basis[k, fcol] = 1
        for i, pc in enumerate(piv):
            basis[k, pc] = (-r[i, fcol]) % p
    # reversing free order gives an RREF of the kernel rows
    if basis.shape[0]:
        basis, _ = rref(basis, p)
    return basis


def image(mat: np.ndarray, p: int) -> np.ndarray:
    """Echelonized basis (rows) of the column space of ``mat``."""
    mat = np.asarray(mat, dtype=np.int64)
    if mat.shape[1] == 0:
        return zeros(0, mat.shape[0])
    r, _ = rref(mat.T, p)
    return r


def rank_kernel_image(mat: np.ndarray, p: int) -> tuple[int, np.ndarray, np.ndarray]:
    """Rank, kernel basis and image basis of ``mat``; bases are rows."""
    mat = np.asarray(mat, dtype=np.int64) % p
    ker = kernel(mat, p)
    img = image(mat, p)
    return img.shape[0], ker, img


def solve_preimage(mat: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Return ``x`` with ``mat @ x = b``; free variables are set to zero."""
    mat = np.asarray(mat, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    m, n = mat.shape
    aug = np.concatenate([mat, b.reshape(m, -1)], axis=1)
    r, piv = rref(aug, p)
    if piv and piv[-1] >= n:
        raise NoSolution("right-hand side is not in the image")
    x = zeros(n, aug.shape[1] - n)
    for i, pc in enumerate(piv):
        x[pc] = r[i, n:]
    return x.reshape(n) if b.ndim == 1 else x


def inverse(mat: np.ndarray, p: int) -> np.ndarray:
    mat = np.asarray(mat, dtype=np.int64) % p
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    r, piv = rref(np.concatenate([mat, np.eye(n, dtype=np.int64)], axis=1), p)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise NoSolution("matrix is singular")
    return r[:, n:].copy()


def select_independent(rows: np.ndarray, p: int) -> list[int]:
    """Indices of the rows kept by a greedy left-to-right independence scan."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.shape[0] == 0:
        return []
    _, piv = rref(rows.T, p)
    return piv


def complement_basis(sub: EchelonForm) -> np.ndarray:
    """Standard basis vectors at the non-pivot columns of ``sub``."""
    piv = set(sub.pivots)
    free = [c for c in range(sub.ncols) if c not in piv]
    out = zeros(len(free), sub.ncols)
    for k, c in enumerate(free):
        out[k, c] = 1
    return out


def quotient_projection(sub: EchelonForm, p: int) -> np.ndarray:
    """Matrix of ``V -> V/sub`` in the basis of :func:`complement_basis`."""
    piv = list(sub.pivots)
    free = [c for c in range(sub.ncols) if c not in set(piv)]
    proj = zeros(len(free), sub.ncols)
    for k, c in enumerate(free):
        proj[k, c] = 1
    if piv and free:
        proj[:, piv] = (-sub.rows[:, free].T) % p
    return proj


@dataclass(frozen=True)
class Homology:
    """Homology of ``C_{i+1} -> C_i -> C_{i-1}`` at ``C_i``.

    ``reps`` are cycles (rows) whose classes form a basis, and ``projection``
    maps any cycle of ``C_i`` to its coordinates in that basis.
    """

    dim: int
    reps: np.ndarray
    projection: np.ndarray
    boundaries: EchelonForm
    cycles: np.ndarray = field(repr=False)

    def classes(self, cycles: np.ndarray, p: int) -> np.ndarray:
        return matmul(np.asarray(cycles, dtype=np.int64), self.projection.T, p)


def homology_at(d_in: np.ndarray, d_out: np.ndarray, p: int) -> Homology:
    """Homology at the middle term of ``d_out . d_in``.

    ``d_in`` has shape ``(dim C_i, dim C_{i+1})`` and ``d_out`` has shape
    ``(dim C_{i-1}, dim C_i)``.
    """
    d_in = np.asarray(d_in, dtype=np.int64) % p
    d_out = np.asarray(d_out, dtype=np.int64) % p
    n = d_in.shape[0] if d_in.ndim == 2 else d_out.shape[1]
    if d_out.shape[1] != n:
        raise ValueError("differentials have incompatible shapes")
    if d_in.size and d_out.size and np.any(matmul(d_out, d_in, p)):
        raise CompositionNotZero("d_out . d_in != 0")
    cyc = kernel(d_out, p) if d_out.shape[0] else np.eye(n, dtype=np.int64)
    bd = echelon(image(d_in, p) if d_in.shape[1] else zeros(0, n), p, n)
    stacked = np.concatenate([bd.rows, cyc], axis=0)
    keep = select_independent(stacked, p)
    reps = stacked[[k for k in keep if k >= bd.rank]]
    projection = _coordinate_rows(bd.rows, reps, p)
    return Homology(reps.shape[0], reps, projection, bd, cyc)


def _coordinate_rows(sub: np.ndarray, reps: np.ndarray, p: int) -> np.ndarray:
    """Rows ``P`` with ``P @ (sum c_k reps_k + s) = c`` for ``s`` in ``span(sub)``."""
    n = reps.shape[1] if reps.size else sub.shape[1] if sub.size else 0
    h = reps.shape[0]
    if h == 0:
        return zeros(0, n)
    basis = np.concatenate([sub, reps], axis=0)
    ext = complement_basis(echelon(basis, p, n))
    full = np.concatenate([basis, ext], axis=0)
    inv_t = inverse(full.T, p)
    start = sub.shape[0]
    return inv_t[start:start + h].copy()


@dataclass(frozen=True)
class PrimeField:
    """The field F_p; a thin façade over the module-level routines."""

    p: int = DEFAULT_CHAR

    def __post_init__(self) -> None:
        if not (2 <= self.p < 2**31) or not is_prime(self.p):
            raise ValueError(f"characteristic must be a prime below 2**31, got {self.p}")

    def reduce(self, x):
        return np.asarray(x, dtype=np.int64) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def matmul(self, a, b):
        return matmul(a, b, self.p)

    def rref(self, m):
        return rref(m, self.p)

    def rank(self, m) -> int:
        return rank(m, self.p)

    def rank_kernel_image(self, m):
        return rank_kernel_image(m, self.p)

    def solve_preimage(self, m, b):
        return solve_preimage(m, b, self.p)

    def homology_at(self, d_in, d_out) -> Homology:
        return homology_at(d_in, d_out, self.p)


@dataclass(frozen=True)
class GradedSpace:
    """Finite graded vector space with labelled bases, degrees ``lo..hi``."""

    lo: int
    labels: tuple[tuple[str, ...], ...]

    @classmethod
    def from_dims(cls, lo: int, dims, prefix: str = "v") -> "GradedSpace":
        labels = tuple(
            tuple(f"{prefix}{lo + i}_{k}" for k in range(d)) for i, d in enumerate(dims)
        )
        return cls(lo, labels)

    def __post_init__(self) -> None:
        for deg in self.labels:
            if len(set(deg)) != len(deg):
                raise ValueError("basis labels must be unique within a degree")

    @property
    def hi(self) -> int:
        return self.lo + len(self.labels) - 1

    def dim(self, i: int) -> int:
        if i < self.lo or i > self.hi:
            return 0
        return len(self.labels[i - self.lo])

    def dims(self) -> tuple[int, ...]:
        return tuple(len(d) for d in self.labels)

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    @property
    def total(self) -> int:
        return sum(self.dims())

    def label(self, i: int, k: int) -> str:
        return self.labels[i - self.lo][k]

    def support(self) -> tuple[int, int] | None:
        """Lowest and highest degree with a nonzero piece."""
        nz = [i for i in self.degrees() if self.dim(i)]
        return (nz[0], nz[-1]) if nz else None


def euler_characteristic(space) -> int:
    """Alternating sum of dimensions; accepts anything with a ``space`` or ``dims``."""
    sp = getattr(space, "space", space)
    if isinstance(sp, GradedSpace):
        return sum((-1) ** i * sp.dim(i) for i in sp.degrees())
    if isinstance(sp, dict):
        return sum((-1) ** i * d for i, d in sp.items())
    raise TypeError(f"cannot take the Euler characteristic of {type(space).__name__}")


@dataclass(frozen=True)
class GradedMap:
    """Degreewise matrices ``source_i -> target_{i+shift}``."""

    source: GradedSpace
    target: GradedSpace
    shift: int
    blocks: dict[int, np.ndarray]

    def block(self, i: int) -> np.ndarray:
        b = self.blocks.get(i)
        if b is None:
            return zeros(self.target.dim(i + self.shift), self.source.dim(i))
        return b

    def __post_init__(self) -> None:
        for i, b in self.blocks.items():
            if b.shape != (self.target.dim(i + self.shift), self.source.dim(i)):
                raise ValueError(f"block {i} has shape {b.shape}")
