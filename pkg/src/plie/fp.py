"""Prime field arithmetic and dense row reduction over F_p.

Matrices are stored as ``int64`` numpy arrays with every entry reduced into
``[0, p)``. Moduli in this package are tiny (2, 3, 5, 7, ...), so products
of two residues never come close to overflowing.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


class InvalidModulus(ValueError):
    """Raised when a modulus is not a prime number."""


class ZeroInverse(ZeroDivisionError):
    """Raised when inverting zero in F_p."""


class MixedModulus(ValueError):
    """Raised when operands live over different prime fields."""


@lru_cache(maxsize=None)
def check_prime(p: int) -> int:
    """Return ``p`` if it is prime, otherwise raise :class:`InvalidModulus`."""
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool) or p < 2:
        raise InvalidModulus(f"modulus must be a prime integer >= 2, got {p!r}")
    d = 2
    while d * d <= p:
        if p % d == 0:
            raise InvalidModulus(f"modulus {p} is not prime ({d} divides it)")
        d += 1
    return int(p)


def fp_inverse(a: int, p: int) -> int:
    """Inverse of ``a`` modulo the prime ``p`` by the extended Euclidean algorithm."""
    check_prime(p)
    a %= p
    if a == 0:
        raise ZeroInverse(f"0 has no inverse modulo {p}")
    old_r, r = a, p
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    return old_s % p


class FpMatrix:
    """Dense matrix over F_p.

    ``data`` is reduced mod ``p`` on construction and the wrapper never
    mutates it afterwards; operations return new matrices.
    """

    __slots__ = ("p", "data")

    def __init__(self, data, p: int):
        self.p = check_prime(p)
        arr = np.array(data, dtype=np.int64)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {arr.shape}")
        self.data = arr % self.p
        self.data.flags.writeable = False

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "FpMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int) -> "FpMatrix":
        return cls(np.eye(n, dtype=np.int64), p)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def _check(self, other: "FpMatrix") -> None:
        if other.p != self.p:
            raise MixedModulus(f"cannot combine matrices over F_{self.p} and F_{other.p}")

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        self._check(other)
        return FpMatrix(self.data + other.data, self.p)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        self._check(other)
        return FpMatrix(self.data - other.data, self.p)

    def __matmul__(self, other):
        if isinstance(other, FpMatrix):
            self._check(other)
            return FpMatrix(matmul_mod(self.data, other.data, self.p), self.p)
        vec = np.asarray(other, dtype=np.int64)
        return matmul_mod(self.data, vec, self.p)

    def __pow__(self, k: int) -> "FpMatrix":
        if self.rows != self.cols:
            raise ValueError("only square matrices have powers")
        result = np.eye(self.rows, dtype=np.int64)
        base = self.data
        while k:
            if k & 1:
                result = matmul_mod(result, base, self.p)
            base = matmul_mod(base, base, self.p)
            k >>= 1
        return FpMatrix(result, self.p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.p, self.shape, self.data.tobytes()))

    def is_zero(self) -> bool:
        return not self.data.any()

    def tolist(self) -> list[list[int]]:
        return self.data.tolist()

    def __repr__(self) -> str:
        return f"FpMatrix(p={self.p}, {self.data.tolist()})"


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    # Entries are < p, so each product is < p^2; reduce after the dot.
    # Inner dimensions here stay far below 2^63 / p^2.
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p


def _rref_array(a: np.ndarray, p: int, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """In-place reduced row echelon form of ``a``; pivots searched in the first ``ncols`` columns."""
    rows, cols = a.shape
    if ncols is None:
        ncols = cols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        lead = int(a[r, c])
        if lead != 1:
            a[r] = (a[r] * fp_inverse(lead, p)) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rref(m: FpMatrix) -> tuple[FpMatrix, int, list[int]]:
    """Reduced row echelon form, rank, and pivot columns of ``m``."""
    a, pivots = _rref_array(m.data.copy(), m.p)
    return FpMatrix(a, m.p), len(pivots), pivots


def rank(m: FpMatrix) -> int:
    return rref(m)[1]


def nullspace(m: FpMatrix) -> tuple[list[np.ndarray], list[int]]:
    """Null space basis together with the free column of each basis vector.

    Basis vector ``k`` has a 1 in ``free[k]`` and 0 in every other free
    column, so coordinates of any vector in the span are read off directly
    at the free columns.
    """
    p = m.p
    reduced, pivots = _rref_array(m.data.copy(), p)
    cols = m.cols
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-reduced[i, f]) % p
        basis.append(v)
    return basis, free


def kernel_basis(m: FpMatrix) -> list[np.ndarray]:
    """Basis of ``{v : m @ v == 0}`` as a list of integer vectors mod p."""
    return nullspace(m)[0]


def solve(m: FpMatrix, b) -> np.ndarray | None:
    """One solution ``x`` of ``m @ x == b``, or ``None`` if the system is inconsistent."""
    p = m.p
    rhs = np.asarray(b, dtype=np.int64).reshape(-1, 1) % p
    if rhs.shape[0] != m.rows:
        raise ValueError(f"right-hand side has length {rhs.shape[0]}, expected {m.rows}")
    aug = np.hstack([m.data, rhs])
    reduced, pivots = _rref_array(aug, p, ncols=m.cols)
    r = len(pivots)
    if reduced[r:, -1].any():
        return None
    x = np.zeros(m.cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = reduced[i, -1]
    return x
