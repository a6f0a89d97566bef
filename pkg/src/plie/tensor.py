"""Degree-truncated tensor algebra T(V) with its primitive-generator bialgebra structure.

A word is a tuple of generator indices; the empty tuple is the unit. Every
element carries its truncation bound and products of total degree above it
are dropped.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Mapping

import numpy as np

from plie.fp import FpMatrix, check_prime, nullspace

Word = tuple[int, ...]


class MixedContext(ValueError):
    """Raised when combining tensor elements with different (p, rank, max_degree)."""


class DegreeOutOfRange(ValueError):
    pass


def word_key(w: Word) -> tuple[int, Word]:
    """Canonical word order: by degree, then lexicographically."""
    return (len(w), w)


def words_of_degree(r: int, n: int) -> list[Word]:
    return list(product(range(r), repeat=n))


def words_up_to(r: int, n: int) -> list[Word]:
    out: list[Word] = []
    for d in range(n + 1):
        out.extend(words_of_degree(r, d))
    return out


class TensorElement:
    """Element of T(V) truncated at ``max_degree``, stored as ``{word: coefficient}``."""

    __slots__ = ("p", "rank", "max_degree", "terms")

    def __init__(self, p: int, rank: int, max_degree: int, terms: Mapping[Word, int] | None = None):
        self.p = check_prime(p)
        self.rank = rank
        self.max_degree = max_degree
        clean: dict[Word, int] = {}
        for w, c in (terms or {}).items():
            w = tuple(int(a) for a in w)
            if len(w) > max_degree:
                continue
            if any(a < 0 or a >= rank for a in w):
                raise ValueError(f"letter out of range in word {w} (rank {rank})")
            c = (clean.get(w, 0) + int(c)) % self.p
            if c:
                clean[w] = c
            else:
                clean.pop(w, None)
        self.terms = clean

    # construction helpers

    def _new(self, terms: Mapping[Word, int]) -> "TensorElement":
        return TensorElement(self.p, self.rank, self.max_degree, terms)

    @classmethod
    def word(cls, p: int, rank: int, max_degree: int, w: Iterable[int], coeff: int = 1) -> "TensorElement":
        return cls(p, rank, max_degree, {tuple(w): coeff})

    @classmethod
    def one(cls, p: int, rank: int, max_degree: int) -> "TensorElement":
        return cls(p, rank, max_degree, {(): 1})

    @classmethod
    def generator(cls, p: int, rank: int, max_degree: int, i: int) -> "TensorElement":
        return cls(p, rank, max_degree, {(i,): 1})

    @classmethod
    def from_vector(cls, p: int, rank: int, max_degree: int, words: list[Word], vec) -> "TensorElement":
        return cls(p, rank, max_degree, {w: int(c) for w, c in zip(words, vec) if c % p})

    def context(self) -> tuple[int, int, int]:
        return (self.p, self.rank, self.max_degree)

    def _check(self, other: "TensorElement") -> None:
        if self.context() != other.context():
            raise MixedContext(f"context mismatch: {self.context()} vs {other.context()}")

    # vector space structure

    def __add__(self, other: "TensorElement") -> "TensorElement":
        self._check(other)
        terms = dict(self.terms)
        for w, c in other.terms.items():
            terms[w] = terms.get(w, 0) + c
        return self._new(terms)

    def __neg__(self) -> "TensorElement":
        return self._new({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (-other)

    def scale(self, a: int) -> "TensorElement":
        return self._new({w: a * c for w, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, TensorElement):
            return concat_mul(self, other)
        return self.scale(int(other))

    def __rmul__(self, a):
        return self.scale(int(a))

    def __pow__(self, k: int) -> "TensorElement":
        result = TensorElement.one(*self.context())
        for _ in range(k):
            result = concat_mul(result, self)
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.context() == other.context() and self.terms == other.terms

    def __hash__(self):
        return hash((self.context(), frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[Word, int]]:
        return iter(sorted(self.terms.items(), key=lambda t: word_key(t[0])))

    def degrees(self) -> set[int]:
        return {len(w) for w in self.terms}

    def homogeneous_part(self, d: int) -> "TensorElement":
        return self._new({w: c for w, c in self.terms.items() if len(w) == d})

    def vector(self, words: list[Word]) -> np.ndarray:
        index = {w: i for i, w in enumerate(words)}
        v = np.zeros(len(words), dtype=np.int64)
        for w, c in self.terms.items():
            v[index[w]] = c
        return v

    def pretty(self, names: list[str] | None = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in self:
            if names is None:
                label = "".join(chr(ord("x") + a) if self.rank <= 3 else f"g{a}" for a in w)
            else:
                label = "*".join(names[a] for a in w)
            label = label or "1"
            parts.append(label if c == 1 else f"{c}*{label}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"TensorElement(p={self.p}, {self.pretty()})"


class TensorSquareElement:
    """Element of T(V) (x) T(V) stored as ``{(left_word, right_word): coefficient}``."""

    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms: Mapping[tuple[Word, Word], int] | None = None):
        self.p = p
        clean: dict[tuple[Word, Word], int] = {}
        for k, c in (terms or {}).items():
            c = (clean.get(k, 0) + int(c)) % p
            if c:
                clean[k] = c
            else:
                clean.pop(k, None)
        self.terms = clean

    def __add__(self, other: "TensorSquareElement") -> "TensorSquareElement":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return TensorSquareElement(self.p, terms)

    def __sub__(self, other: "TensorSquareElement") -> "TensorSquareElement":
        return self + TensorSquareElement(self.p, {k: -c for k, c in other.terms.items()})

    def __mul__(self, other: "TensorSquareElement") -> "TensorSquareElement":
        terms: dict[tuple[Word, Word], int] = {}
        for (a, b), c in self.terms.items():
            for (x, y), d in other.terms.items():
                k = (a + x, b + y)
                terms[k] = terms.get(k, 0) + c * d
        return TensorSquareElement(self.p, terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorSquareElement):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"TensorSquareElement(p={self.p}, {self.terms})"


def concat_mul(a: TensorElement, b: TensorElement) -> TensorElement:
    """Product in T(V): bilinear word concatenation, truncated at ``max_degree``."""
    a._check(b)
    n = a.max_degree
    terms: dict[Word, int] = {}
    for u, c in a.terms.items():
        room = n - len(u)
        for v, d in b.terms.items():
            if len(v) <= room:
                w = u + v
                terms[w] = terms.get(w, 0) + c * d
    return a._new(terms)


@lru_cache(maxsize=4096)
def word_coproduct(w: Word) -> tuple[tuple[Word, Word], ...]:
    """All (subword on S, subword on complement) splits of ``w`` over position subsets S."""
    k = len(w)
    out = []
    for mask in range(1 << k):
        left = tuple(w[i] for i in range(k) if mask >> i & 1)
        right = tuple(w[i] for i in range(k) if not mask >> i & 1)
        out.append((left, right))
    return tuple(out)


def coproduct(a: TensorElement) -> TensorSquareElement:
    """Coproduct making every generator primitive, extended multiplicatively."""
    terms: dict[tuple[Word, Word], int] = {}
    for w, c in a.terms.items():
        for split in word_coproduct(w):
            terms[split] = terms.get(split, 0) + c
    return TensorSquareElement(a.p, terms)


def counit(a: TensorElement) -> int:
    return a.terms.get((), 0)


def primitive_defect(a: TensorElement) -> TensorSquareElement:
    """``Δ(a) - a⊗1 - 1⊗a``; zero exactly when ``a`` is primitive."""
    lin = {(w, ()): c for w, c in a.terms.items()}
    for w, c in a.terms.items():
        lin[((), w)] = lin.get(((), w), 0) + c
    return coproduct(a) - TensorSquareElement(a.p, lin)


def is_primitive(a: TensorElement) -> bool:
    return not primitive_defect(a)


def primitivity_matrix(p: int, r: int, n: int) -> tuple[FpMatrix, list[Word]]:
    """Matrix of the mixed-bidegree part of Δ on degree-n words, with its column words."""
    cols = words_of_degree(r, n)
    row_index: dict[tuple[Word, Word], int] = {}
    entries: list[tuple[int, int]] = []
    for j, w in enumerate(cols):
        for left, right in word_coproduct(w)[1:-1]:
            i = row_index.setdefault((left, right), len(row_index))
            entries.append((i, j))
    mat = np.zeros((len(row_index), len(cols)), dtype=np.int64)
    for i, j in entries:
        mat[i, j] += 1
    return FpMatrix(mat, p), cols


@lru_cache(maxsize=None)
def _primitive_layer(p: int, r: int, n: int) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
    mat, _ = primitivity_matrix(p, r, n)
    basis, free = nullspace(mat)
    return tuple(tuple(int(x) for x in v) for v in basis), tuple(free)


def primitive_layer(p: int, r: int, n: int) -> tuple[list[np.ndarray], list[int], list[Word]]:
    """Primitive basis vectors of degree ``n`` in word coordinates, their free columns, and the words."""
    check_prime(p)
    if n < 1:
        raise DegreeOutOfRange(f"primitive layers start at degree 1, got {n}")
    vecs, free = _primitive_layer(p, r, n)
    return [np.array(v, dtype=np.int64) for v in vecs], list(free), words_of_degree(r, n)


def primitive_basis(p: int, r: int, n: int, max_degree: int | None = None) -> list[TensorElement]:
    """Basis of the primitive elements of pure degree ``n`` in T(V), dim V = r."""
    if max_degree is None:
        max_degree = n
    if not 1 <= n <= max_degree:
        raise DegreeOutOfRange(f"degree {n} outside [1, {max_degree}]")
    vecs, _, words = primitive_layer(p, r, n)
    return [TensorElement.from_vector(p, r, max_degree, words, v) for v in vecs]
