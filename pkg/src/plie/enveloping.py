"""The restricted enveloping algebra u(L) in restricted-PBW normal form.

A PBW monomial is a tuple of exponents ``(a_1, ..., a_n)`` with
``0 <= a_i < p`` standing for ``e_1^a_1 ... e_n^a_n`` in the basis order of
L. Products are normalised by the rewriting rules

    e_j e_i -> e_i e_j + [e_j, e_i]      (j > i)
    e_i^p   -> e_i^[p]

implemented as left multiplication of a normal monomial by one generator,
memoised per ``(generator, monomial)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import comb
from typing import Iterable, Iterator, Mapping

import numpy as np

from plie.fp import FpMatrix, nullspace, rank
from plie.lie import DimensionMismatch, RestrictedLieAlgebra

Monomial = tuple[int, ...]

DEFAULT_SIZE_LIMIT = 3125


class SizeBound(ValueError):
    """Raised when p^dim exceeds the configured size limit."""


def _add_into(acc: dict, terms: Mapping, scale: int, p: int) -> None:
    for k, c in terms.items():
        v = (acc.get(k, 0) + scale * c) % p
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)


class EnvElement:
    """Element of u(L): a sparse map from PBW monomials to residues."""

    __slots__ = ("env", "terms")

    def __init__(self, env: "RestrictedEnvelope", terms: Mapping[Monomial, int] | None = None):
        self.env = env
        p = env.p
        clean: dict[Monomial, int] = {}
        for m, c in (terms or {}).items():
            c = (clean.get(m, 0) + int(c)) % p
            if c:
                clean[m] = c
            else:
                clean.pop(m, None)
        self.terms = clean

    def _check(self, other: "EnvElement") -> None:
        if other.env is not self.env:
            raise DimensionMismatch("elements belong to different enveloping algebras")

    def __add__(self, other: "EnvElement") -> "EnvElement":
        self._check(other)
        acc = dict(self.terms)
        _add_into(acc, other.terms, 1, self.env.p)
        return EnvElement(self.env, acc)

    def __neg__(self) -> "EnvElement":
        return EnvElement(self.env, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "EnvElement") -> "EnvElement":
        return self + (-other)

    def scale(self, a: int) -> "EnvElement":
        return EnvElement(self.env, {m: a * c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, EnvElement):
            return self.env.mul(self, other)
        return self.scale(int(other))

    def __rmul__(self, a):
        return self.scale(int(a))

    def __pow__(self, k: int) -> "EnvElement":
        result = self.env.one()
        for _ in range(k):
            result = self.env.mul(result, self)
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, EnvElement):
            return NotImplemented
        return self.env is other.env and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[Monomial, int]]:
        return iter(sorted(self.terms.items()))

    def vector(self) -> np.ndarray:
        v = np.zeros(self.env.size, dtype=np.int64)
        for m, c in self.terms.items():
            v[self.env.index[m]] = c
        return v

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def pretty(self) -> str:
        return self.env.format(self)

    def __repr__(self) -> str:
        return f"EnvElement({self.pretty()})"


class EnvSquareElement:
    """Element of u(L) ⊗ u(L) as ``{(left_monomial, right_monomial): coefficient}``."""

    __slots__ = ("env", "terms")

    def __init__(self, env: "RestrictedEnvelope", terms: Mapping[tuple[Monomial, Monomial], int] | None = None):
        self.env = env
        clean: dict = {}
        _add_into(clean, terms or {}, 1, env.p)
        self.terms = clean

    def __add__(self, other: "EnvSquareElement") -> "EnvSquareElement":
        acc = dict(self.terms)
        _add_into(acc, other.terms, 1, self.env.p)
        return EnvSquareElement(self.env, acc)

    def __sub__(self, other: "EnvSquareElement") -> "EnvSquareElement":
        acc = dict(self.terms)
        _add_into(acc, other.terms, -1, self.env.p)
        return EnvSquareElement(self.env, acc)

    def __mul__(self, other: "EnvSquareElement") -> "EnvSquareElement":
        env, p = self.env, self.env.p
        acc: dict = {}
        for (a, b), c in self.terms.items():
            for (x, y), d in other.terms.items():
                left = env.mono_mul(a, x)
                right = env.mono_mul(b, y)
                cd = c * d
                for m1, c1 in left.items():
                    for m2, c2 in right.items():
                        k = (m1, m2)
                        acc[k] = (acc.get(k, 0) + cd * c1 * c2) % p
        return EnvSquareElement(self.env, acc)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EnvSquareElement):
            return NotImplemented
        return self.env is other.env and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"EnvSquareElement({self.terms})"


class RestrictedEnvelope:
    """Restricted enveloping algebra u(L), of dimension p^dim L.

    Multiplication tables are filled lazily and cached on the instance; the
    observable values never change once computed.
    """

    def __init__(self, L: RestrictedLieAlgebra, size_limit: int = DEFAULT_SIZE_LIMIT):
        self.L = L
        self.p = L.p
        self.n = L.dim
        self.size = self.p**self.n
        if self.size > size_limit:
            raise SizeBound(f"dim u(L) = {self.p}^{self.n} = {self.size} exceeds size limit {size_limit}")
        self.unit_mono: Monomial = (0,) * self.n
        self.monomials: list[Monomial] = sorted(product(range(self.p), repeat=self.n), key=lambda m: (sum(m), m[::-1]))
        self.index = {m: i for i, m in enumerate(self.monomials)}
        self._gen_cache: dict[tuple[int, Monomial], dict[Monomial, int]] = {}
        self._mono_cache: dict[tuple[Monomial, Monomial], dict[Monomial, int]] = {}
        self._delta_cache: dict[Monomial, dict] = {}
        self._bracket_rows = [
            [{self._gen_mono(l): int(c) for l, c in enumerate(L.structure[k, j]) if c} for j in range(self.n)]
            for k in range(self.n)
        ]
        self._pmap_rows = [{self._gen_mono(l): int(c) for l, c in enumerate(L.pmap_table[k]) if c} for k in range(self.n)]

    def _gen_mono(self, i: int) -> Monomial:
        m = [0] * self.n
        m[i] = 1
        return tuple(m)

    # elements

    def one(self) -> EnvElement:
        return EnvElement(self, {self.unit_mono: 1})

    def zero(self) -> EnvElement:
        return EnvElement(self)

    def monomial(self, m: Iterable[int], coeff: int = 1) -> EnvElement:
        m = tuple(m)
        if len(m) != self.n or any(not 0 <= a < self.p for a in m):
            raise ValueError(f"{m} is not a restricted PBW exponent vector")
        return EnvElement(self, {m: coeff})

    def generator(self, i: int) -> EnvElement:
        return EnvElement(self, {self._gen_mono(i): 1})

    def image(self, x) -> EnvElement:
        """Image of an element of L under the canonical map L -> u(L)."""
        x = self.L._vec(x)
        return EnvElement(self, {self._gen_mono(i): int(c) for i, c in enumerate(x) if c})

    def from_vector(self, v) -> EnvElement:
        return EnvElement(self, {m: int(c) for m, c in zip(self.monomials, v) if c % self.p})

    def format(self, u: EnvElement) -> str:
        if not u.terms:
            return "0"
        names = self.L.names
        parts = []
        for m, c in sorted(u.terms.items(), key=lambda t: (sum(t[0]), t[0][::-1])):
            label = "*".join(names[i] if a == 1 else f"{names[i]}^{a}" for i, a in enumerate(m) if a) or "1"
            parts.append(label if c == 1 else f"{c}*{label}")
        return " + ".join(parts)

    # rewriting

    def gen_times(self, k: int, mono: Monomial) -> dict[Monomial, int]:
        """Normal form of ``e_k * mono``."""
        key = (k, mono)
        hit = self._gen_cache.get(key)
        if hit is not None:
            return hit
        p = self.p
        j = next((i for i, a in enumerate(mono) if a), self.n)
        out: dict[Monomial, int] = {}
        if k < j:
            m = list(mono)
            m[k] = 1
            out[tuple(m)] = 1
        elif k == j:
            m = list(mono)
            if m[k] + 1 < p:
                m[k] += 1
                out[tuple(m)] = 1
            else:
                m[k] = 0
                rest = tuple(m)
                for g, c in self._pmap_rows[k].items():
                    _add_into(out, self.gen_times(g.index(1), rest), c, p)
        else:
            # e_k e_j^a R = e_j (e_k e_j^(a-1) R) + [e_k, e_j] e_j^(a-1) R
            m = list(mono)
            m[j] -= 1
            tail = tuple(m)
            for mm, c in self.gen_times(k, tail).items():
                _add_into(out, self.gen_times(j, mm), c, p)
            for g, c in self._bracket_rows[k][j].items():
                _add_into(out, self.gen_times(g.index(1), tail), c, p)
        self._gen_cache[key] = out
        return out

    def mono_mul(self, a: Monomial, b: Monomial) -> dict[Monomial, int]:
        key = (a, b)
        hit = self._mono_cache.get(key)
        if hit is not None:
            return hit
        current: dict[Monomial, int] = {b: 1}
        for letter in reversed(self.word_of(a)):
            nxt: dict[Monomial, int] = {}
            for m, c in current.items():
                _add_into(nxt, self.gen_times(letter, m), c, self.p)
            current = nxt
        self._mono_cache[key] = current
        return current

    def word_of(self, m: Monomial) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(m) for _ in range(a))

    def straighten(self, word: Iterable[int]) -> EnvElement:
        """PBW normal form of a word in the basis letters of L."""
        current: dict[Monomial, int] = {self.unit_mono: 1}
        for letter in reversed(tuple(word)):
            if not 0 <= letter < self.n:
                raise ValueError(f"letter {letter} out of range for dim {self.n}")
            nxt: dict[Monomial, int] = {}
            for m, c in current.items():
                _add_into(nxt, self.gen_times(letter, m), c, self.p)
            current = nxt
        return EnvElement(self, current)

    def mul(self, u: EnvElement, v: EnvElement) -> EnvElement:
        u._check(v)
        acc: dict[Monomial, int] = {}
        for a, c in u.terms.items():
            for b, d in v.terms.items():
                _add_into(acc, self.mono_mul(a, b), c * d, self.p)
        return EnvElement(self, acc)

    def commutator(self, u: EnvElement, v: EnvElement) -> EnvElement:
        return self.mul(u, v) - self.mul(v, u)

    # coalgebra

    def _delta_gen(self, i: int) -> EnvSquareElement:
        g = self._gen_mono(i)
        return EnvSquareElement(self, {(g, self.unit_mono): 1, (self.unit_mono, g): 1})

    def mono_coproduct(self, m: Monomial) -> dict:
        hit = self._delta_cache.get(m)
        if hit is not None:
            return hit
        result = EnvSquareElement(self, {(self.unit_mono, self.unit_mono): 1})
        for letter in self.word_of(m):
            result = result * self._delta_gen(letter)
        self._delta_cache[m] = result.terms
        return result.terms

    def coproduct(self, u: EnvElement) -> EnvSquareElement:
        acc: dict = {}
        for m, c in u.terms.items():
            _add_into(acc, self.mono_coproduct(m), c, self.p)
        return EnvSquareElement(self, acc)

    def counit(self, u: EnvElement) -> int:
        return u.terms.get(self.unit_mono, 0)

    def primitive_defect(self, u: EnvElement) -> EnvSquareElement:
        one = self.unit_mono
        lin: dict = {}
        for m, c in u.terms.items():
            _add_into(lin, {(m, one): c}, 1, self.p)
            _add_into(lin, {(one, m): c}, 1, self.p)
        return self.coproduct(u) - EnvSquareElement(self, lin)

    def is_primitive(self, u: EnvElement) -> bool:
        return not self.primitive_defect(u)

    def multiplication_table(self) -> list[list[dict[Monomial, int]]]:
        return [[self.mono_mul(a, b) for b in self.monomials] for a in self.monomials]


def env_mul(u: EnvElement, v: EnvElement) -> EnvElement:
    return u.env.mul(u, v)


def env_coproduct(u: EnvElement) -> EnvSquareElement:
    return u.env.coproduct(u)


def straighten(env: RestrictedEnvelope, word: Iterable[int]) -> EnvElement:
    return env.straighten(word)


@dataclass
class RestrictedPrimitiveSpace:
    """Primitive elements of u(L) with commutator bracket and p-th power map.

    ``brackets[i, j]`` and ``pmap[i]`` are coordinate vectors in ``basis``.
    """

    env: RestrictedEnvelope
    basis: list[EnvElement]
    free: list[int]
    brackets: np.ndarray
    pmap: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinates(self, u: EnvElement) -> np.ndarray | None:
        """Coordinates of ``u`` in the primitive basis, or ``None`` if ``u`` is not primitive."""
        v = u.vector()
        coords = v[self.free] % self.env.p
        rebuilt = np.zeros(self.env.size, dtype=np.int64)
        for c, b in zip(coords, self.basis):
            rebuilt += c * b.vector()
        if ((rebuilt - v) % self.env.p).any():
            return None
        return coords

    def to_lie(self) -> RestrictedLieAlgebra:
        n = self.dim
        upper = {(i, j): self.brackets[i, j] for i in range(n) for j in range(i + 1, n)}
        return RestrictedLieAlgebra(self.env.p, [f"P{i}" for i in range(n)], upper, self.pmap)


def primitivity_system(env: RestrictedEnvelope) -> FpMatrix:
    """Matrix of ``z -> Δ(z) - z⊗1 - 1⊗z`` on the PBW basis (rows: occurring tensor pairs)."""
    p = env.p
    row_index: dict = {}
    entries: list[tuple[int, int, int]] = []
    one = env.unit_mono
    for j, m in enumerate(env.monomials):
        col = dict(env.mono_coproduct(m))
        _add_into(col, {(m, one): 1}, -1, p)
        _add_into(col, {(one, m): 1}, -1, p)
        for k, c in col.items():
            entries.append((row_index.setdefault(k, len(row_index)), j, c))
    mat = np.zeros((len(row_index), env.size), dtype=np.int64)
    for i, j, c in entries:
        mat[i, j] = c
    return FpMatrix(mat, p)


def restricted_primitives(L: RestrictedLieAlgebra | RestrictedEnvelope, size_limit: int = DEFAULT_SIZE_LIMIT) -> RestrictedPrimitiveSpace:
    """Solve for all primitives of u(L) and equip them with bracket and p-map."""
    env = L if isinstance(L, RestrictedEnvelope) else RestrictedEnvelope(L, size_limit)
    p = env.p
    vecs, free = nullspace(primitivity_system(env))
    basis = [env.from_vector(v) for v in vecs]
    space = RestrictedPrimitiveSpace(env, basis, free, np.zeros((0, 0, 0), dtype=np.int64), np.zeros((0, 0), dtype=np.int64))
    k = len(basis)
    brackets = np.zeros((k, k, k), dtype=np.int64)
    pmap = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            c = space.coordinates(env.commutator(basis[i], basis[j]))
            if c is None:
                raise ArithmeticError("commutator of primitives is not primitive")
            brackets[i, j] = c
        c = space.coordinates(basis[i] ** p)
        if c is None:
            raise ArithmeticError("p-th power of a primitive is not primitive")
        pmap[i] = c
    space.brackets = brackets
    space.pmap = pmap
    return space


@dataclass
class EtaReport:
    """Instance check that L -> P(u(L)) is an isomorphism of restricted Lie algebras."""

    dim_L: int
    dim_primitives: int
    injective: bool
    bracket_mismatches: list[dict] = field(default_factory=list)
    pmap_mismatches: list[dict] = field(default_factory=list)
    non_primitive_images: list[str] = field(default_factory=list)

    @property
    def dimension_match(self) -> bool:
        return self.dim_L == self.dim_primitives

    @property
    def passed(self) -> bool:
        return (
            self.injective
            and self.dimension_match
            and not self.bracket_mismatches
            and not self.pmap_mismatches
            and not self.non_primitive_images
        )

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "dim_L": self.dim_L,
            "dim_primitives": self.dim_primitives,
            "injective": self.injective,
            "dimension_match": self.dimension_match,
            "bracket_mismatches": self.bracket_mismatches,
            "pmap_mismatches": self.pmap_mismatches,
            "non_primitive_images": self.non_primitive_images,
        }


def unit_eta_check(
    L: RestrictedLieAlgebra,
    space: RestrictedPrimitiveSpace | None = None,
    size_limit: int = DEFAULT_SIZE_LIMIT,
) -> EtaReport:
    if space is None:
        space = restricted_primitives(L, size_limit)
    env = space.env
    n, p = L.dim, L.p
    images = [env.generator(i) for i in range(n)]
    non_primitive = [L.names[i] for i, u in enumerate(images) if space.coordinates(u) is None]
    coords = [space.coordinates(u) for u in images]
    if any(c is None for c in coords):
        injective = False
    else:
        injective = rank(FpMatrix(np.array(coords).reshape(n, space.dim), p)) == n
    report = EtaReport(dim_L=n, dim_primitives=space.dim, injective=injective, non_primitive_images=non_primitive)
    for i in range(n):
        for j in range(i + 1, n):
            lhs = env.image(L.bracket(L.basis(i), L.basis(j)))
            rhs = env.commutator(images[i], images[j])
            if lhs != rhs:
                report.bracket_mismatches.append(
                    {"pair": [L.names[i], L.names[j]], "expected": lhs.pretty(), "got": rhs.pretty()}
                )
        lhs = env.image(L.pmap_table[i])
        rhs = images[i] ** p
        if lhs != rhs:
            report.pmap_mismatches.append({"basis": L.names[i], "expected": lhs.pretty(), "got": rhs.pretty()})
    return report


def frobenius_residual(env: RestrictedEnvelope, x) -> EnvElement:
    """``image(x^[p]) - image(x)^p`` in u(L); zero when the p-map formula is right."""
    L = env.L
    return env.image(L.pmap(x)) - env.image(x) ** env.p


def binomial_coproduct(env: RestrictedEnvelope, m: Monomial) -> dict:
    """Closed form of Δ on a PBW monomial: Σ_k Π C(a_i, k_i) e^k ⊗ e^(a-k)."""
    p = env.p
    out: dict = {}
    for k in product(*(range(a + 1) for a in m)):
        c = 1
        for a, ki in zip(m, k):
            c *= comb(a, ki)
        c %= p
        if c:
            out[(tuple(k), tuple(a - ki for a, ki in zip(m, k)))] = c
    return out
