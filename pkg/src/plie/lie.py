"""Restricted Lie algebras given by structure constants and a p-map on a basis.

Elements are integer numpy vectors of length ``dim``, reduced mod p. The
p-map of a general element is obtained from the basis table by folding the
additivity axiom left to right, with Jacobson's correction term ``s(x, y)``
computed from the iterated adjoint action of ``βx + y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from plie.fp import FpMatrix, check_prime, fp_inverse, matmul_mod


class DimensionMismatch(ValueError):
    pass


class RestrictedLieAlgebra:
    """A finite-dimensional restricted Lie algebra over F_p.

    ``structure[i, j]`` is the coordinate vector of ``[e_i, e_j]``; it is
    built from the ``i < j`` entries only, so it is alternating by
    construction. ``pmap_table[i]`` is the coordinate vector of ``e_i^[p]``.
    """

    def __init__(self, p: int, names: Sequence[str], upper: Mapping[tuple[int, int], Sequence[int]], pmap_table):
        self.p = check_prime(p)
        self.names = list(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate basis names in {self.names}")
        n = self.dim = len(self.names)
        structure = np.zeros((n, n, n), dtype=np.int64)
        for (i, j), vec in upper.items():
            if not 0 <= i < j < n:
                raise ValueError(f"structure constants must be given for i < j, got ({i}, {j})")
            vec = np.asarray(vec, dtype=np.int64) % self.p
            structure[i, j] = vec
            structure[j, i] = (-vec) % self.p
        self.structure = structure
        table = np.zeros((n, n), dtype=np.int64) if pmap_table is None else np.array(pmap_table, dtype=np.int64)
        if table.shape != (n, n):
            raise ValueError(f"p-map table must be {n}x{n}, got {table.shape}")
        self.pmap_table = table % self.p
        self.structure.flags.writeable = False
        self.pmap_table.flags.writeable = False

    @classmethod
    def abelian(cls, p: int, names: Sequence[str], pmap_table=None) -> "RestrictedLieAlgebra":
        return cls(p, names, {}, pmap_table)

    def upper(self) -> dict[tuple[int, int], np.ndarray]:
        n = self.dim
        return {(i, j): self.structure[i, j] for i in range(n) for j in range(i + 1, n)}

    def with_pmap(self, table) -> "RestrictedLieAlgebra":
        return RestrictedLieAlgebra(self.p, self.names, self.upper(), table)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RestrictedLieAlgebra):
            return NotImplemented
        return (
            self.p == other.p
            and self.dim == other.dim
            and np.array_equal(self.structure, other.structure)
            and np.array_equal(self.pmap_table, other.pmap_table)
        )

    def __repr__(self) -> str:
        return f"RestrictedLieAlgebra(p={self.p}, names={self.names})"

    # elements

    def zero(self) -> np.ndarray:
        return np.zeros(self.dim, dtype=np.int64)

    def basis(self, i: int) -> np.ndarray:
        v = self.zero()
        v[i] = 1
        return v

    def element(self, coeffs: Mapping[str, int] | Sequence[int]) -> np.ndarray:
        if isinstance(coeffs, Mapping):
            v = self.zero()
            for name, c in coeffs.items():
                v[self.names.index(name)] = c
            return v % self.p
        return self._vec(coeffs)

    def _vec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"expected a vector of length {self.dim}, got shape {x.shape}")
        return x % self.p

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.p, size=self.dim).astype(np.int64)

    def format(self, x) -> str:
        x = self._vec(x)
        parts = [n if c == 1 else f"{c}*{n}" for n, c in zip(self.names, x.tolist()) if c]
        return " + ".join(parts) or "0"

    # structure maps

    def bracket(self, x, y) -> np.ndarray:
        x, y = self._vec(x), self._vec(y)
        return np.einsum("i,j,ijk->k", x, y, self.structure) % self.p

    def ad_matrix(self, x) -> FpMatrix:
        """Matrix of ``y -> [x, y]``; column j is ``[x, e_j]``."""
        x = self._vec(x)
        return FpMatrix(np.einsum("i,ijk->kj", x, self.structure), self.p)

    def s_term(self, x, y) -> np.ndarray:
        """Jacobson's correction ``s(x, y)`` in ``(x+y)^[p] = x^[p] + y^[p] + s(x, y)``."""
        x, y = self._vec(x), self._vec(y)
        p = self.p
        poly = [x]  # coefficient of β^k at index k
        for _ in range(p - 1):
            nxt = [self.zero() for _ in range(len(poly) + 1)]
            for k, z in enumerate(poly):
                nxt[k] = (nxt[k] + self.bracket(y, z)) % p
                nxt[k + 1] = (nxt[k + 1] + self.bracket(x, z)) % p
            while len(nxt) > 1 and not nxt[-1].any():
                nxt.pop()
            poly = nxt
        total = self.zero()
        for i in range(1, p):
            if i - 1 < len(poly):
                total = (total + fp_inverse(i, p) * poly[i - 1]) % p
        return total

    def pmap(self, x, order: Sequence[int] | None = None) -> np.ndarray:
        """The p-map on an arbitrary element, folding over basis summands.

        ``order`` permutes the summation order; the result is independent of
        it for a genuinely restricted algebra.
        """
        x = self._vec(x)
        p = self.p
        acc = self.zero()
        result = self.zero()
        for i in order if order is not None else range(self.dim):
            a = int(x[i])
            if not a:
                continue
            term = a * self.basis(i) % p
            result = (result + pow(a, p, p) * self.pmap_table[i] + self.s_term(acc, term)) % p
            acc = (acc + term) % p
        return result


@dataclass
class AxiomReport:
    """Residuals of the restricted Lie algebra axioms; empty failure lists mean the axioms hold."""

    p: int
    dim: int
    samples: int
    seed: int
    jacobi_failures: list[dict] = field(default_factory=list)
    restrictedness_failures: list[dict] = field(default_factory=list)
    additivity_failures: list[dict] = field(default_factory=list)
    semilinearity_failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (
            self.jacobi_failures
            or self.restrictedness_failures
            or self.additivity_failures
            or self.semilinearity_failures
        )

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "dim": self.dim,
            "samples": self.samples,
            "seed": self.seed,
            "passed": self.passed,
            "jacobi_failures": self.jacobi_failures,
            "restrictedness_failures": self.restrictedness_failures,
            "additivity_failures": self.additivity_failures,
            "semilinearity_failures": self.semilinearity_failures,
        }


def jacobi_residual(L: RestrictedLieAlgebra, x, y, z) -> np.ndarray:
    b = L.bracket
    return (b(x, b(y, z)) + b(y, b(z, x)) + b(z, b(x, y))) % L.p


def check_axioms(L: RestrictedLieAlgebra, samples: int = 100, seed: int = 0) -> AxiomReport:
    """Check antisymmetry-derived Jacobi, restrictedness, additivity and semilinearity."""
    report = AxiomReport(p=L.p, dim=L.dim, samples=samples, seed=seed)
    n, p = L.dim, L.p
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                res = jacobi_residual(L, L.basis(i), L.basis(j), L.basis(k))
                if res.any():
                    report.jacobi_failures.append(
                        {"triple": [L.names[i], L.names[j], L.names[k]], "residual": res.tolist()}
                    )
    for i in range(n):
        lhs = L.ad_matrix(L.pmap_table[i])
        rhs = L.ad_matrix(L.basis(i)) ** p
        res = lhs - rhs
        if not res.is_zero():
            report.restrictedness_failures.append({"basis": L.names[i], "residual": res.tolist()})
    rng = np.random.default_rng(seed)
    for t in range(samples):
        x, y = L.random_element(rng), L.random_element(rng)
        res = (L.pmap((x + y) % p) - L.pmap(x) - L.pmap(y) - L.s_term(x, y)) % p
        if res.any():
            report.additivity_failures.append(
                {"sample": t, "x": x.tolist(), "y": y.tolist(), "residual": res.tolist()}
            )
        a = int(rng.integers(0, p))
        x = L.random_element(rng)
        res = (L.pmap(a * x % p) - pow(a, p, p) * L.pmap(x)) % p
        if res.any():
            report.semilinearity_failures.append(
                {"sample": t, "alpha": a, "x": x.tolist(), "residual": res.tolist()}
            )
    return report
