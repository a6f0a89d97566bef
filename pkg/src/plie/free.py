"""Free restricted Lie algebras as the primitive elements of the tensor algebra.

Layer ``n`` is the space of primitives of pure degree ``n`` in T(V). The
bracket is the commutator ``xy - yx`` and the p-map is the p-th tensor
power. ``witt_oracle_dimension`` counts the same layers by a closed
formula and is only used as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from plie.tensor import TensorElement, Word, primitive_layer


@dataclass(frozen=True)
class FreeRestrictedLayer:
    """Degree-``degree`` primitives of T(V) on ``rank`` generators, truncated at ``max_degree``."""

    p: int
    rank: int
    degree: int
    max_degree: int
    vectors: tuple[np.ndarray, ...]
    free: tuple[int, ...]
    words: tuple[Word, ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def basis(self) -> list[TensorElement]:
        return [TensorElement.from_vector(self.p, self.rank, self.max_degree, list(self.words), v) for v in self.vectors]

    def matrix(self) -> np.ndarray:
        """Word-coordinate matrix whose columns are the basis vectors."""
        if not self.vectors:
            return np.zeros((len(self.words), 0), dtype=np.int64)
        return np.stack(self.vectors, axis=1)

    def coordinates(self, t: TensorElement) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates of the degree-``degree`` part of ``t`` and the residual left outside the layer."""
        part = t.homogeneous_part(self.degree)
        v = np.zeros(len(self.words), dtype=np.int64)
        if part.terms:
            index = {w: i for i, w in enumerate(self.words)}
            for w, c in part.terms.items():
                v[index[w]] = c
        coords = v[list(self.free)] % self.p if self.free else np.zeros(0, dtype=np.int64)
        residual = (v - self.matrix() @ coords) % self.p
        return coords, residual

    def element(self, coords) -> TensorElement:
        v = (self.matrix() @ np.asarray(coords, dtype=np.int64)) % self.p
        return TensorElement.from_vector(self.p, self.rank, self.max_degree, list(self.words), v)


def free_restricted_layer(p: int, r: int, n: int, max_degree: int | None = None) -> FreeRestrictedLayer:
    vecs, free, words = primitive_layer(p, r, n)
    return FreeRestrictedLayer(
        p=p,
        rank=r,
        degree=n,
        max_degree=n if max_degree is None else max_degree,
        vectors=tuple(vecs),
        free=tuple(free),
        words=tuple(words),
    )


def free_restricted_basis(p: int, r: int, max_degree: int) -> list[FreeRestrictedLayer]:
    """Layers 1..max_degree of the free restricted Lie algebra on ``r`` generators."""
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    return [free_restricted_layer(p, r, n, max_degree) for n in range(1, max_degree + 1)]


def mobius(n: int) -> int:
    result = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    if n > 1:
        result = -result
    return result


def witt_dimension(d: int, r: int) -> int:
    """Dimension of the degree-``d`` part of the free Lie algebra on ``r`` generators."""
    total = sum(mobius(e) * r ** (d // e) for e in range(1, d + 1) if d % e == 0)
    return total // d


def witt_oracle_dimension(p: int, r: int, n: int) -> int:
    """Σ_{n = d p^k} W(d, r): the free restricted layer dimension by counting."""
    if n < 1:
        raise ValueError("degree must be at least 1")
    total = 0
    q = 1
    while n % q == 0:
        total += witt_dimension(n // q, r)
        q *= p
    return total


@dataclass
class ClosureReport:
    p: int
    rank: int
    max_degree: int
    brackets: list[dict] = field(default_factory=list)
    powers: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(b["in_span"] for b in self.brackets) and all(q["in_span"] for q in self.powers)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "rank": self.rank,
            "max_degree": self.max_degree,
            "passed": self.passed,
            "brackets": self.brackets,
            "powers": self.powers,
        }


def closure_check(layers: list[FreeRestrictedLayer], max_degree: int | None = None) -> ClosureReport:
    """Check that commutators and p-th powers of layer basis elements stay in the right layer."""
    if max_degree is None:
        max_degree = max(layer.degree for layer in layers)
    first = layers[0]
    p, r = first.p, first.rank
    by_degree = {layer.degree: layer for layer in layers}
    bases = {d: layer.basis for d, layer in by_degree.items()}
    report = ClosureReport(p=p, rank=r, max_degree=max_degree)
    for n in sorted(by_degree):
        for m in sorted(by_degree):
            if m < n or n + m > max_degree or n + m not in by_degree:
                continue
            target = by_degree[n + m]
            for i, z in enumerate(bases[n]):
                for j, w in enumerate(bases[m]):
                    if n == m and j < i:
                        continue
                    comm = z * w - w * z
                    coords, residual = target.coordinates(comm)
                    report.brackets.append(
                        {
                            "degrees": [n, m],
                            "indices": [i, j],
                            "coordinates": coords.tolist(),
                            "in_span": not residual.any(),
                        }
                    )
        if n * p <= max_degree and n * p in by_degree:
            target = by_degree[n * p]
            for i, z in enumerate(bases[n]):
                coords, residual = target.coordinates(z**p)
                report.powers.append(
                    {"degree": n, "index": i, "coordinates": coords.tolist(), "in_span": not residual.any()}
                )
    return report
