"""Eilenberg-Moore structures on primitive spaces and the functor back to restricted Lie algebras.

An :class:`EMObject` is a vector space ``V0`` with basis ``names`` and a
structure map ``mu0`` from the primitives of T(V0) to ``V0``, stored as one
matrix per degree acting on coordinates in the free restricted layers of
:mod:`plie.free`. Everything is truncated at ``max_degree`` and compared
exactly over F_p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from plie.enveloping import DEFAULT_SIZE_LIMIT, RestrictedEnvelope, restricted_primitives, unit_eta_check
from plie.fp import FpMatrix, rank
from plie.free import FreeRestrictedLayer, free_restricted_layer
from plie.lie import RestrictedLieAlgebra, check_axioms
from plie.tensor import TensorElement, Word, words_up_to


class EtaFailure(ArithmeticError):
    """L -> P(u(L)) failed to be an isomorphism for the given algebra."""


class NotRestricted(EtaFailure):
    """The input violates the restricted Lie algebra axioms, so u(L) is not defined by its normal forms."""


class TruncationTooSmall(ValueError):
    pass


class NotPrimitive(ArithmeticError):
    """A tensor handed to ``mu0`` does not lie in the primitive layers."""


def default_max_degree(p: int) -> int:
    return max(4, p + 1)


@dataclass
class EMObject:
    p: int
    names: list[str]
    max_degree: int
    layers: list[FreeRestrictedLayer]
    mu0: dict[int, np.ndarray]

    @property
    def dim(self) -> int:
        return len(self.names)

    def layer(self, d: int) -> FreeRestrictedLayer:
        return self.layers[d - 1]

    def tensor(self, x) -> TensorElement:
        """A vector of V0 as a degree-one tensor."""
        return TensorElement(self.p, self.dim, self.max_degree, {(i,): int(c) for i, c in enumerate(x) if c})

    def apply(self, t: TensorElement) -> np.ndarray:
        """Evaluate ``mu0`` on a primitive tensor (any mix of degrees 1..max_degree)."""
        out = np.zeros(self.dim, dtype=np.int64)
        for d in sorted(t.degrees()):
            if d == 0 or d > self.max_degree:
                raise NotPrimitive(f"component of degree {d} is outside the primitive layers")
            coords, residual = self.layer(d).coordinates(t)
            if residual.any():
                raise NotPrimitive(f"degree-{d} component is not primitive")
            out = (out + self.mu0[d] @ coords) % self.p
        return out

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "basis": self.names,
            "max_degree": self.max_degree,
            "layer_dims": [layer.dim for layer in self.layers],
            "mu0": {str(d): m.tolist() for d, m in sorted(self.mu0.items())},
        }


@dataclass
class M2Object:
    """An EM object known to carry the (unique) second structure.

    The second structure map is forced and never stored; ``witness`` records
    why it exists.
    """

    underlying: EMObject
    witness: str = ""

    @property
    def max_degree(self) -> int:
        return self.underlying.max_degree


def _layers(p: int, r: int, max_degree: int) -> list[FreeRestrictedLayer]:
    return [free_restricted_layer(p, r, d, max_degree) for d in range(1, max_degree + 1)]


def tensor_image(env: RestrictedEnvelope, t: TensorElement):
    """Image of a tensor under the algebra map T(V0) -> u(L) sending generators to generators."""
    acc = env.zero()
    for w, c in t.terms.items():
        acc = acc + env.straighten(w).scale(c)
    return acc


def mu0_from_restricted(
    L: RestrictedLieAlgebra,
    max_degree: int | None = None,
    size_limit: int = DEFAULT_SIZE_LIMIT,
    env: RestrictedEnvelope | None = None,
) -> EMObject:
    """The structure map on P T(L) obtained by multiplying out in u(L) and pulling back along L ≅ P(u(L))."""
    if max_degree is None:
        max_degree = default_max_degree(L.p)
    axioms = check_axioms(L, samples=10)
    if not axioms.passed:
        raise NotRestricted(f"not a restricted Lie algebra: {axioms.to_dict()}")
    if env is None:
        env = RestrictedEnvelope(L, size_limit)
    eta = unit_eta_check(L, restricted_primitives(env))
    if not eta.passed:
        raise EtaFailure(f"L -> P(u(L)) is not an isomorphism: {eta.to_dict()}")
    p, n = L.p, L.dim
    gens = [env._gen_mono(i) for i in range(n)]
    layers = _layers(p, n, max_degree)
    mu0: dict[int, np.ndarray] = {}
    for layer in layers:
        cols = []
        for z in layer.basis:
            image = tensor_image(env, z)
            extra = [m for m in image.terms if m not in gens]
            if extra:
                raise EtaFailure(f"image of a degree-{layer.degree} primitive leaves L: {image.pretty()}")
            cols.append([image.terms.get(g, 0) for g in gens])
        mu0[layer.degree] = np.array(cols, dtype=np.int64).T.reshape(n, layer.dim) % p
    return EMObject(p=p, names=list(L.names), max_degree=max_degree, layers=layers, mu0=mu0)


def p2u(L: RestrictedLieAlgebra, max_degree: int | None = None, size_limit: int = DEFAULT_SIZE_LIMIT) -> M2Object:
    return M2Object(mu0_from_restricted(L, max_degree, size_limit), witness="primitives of u(L)")


def lambda_functor(V2: M2Object | EMObject) -> RestrictedLieAlgebra:
    """Bracket ``mu0(xy - yx)`` and p-map ``mu0(x^p)`` on the basis of V0."""
    A = V2.underlying if isinstance(V2, M2Object) else V2
    p, n = A.p, A.dim
    if A.max_degree < p:
        raise TruncationTooSmall(f"need max_degree >= p = {p} to read off the p-map, got {A.max_degree}")
    gens = [A.tensor(np.eye(n, dtype=np.int64)[i]) for i in range(n)]
    upper = {}
    for i in range(n):
        for j in range(i + 1, n):
            upper[(i, j)] = A.apply(gens[i] * gens[j] - gens[j] * gens[i])
    table = np.array([A.apply(g**p) for g in gens], dtype=np.int64).reshape(n, n)
    return RestrictedLieAlgebra(p, A.names, upper, table)


# Eilenberg-Moore laws


@dataclass(frozen=True)
class Pattern:
    """Shape of a nested primitive: ``("leaf", d)``, ``("br", a, b)`` or ``("pow", a)``."""

    node: tuple

    def degree(self, p: int) -> int:
        return _tree_degree(self.node, p)

    def leaves(self) -> list[int]:
        return _tree_leaves(self.node)

    def label(self) -> str:
        return _tree_label(self.node)


def _tree_degree(node, p: int) -> int:
    kind = node[0]
    if kind == "leaf":
        return node[1]
    if kind == "br":
        return _tree_degree(node[1], p) + _tree_degree(node[2], p)
    return p * _tree_degree(node[1], p)


def _tree_leaves(node) -> list[int]:
    if node[0] == "leaf":
        return [node[1]]
    out = []
    for child in node[1:]:
        out.extend(_tree_leaves(child))
    return out


def _tree_label(node) -> str:
    if node[0] == "leaf":
        return f"L{node[1]}"
    if node[0] == "br":
        return f"[{_tree_label(node[1])},{_tree_label(node[2])}]"
    return f"{_tree_label(node[1])}^p"


def _evaluate(node, leaves: list[TensorElement], p: int) -> TensorElement:
    it = iter(leaves)

    def go(nd):
        if nd[0] == "leaf":
            return next(it)
        if nd[0] == "br":
            a = go(nd[1])
            b = go(nd[2])
            return a * b - b * a
        return go(nd[1]) ** p

    return go(node)


def nested_patterns(p: int, max_degree: int) -> list[Pattern]:
    """Every bracket/p-power shape with at most two operations and total degree <= max_degree."""
    leaves = [("leaf", d) for d in range(1, max_degree + 1)]
    one_op = []
    for a in range(1, max_degree + 1):
        for b in range(a, max_degree + 1 - a):
            one_op.append(("br", ("leaf", a), ("leaf", b)))
        if p * a <= max_degree:
            one_op.append(("pow", ("leaf", a)))
    two_op = []
    for t in one_op:
        dt = _tree_degree(t, p)
        for c in range(1, max_degree + 1 - dt):
            two_op.append(("br", t, ("leaf", c)))
        if p * dt <= max_degree:
            two_op.append(("pow", t))
    nodes = leaves + one_op + two_op
    return [Pattern(nd) for nd in nodes if _tree_degree(nd, p) <= max_degree]


@dataclass
class EMLawReport:
    p: int
    max_degree: int
    unit_law: bool
    seed: int
    patterns: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.unit_law and all(not pat["failures"] for pat in self.patterns)

    @property
    def checked(self) -> int:
        return sum(pat["checked"] for pat in self.patterns)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "p": self.p,
            "max_degree": self.max_degree,
            "seed": self.seed,
            "unit_law": self.unit_law,
            "checked": self.checked,
            "patterns": self.patterns,
        }


def em_laws_check(
    A: EMObject | M2Object,
    max_degree: int | None = None,
    samples: int = 3,
    exhaustive_cap: int = 16,
    seed: int = 0,
) -> EMLawReport:
    """Unit and associativity laws of ``mu0`` on generated nested primitives.

    For a nested primitive built from layer elements, one path applies
    ``mu0`` to every leaf first and then ``mu0`` to the result; the other
    multiplies the leaves out in T(V0) and applies ``mu0`` once.
    """
    if isinstance(A, M2Object):
        A = A.underlying
    N = A.max_degree if max_degree is None else min(max_degree, A.max_degree)
    p, n = A.p, A.dim
    unit = bool(np.array_equal(A.mu0[1] % p, np.eye(n, dtype=np.int64)))
    report = EMLawReport(p=p, max_degree=N, unit_law=unit, seed=seed)
    rng = np.random.default_rng(seed)
    for pattern in nested_patterns(p, N):
        degrees = pattern.leaves()
        layers = [A.layer(d) for d in degrees]
        if any(layer.dim == 0 for layer in layers):
            report.patterns.append({"pattern": pattern.label(), "degree": pattern.degree(p), "checked": 0, "failures": []})
            continue
        choices: list[list[np.ndarray]] = []
        total = int(np.prod([layer.dim for layer in layers]))
        if total <= exhaustive_cap:
            for idx in product(*(range(layer.dim) for layer in layers)):
                choices.append([np.eye(layer.dim, dtype=np.int64)[i] for layer, i in zip(layers, idx)])
        for _ in range(samples):
            pick = []
            for layer in layers:
                c = rng.integers(0, p, size=layer.dim)
                if not c.any():
                    c[rng.integers(0, layer.dim)] = 1
                pick.append(c.astype(np.int64))
            choices.append(pick)
        failures = []
        for pick in choices:
            leaves = [layer.element(c) for layer, c in zip(layers, pick)]
            flattened = _evaluate(pattern.node, leaves, p)
            outer_first = A.apply(flattened)
            inner = [A.tensor(A.apply(leaf)) for leaf in leaves]
            inner_first = A.apply(_evaluate(pattern.node, inner, p))
            if not np.array_equal(outer_first, inner_first):
                failures.append(
                    {
                        "leaves": [c.tolist() for c in pick],
                        "flatten_then_mu0": outer_first.tolist(),
                        "mu0_then_mu0": inner_first.tolist(),
                    }
                )
        report.patterns.append(
            {"pattern": pattern.label(), "degree": pattern.degree(p), "checked": len(choices), "failures": failures}
        )
    return report


# Round trip and stationarity


@dataclass
class RoundtripReport:
    p: int
    max_degree: int
    structure_equal: bool
    pmap_equal: bool
    axioms_passed: bool
    matches_primitive_functor: bool
    recovered: RestrictedLieAlgebra
    mismatches: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.structure_equal and self.pmap_equal and self.axioms_passed and self.matches_primitive_functor

    def to_dict(self) -> dict:
        rec = self.recovered
        return {
            "passed": self.passed,
            "p": self.p,
            "max_degree": self.max_degree,
            "structure_equal": self.structure_equal,
            "pmap_equal": self.pmap_equal,
            "axioms_passed": self.axioms_passed,
            "matches_primitive_functor": self.matches_primitive_functor,
            "recovered": {
                "brackets": {f"{rec.names[i]},{rec.names[j]}": v.tolist() for (i, j), v in sorted(rec.upper().items())},
                "pmap": {name: row.tolist() for name, row in zip(rec.names, rec.pmap_table)},
            },
            "mismatches": self.mismatches,
        }


def roundtrip_check(
    L: RestrictedLieAlgebra,
    max_degree: int | None = None,
    size_limit: int = DEFAULT_SIZE_LIMIT,
    seed: int = 0,
) -> RoundtripReport:
    """Recover L from the EM object of its primitives and compare tables exactly."""
    if max_degree is None:
        max_degree = default_max_degree(L.p)
    if max_degree < L.p:
        raise TruncationTooSmall(f"need max_degree >= p = {L.p}, got {max_degree}")
    env = RestrictedEnvelope(L, size_limit)
    A = mu0_from_restricted(L, max_degree, env=env)
    rec = lambda_functor(A)
    mismatches = []
    for (i, j), v in L.upper().items():
        if not np.array_equal(rec.structure[i, j], v):
            mismatches.append({"bracket": [L.names[i], L.names[j]], "expected": v.tolist(), "got": rec.structure[i, j].tolist()})
    for i in range(L.dim):
        if not np.array_equal(rec.pmap_table[i], L.pmap_table[i]):
            mismatches.append({"pmap": L.names[i], "expected": L.pmap_table[i].tolist(), "got": rec.pmap_table[i].tolist()})
    # compare against commutators and p-th powers computed directly in u(L)
    functor_ok = True
    gens = [env.generator(i) for i in range(L.dim)]
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            if env.image(rec.structure[i, j]) != env.commutator(gens[i], gens[j]):
                functor_ok = False
        if env.image(rec.pmap_table[i]) != gens[i] ** L.p:
            functor_ok = False
    return RoundtripReport(
        p=L.p,
        max_degree=max_degree,
        structure_equal=bool(np.array_equal(rec.structure, L.structure)),
        pmap_equal=bool(np.array_equal(rec.pmap_table, L.pmap_table)),
        axioms_passed=check_axioms(rec, samples=20, seed=seed).passed,
        matches_primitive_functor=functor_ok,
        recovered=rec,
        mismatches=mismatches,
    )


def stationarity_check(V2: M2Object | EMObject, size_limit: int = DEFAULT_SIZE_LIMIT) -> bool:
    """Re-extracting the EM object from Λ(V2) gives back the same structure matrices."""
    A = V2.underlying if isinstance(V2, M2Object) else V2
    again = mu0_from_restricted(lambda_functor(A), A.max_degree, size_limit)
    return all(np.array_equal(A.mu0[d] % A.p, again.mu0[d]) for d in A.mu0)


def tensor_map(t: TensorElement, f: np.ndarray, target_rank: int) -> TensorElement:
    """Apply the algebra map T(f) letterwise; column i of ``f`` is the image of generator i."""
    p = t.p
    f = np.asarray(f, dtype=np.int64) % p
    out: dict[Word, int] = {}
    for w, c in t.terms.items():
        partial: dict[Word, int] = {(): c}
        for letter in w:
            col = f[:, letter]
            nxt: dict[Word, int] = {}
            for u, a in partial.items():
                for k in np.flatnonzero(col):
                    key = u + (int(k),)
                    nxt[key] = (nxt.get(key, 0) + a * int(col[k])) % p
            partial = nxt
        for u, a in partial.items():
            out[u] = out.get(u, 0) + a
    return TensorElement(p, target_rank, t.max_degree, out)


@dataclass
class MorphismReport:
    em_morphism: bool
    preserves_bracket: bool
    preserves_pmap: bool
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.em_morphism and self.preserves_bracket and self.preserves_pmap


def em_morphism_check(f, A: EMObject, B: EMObject) -> MorphismReport:
    """Check ``f mu0_A = mu0_B P T(f)`` degreewise and that Λ(f) is a restricted Lie map."""
    f = np.asarray(f, dtype=np.int64) % A.p
    N = min(A.max_degree, B.max_degree)
    failures = []
    for d in range(1, N + 1):
        for k, z in enumerate(A.layer(d).basis):
            lhs = (f @ A.mu0[d][:, k]) % A.p
            rhs = B.apply(tensor_map(z, f, B.dim))
            if not np.array_equal(lhs, rhs):
                failures.append({"degree": d, "index": k, "f_mu0": lhs.tolist(), "mu0_Tf": rhs.tolist()})
    la, lb = lambda_functor(A), lambda_functor(B)
    br = pm = True
    for i in range(A.dim):
        for j in range(A.dim):
            if not np.array_equal(f @ la.bracket(la.basis(i), la.basis(j)) % A.p, lb.bracket(f[:, i], f[:, j])):
                br = False
        if not np.array_equal(f @ la.pmap_table[i] % A.p, lb.pmap(f[:, i])):
            pm = False
    return MorphismReport(em_morphism=not failures, preserves_bracket=br, preserves_pmap=pm, failures=failures)


# Sandwich certificate


@dataclass
class SandwichReport:
    p: int
    dim: int
    max_degree: int
    rank_phi: list[int]
    span_quotient_dim: list[int]
    pbw_filtration_dim: list[int]
    tensor_dim: list[int]
    phi_kills_relations: bool

    @property
    def certified_up_to(self) -> int:
        d = 0
        for a, b, c in zip(self.rank_phi, self.span_quotient_dim, self.pbw_filtration_dim):
            if a == b == c:
                d += 1
            else:
                break
        return d

    @property
    def sound(self) -> bool:
        return self.phi_kills_relations and all(
            a <= b and a <= c for a, b, c in zip(self.rank_phi, self.span_quotient_dim, self.pbw_filtration_dim)
        )

    @property
    def passed(self) -> bool:
        return self.sound and self.certified_up_to == self.max_degree

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "p": self.p,
            "dim": self.dim,
            "max_degree": self.max_degree,
            "degrees": list(range(1, self.max_degree + 1)),
            "rank_phi": self.rank_phi,
            "span_quotient_dim": self.span_quotient_dim,
            "pbw_filtration_dim": self.pbw_filtration_dim,
            "tensor_dim": self.tensor_dim,
            "phi_kills_relations": self.phi_kills_relations,
            "sound": self.sound,
            "certified_up_to": self.certified_up_to,
        }


def pbw_filtration_dimension(p: int, n: int, d: int) -> int:
    """Number of exponent vectors in [0, p)^n with total degree <= d."""
    counts = [1] + [0] * d
    for _ in range(n):
        nxt = [0] * (d + 1)
        for s, c in enumerate(counts):
            for a in range(min(p - 1, d - s) + 1):
                nxt[s + a] += c
        counts = nxt
    return sum(counts)


def sandwich_certificate(
    V2: M2Object | EMObject,
    max_degree: int | None = None,
    size_limit: int = DEFAULT_SIZE_LIMIT,
) -> SandwichReport:
    """Compare three dimension counts of the filtered quotient T(V0)/⟨z - mu0 z⟩ with u(Λ V2).

    ``rank_phi`` is the dimension of the image of words of length <= d in
    u(Λ V2); ``span_quotient_dim`` is dim T^{<=d} minus the span of the
    relations a (z - mu0 z) b of filtration degree <= d; the third count is
    the restricted PBW filtration dimension.
    """
    A = V2.underlying if isinstance(V2, M2Object) else V2
    p, n = A.p, A.dim
    N = A.max_degree if max_degree is None else max_degree
    if N < p:
        raise TruncationTooSmall(f"need max_degree >= p = {p}, got {N}")
    if N > A.max_degree:
        raise TruncationTooSmall(f"EM object is truncated at {A.max_degree} < {N}")
    L = lambda_functor(A)
    env = RestrictedEnvelope(L, size_limit)
    words = words_up_to(n, N)
    windex = {w: i for i, w in enumerate(words)}
    phi_cols = np.stack([env.straighten(w).vector() for w in words], axis=1)

    kills = True
    relations: list[tuple[int, np.ndarray]] = []
    for d in range(2, N + 1):
        layer = A.layer(d)
        for k, z in enumerate(layer.basis):
            rel = z - A.tensor(A.mu0[d][:, k])
            if tensor_image(env, rel):
                kills = False
            rel_terms = list(rel.terms.items())
            for m in range(N - d + 1):
                for split in range(m + 1):
                    for a in product(range(n), repeat=split):
                        for b in product(range(n), repeat=m - split):
                            v = np.zeros(len(words), dtype=np.int64)
                            for w, c in rel_terms:
                                v[windex[a + w + b]] = c
                            relations.append((d + m, v))
    rel_deg = np.array([d for d, _ in relations], dtype=np.int64)
    rel_mat = np.stack([v for _, v in relations]) if relations else np.zeros((0, len(words)), dtype=np.int64)
    word_deg = np.array([len(w) for w in words])

    rank_phi, quotient, pbw, tdims = [], [], [], []
    for d in range(1, N + 1):
        cols = word_deg <= d
        rank_phi.append(rank(FpMatrix(phi_cols[:, cols], p)))
        rows = rel_deg <= d
        sub = rel_mat[np.ix_(rows, cols)]
        span = rank(FpMatrix(sub, p)) if sub.size else 0
        tdims.append(int(cols.sum()))
        quotient.append(int(cols.sum()) - span)
        pbw.append(pbw_filtration_dimension(p, n, d))
    return SandwichReport(
        p=p,
        dim=n,
        max_degree=N,
        rank_phi=rank_phi,
        span_quotient_dim=quotient,
        pbw_filtration_dim=pbw,
        tensor_dim=tdims,
        phi_kills_relations=kills,
    )
