import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plie.fp import FpMatrix, rank
from plie.tensor import (
    DegreeOutOfRange,
    MixedContext,
    TensorElement,
    TensorSquareElement,
    coproduct,
    counit,
    is_primitive,
    primitive_basis,
    words_of_degree,
)

X, Y = 0, 1


def T(p, terms, r=2, n=6):
    return TensorElement(p, r, n, terms)


def square_via_generators(a: TensorElement) -> TensorSquareElement:
    """Coproduct by multiplying out Δ(x) = x⊗1 + 1⊗x letter by letter."""
    total = TensorSquareElement(a.p)
    for w, c in a.terms.items():
        acc = TensorSquareElement(a.p, {((), ()): c})
        for letter in w:
            acc = acc * TensorSquareElement(a.p, {((letter,), ()): 1, ((), (letter,)): 1})
        total = total + acc
    return total


def test_concat_examples():
    one = TensorElement.one(2, 2, 4)
    w = T(2, {(X, Y, X): 1}, n=4)
    assert one * w == w and w * one == w
    x, y = T(5, {(X,): 1}), T(5, {(Y,): 1})
    assert (x * y).terms == {(X, Y): 1}
    s = T(2, {(X,): 1, (Y,): 1})
    assert (s * s).terms == {(X, X): 1, (X, Y): 1, (Y, X): 1, (Y, Y): 1}


def test_truncation_and_context():
    a = T(3, {(X, X): 1}, n=3)
    assert (a * a).terms == {}
    with pytest.raises(MixedContext):
        T(3, {(X,): 1}, n=3) * T(3, {(X,): 1}, n=4)
    with pytest.raises(MixedContext):
        T(3, {(X,): 1}) + T(5, {(X,): 1})


def test_coproduct_examples():
    assert coproduct(TensorElement.one(3, 2, 4)).terms == {((), ()): 1}
    assert coproduct(T(3, {(X,): 1})).terms == {((X,), ()): 1, ((), (X,)): 1}
    assert coproduct(T(5, {(X, Y): 1})).terms == {
        ((X, Y), ()): 1,
        ((X,), (Y,)): 1,
        ((Y,), (X,)): 1,
        ((), (X, Y)): 1,
    }


def test_counit_examples():
    assert counit(TensorElement.one(2, 1, 3)) == 1
    assert counit(T(2, {(X,): 1})) == 0
    assert counit(T(5, {(): 3, (X, Y): 1})) == 3


def test_primitive_basis_examples():
    for p in (2, 3, 5):
        for r in (1, 2, 3):
            basis = primitive_basis(p, r, 1)
            assert [b.terms for b in basis] == [{(i,): 1} for i in range(r)]
    assert [b.terms for b in primitive_basis(2, 1, 2)] == [{(0, 0): 1}]
    assert primitive_basis(3, 1, 2) == []
    with pytest.raises(DegreeOutOfRange):
        primitive_basis(2, 1, 0)
    with pytest.raises(DegreeOutOfRange):
        primitive_basis(2, 1, 3, max_degree=2)


@st.composite
def elements(draw, p=None, r=2, n=5, max_deg=3):
    p = p or draw(st.sampled_from([2, 3, 5]))
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        d = draw(st.integers(0, max_deg))
        w = tuple(draw(st.lists(st.integers(0, r - 1), min_size=d, max_size=d)))
        terms[w] = draw(st.integers(1, p - 1))
    return TensorElement(p, r, n, terms)


def _left(sq: TensorSquareElement):
    """(Δ ⊗ id) on a tensor square, as a dict on word triples."""
    out = {}
    for (a, b), c in sq.terms.items():
        for (a1, a2), d in coproduct(TensorElement(sq.p, 2, 99, {a: 1})).terms.items():
            k = (a1, a2, b)
            out[k] = (out.get(k, 0) + c * d) % sq.p
    return {k: v for k, v in out.items() if v}


def _right(sq: TensorSquareElement):
    out = {}
    for (a, b), c in sq.terms.items():
        for (b1, b2), d in coproduct(TensorElement(sq.p, 2, 99, {b: 1})).terms.items():
            k = (a, b1, b2)
            out[k] = (out.get(k, 0) + c * d) % sq.p
    return {k: v for k, v in out.items() if v}


@settings(max_examples=60, deadline=None)
@given(elements())
def test_coproduct_matches_generator_products(a):
    assert coproduct(a) == square_via_generators(a)


@settings(max_examples=60, deadline=None)
@given(elements())
def test_coassociative(a):
    assert _left(coproduct(a)) == _right(coproduct(a))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_coproduct_is_algebra_map(data):
    p = data.draw(st.sampled_from([2, 3, 5]))
    a = data.draw(elements(p=p, max_deg=2))
    b = data.draw(elements(p=p, max_deg=2))
    assert coproduct(a * b) == coproduct(a) * coproduct(b)


@settings(max_examples=60, deadline=None)
@given(elements())
def test_counit_law(a):
    sq = coproduct(a)
    left = {}
    right = {}
    for (u, v), c in sq.terms.items():
        if u == ():
            left[v] = (left.get(v, 0) + c) % a.p
        if v == ():
            right[u] = (right.get(u, 0) + c) % a.p
    assert TensorElement(a.p, a.rank, a.max_degree, left) == a
    assert TensorElement(a.p, a.rank, a.max_degree, right) == a


@pytest.mark.parametrize("p,r,n", [(2, 2, 4), (3, 2, 4), (5, 1, 5), (2, 3, 3), (3, 1, 3)])
def test_primitive_basis_is_independent_and_primitive(p, r, n):
    basis = primitive_basis(p, r, n)
    for z in basis:
        assert is_primitive(z)
    if basis:
        words = words_of_degree(r, n)
        assert rank(FpMatrix(np.stack([z.vector(words) for z in basis]), p)) == len(basis)


def _in_primitive_span(t: TensorElement, p, r, n):
    words = words_of_degree(r, n)
    basis = primitive_basis(p, r, n)
    cols = [z.vector(words) for z in basis]
    base = rank(FpMatrix(np.stack(cols), p)) if cols else 0
    return rank(FpMatrix(np.stack(cols + [t.vector(words)]), p)) == base


@pytest.mark.parametrize("p,r", [(2, 2), (3, 2), (5, 2)])
def test_commutators_and_powers_of_primitives(p, r):
    N = 6
    for n in range(1, 4):
        for m in range(1, 4):
            if n + m > N:
                continue
            for z in primitive_basis(p, r, n, N):
                for w in primitive_basis(p, r, m, N):
                    c = z * w - w * z
                    assert is_primitive(c)
                    assert _in_primitive_span(c, p, r, n + m)
        if n * p <= N:
            for z in primitive_basis(p, r, n, N):
                assert is_primitive(z**p)
                assert _in_primitive_span(z**p, p, r, n * p)
