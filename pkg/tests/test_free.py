import pytest

from plie.free import (
    closure_check,
    free_restricted_basis,
    free_restricted_layer,
    mobius,
    witt_dimension,
    witt_oracle_dimension,
)
from plie.fp import FpMatrix, rank
from plie.tensor import TensorElement, is_primitive


def test_layer_examples():
    for p in (2, 3, 5):
        for r in (1, 2, 3):
            assert free_restricted_layer(p, r, 1).dim == r
    layer = free_restricted_layer(2, 2, 2)
    assert layer.dim == 3
    span = {(0, 0): 1}, {(1, 1): 1}, {(0, 1): 1, (1, 0): 1}
    for target in span:
        coords, residual = layer.coordinates(TensorElement(2, 2, 2, target))
        assert not residual.any()
    layer = free_restricted_layer(3, 1, 3)
    assert [z.terms for z in layer.basis] == [{(0, 0, 0): 1}]


def test_witt_examples():
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert [witt_dimension(d, 2) for d in range(1, 7)] == [2, 1, 2, 3, 6, 9]
    assert witt_dimension(2, 1) == 0
    for p in (2, 3, 5):
        assert witt_oracle_dimension(p, 4, 1) == 4
    assert witt_oracle_dimension(2, 2, 2) == 3
    assert witt_oracle_dimension(2, 1, 2) == 1


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("r", [1, 2])
def test_layers_match_witt_oracle(p, r):
    layers = free_restricted_basis(p, r, 6)
    assert [layer.dim for layer in layers] == [witt_oracle_dimension(p, r, n) for n in range(1, 7)]


def test_layers_match_witt_oracle_rank3():
    layers = free_restricted_basis(5, 3, 5)
    assert [layer.dim for layer in layers] == [witt_oracle_dimension(5, 3, n) for n in range(1, 6)]


@pytest.mark.parametrize("p,r,N", [(2, 2, 6), (3, 2, 6), (2, 1, 4), (3, 1, 6), (5, 2, 5)])
def test_closure(p, r, N):
    layers = free_restricted_basis(p, r, N)
    report = closure_check(layers, N)
    assert report.passed
    assert report.brackets
    if p <= N:
        assert report.powers


def test_closure_examples():
    layers = free_restricted_basis(2, 2, 2)
    report = closure_check(layers)
    xy = next(b for b in report.brackets if b["degrees"] == [1, 1] and b["indices"] == [0, 1])
    rebuilt = layers[1].element(xy["coordinates"])
    assert rebuilt.terms == {(0, 1): 1, (1, 0): 1}
    xx = next(b for b in report.brackets if b["degrees"] == [1, 1] and b["indices"] == [0, 0])
    assert not any(xx["coordinates"])
    report = closure_check(free_restricted_basis(3, 1, 3))
    assert report.powers == [{"degree": 1, "index": 0, "coordinates": [1], "in_span": True}]


def test_generator_power_is_tensor_power():
    for p in (2, 3, 5):
        x = TensorElement.generator(p, 2, p, 0)
        assert (x**p).terms == {(0,) * p: 1}
        assert is_primitive(x**p)


def test_layer_vectors_primitive():
    for layer in free_restricted_basis(3, 2, 5):
        for z in layer.basis:
            assert is_primitive(z)
        if layer.dim:
            assert rank(FpMatrix(layer.matrix(), 3)) == layer.dim
