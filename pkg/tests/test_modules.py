from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given

from minmult.modules import (
    AModule,
    HomSpace,
    ModuleError,
    TensorProduct,
    annihilator,
    annihilator_colength,
    check_module,
    direct_sum,
    free_module,
    from_presentation,
    image_module,
    loewy_kills,
    minimal_generators,
    quotient_module,
    radical_square_witness,
    residue_module,
    socle,
    submodule,
    tensor_over_A,
)

from conftest import F101, algebra_and_modules, algebra_from, mm_ring


@given(algebra_and_modules())
def test_random_modules_are_modules(case):
    _, M = case
    check_module(M)


@given(algebra_and_modules(2))
def test_tensor_with_ring_and_residue_field(case):
    A, M, N = case
    assert tensor_over_A(free_module(A, 1), M).dim == M.dim
    assert tensor_over_A(residue_module(A), M).dim == minimal_generators(M)
    assert tensor_over_A(M, N).dim == tensor_over_A(N, M).dim


@given(algebra_and_modules(2))
def test_hom_from_ring_and_residue_field(case):
    A, M, N = case
    assert HomSpace(free_module(A, 1), M).module.dim == M.dim
    assert HomSpace(residue_module(A), M).module.dim == socle(M).dim
    H = HomSpace(M, N)
    for k in range(H.module.dim):
        F = H.matrix(k)
        for x, y in zip(M.actions, N.actions):
            assert not np.any(F101.reduce(F101.matmul(y, F) - F101.matmul(F, x)))
        assert np.array_equal(H.coords(F), np.eye(H.module.dim, dtype=np.int64)[k])


@given(algebra_and_modules(2))
def test_hom_tensor_adjunction_dimensions(case):
    # Hom(M (x) N, k) = Hom(M, Hom(N, k)): both are (M (x) N)^dual up to dimension
    A, M, N = case
    k = residue_module(A)
    left = HomSpace(tensor_over_A(M, N), k).module.dim
    right = HomSpace(M, HomSpace(N, k).module).module.dim
    assert left == right


@given(algebra_and_modules())
def test_submodule_and_quotient_are_compatible(case):
    A, M = case
    S, inc = submodule(M, M.radical.basis.T.copy() if M.radical.dim else F101.zeros(M.dim, 0))
    assert inc.intertwines() and inc.is_injective()
    Q, proj = quotient_module(M, M.radical)
    assert proj.intertwines() and proj.is_surjective()
    assert S.dim + Q.dim == M.dim
    assert Q.dim == minimal_generators(M)
    assert loewy_kills(Q, 1)


def test_cyclic_module_annihilator():
    A = algebra_from(F101, ["x", "y"], 4)
    x2 = A.element(((1, (2, 0)),))
    y = A.element(((1, (0, 1)),))
    M = from_presentation(A, [[x2, y]], 1)
    assert M.dim == 2  # k[x]/(x^2)
    assert annihilator_colength(M) == 2
    assert annihilator(M).dim == A.dim - 2


def test_image_module_matches_ideal():
    A = mm_ring(3)
    x1 = A.element(((1, (1, 0, 0)),))
    I = image_module(A, [[x1]])
    assert I.dim == 1


def test_direct_sum_additivity():
    A = mm_ring(2)
    M = direct_sum(free_module(A, 1), residue_module(A, 2))
    assert M.dim == 5 and minimal_generators(M) == 3
    assert socle(M).dim == 4


def test_radical_square_witness():
    A = algebra_from(F101, ["x"], 3)
    assert radical_square_witness(free_module(A, 1)) is not None
    assert radical_square_witness(residue_module(A)) is None


def test_bad_actions_rejected():
    A = mm_ring(2)
    X = F101.array([[0, 1], [0, 0]])
    Y = F101.array([[0, 0], [1, 0]])
    with pytest.raises(ModuleError):
        AModule(A, [X, Y])
    with pytest.raises(ModuleError):
        AModule(A, [X])


def test_tensor_pure_tensors_span():
    A = mm_ring(2)
    T = TensorProduct(free_module(A, 1), residue_module(A))
    assert T.module.dim == 1
    assert np.any(T.pure(0, 0))
