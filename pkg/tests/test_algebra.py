from __future__ import annotations

import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from minmult.algebra import (
    AlgebraError,
    PolySpec,
    build_algebra,
    check_algebra,
    invariants,
    monomials_of_degree,
    tensor_algebra,
)
from minmult.linalg import Field

from conftest import F101, algebra_from, algebras, mm_ring


def groebner_length(field, n, N, gens):
    """``dim k[x]/(I + m^N)`` from a sympy Groebner basis over GF(p)."""
    xs = sympy.symbols(f"z0:{n}")
    polys = [sum(int(c) * sympy.prod(x ** k for x, k in zip(xs, e)) for c, e in g) for g in gens]
    polys += [sympy.prod(x ** k for x, k in zip(xs, e)) for e in monomials_of_degree(n, N)]
    G = sympy.groebner(polys, *xs, order="grevlex", modulus=field.characteristic)
    leads = [sympy.Poly(g, *xs).monoms(order="grevlex")[0] for g in G.exprs]
    count = 0
    for d in range(N):
        for e in monomials_of_degree(n, d):
            if not any(all(a >= b for a, b in zip(e, l)) for l in leads):
                count += 1
    return count


def test_minimal_multiplicity_rings():
    for r in range(1, 5):
        A = mm_ring(r)
        inv = invariants(A)
        assert (A.dim, inv.embedding_dimension, inv.type) == (r + 1, r, r)
        assert inv.has_minimal_multiplicity
        assert inv.is_gorenstein == (r == 1)


@pytest.mark.parametrize("a,b", [(a, b) for a in range(1, 5) for b in range(1, 5)])
def test_complete_intersections(a, b):
    A = algebra_from(F101, ["X", "Y"], a + b, [[(1, (a, 0))], [(1, (0, b))]])
    inv = invariants(A)
    assert A.dim == a * b
    assert inv.type == 1 and inv.is_gorenstein
    # Hilbert function of k[X]/X^a (x) k[Y]/Y^b
    want = [sum(1 for i in range(a) for j in range(b) if i + j == d) for d in range(a + b - 1)]
    assert list(inv.hilbert_function) == want


def test_basis_is_an_order_ideal_starting_at_one():
    A = algebra_from(F101, ["x", "y", "z"], 4, [[(1, (2, 0, 0)), (-3, (0, 1, 1))], [(1, (1, 1, 0))]])
    assert A.basis[0] == (0, 0, 0)
    for e in A.basis:
        for i in range(3):
            if e[i]:
                assert e[:i] + (e[i] - 1,) + e[i + 1:] in A.basis


@given(algebras())
def test_actions_commute_and_are_nilpotent(A):
    check_algebra(A)
    f = A.field
    for word in itertools.product(range(A.nvars), repeat=A.nilpotency):
        P = f.eye(A.dim)
        for i in word:
            P = f.matmul(A.actions[i], P)
        assert not np.any(P)


@settings(max_examples=15)
@given(algebras())
def test_length_matches_groebner_oracle(A):
    assert A.dim == groebner_length(A.field, A.nvars, A.nilpotency, A.spec.generators)


@given(algebras())
def test_multiplication_is_commutative_and_associative(A):
    f = A.field
    rng = np.random.default_rng(A.dim)
    a, b, c = (f.reduce(rng.integers(0, 101, A.dim)) for _ in range(3))
    assert np.array_equal(A.mul(a, b), A.mul(b, a))
    assert np.array_equal(A.mul(A.mul(a, b), c), A.mul(a, A.mul(b, c)))
    assert np.array_equal(A.mul(A.one(), a), a)


def test_constant_generator_rejected():
    with pytest.raises(AlgebraError):
        PolySpec(F101, ("x",), 3, (((1, (0,)),),))


def test_strict_mode_requires_power_of_maximal_ideal():
    square = tuple(((1, e),) for e in monomials_of_degree(2, 2))
    assert build_algebra(PolySpec(F101, ("x", "y"), 2, square), strict=True).dim == 3
    for gens in [(), (((1, (2, 0)),),)]:
        spec = PolySpec(F101, ("x", "y"), 3 if gens else 2, gens)
        with pytest.raises(AlgebraError):
            build_algebra(spec, strict=True)
    assert build_algebra(PolySpec(F101, ("x", "y"), 3, (((1, (2, 0)),),))).dim == 5


def test_generators_of_high_degree_vanish():
    A = algebra_from(F101, ["x"], 3, [[(1, (5,))]])
    assert A.dim == 3


def test_tensor_algebra_lengths_and_type():
    A = mm_ring(2)
    T = tensor_algebra(A, A)
    inv = invariants(T)
    assert T.dim == 9 and inv.type == 4
    assert T.nilpotency == 3
    check_algebra(T)


def test_fingerprint_depends_on_field_and_presentation():
    a = mm_ring(2)
    b = mm_ring(2, Field.prime(7))
    c = algebra_from(F101, ["x1", "x2"], 3, [[(1, (2, 0))], [(1, (1, 1))], [(1, (0, 2))]])
    assert a.fingerprint != b.fingerprint
    assert a.fingerprint == mm_ring(2).fingerprint
    assert a.dim == c.dim


@given(st.integers(1, 3), st.integers(2, 4))
def test_polynomial_ring_truncation_length(n, N):
    A = algebra_from(F101, [f"x{i}" for i in range(n)], N)
    assert A.dim == sum(len(monomials_of_degree(n, d)) for d in range(N))
