"""Random artinian algebras and modules for property tests and batch runs.

Algebras are ``k[x_1..x_n] / (I + m^N)`` with ``I`` generated by a few random
monomials and binomials of degree at least 2.  Everything is driven by a
``numpy.random.Generator`` so that instances are reproducible from a seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .algebra import LocalAlgebra, PolySpec, build_algebra, monomials_of_degree
from .duality import canonical_module, dual_module
from .linalg import Field, Subspace
from .modules import AModule, direct_sum, free_module, from_presentation, quotient_module, residue_module


@dataclass
class AlgebraShape:
    max_vars: int = 3
    max_nilpotency: int = 4
    max_length: int = 30
    max_generators: int = 4
    binomial_rate: float = 0.5


def random_algebra(rng: np.random.Generator, field: Optional[Field] = None,
                   shape: Optional[AlgebraShape] = None, tries: int = 50) -> LocalAlgebra:
    """A random local algebra of length at most ``shape.max_length``."""
    f = field or Field.prime(32003)
    shape = shape or AlgebraShape()
    for _ in range(tries):
        n = int(rng.integers(1, shape.max_vars + 1))
        N = int(rng.integers(2, shape.max_nilpotency + 1))
        gens = []
        for _ in range(int(rng.integers(0, shape.max_generators + 1))):
            if N <= 2:
                break
            deg = int(rng.integers(2, N))
            monos = monomials_of_degree(n, deg)
            a = monos[int(rng.integers(len(monos)))]
            if len(monos) > 1 and rng.random() < shape.binomial_rate:
                b = monos[int(rng.integers(len(monos)))]
                c = int(rng.integers(1, 7)) * (1 if rng.random() < 0.5 else -1)
                if b != a:
                    gens.append(((1, a), (c, b)))
                    continue
            gens.append(((1, a),))
        names = tuple(f"x{i + 1}" for i in range(n))
        spec = PolySpec(f, names, N, tuple(tuple((f.scalar(c), e) for c, e in g) for g in gens))
        A = build_algebra(spec)
        if A.dim <= shape.max_length:
            return A
    raise RuntimeError("could not draw an algebra within the length limit")


def random_radical_element(rng: np.random.Generator, A: LocalAlgebra, density: float = 0.5) -> np.ndarray:
    f = A.field
    v = f.zeros(A.dim)
    for i in range(1, A.dim):
        if rng.random() < density:
            v[i] = f.scalar(int(rng.integers(-5, 6)))
    return v


KINDS = ("cyclic", "presented", "residue", "canonical", "free", "dual", "sum")


def random_module(rng: np.random.Generator, A: LocalAlgebra, kind: Optional[str] = None,
                  max_dim: int = 40) -> AModule:
    """A nonzero random module; ``kind`` picks the construction (random if omitted)."""
    kind = kind or KINDS[int(rng.integers(len(KINDS)))]
    if kind == "cyclic":
        rels = [random_radical_element(rng, A) for _ in range(int(rng.integers(1, 3)))]
        M = from_presentation(A, [rels], 1, "A/I")
    elif kind == "presented":
        g = int(rng.integers(1, 3))
        c = int(rng.integers(1, 4))
        rel = [[random_radical_element(rng, A) for _ in range(c)] for _ in range(g)]
        M = from_presentation(A, rel, g, "coker")
    elif kind == "residue":
        M = residue_module(A, int(rng.integers(1, 3)))
    elif kind == "canonical":
        M = canonical_module(A)
    elif kind == "free":
        M = free_module(A, 1, "A")
    elif kind == "dual":
        M = dual_module(random_module(rng, A, "presented", max_dim))
    elif kind == "sum":
        M = direct_sum(random_module(rng, A, "cyclic", max_dim), residue_module(A))
    else:
        raise ValueError(f"unknown module kind {kind!r}")
    if M.dim == 0 or M.dim > max_dim:
        return residue_module(A)
    return M


def radical_square_quotient(M: AModule) -> AModule:
    """``M / m^2 M``, a module killed by the square of the maximal ideal."""
    f = M.field
    if M.dim == 0 or not M.actions:
        return M
    rad = M.radical
    if rad.dim == 0:
        return M
    imgs = np.concatenate([f.matmul(rad.basis, x.T) for x in M.actions])
    Q, _ = quotient_module(M, Subspace.span(f, imgs, M.dim), f"{M.label}/m2")
    return Q


def algebra_batch(seed: int, count: int, field: Optional[Field] = None,
                  shape: Optional[AlgebraShape] = None) -> List[LocalAlgebra]:
    rng = np.random.default_rng(seed)
    return [random_algebra(rng, field, shape) for _ in range(count)]
