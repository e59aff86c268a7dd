"""Finitely generated modules over a local algebra, stored as commuting action matrices.

Every module is a finite-dimensional ``k``-space with one matrix per algebra
variable, acting on column vectors.  Submodules, quotients, tensor products
and Hom spaces are all computed with plain linear algebra.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from .algebra import LocalAlgebra, Polynomial, evaluate_polynomial, poly_str
from .linalg import Field, Subspace


class ModuleError(ValueError):
    pass


class AModule:
    """A module over ``algebra`` given by its variable actions."""

    def __init__(self, algebra: LocalAlgebra, actions: Sequence[np.ndarray], label: str = "",
                 check: bool = True, dim: Optional[int] = None):
        self.algebra = algebra
        self.actions = tuple(actions)
        self.label = label
        # an algebra without variables (A = k) gives no matrices to read the size from
        self._dim = self.actions[0].shape[0] if self.actions else int(dim or 0)
        if len(self.actions) != algebra.nvars:
            raise ModuleError(f"expected {algebra.nvars} action matrices, got {len(self.actions)}")
        if check:
            check_module(self)

    @classmethod
    def zero(cls, algebra: LocalAlgebra, label: str = "0") -> "AModule":
        f = algebra.field
        return cls(algebra, [f.zeros(0, 0) for _ in range(algebra.nvars)], label, check=False, dim=0)

    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def dim(self) -> int:
        return self._dim

    def __repr__(self):
        name = f" {self.label}" if self.label else ""
        return f"<AModule{name} dim={self.dim}>"

    def apply_basis(self, vectors: np.ndarray) -> np.ndarray:
        """``out[c] = (basis monomial c) * vectors`` for every standard monomial ``c``.

        ``vectors`` holds column vectors (``dim x k``).
        """
        A = self.algebra
        f = self.field
        out = np.empty((A.dim,) + vectors.shape, dtype=f.dtype)
        out[0] = vectors
        for c in range(1, A.dim):
            i, prev = A.parents[c]
            out[c] = f.matmul(self.actions[i], out[prev])
        return out

    @cached_property
    def ops(self) -> np.ndarray:
        """``ops[c]``: the action of basis monomial ``c`` on this module."""
        return self.apply_basis(self.field.eye(self.dim))

    def element_action(self, a: np.ndarray) -> np.ndarray:
        """Matrix of multiplication by the algebra element ``a``."""
        f = self.field
        n = self.dim
        d = self.algebra.dim
        return f.matmul(a.reshape(1, d), self.ops.reshape(d, n * n)).reshape(n, n)

    @cached_property
    def radical(self) -> Subspace:
        """``mM`` as a subspace."""
        f = self.field
        if not self.actions or self.dim == 0:
            return Subspace.zero(f, self.dim)
        return Subspace.span(f, np.concatenate([x.T for x in self.actions]), self.dim)

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256(self.algebra.fingerprint.encode())
        h.update(str(self.dim).encode())
        for x in self.actions:
            h.update(np.ascontiguousarray(x, dtype=object).astype(str).tobytes())
        return h.hexdigest()


def check_module(M: AModule) -> None:
    """Raise ``ModuleError`` unless actions commute, kill the ideal and ``m^N M = 0``."""
    f = M.field
    X = M.actions
    n = M.dim
    for x in X:
        if x.shape != (n, n):
            raise ModuleError("action matrices must be square of equal size")
    for i in range(len(X)):
        for j in range(i + 1, len(X)):
            if np.any(f.matmul(X[i], X[j]) != f.matmul(X[j], X[i])):
                raise ModuleError(f"actions {i} and {j} do not commute")
    A = M.algebra
    if A.spec is not None and X and n:
        for g in A.spec.generators:
            if np.any(evaluate_polynomial(f, g, X) != 0):
                raise ModuleError(f"relation {poly_str(g, A.variables)} does not act as zero")
    if X and n:
        sub = Subspace.whole(f, n)
        for _ in range(A.nilpotency):
            if sub.dim == 0:
                break
            sub = Subspace.span(f, np.concatenate([f.matmul(sub.basis, x.T) for x in X]), n)
        if sub.dim:
            raise ModuleError("m^N does not annihilate the module")


@dataclass(frozen=True, eq=False)
class ModuleMap:
    source: AModule
    target: AModule
    matrix: np.ndarray  # target.dim x source.dim

    def intertwines(self) -> bool:
        f = self.source.field
        for xs, xt in zip(self.source.actions, self.target.actions):
            if np.any(f.matmul(xt, self.matrix) != f.matmul(self.matrix, xs)):
                return False
        return True

    def rank(self) -> int:
        return len(self.source.field.rref(self.matrix)[1]) if self.matrix.size else 0

    def is_injective(self) -> bool:
        return self.rank() == self.source.dim

    def is_surjective(self) -> bool:
        return self.rank() == self.target.dim

    def is_bijective(self) -> bool:
        return self.source.dim == self.target.dim and self.is_injective()


def _same_algebra(M: AModule, N: AModule) -> None:
    if M.algebra is not N.algebra and M.algebra.fingerprint != N.algebra.fingerprint:
        raise ModuleError("modules live over different algebras")


# constructions

def free_module(A: LocalAlgebra, rank: int, label: str = "") -> AModule:
    f = A.field
    if rank == 0:
        return AModule(A, [f.zeros(0, 0) for _ in A.actions], label or "0", check=False, dim=0)
    I = f.eye(rank)
    return AModule(A, [np.kron(I, x) for x in A.actions], label or f"A^{rank}", check=False,
                   dim=rank * A.dim)


def residue_module(A: LocalAlgebra, copies: int = 1, label: str = "") -> AModule:
    f = A.field
    return AModule(A, [f.zeros(copies, copies) for _ in A.actions], label or ("k" if copies == 1 else f"k^{copies}"),
                   check=False, dim=copies)


def submodule(M: AModule, vectors: np.ndarray, label: str = "") -> Tuple[AModule, ModuleMap]:
    """The submodule generated by the given column vectors, with its inclusion."""
    return subspace_module(M, image_subspace(M, vectors), label)


def subspace_module(M: AModule, sub: Subspace, label: str = "") -> Tuple[AModule, ModuleMap]:
    """Restrict ``M`` to an invariant subspace."""
    f = M.field
    acts = []
    for x in M.actions:
        imgs = f.matmul(sub.basis, x.T)
        acts.append(np.ascontiguousarray(sub.coords(imgs).T))
    S = AModule(M.algebra, acts, label, check=False, dim=sub.dim)
    return S, ModuleMap(S, M, np.ascontiguousarray(sub.basis.T))


def quotient_module(M: AModule, sub: Subspace, label: str = "") -> Tuple[AModule, ModuleMap]:
    """``M / sub`` (``sub`` must be invariant), with the projection map."""
    f = M.field
    proj, cols = sub.quotient_map()
    acts = [f.matmul(proj, x[:, cols]) for x in M.actions]
    Q = AModule(M.algebra, acts, label, check=False, dim=len(cols))
    return Q, ModuleMap(M, Q, proj)


def _column_vector(A: LocalAlgebra, entries: Sequence) -> np.ndarray:
    f = A.field
    parts = []
    for e in entries:
        if isinstance(e, np.ndarray):
            parts.append(e)
        else:
            parts.append(A.element(e))
    return np.concatenate(parts) if parts else f.zeros(0)


def matrix_columns(A: LocalAlgebra, rows: Sequence[Sequence]) -> np.ndarray:
    """Ambient vectors in ``A^g`` for the columns of a ``g x c`` matrix over ``A``.

    Entries may be polynomials or coordinate vectors.  The result has one
    column per matrix column; coordinates are indexed ``row * dim(A) + basis``.
    """
    g = len(rows)
    c = len(rows[0]) if g else 0
    cols = [_column_vector(A, [rows[i][j] for i in range(g)]) for j in range(c)]
    if not cols:
        return A.field.zeros(g * A.dim, 0)
    return np.stack(cols, axis=1)


def image_subspace(F: AModule, cols: np.ndarray) -> Subspace:
    """The submodule of ``F`` generated by the given column vectors, as a subspace."""
    f = F.field
    if cols.shape[1] == 0 or F.dim == 0:
        return Subspace.zero(f, F.dim)
    imgs = F.apply_basis(cols)
    rows = np.concatenate([imgs[c].T for c in range(imgs.shape[0])])
    return Subspace.span(f, rows, F.dim)


def from_presentation(A: LocalAlgebra, rel: Sequence[Sequence], gens: int, label: str = "") -> AModule:
    """Cokernel of ``A^c -> A^gens`` given by the relation matrix (``gens`` rows)."""
    if rel and len(rel) != gens:
        raise ModuleError(f"relation matrix has {len(rel)} rows, expected {gens}")
    F = free_module(A, gens)
    sub = image_subspace(F, matrix_columns(A, rel)) if rel else Subspace.zero(A.field, F.dim)
    M, _ = quotient_module(F, sub, label)
    return M


def image_module(A: LocalAlgebra, rows: Sequence[Sequence], label: str = "") -> AModule:
    """The submodule of ``A^g`` generated by the columns of a ``g x c`` matrix."""
    F = free_module(A, len(rows))
    M, _ = submodule(F, matrix_columns(A, rows), label)
    return M


def radical_submodule(M: AModule) -> Tuple[AModule, ModuleMap]:
    """``mM`` with its inclusion into ``M``."""
    return subspace_module(M, M.radical, f"m{M.label}" if M.label else "")


def minimal_generators(M: AModule) -> int:
    """``beta_0(M) = dim M / mM``."""
    return M.dim - M.radical.dim


def generator_vectors(M: AModule) -> np.ndarray:
    """Columns lifting a basis of ``M / mM`` (unit vectors off the radical's pivots)."""
    f = M.field
    cols = M.radical.complement_cols()
    out = f.zeros(M.dim, len(cols))
    for j, c in enumerate(cols):
        out[c, j] = 1
    return out


def socle(M: AModule) -> Subspace:
    f = M.field
    if not M.actions or M.dim == 0:
        return Subspace.whole(f, M.dim)
    return Subspace.kernel(f, np.concatenate(M.actions))


def annihilator(M: AModule) -> Subspace:
    """``Ann(M)`` as a subspace of ``A``."""
    A = M.algebra
    f = A.field
    if M.dim == 0:
        return Subspace.whole(f, A.dim)
    flat = M.ops.reshape(A.dim, -1).T
    return Subspace.kernel(f, flat)


def annihilator_colength(M: AModule) -> int:
    return M.algebra.dim - annihilator(M).dim


def loewy_kills(M: AModule, power: int) -> bool:
    """Whether ``m^power M = 0``."""
    f = M.field
    if M.dim == 0:
        return True
    if not M.actions:
        return True
    sub = Subspace.whole(f, M.dim)
    for _ in range(power):
        sub = Subspace.span(f, np.concatenate([f.matmul(sub.basis, x.T) for x in M.actions]), M.dim)
        if sub.dim == 0:
            return True
    return sub.dim == 0


def radical_square_witness(M: AModule) -> Optional[np.ndarray]:
    """A vector of ``m^2 M`` when it is nonzero, else ``None``."""
    f = M.field
    for x in M.actions:
        for y in M.actions:
            prod = f.matmul(x, y)
            nz = np.flatnonzero(np.any(prod != 0, axis=0))
            if nz.size:
                return prod[:, nz[0]]
    return None


def direct_sum(M: AModule, N: AModule, label: str = "") -> AModule:
    _same_algebra(M, N)
    f = M.field
    acts = []
    for x, y in zip(M.actions, N.actions):
        z = f.zeros(M.dim + N.dim, M.dim + N.dim)
        z[: M.dim, : M.dim] = x
        z[M.dim:, M.dim:] = y
        acts.append(z)
    return AModule(M.algebra, acts, label or f"{M.label}+{N.label}", check=False, dim=M.dim + N.dim)


def direct_power(M: AModule, copies: int, label: str = "") -> AModule:
    f = M.field
    I = f.eye(copies)
    return AModule(M.algebra, [np.kron(I, x) for x in M.actions], label or f"{M.label}^{copies}",
                   check=False, dim=M.dim * copies)


class TensorProduct:
    """``M (x)_A N`` together with the projection from ``M (x)_k N``."""

    def __init__(self, M: AModule, N: AModule):
        _same_algebra(M, N)
        f = M.field
        m, n = M.dim, N.dim
        Im, In = f.eye(m), f.eye(n)
        rels = [f.reduce(np.kron(x, In) - np.kron(Im, y)) for x, y in zip(M.actions, N.actions)]
        if rels and m * n:
            self.relations = Subspace.span(f, np.concatenate([r.T for r in rels]), m * n)
        else:
            self.relations = Subspace.zero(f, m * n)
        self.proj, cols = self.relations.quotient_map()
        acts = [f.matmul(self.proj, np.kron(x, In)[:, cols]) for x in M.actions]
        self.module = AModule(M.algebra, acts, f"{M.label}(x){N.label}", check=False, dim=len(cols))
        self.left, self.right = M, N

    def pure(self, i: int, j: int) -> np.ndarray:
        """Coordinates of ``e_i (x) e_j``."""
        return self.proj[:, i * self.right.dim + j]


def tensor_over_A(M: AModule, N: AModule) -> AModule:
    return TensorProduct(M, N).module


class HomSpace:
    """``Hom_A(M, N)`` as intertwiners; elements are ``N.dim x M.dim`` matrices.

    Vectorisation is column-major: ``vec(F)[j * N.dim + i] = F[i, j]``.
    """

    def __init__(self, M: AModule, N: AModule):
        _same_algebra(M, N)
        f = M.field
        m, n = M.dim, N.dim
        Im, In = f.eye(m), f.eye(n)
        # F X - Y F = 0  <=>  (X^T (x) I_n - I_m (x) Y) vec(F) = 0
        eqs = [f.reduce(np.kron(x.T, In) - np.kron(Im, y)) for x, y in zip(M.actions, N.actions)]
        if eqs and m * n:
            self.space = Subspace.kernel(f, np.concatenate(eqs))
        else:
            self.space = Subspace.whole(f, m * n)
        acts = []
        for y in N.actions:
            imgs = f.matmul(self.space.basis, np.kron(Im, y).T)
            acts.append(np.ascontiguousarray(self.space.coords(imgs).T))
        self.module = AModule(M.algebra, acts, f"Hom({M.label},{N.label})", check=False,
                              dim=self.space.dim)
        self.source, self.target = M, N

    def matrix(self, k: int) -> np.ndarray:
        """The intertwiner for the ``k``-th basis element."""
        return self.space.basis[k].reshape(self.source.dim, self.target.dim).T

    def coords(self, F: np.ndarray) -> np.ndarray:
        vec = F.T.reshape(1, -1)
        return self.space.coords(vec)[0]


def hom_over_A(M: AModule, N: AModule) -> AModule:
    return HomSpace(M, N).module
