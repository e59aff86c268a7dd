"""Minimal free resolutions, Betti numbers, Tor and Ext over an artinian local algebra.

Free modules ``A^b`` are handled in ambient coordinates: index ``g * dim(A) + c``
is the coefficient of basis monomial ``c`` in component ``g``.  A differential
``d_i : A^{b_i} -> A^{b_{i-1}}`` is stored by the images of the free
generators (one ambient column per generator); its ``k``-linear matrix is
obtained by multiplying those columns by every standard monomial.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import LocalAlgebra
from .linalg import Field, Subspace
from .modules import (
    AModule,
    generator_vectors,
    matrix_columns,
    residue_module,
    subspace_module,
)

log = logging.getLogger(__name__)

DEFAULT_LENGTH = 6


class ResolutionError(RuntimeError):
    pass


# free-module helpers

def free_apply_var(A: LocalAlgebra, i: int, vecs: np.ndarray) -> np.ndarray:
    """Multiply ambient columns of ``A^b`` by the variable ``x_i``."""
    return np.ascontiguousarray(free_apply_var_rows(A, i, np.ascontiguousarray(vecs.T)).T)


def free_apply_var_rows(A: LocalAlgebra, i: int, rows: np.ndarray) -> np.ndarray:
    """Multiply ambient row vectors of ``A^b`` by the variable ``x_i``."""
    d = A.dim
    k, n = rows.shape
    if k == 0 or n == 0:
        return rows.copy()
    out = A.field.matmul(rows.reshape(k * (n // d), d), np.ascontiguousarray(A.actions[i].T))
    return out.reshape(k, n)


def free_apply_basis(A: LocalAlgebra, vecs: np.ndarray) -> np.ndarray:
    """``k``-matrix of the map ``A^k -> A^b`` sending generator ``j`` to column ``j``.

    Column ``j * dim(A) + c`` is ``(basis monomial c) * vecs[:, j]``.
    """
    f = A.field
    d = A.dim
    n, k = vecs.shape
    b = n // d if d else 0
    blocks = vecs.reshape(b, d, k).transpose(1, 0, 2).reshape(d, b * k)
    flat = A.ops.reshape(d * d, d)  # row (c, x) , col y
    out = f.matmul(flat, blocks)    # (c, x) x (g, j)
    out = out.reshape(d, d, b, k)   # c, x, g, j
    return np.ascontiguousarray(out.transpose(2, 1, 3, 0).reshape(n, k * d))


def element_blocks(A: LocalAlgebra, cols: np.ndarray, N: AModule) -> np.ndarray:
    """Blocks ``out[g, j] = action on N of the (g, j) entry`` of a matrix over ``A``."""
    f = A.field
    d = A.dim
    n, k = cols.shape
    b = n // d
    coeffs = cols.reshape(b, d, k).transpose(0, 2, 1).reshape(b * k, d)
    acts = f.matmul(coeffs, N.ops.reshape(d, N.dim * N.dim))
    return acts.reshape(b, k, N.dim, N.dim)


def tensor_matrix(A: LocalAlgebra, cols: np.ndarray, N: AModule) -> np.ndarray:
    """Matrix of ``d (x) N : N^k -> N^b`` for a differential given by ambient columns."""
    blocks = element_blocks(A, cols, N)
    b, k, n, _ = blocks.shape
    return np.ascontiguousarray(blocks.transpose(0, 2, 1, 3).reshape(b * n, k * n))


def hom_matrix(A: LocalAlgebra, cols: np.ndarray, N: AModule) -> np.ndarray:
    """Matrix of ``Hom(d, N) : N^b -> N^k``, ``phi -> phi o d``."""
    blocks = element_blocks(A, cols, N)
    b, k, n, _ = blocks.shape
    return np.ascontiguousarray(blocks.transpose(1, 2, 0, 3).reshape(k * n, b * n))


def _rank(field: Field, m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    return len(field.rref(m)[1])


def minimal_generators_of(A: LocalAlgebra, K: Subspace) -> np.ndarray:
    """Ambient columns lifting a basis of ``K / mK`` for a submodule ``K`` of ``A^b``.

    The lifts are basis vectors of ``K`` chosen at the non-pivot coordinates
    of ``mK`` (deterministic pivot order).
    """
    f = A.field
    if K.dim == 0:
        return f.zeros(K.ambient, 0)
    imgs = [K.coords(free_apply_var_rows(A, i, K.basis)) for i in range(A.nvars)]
    if imgs:
        mk = Subspace.span(f, np.concatenate(imgs), K.dim)
        keep = mk.complement_cols()
    else:
        keep = np.arange(K.dim)
    return np.ascontiguousarray(K.basis[keep].T)


@dataclass
class FreeResolution:
    """A minimal free resolution ``... -> A^{b_1} -> A^{b_0} -> M`` computed to some length.

    ``generators[0]`` holds the images in ``M`` of the free generators of
    ``F_0``; ``generators[i]`` (``i >= 1``) holds the images in ``F_{i-1}``
    of the generators of ``F_i``, i.e. the columns of ``d_i``.
    """

    module: AModule
    betti: List[int] = dc_field(default_factory=list)
    generators: List[np.ndarray] = dc_field(default_factory=list)
    _kernel: Optional[Subspace] = None  # kernel of the last differential
    _kmats: Dict[int, np.ndarray] = dc_field(default_factory=dict)

    @property
    def algebra(self) -> LocalAlgebra:
        return self.module.algebra

    @property
    def length(self) -> int:
        return len(self.betti) - 1

    def augmentation(self) -> np.ndarray:
        """``k``-matrix of ``F_0 -> M``."""
        M = self.module
        g = self.generators[0]
        d = self.algebra.dim
        imgs = M.apply_basis(g)  # c, m, j
        return np.ascontiguousarray(imgs.transpose(1, 2, 0).reshape(M.dim, g.shape[1] * d))

    def kmatrix(self, i: int) -> np.ndarray:
        """``k``-matrix of ``d_i`` (``i >= 1``); ``i = 0`` gives the augmentation."""
        if i not in self._kmats:
            if i == 0:
                self._kmats[0] = self.augmentation()
            else:
                self._kmats[i] = free_apply_basis(self.algebra, self.generators[i])
        return self._kmats[i]

    def differential(self, i: int) -> List[List[np.ndarray]]:
        """``d_i`` as a ``b_{i-1} x b_i`` matrix of algebra elements (coordinate vectors)."""
        d = self.algebra.dim
        g = self.generators[i]
        rows, cols = self.betti[i - 1], self.betti[i]
        blocks = g.reshape(rows, d, cols)
        return [[blocks[r, :, c] for c in range(cols)] for r in range(rows)]

    def extend(self, length: int) -> "FreeResolution":
        A = self.algebra
        f = A.field
        if not self.betti:
            M = self.module
            g0 = generator_vectors(M)
            self.betti.append(g0.shape[1])
            self.generators.append(g0)
            self._kernel = Subspace.kernel(f, self.kmatrix(0)) if M.dim else Subspace.whole(
                f, g0.shape[1] * A.dim)
        while self.length < length:
            i = self.length + 1
            gens = minimal_generators_of(A, self._kernel)
            self.betti.append(gens.shape[1])
            self.generators.append(gens)
            if self.length < length:
                self._kernel = Subspace.kernel(f, self.kmatrix(i))
            else:
                self._kernel = None
            # the previous k-matrix is no longer needed for extension
            self._kmats.pop(i - 2, None)
            log.debug("resolution step %d: betti %d", i, gens.shape[1])
        return self

    def ensure_kernel(self) -> None:
        if self._kernel is None and self.betti:
            self._kernel = Subspace.kernel(self.algebra.field, self.kmatrix(self.length))

    def truncate(self, length: int) -> "FreeResolution":
        out = FreeResolution(self.module, self.betti[: length + 1], self.generators[: length + 1])
        return out

    # verification

    def check(self, exactness: bool = True) -> Dict[str, bool]:
        """Verify ``d^2 = 0``, minimality and (optionally) exactness by rank counts."""
        A = self.algebra
        f = A.field
        d = A.dim
        res = {"d_squared_zero": True, "minimal": True, "exact": True}
        for i in range(1, self.length + 1):
            g = self.generators[i]
            if g.size and np.any(g.reshape(self.betti[i - 1], d, self.betti[i])[:, 0, :] != 0):
                res["minimal"] = False
            prev = self.kmatrix(i - 1)
            if np.any(f.matmul(prev, g) != 0):
                res["d_squared_zero"] = False
        if exactness:
            M = self.module
            ranks = [_rank(f, self.kmatrix(i)) for i in range(self.length + 1)]
            if ranks[0] != M.dim:
                res["exact"] = False
            for i in range(self.length):
                # exact at F_i: dim ker d_i = rank d_{i+1}
                if self.betti[i] * d - ranks[i] != ranks[i + 1]:
                    res["exact"] = False
        return res


def _fingerprint_key(M: AModule) -> Tuple[str, str]:
    return (M.algebra.fingerprint, M.fingerprint)


class ResolutionCache:
    """In-memory cache of resolutions; lookups by content fingerprint, extended on demand."""

    def __init__(self):
        self._store: Dict[Tuple[str, str], FreeResolution] = {}
        self._lock = threading.Lock()

    def get(self, M: AModule, length: int) -> FreeResolution:
        key = _fingerprint_key(M)
        with self._lock:
            res = self._store.get(key)
            if res is None:
                res = FreeResolution(M)
                self._store[key] = res
        if res.length < length:
            if res._kernel is None:
                res.ensure_kernel()
            res.extend(length)
        return res

    def known_length(self, M: AModule) -> int:
        res = self._store.get(_fingerprint_key(M))
        return res.length if res is not None else -1

    def put(self, res: FreeResolution) -> None:
        with self._lock:
            self._store[_fingerprint_key(res.module)] = res

    def clear(self) -> None:
        with self._lock:
            self._store.clear()


CACHE = ResolutionCache()


def minimal_free_resolution(M: AModule, length: int = DEFAULT_LENGTH, cache: bool = True) -> FreeResolution:
    if length < 0:
        raise ValueError("length must be nonnegative")
    if not cache:
        return FreeResolution(M).extend(length)
    res = CACHE.get(M, length)
    return res.truncate(length) if res.length > length else res


# Betti numbers by splitting off residue-field summands

def first_syzygy(M: AModule) -> AModule:
    """The kernel of a minimal free cover ``A^{b_0} -> M`` as a module."""
    res = FreeResolution(M)
    res.extend(0)
    return _kernel_module(M, res._kernel)


def _kernel_module(M: AModule, K: Subspace) -> AModule:
    A = M.algebra
    F_actions = []
    for i in range(A.nvars):
        imgs = free_apply_var_rows(A, i, K.basis)
        F_actions.append(np.ascontiguousarray(K.coords(imgs).T))
    return AModule(A, F_actions, f"syz({M.label})", check=False, dim=K.dim)


def split_residue_summands(M: AModule) -> Tuple[int, AModule]:
    """Write ``M = k^c (+) M'`` with ``M'`` free of ``k`` summands; returns ``(c, M')``.

    ``k`` is a summand exactly when some socle element lies outside ``mM``.
    """
    f = M.field
    if M.dim == 0:
        return 0, M
    from .modules import socle
    soc = socle(M)
    rad = M.radical
    both = soc + rad
    c = both.dim - rad.dim
    if c == 0:
        return 0, M
    keep = both.complement_cols()
    gens = f.zeros(M.dim, len(keep))
    for j, col in enumerate(keep):
        gens[col, j] = 1
    from .modules import submodule
    rest, _ = submodule(M, gens, M.label + "'")
    if rest.dim != M.dim - c:
        raise ResolutionError("residue-field splitting produced an inconsistent complement")
    return c, rest


class _ResidueBetti:
    """Betti numbers of ``k`` per algebra, grown on demand."""

    def __init__(self):
        self._store: Dict[str, List[int]] = {}

    def get(self, A: LocalAlgebra, length: int) -> List[int]:
        known = self._store.get(A.fingerprint, [])
        if len(known) > length:
            return known[: length + 1]
        if A.nvars == 0:
            out = [1] + [0] * length
        else:
            out = [1] + _split_betti(first_syzygy(residue_module(A)), length - 1)
        self._store[A.fingerprint] = out
        return out


_RESIDUE = _ResidueBetti()


def _split_betti(M: AModule, length: int) -> List[int]:
    if length < 0:
        return []
    A = M.algebra
    c, rest = split_residue_summands(M)
    out = [0] * (length + 1)
    if c:
        kb = _RESIDUE.get(A, length)
        out = [c * v for v in kb]
    if rest.dim:
        b0 = rest.dim - rest.radical.dim
        out[0] += b0
        if length > 0:
            tail = _split_betti(first_syzygy(rest), length - 1)
            for i, v in enumerate(tail):
                out[i + 1] += v
    return out


def _split_tor(M: AModule, N: AModule, length: int) -> List[int]:
    """``Tor_0..Tor_length`` by dimension shifting along first syzygies.

    For a minimal cover ``0 -> K -> F -> M -> 0``: ``Tor_i(M, N) = Tor_{i-1}(K, N)``
    when ``i >= 2`` and ``dim Tor_1(M, N) = dim(K (x) N) - rank(d_1 (x) N)``.
    """
    if length < 0:
        return []
    n = N.dim
    c, rest = split_residue_summands(M)
    out = [0] * (length + 1)
    if c:
        out = [c * v for v in betti_numbers(N, length)]
    if not rest.dim or not n:
        return out
    b0, r1, K = _cover_step(rest, N, tensor_matrix, length > 0)
    out[0] += b0 * n - r1
    if length > 0:
        tail = _split_tor(K, N, length - 1)
        out[1] += tail[0] - r1
        for i in range(1, len(tail)):
            out[i + 1] += tail[i]
    return out


def _cover_step(M: AModule, N: AModule, pairing, syzygy: bool = True) -> Tuple[int, int, Optional[AModule]]:
    """``(beta_0(M), rank of d_1 paired with N, first syzygy)`` for a minimal cover.

    The syzygy's action matrices are the largest objects here; pass
    ``syzygy=False`` when only the rank is needed.
    """
    A = M.algebra
    res = FreeResolution(M)
    res.extend(0)
    K = res._kernel
    d1 = minimal_generators_of(A, K)
    r1 = _rank(A.field, pairing(A, d1, N)) if d1.shape[1] else 0
    return res.betti[0], r1, (_kernel_module(M, K) if syzygy else None)


def _split_ext(M: AModule, N: AModule, length: int, memo: Dict[int, List[int]]) -> List[int]:
    """``Ext^0..Ext^length`` by dimension shifting, peeling ``k`` summands.

    ``Ext^i(M, N) = Ext^{i-1}(K, N)`` for ``i >= 2`` and
    ``dim Ext^1(M, N) = dim Hom(K, N) - rank Hom(d_1, N)``.  ``Ext(k, N)``
    itself is obtained from the splitting of ``m = syz(k)`` and memoised by length.
    """
    if length < 0 or not N.dim:
        return [0] * (length + 1)
    c, rest = split_residue_summands(M)
    out = [0] * (length + 1)
    if c:
        out = [c * v for v in _ext_residue(M.algebra, N, length, memo)]
    if rest.dim:
        b0, r1, K = _cover_step(rest, N, hom_matrix, length > 0)
        out[0] += b0 * N.dim - r1
        if length > 0:
            tail = _split_ext(K, N, length - 1, memo)
            out[1] += tail[0] - r1
            for i in range(1, len(tail)):
                out[i + 1] += tail[i]
    return out


def _ext_residue(A: LocalAlgebra, N: AModule, length: int, memo: Dict[int, List[int]]) -> List[int]:
    if length in memo:
        return memo[length]
    k = residue_module(A)
    if A.nvars == 0:
        out = [N.dim] + [0] * length
    else:
        b0, r1, K = _cover_step(k, N, hom_matrix, length > 0)
        out = [N.dim - r1]
        if length > 0:
            c, rest = split_residue_summands(K)
            tail = [c * v for v in _ext_residue(A, N, length - 1, memo)]
            if rest.dim:
                tail = [a + b for a, b in zip(tail, _split_ext(rest, N, length - 1, memo))]
            out.append(tail[0] - r1)
            out.extend(tail[1:])
    memo[length] = out
    return out


def betti_numbers(M: AModule, length: int = DEFAULT_LENGTH, method: str = "split") -> List[int]:
    """``[beta_0(M), ..., beta_length(M)]``.

    ``method="split"`` peels ``k`` summands off each syzygy and reuses the
    Betti numbers of ``k``; ``method="resolution"`` reads them off an explicit
    minimal free resolution.
    """
    if method == "resolution":
        return list(minimal_free_resolution(M, length).betti[: length + 1])
    if method != "split":
        raise ValueError(f"unknown method {method!r}")
    return _split_betti(M, length)


# Tor and Ext

def tor(M: AModule, N: AModule, length: int = DEFAULT_LENGTH, start: int = 0,
        split: bool = True) -> List[int]:
    """``dim_k Tor_i(M, N)`` for ``start <= i <= length``, from a resolution of ``M``.

    With ``split``, ``k`` summands of ``M`` are peeled off first:
    ``Tor_i(k, N)`` has dimension ``beta_i(N)``, so only the rest is resolved.
    """
    if split:
        return _split_tor(M, N, length)[start:]
    A = M.algebra
    f = A.field
    res = minimal_free_resolution(M, length + 1)
    n = N.dim
    ranks = [0]
    for i in range(1, length + 2):
        ranks.append(_rank(f, tensor_matrix(A, res.generators[i], N)) if n else 0)
    out = []
    for i in range(start, length + 1):
        out.append(res.betti[i] * n - ranks[i] - ranks[i + 1])
    return out


def ext(M: AModule, N: AModule, length: int = DEFAULT_LENGTH, start: int = 0,
        split: bool = True) -> List[int]:
    """``dim_k Ext^i(M, N)`` for ``start <= i <= length``, from ``Hom(resolution of M, N)``.

    With ``split`` the resolution is never built in full: see ``_split_ext``.
    """
    if split:
        return _split_ext(M, N, length, {})[start:]
    A = M.algebra
    f = A.field
    res = minimal_free_resolution(M, length + 1)
    n = N.dim
    ranks = [0]
    for i in range(1, length + 2):
        ranks.append(_rank(f, hom_matrix(A, res.generators[i], N)) if n else 0)
    return [res.betti[i] * n - ranks[i] - ranks[i + 1] for i in range(start, length + 1)]


# complexes

@dataclass
class ComplexWindow:
    """Matrices over ``A`` indexed by ``start..stop``; ``d_n : A^{r_n} -> A^{r_{n-1}}``.

    ``maps[n]`` is a list of rows, each entry a coordinate vector in ``A``.
    """

    algebra: LocalAlgebra
    maps: Dict[int, Sequence[Sequence[np.ndarray]]]

    @property
    def indices(self) -> List[int]:
        return sorted(self.maps)

    def shape(self, n: int) -> Tuple[int, int]:
        rows = self.maps[n]
        return len(rows), (len(rows[0]) if rows else 0)

    def columns(self, n: int) -> np.ndarray:
        return matrix_columns(self.algebra, self.maps[n])

    def transpose_columns(self, n: int) -> np.ndarray:
        rows = self.maps[n]
        r, c = self.shape(n)
        return matrix_columns(self.algebra, [[rows[i][j] for i in range(r)] for j in range(c)])


class NonComposableWindow(ValueError):
    pass


def check_complete_resolution(window: ComplexWindow) -> Dict:
    """Exactness of ``G`` and of ``Hom(G, A)`` at every interior position of the window."""
    A = window.algebra
    f = A.field
    idx = window.indices
    if idx != list(range(idx[0], idx[-1] + 1)):
        raise NonComposableWindow("window indices must be consecutive")
    for n in idx[:-1]:
        # d_n o d_{n+1}
        r_n, c_n = window.shape(n)
        r_next, c_next = window.shape(n + 1)
        if c_n != r_next:
            raise NonComposableWindow(f"d_{n} has {c_n} columns but d_{n + 1} has {r_next} rows")
    kmat = {n: free_apply_basis(A, window.columns(n)) for n in idx}
    kdual = {n: free_apply_basis(A, window.transpose_columns(n)) for n in idx}
    composable = True
    for n in idx[:-1]:
        if np.any(f.matmul(kmat[n], window.columns(n + 1)) != 0):
            composable = False
    if not composable:
        raise NonComposableWindow("consecutive maps do not compose to zero")
    rank = {n: _rank(f, kmat[n]) for n in idx}
    rank_dual = {n: _rank(f, kdual[n]) for n in idx}
    homology, cohomology = {}, {}
    for n in idx[:-1]:
        # position between d_{n+1} and d_n: the source of d_n
        size = window.shape(n)[1] * A.dim
        homology[n] = size - rank[n] - rank[n + 1]
        cohomology[n] = size - rank_dual[n] - rank_dual[n + 1]
    exact = all(v == 0 for v in homology.values())
    exact_dual = all(v == 0 for v in cohomology.values())
    return {
        "positions": [n for n in idx[:-1]],
        "homology": homology,
        "dual_homology": cohomology,
        "exact": exact,
        "dual_exact": exact_dual,
        "verdict": exact and exact_dual,
    }
