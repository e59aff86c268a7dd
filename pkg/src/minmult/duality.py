"""Matlis duality, the canonical module and the Auslander and Bass class checks.

For an artinian ``k``-algebra the injective hull of ``k`` is ``A^v = Hom_k(A, k)``,
so the Matlis dual of a finite-length module is its contragredient: the dual
space with transposed actions.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional

import numpy as np

from .algebra import LocalAlgebra, socle_subspace
from .modules import (
    AModule,
    HomSpace,
    ModuleMap,
    TensorProduct,
    free_module,
    generator_vectors,
    minimal_generators,
    residue_module,
    socle,
)
from .resolution import DEFAULT_LENGTH, betti_numbers, ext, tor


class CanonicalModuleError(RuntimeError):
    """The computed ``A^v`` failed the ``Ext(k, omega)`` test; an engine bug."""


@dataclass
class DualityPair:
    module: AModule
    dual: AModule
    biduality: ModuleMap

    @property
    def biduality_ok(self) -> bool:
        return self.biduality.intertwines() and self.biduality.is_bijective()


def dual_module(M: AModule, label: str = "") -> AModule:
    acts = [np.ascontiguousarray(x.T) for x in M.actions]
    return AModule(M.algebra, acts, label or f"{M.label}^v", check=False, dim=M.dim)


def matlis_dual(M: AModule) -> DualityPair:
    """``M^v`` with the biduality map ``M -> M^vv``.

    In the dual basis of the dual basis the evaluation map ``m -> (phi -> phi(m))``
    is the identity matrix; it is checked to intertwine the actions.
    """
    D = dual_module(M)
    DD = dual_module(D, f"{M.label}^vv")
    bid = ModuleMap(M, DD, M.field.eye(M.dim))
    pair = DualityPair(M, D, bid)
    if not pair.biduality_ok:
        raise CanonicalModuleError("biduality map is not an isomorphism")
    return pair


def canonical_module(A: LocalAlgebra, verify: bool = False, bound: int = 4) -> AModule:
    """``omega = A^v``; with ``verify`` checks ``Ext^i(k, omega) = k, 0, 0, ...`` up to ``bound``."""
    omega = dual_module(free_module(A, 1, "A"), "omega")
    if verify:
        dims = ext(residue_module(A), omega, bound)
        if dims != [1] + [0] * bound:
            raise CanonicalModuleError(f"Ext(k, omega) = {dims}")
    return omega


def canonical_criterion(A: LocalAlgebra, bound: int = 4) -> List[int]:
    """``dim Ext^i(k, omega)`` for ``0 <= i <= bound``."""
    return ext(residue_module(A), canonical_module(A), bound)


def type_of(A: LocalAlgebra) -> int:
    return socle_subspace(A).dim


def gorenstein_isomorphism(A: LocalAlgebra, omega: Optional[AModule] = None) -> Optional[ModuleMap]:
    """An explicit isomorphism ``A -> omega`` when ``omega`` is cyclic of the right length."""
    omega = omega or canonical_module(A)
    if omega.dim != A.dim or minimal_generators(omega) != 1:
        return None
    g = generator_vectors(omega)
    mat = omega.apply_basis(g)[:, :, 0].T  # column c = (monomial c) * g
    phi = ModuleMap(free_module(A, 1, "A"), omega, np.ascontiguousarray(mat))
    if phi.intertwines() and phi.is_bijective():
        return phi
    return None


def is_gorenstein_module_test(A: LocalAlgebra, length: int = 4) -> Dict:
    """Gorenstein via the Betti lists of ``omega`` and ``A`` and via an explicit isomorphism."""
    omega = canonical_module(A)
    b_omega = betti_numbers(omega, length)
    b_A = [1] + [0] * length
    iso = gorenstein_isomorphism(A, omega)
    return {
        "betti_omega": b_omega,
        "betti_match": b_omega == b_A,
        "isomorphism_found": iso is not None,
        "type": type_of(A),
    }


# the natural maps

def xi_map(M: AModule, omega: Optional[AModule] = None) -> ModuleMap:
    """``xi_M : M -> Hom(omega, omega (x) M)``, ``m -> (x -> x (x) m)``."""
    A = M.algebra
    omega = omega or canonical_module(A)
    T = TensorProduct(omega, M)
    H = HomSpace(omega, T.module)
    cols = []
    for b in range(M.dim):
        F = np.stack([T.pure(a, b) for a in range(omega.dim)], axis=1)
        cols.append(H.coords(F))
    f = M.field
    mat = np.stack(cols, axis=1) if cols else f.zeros(H.module.dim, 0)
    return ModuleMap(M, H.module, np.ascontiguousarray(mat))


def gamma_map(M: AModule, omega: Optional[AModule] = None) -> ModuleMap:
    """``gamma_M : omega (x) Hom(omega, M) -> M``, ``x (x) psi -> psi(x)``."""
    A = M.algebra
    f = M.field
    omega = omega or canonical_module(A)
    H = HomSpace(omega, M)
    T = TensorProduct(omega, H.module)
    big = f.zeros(M.dim, omega.dim * H.module.dim)
    for k in range(H.module.dim):
        psi = H.matrix(k)
        for a in range(omega.dim):
            big[:, a * H.module.dim + k] = psi[:, a]
    # the quotient basis of the tensor product is the set of unit vectors at `cols`
    _, cols = T.relations.quotient_map()
    return ModuleMap(T.module, M, np.ascontiguousarray(big[:, cols]))


@dataclass
class ClassReport:
    cls: str
    bound: int
    bijective: bool
    tor_dims: List[int] = dc_field(default_factory=list)
    ext_dims: List[int] = dc_field(default_factory=list)

    @property
    def tor_vanishing(self) -> List[bool]:
        return [d == 0 for d in self.tor_dims]

    @property
    def ext_vanishing(self) -> List[bool]:
        return [d == 0 for d in self.ext_dims]

    @property
    def member(self) -> bool:
        return self.bijective and all(self.tor_vanishing) and all(self.ext_vanishing)

    @property
    def verdict(self) -> str:
        return "member_to_bound" if self.member else "not_member"

    def first_failure(self) -> Optional[str]:
        if not self.bijective:
            return "natural map not bijective"
        for i, d in enumerate(self.tor_dims, 1):
            if d:
                return f"Tor_{i} has dimension {d}"
        for i, d in enumerate(self.ext_dims, 1):
            if d:
                return f"Ext^{i} has dimension {d}"
        return None

    def as_dict(self) -> Dict:
        return {
            "class": self.cls,
            "bound": self.bound,
            "natural_map_bijective": self.bijective,
            "tor_dims": self.tor_dims,
            "ext_dims": self.ext_dims,
            "verdict": self.verdict,
        }


def ext_dual_route(N: AModule, M: AModule, length: int, start: int = 0) -> List[int]:
    """``dim Ext^i(N, M)`` as ``dim Tor_i(N, M^v)``, resolving ``N`` and tensoring."""
    return tor(N, dual_module(M), length, start)


def tor_from_right(M: AModule, N: AModule, length: int, start: int = 0) -> List[int]:
    """``dim Tor_i(M, N)`` computed from a resolution of ``N``."""
    return tor(N, M, length, start)


def auslander_class_check(M: AModule, bound: int = DEFAULT_LENGTH, omega: Optional[AModule] = None) -> ClassReport:
    """Truncated test of ``M`` in the Auslander class.

    ``Tor_i(omega, M)`` is computed from a resolution of ``M``; ``Ext^i(omega, omega (x) M)``
    is computed as ``Tor_i(omega (x) M)^v, omega)`` so that ``omega`` is never resolved.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    omega = omega or canonical_module(M.algebra)
    xi = xi_map(M, omega)
    tors = tor(M, omega, bound, start=1)
    X = TensorProduct(omega, M).module
    exts = tor(dual_module(X), omega, bound, start=1)
    return ClassReport("Auslander", bound, xi.is_bijective(), tors, exts)


def bass_class_check(M: AModule, bound: int = DEFAULT_LENGTH, omega: Optional[AModule] = None) -> ClassReport:
    """Truncated test of ``M`` in the Bass class.

    ``Ext^i(omega, M)`` is computed as ``Tor_i(M^v, omega)``;
    ``Tor_i(omega, Hom(omega, M))`` from a resolution of ``Hom(omega, M)``.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    omega = omega or canonical_module(M.algebra)
    gamma = gamma_map(M, omega)
    exts = tor(dual_module(M), omega, bound, start=1)
    H = HomSpace(omega, M).module
    tors = tor(H, omega, bound, start=1)
    return ClassReport("Bass", bound, gamma.is_bijective(), tors, exts)


def duality_correspondence_check(N: AModule, M: AModule, bound: int = 4, classes: bool = True) -> Dict:
    """``dim Tor_i(N, M^v) = dim Ext^i(N, M)`` and ``M in A(S) <=> M^v in B(S)`` to the bound."""
    tors = tor(N, dual_module(M), bound)
    exts = ext(N, M, bound)
    out = {"tor_dims": tors, "ext_dims": exts, "dims_equal": tors == exts}
    if classes:
        a = auslander_class_check(M, bound)
        b = bass_class_check(dual_module(M), bound)
        out["auslander"] = a.verdict
        out["bass_of_dual"] = b.verdict
        out["classes_agree"] = a.member == b.member
    out["ok"] = out["dims_equal"] and out.get("classes_agree", True)
    return out


def radical_square_zero(M: AModule) -> bool:
    f = M.field
    return all(not np.any(f.matmul(x, y)) for x in M.actions for y in M.actions)


def socle_top_duality(M: AModule) -> bool:
    """``beta_0(M) = dim socle(M^v)``."""
    return minimal_generators(M) == socle(dual_module(M)).dim
