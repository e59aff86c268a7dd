"""Artinian local algebras ``k[x_1..x_n] / (I + m^N)`` given by multiplication operators.

The quotient is built from a truncated Macaulay matrix: the rows are all
products ``u*g`` (``u`` a monomial, ``g`` a generator) with terms of degree
``>= N`` discarded, the columns are the monomials of degree ``< N`` in
ascending graded-lex order.  The non-pivot columns of the reduced matrix are
the standard monomials.  Because pivots are the *smallest* terms, normal
forms only ever rewrite a monomial in terms of larger ones, so the standard
monomials of degree ``>= j`` span ``m^j``; this works for inhomogeneous
ideals as well.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .linalg import Field, FieldMismatch, Subspace

Exponent = Tuple[int, ...]
# a polynomial is a tuple of (coefficient, exponent) terms
Polynomial = Tuple[Tuple[object, Exponent], ...]


class AlgebraError(ValueError):
    pass


def monomials_of_degree(n: int, deg: int) -> List[Exponent]:
    """All exponent vectors of length ``n`` and total degree ``deg``."""
    if n == 0:
        return [()] if deg == 0 else []
    out = []
    for combo in itertools.combinations_with_replacement(range(n), deg):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def grlex_key(e: Exponent):
    """Ascending graded-lex key with ``x1 > x2 > ... > xn``."""
    return (sum(e), e)


def display_key(e: Exponent):
    return (sum(e), tuple(-v for v in e))


def monomial_str(e: Exponent, names: Sequence[str]) -> str:
    parts = []
    for v, name in zip(e, names):
        if v == 1:
            parts.append(name)
        elif v > 1:
            parts.append(f"{name}^{v}")
    return "*".join(parts) if parts else "1"


def poly_str(poly: Polynomial, names: Sequence[str]) -> str:
    if not poly:
        return "0"
    terms = []
    for c, e in sorted(poly, key=lambda t: display_key(t[1])):
        m = monomial_str(e, names)
        if m == "1":
            terms.append(str(c))
        elif c == 1:
            terms.append(m)
        else:
            terms.append(f"{c}*{m}")
    return " + ".join(terms)


def normalize_poly(field: Field, terms) -> Polynomial:
    """Combine like terms, reduce coefficients into ``field`` and drop zeros."""
    acc: Dict[Exponent, object] = {}
    for c, e in terms:
        e = tuple(int(v) for v in e)
        acc[e] = field.scalar(acc.get(e, 0) + field.scalar(c))
    return tuple((c, e) for e, c in sorted(acc.items(), key=lambda t: grlex_key(t[0])) if c != 0)


@dataclass(frozen=True)
class PolySpec:
    """A presentation ``k[variables] / (generators) + m^nilpotency``.

    Generator terms of degree ``>= nilpotency`` are allowed; they vanish in
    the quotient.
    """

    field: Field
    variables: Tuple[str, ...]
    nilpotency: int
    generators: Tuple[Polynomial, ...] = ()

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise AlgebraError(f"variable names must be unique: {self.variables}")
        if self.nilpotency < 1:
            raise AlgebraError("nilpotency must be at least 1")
        n = len(self.variables)
        for g in self.generators:
            for c, e in g:
                if len(e) != n:
                    raise AlgebraError(f"exponent {e} does not match {n} variables")
                if sum(e) == 0 and c != 0:
                    raise AlgebraError("generators must lie in the maximal ideal (no constant terms)")


@dataclass(frozen=True, eq=False)
class LocalAlgebra:
    field: Field
    variables: Tuple[str, ...]
    nilpotency: int
    basis: Tuple[Exponent, ...]
    actions: Tuple[np.ndarray, ...]
    normal_forms: Dict[Exponent, np.ndarray] = dc_field(repr=False)
    spec: PolySpec | None = dc_field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def __repr__(self):
        return f"LocalAlgebra({self.field}, vars={list(self.variables)}, dim={self.dim}, N={self.nilpotency})"

    @cached_property
    def index(self) -> Dict[Exponent, int]:
        return {e: i for i, e in enumerate(self.basis)}

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([sum(e) for e in self.basis], dtype=np.int64)

    @cached_property
    def parents(self) -> List[Tuple[int, int]]:
        """For each basis monomial ``c != 1`` a pair ``(i, c')`` with ``c = x_i * c'``."""
        out = [(-1, -1)]
        for e in self.basis[1:]:
            for i, v in enumerate(e):
                if v:
                    prev = e[:i] + (v - 1,) + e[i + 1:]
                    if prev in self.index:
                        out.append((i, self.index[prev]))
                        break
            else:
                raise AlgebraError(f"standard monomials are not an order ideal at {e}")
        return out

    @cached_property
    def ops(self) -> np.ndarray:
        """``ops[c]`` is the matrix of multiplication by basis monomial ``c``."""
        d = self.dim
        f = self.field
        out = np.empty((d, d, d), dtype=f.dtype)
        out[0] = f.eye(d)
        for c in range(1, d):
            i, prev = self.parents[c]
            out[c] = f.matmul(self.actions[i], out[prev])
        return out

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(str(self.field).encode())
        h.update(repr((self.variables, self.nilpotency, self.basis)).encode())
        for a in self.actions:
            h.update(np.ascontiguousarray(a, dtype=object).astype(str).tobytes())
        return h.hexdigest()

    def one(self) -> np.ndarray:
        v = self.field.zeros(self.dim)
        v[0] = 1
        return v

    def element(self, poly: Polynomial) -> np.ndarray:
        """Coordinate vector of a polynomial in the standard-monomial basis."""
        v = self.field.zeros(self.dim)
        for c, e in poly:
            if sum(e) < self.nilpotency:
                v = self.field.reduce(v + self.field.scalar(c) * self.normal_forms[tuple(e)])
        return v

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.field.matmul(self.mult_matrix(a), b.reshape(-1, 1)).reshape(-1)

    def mult_matrix(self, a: np.ndarray) -> np.ndarray:
        """Matrix of multiplication by the element ``a``."""
        f = self.field
        d = self.dim
        flat = self.ops.reshape(d, d * d)
        return f.matmul(a.reshape(1, -1), flat).reshape(d, d)

    def evaluate(self, poly: Polynomial, actions: Sequence[np.ndarray]) -> np.ndarray:
        """Evaluate ``poly`` on a tuple of commuting matrices."""
        return evaluate_polynomial(self.field, poly, actions)

    def element_str(self, a: np.ndarray) -> str:
        terms = [(a[i], e) for i, e in enumerate(self.basis) if a[i] != 0]
        return poly_str(tuple(terms), self.variables)


def evaluate_polynomial(field: Field, poly: Polynomial, actions: Sequence[np.ndarray]) -> np.ndarray:
    dim = actions[0].shape[0] if actions else 1
    cache: Dict[Exponent, np.ndarray] = {}
    n = len(actions)

    def mono(e: Exponent) -> np.ndarray:
        if e in cache:
            return cache[e]
        if sum(e) == 0:
            m = field.eye(dim)
        else:
            i = next(j for j in range(n) if e[j])
            m = field.matmul(actions[i], mono(e[:i] + (e[i] - 1,) + e[i + 1:]))
        cache[e] = m
        return m

    out = field.zeros(dim, dim)
    for c, e in poly:
        out = field.reduce(out + field.scalar(c) * mono(tuple(e)))
    return out


def _macaulay_quotient(spec: PolySpec, nilpotency: int):
    f = spec.field
    n = len(spec.variables)
    monos = sorted(
        (e for d in range(nilpotency) for e in monomials_of_degree(n, d)), key=grlex_key
    )
    col = {e: i for i, e in enumerate(monos)}
    rows = []
    for g in spec.generators:
        g = [(c, e) for c, e in g if sum(e) < nilpotency]
        if not g:
            continue
        low = min(sum(e) for _, e in g)
        for u in monos:
            if sum(u) + low >= nilpotency:
                continue
            row = f.zeros(len(monos))
            for c, e in g:
                prod = tuple(a + b for a, b in zip(u, e))
                if sum(prod) < nilpotency:
                    row[col[prod]] = f.reduce(row[col[prod]] + f.scalar(c))
            rows.append(row)
    if rows:
        red, piv = f.rref(np.array(rows, dtype=f.dtype).reshape(len(rows), len(monos)))
    else:
        red, piv = f.zeros(0, len(monos)), []
    return monos, red, piv


def build_algebra(spec: PolySpec, strict: bool = False) -> LocalAlgebra:
    """Construct ``k[x] / (I + m^N)`` with explicit multiplication operators.

    With ``strict=True`` the ideal must already contain ``m^N``; this is
    checked by redoing the construction with ``N + 1`` and requiring that
    no standard monomial of degree ``N`` survives.
    """
    f = spec.field
    N = spec.nilpotency
    n = len(spec.variables)
    monos, red, piv = _macaulay_quotient(spec, N)
    pivset = set(piv)
    std = [j for j in range(len(monos)) if j not in pivset]
    basis = sorted((monos[j] for j in std), key=display_key)
    bindex = {e: i for i, e in enumerate(basis)}
    d = len(basis)
    if d == 0 or basis[0] != (0,) * n:
        raise AlgebraError("the ideal contains a unit; the quotient is zero")

    normal_forms: Dict[Exponent, np.ndarray] = {}
    for e in basis:
        v = f.zeros(d)
        v[bindex[e]] = 1
        normal_forms[e] = v
    std_pos = [bindex[monos[j]] for j in std]
    for r, j in enumerate(piv):
        v = f.zeros(d)
        for k, pos in zip(std, std_pos):
            if red[r, k] != 0:
                v[pos] = f.reduce(-red[r, k])
        normal_forms[monos[j]] = v

    actions = []
    for i in range(n):
        X = f.zeros(d, d)
        for b, e in enumerate(basis):
            prod = e[:i] + (e[i] + 1,) + e[i + 1:]
            if sum(prod) < N:
                X[:, b] = normal_forms[prod]
        actions.append(X)

    alg = LocalAlgebra(f, tuple(spec.variables), N, tuple(basis), tuple(actions), normal_forms, spec)
    check_algebra(alg)
    if strict:
        monos2, _, piv2 = _macaulay_quotient(spec, N + 1)
        surviving = [monos2[j] for j in range(len(monos2)) if j not in set(piv2) and sum(monos2[j]) == N]
        if surviving:
            names = ", ".join(monomial_str(e, spec.variables) for e in surviving[:5])
            raise AlgebraError(f"strict mode: the ideal does not contain m^{N} (survivors: {names})")
    return alg


def check_algebra(alg: LocalAlgebra) -> None:
    """Assert commutation, nilpotency and generator annihilation."""
    f = alg.field
    X = alg.actions
    for i in range(len(X)):
        for j in range(i + 1, len(X)):
            if not np.all(f.matmul(X[i], X[j]) == f.matmul(X[j], X[i])):
                raise AlgebraError(f"actions of {alg.variables[i]} and {alg.variables[j]} do not commute")
    if X:
        sub = Subspace.whole(f, alg.dim)
        for _ in range(alg.nilpotency):
            imgs = [f.matmul(sub.basis, x.T) for x in X]
            sub = Subspace.span(f, np.concatenate(imgs), alg.dim)
        if sub.dim:
            raise AlgebraError("m^N is not zero")
    if alg.spec is not None and X:
        for g in alg.spec.generators:
            if np.any(evaluate_polynomial(f, g, X) != 0):
                raise AlgebraError(f"generator {poly_str(g, alg.variables)} does not act as zero")


@dataclass(frozen=True)
class AlgebraInvariants:
    length: int
    embedding_dimension: int
    hilbert_function: Tuple[int, ...]
    socle_dimension: int
    multiplicity: int
    is_gorenstein: bool
    has_minimal_multiplicity: bool

    @property
    def type(self) -> int:
        return self.socle_dimension


def ideal_power_subspace(alg: LocalAlgebra, j: int) -> Subspace:
    """``m^j`` as a subspace of ``A`` (row vectors in the standard basis)."""
    f = alg.field
    sub = Subspace.whole(f, alg.dim)
    for _ in range(j):
        if sub.dim == 0 or not alg.actions:
            return Subspace.zero(f, alg.dim)
        sub = Subspace.span(f, np.concatenate([f.matmul(sub.basis, x.T) for x in alg.actions]), alg.dim)
    return sub


def socle_subspace(alg: LocalAlgebra) -> Subspace:
    f = alg.field
    if not alg.actions:
        return Subspace.whole(f, alg.dim)
    return Subspace.kernel(f, np.concatenate(alg.actions))


def invariants(alg: LocalAlgebra) -> AlgebraInvariants:
    powers = []
    j = 0
    while True:
        s = ideal_power_subspace(alg, j)
        powers.append(s.dim)
        if s.dim == 0:
            break
        j += 1
    hilbert = tuple(powers[i] - powers[i + 1] for i in range(len(powers) - 1))
    e = hilbert[1] if len(hilbert) > 1 else 0
    soc = socle_subspace(alg).dim
    return AlgebraInvariants(
        length=alg.dim,
        embedding_dimension=e,
        hilbert_function=hilbert,
        socle_dimension=soc,
        multiplicity=alg.dim,
        is_gorenstein=soc == 1,
        has_minimal_multiplicity=alg.dim == e + 1,
    )


def tensor_algebra(a: LocalAlgebra, b: LocalAlgebra) -> LocalAlgebra:
    """``A (x)_k B``, a local algebra with nilpotency ``N_A + N_B - 1``."""
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")
    f = a.field
    names_b = list(b.variables)
    for i, name in enumerate(names_b):
        while name in a.variables or name in names_b[:i]:
            name = name + "'"
        names_b[i] = name
    variables = tuple(a.variables) + tuple(names_b)
    N = a.nilpotency + b.nilpotency - 1
    basis = tuple(ea + eb for ea in a.basis for eb in b.basis)
    ia, ib = f.eye(a.dim), f.eye(b.dim)
    actions = tuple(np.kron(x, ib) for x in a.actions) + tuple(np.kron(ia, y) for y in b.actions)
    na = a.nvars
    normal_forms = {}
    for d in range(N):
        for e in monomials_of_degree(len(variables), d):
            ea, eb = e[:na], e[na:]
            if sum(ea) < a.nilpotency and sum(eb) < b.nilpotency:
                normal_forms[e] = np.kron(a.normal_forms[ea], b.normal_forms[eb])
            else:
                normal_forms[e] = f.zeros(len(basis))
    zb = (0,) * b.nvars
    za = (0,) * na
    gens = [tuple((c, e + zb) for c, e in g) for g in (a.spec.generators if a.spec else ())]
    gens += [tuple((c, za + e) for c, e in g) for g in (b.spec.generators if b.spec else ())]
    gens += [((1, e + zb),) for e in monomials_of_degree(na, a.nilpotency)]
    gens += [((1, za + e),) for e in monomials_of_degree(b.nvars, b.nilpotency)]
    spec = PolySpec(f, variables, N, tuple(gens))
    alg = LocalAlgebra(f, variables, N, basis, actions, normal_forms, spec)
    check_algebra(alg)
    return alg
