"""Objects built from a parsed input file, plus run configuration."""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Dict, Optional

from .algebra import LocalAlgebra, build_algebra, check_algebra
from .duality import canonical_module, dual_module
from .linalg import Field
from .modules import (
    AModule,
    check_module,
    direct_sum,
    free_module,
    from_presentation,
    hom_over_A,
    image_module,
    residue_module,
    tensor_over_A,
)
from .parser import ParsedInput, ParseError, parse_input
from .resolution import ComplexWindow, DEFAULT_LENGTH

CACHE_ENV = "MINMULT_CACHE_DIR"
BUILTIN = ("omega", "k", "R")


@dataclass
class SessionConfig:
    field: Optional[Field] = None
    length: int = DEFAULT_LENGTH
    bound: int = DEFAULT_LENGTH
    cache_dir: Optional[str] = None
    format: str = "human"

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("length must be at least 1")
        if self.bound < 1:
            raise ValueError("bound must be at least 1")
        if self.format not in ("human", "json"):
            raise ValueError("format must be 'human' or 'json'")
        if self.cache_dir is None:
            self.cache_dir = os.environ.get(CACHE_ENV) or None


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("minmult") / "data" / name))


def locate_input(name: str) -> Path:
    """A path on disk, or the name of a bundled example file."""
    p = Path(name)
    if p.exists():
        return p
    for cand in (name, name + ".ring"):
        b = bundled_path(cand)
        if b.exists():
            return b
    raise FileNotFoundError(f"no input file {name!r} (and no bundled example of that name)")


class Session:
    def __init__(self, parsed: ParsedInput, strict: bool = True):
        self.parsed = parsed
        self.strict = strict
        self._modules: Dict[str, AModule] = {}

    @classmethod
    def from_text(cls, text: str, field: Optional[Field] = None, params=None, strict: bool = True):
        return cls(parse_input(text, field, params), strict)

    @classmethod
    def from_file(cls, name: str, field: Optional[Field] = None, params=None, strict: bool = True):
        return cls.from_text(locate_input(name).read_text(), field, params, strict)

    @cached_property
    def algebra(self) -> LocalAlgebra:
        A = build_algebra(self.parsed.spec, strict=self.strict)
        check_algebra(A)
        return A

    def module(self, name: str) -> AModule:
        if name in self._modules:
            return self._modules[name]
        A = self.algebra
        decls = self.parsed.modules
        if name in decls:
            M = self._build(decls[name], set())
        elif name == "omega":
            M = canonical_module(A)
        elif name == "k":
            M = residue_module(A)
        elif name == "R":
            M = free_module(A, 1, "R")
        else:
            known = sorted(set(decls) | set(BUILTIN))
            raise KeyError(f"unknown module {name!r}; known: {', '.join(known)}")
        self._modules[name] = M
        return M

    def _build(self, decl, seen) -> AModule:
        if decl.name in seen:
            raise ParseError(f"module {decl.name} is defined in terms of itself", decl.line, 1)
        seen = seen | {decl.name}
        A = self.algebra

        def sub(n):
            if n in self.parsed.modules:
                if n not in self._modules:
                    self._modules[n] = self._build(self.parsed.modules[n], seen)
                return self._modules[n]
            return self.module(n)

        kind = decl.kind
        if kind == "image":
            M = image_module(A, decl.rows, decl.name)
        elif kind == "presented":
            rel = [[r[g] for r in decl.rows] for g in range(decl.gens)] if decl.rows else []
            M = from_presentation(A, rel, decl.gens, decl.name)
        elif kind == "free":
            M = free_module(A, int(decl.args[0]), decl.name)
        elif kind == "residue":
            M = residue_module(A, int(decl.args[0]), decl.name)
        elif kind == "canonical":
            M = canonical_module(A)
        elif kind == "dual":
            M = dual_module(sub(decl.args[0]), decl.name)
        elif kind == "sum":
            M = direct_sum(sub(decl.args[0]), sub(decl.args[1]), decl.name)
        elif kind == "tensor":
            M = tensor_over_A(sub(decl.args[0]), sub(decl.args[1]))
        elif kind == "hom":
            M = hom_over_A(sub(decl.args[0]), sub(decl.args[1]))
        else:
            raise ParseError(f"unknown module kind {kind!r}", decl.line, 1)
        M.label = decl.name
        check_module(M)
        return M

    def complex(self, name: str) -> ComplexWindow:
        if name not in self.parsed.complexes:
            raise KeyError(f"unknown complex {name!r}")
        decl = self.parsed.complexes[name]
        A = self.algebra
        maps = {n: [[A.element(e) for e in row] for row in rows] for n, rows in decl.maps.items()}
        return ComplexWindow(A, maps)
