"""Line-oriented input format for rings, modules, complexes and tasks.

Example::

    field fp 101
    vars x1 x2 x3 x4
    nilpotency 3
    param alpha = 2 notin {0, 1, -1}
    ideal
      alpha*x1*x3 + x2*x3
      x1^2
      maxideal^3
    module M image rows 2
      row x1, x3 + x4
      row 0, x2
    complex G window -3..3
      d n
        row x1, alpha^n*x3 + x4
        row 0, x2

Keywords start a block; indented lines belong to the most recent block.
``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .algebra import PolySpec, monomials_of_degree
from .linalg import Field


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.col = col
        self.bare = message


@dataclass
class ModuleDecl:
    name: str
    kind: str  # image | presented | free | residue | canonical | dual | sum | tensor | hom
    args: List[str] = dc_field(default_factory=list)
    rows: List[List[object]] = dc_field(default_factory=list)  # polynomials
    gens: int = 0
    line: int = 0


@dataclass
class ComplexDecl:
    name: str
    start: int
    stop: int
    maps: Dict[int, List[List[object]]] = dc_field(default_factory=dict)
    line: int = 0


@dataclass
class TaskDecl:
    command: str
    options: Dict[str, str] = dc_field(default_factory=dict)
    line: int = 0


@dataclass
class ParsedInput:
    spec: PolySpec
    params: Dict[str, object]
    modules: Dict[str, ModuleDecl]
    complexes: Dict[str, ComplexDecl]
    tasks: List[TaskDecl]
    notes: List[str] = dc_field(default_factory=list)


# polynomial expressions

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9']*(?:\[\d+\])?)|(\S))")


class _Poly:
    """Sparse polynomial with coefficients in the field."""

    def __init__(self, f: Field, nvars: int, terms: Optional[Dict[Tuple[int, ...], object]] = None):
        self.f = f
        self.n = nvars
        self.terms = {e: c for e, c in (terms or {}).items() if c != 0}

    @classmethod
    def const(cls, f, n, c):
        return cls(f, n, {(0,) * n: f.scalar(c)})

    def is_const(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def const_value(self):
        return self.terms.get((0,) * self.n, 0)

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = self.f.scalar(out.get(e, 0) + c)
        return _Poly(self.f, self.n, out)

    def __neg__(self):
        return _Poly(self.f, self.n, {e: self.f.scalar(-c) for e, c in self.terms.items()})

    def __mul__(self, other):
        out: Dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = self.f.scalar(out.get(e, 0) + c1 * c2)
        return _Poly(self.f, self.n, out)

    def as_terms(self):
        return tuple((c, e) for e, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0])))


class _ExprParser:
    def __init__(self, text: str, f: Field, variables, scalars: Dict[str, object], line: int, col0: int):
        self.text = text
        self.f = f
        self.vars = {v: i for i, v in enumerate(variables)}
        self.scalars = scalars
        self.line = line
        self.col0 = col0
        self.toks: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                break
            if m.group(1):
                self.toks.append(("num", m.group(1), m.start(1)))
            elif m.group(2):
                self.toks.append(("name", m.group(2), m.start(2)))
            elif m.group(3):
                self.toks.append(("op", m.group(3), m.start(3)))
            pos = m.end()
        self.i = 0

    def error(self, msg: str, pos: Optional[int] = None):
        if pos is None:
            pos = self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)
        raise ParseError(msg, self.line, self.col0 + pos + 1)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("end", "", len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse(self) -> _Poly:
        if not self.toks:
            self.error("empty expression")
        p = self.expr()
        if self.i != len(self.toks):
            self.error(f"unexpected {self.peek()[1]!r}")
        return p

    def expr(self) -> _Poly:
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p + (-q)
        return p

    def term(self) -> _Poly:
        p = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if not q.is_const() or q.const_value() == 0:
                    self.error("division only by nonzero constants", pos)
                p = p * _Poly.const(self.f, len(self.vars), self.f.inv(q.const_value()))
        return p

    def unary(self) -> _Poly:
        if self.peek() == ("op", "-", self.peek()[2]):
            self.take()
            return -self.unary()
        if self.peek()[0] == "op" and self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> _Poly:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            _, _, pos = self.take()
            e = self.exponent()
            if e < 0:
                if not base.is_const() or base.const_value() == 0:
                    self.error("negative exponent on a non-constant or zero base", pos)
                return _Poly.const(self.f, len(self.vars), self.f.power(base.const_value(), e))
            out = _Poly.const(self.f, len(self.vars), 1)
            for _ in range(e):
                out = out * base
            return out
        return base

    def exponent(self) -> int:
        kind, val, pos = self.peek()
        sign = 1
        if kind == "op" and val == "(":
            self.take()
            e = self.exponent()
            if self.take()[1] != ")":
                self.error("expected ')'")
            return e
        if kind == "op" and val == "-":
            self.take()
            sign = -1
            kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return sign * int(val)
        if kind == "name" and val in self.scalars and isinstance(self.scalars[val], int):
            self.take()
            return sign * self.scalars[val]
        self.error(f"malformed exponent {val!r}", pos)

    def atom(self) -> _Poly:
        kind, val, pos = self.take()
        n = len(self.vars)
        if kind == "num":
            return _Poly.const(self.f, n, int(val))
        if kind == "name":
            if val in self.vars:
                e = [0] * n
                e[self.vars[val]] = 1
                return _Poly(self.f, n, {tuple(e): 1})
            if val in self.scalars:
                return _Poly.const(self.f, n, self.scalars[val])
            self.error(f"unknown variable or parameter {val!r}", pos)
        if kind == "op" and val == "(":
            p = self.expr()
            if self.take()[1] != ")":
                self.error("expected ')'", pos)
            return p
        self.error(f"unexpected {val or 'end of expression'!r}", pos)


def parse_polynomial(text: str, f: Field, variables, scalars=None, line: int = 0, col: int = 0):
    """Parse a polynomial into a tuple of ``(coefficient, exponent)`` terms."""
    return _ExprParser(text, f, variables, dict(scalars or {}), line, col).parse().as_terms()


def _split_entries(text: str) -> List[Tuple[str, int]]:
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            out.append((text[start:i], start))
            start = i + 1
    out.append((text[start:], start))
    return out


def parse_field(words: List[str], line: int = 0) -> Field:
    if words == ["q"] or words == ["Q"]:
        return Field(0)
    if len(words) == 2 and words[0] == "fp":
        try:
            p = int(words[1])
        except ValueError:
            raise ParseError(f"bad characteristic {words[1]!r}", line, 1)
        try:
            return Field(p)
        except ValueError as exc:
            raise ParseError(str(exc), line, 1)
    if len(words) == 1 and words[0].isdigit():
        return parse_field(["fp", words[0]], line)
    raise ParseError(f"unknown field {' '.join(words)!r}; use 'fp <prime>' or 'q'", line, 1)


def _expand_vars(words: List[str], line: int) -> List[str]:
    out = []
    for w in words:
        m = re.fullmatch(r"([A-Za-z_][A-Za-z_0-9]*)\[(\d+)\.\.(\d+)\]", w)
        if m:
            out.extend(f"{m.group(1)}{i}" for i in range(int(m.group(2)), int(m.group(3)) + 1))
        elif re.fullmatch(r"[A-Za-z_][A-Za-z_0-9']*", w):
            out.append(w)
        else:
            raise ParseError(f"bad variable name {w!r}", line, 1)
    return out


_PARAM = re.compile(r"param\s+([A-Za-z_]\w*)\s*=\s*(-?\d+(?:/\d+)?)\s*(?:notin\s*\{([^}]*)\})?\s*$")


def _substitute(text: str, values: Dict[str, str]) -> str:
    """Replace ``{name}`` placeholders (used for parameterised variable ranges)."""
    for k, v in values.items():
        text = text.replace("{" + k + "}", str(v))
    return text


def _check_degrees(poly, nilpotency: int, line: int, col: int) -> None:
    # terms of degree >= N vanish modulo m^N; a pure degree-N generator is how
    # m^N is spelled out, anything else would be dropped silently
    degs = [sum(e) for _, e in poly]
    if any(d > nilpotency for d in degs):
        raise ParseError(f"degree >= N term: degree {max(degs)} exceeds nilpotency {nilpotency}", line, col)
    if any(d == nilpotency for d in degs) and any(d < nilpotency for d in degs):
        raise ParseError(f"degree >= N term: a degree-{nilpotency} term next to lower-degree terms "
                         "would be discarded", line, col)


def parse_input(text: str, field: Optional[Field] = None, overrides: Optional[Dict[str, str]] = None) -> ParsedInput:
    """Parse an input file.  ``field`` and ``overrides`` take precedence over the file."""
    overrides = dict(overrides or {})
    lines = text.splitlines()
    f = field
    variables: Optional[List[str]] = None
    nilpotency: Optional[int] = None
    params: Dict[str, object] = {}
    param_src: Dict[str, str] = {}
    generators: List = []
    ideal_lines: List[Tuple[str, int, int]] = []
    modules: Dict[str, ModuleDecl] = {}
    complexes: Dict[str, ComplexDecl] = {}
    tasks: List[TaskDecl] = []
    notes: List[str] = []
    block = None  # ("ideal",) | ("module", decl) | ("complex", decl, index)
    deferred: List[Tuple[str, object, str, int, int]] = []

    # first pass: parameters, so that ranges like x[1..{r}] can use them
    for no, raw in enumerate(lines, 1):
        s = raw.split("#", 1)[0].strip()
        if s.startswith("param "):
            m = _PARAM.match(s)
            if not m:
                raise ParseError("expected 'param name = value [notin {...}]'", no, 1)
            param_src[m.group(1)] = overrides.pop(m.group(1), m.group(2))
    if overrides:
        raise ParseError(f"unknown parameter(s) {', '.join(sorted(overrides))}")

    for no, raw in enumerate(lines, 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        indented = body[0] in " \t"
        s = _substitute(body.strip(), param_src)
        col = len(body) - len(body.lstrip()) + 1
        words = s.split()
        if indented:
            if block is None:
                raise ParseError("indented line outside a block", no, col)
            if block[0] == "ideal":
                ideal_lines.append((s, no, col))
            elif block[0] == "module":
                decl = block[1]
                key = words[0]
                if decl.kind == "image" and key == "row" or decl.kind == "presented" and key == "rel":
                    deferred.append(("row", decl, s[len(key):], no, col + len(key)))
                else:
                    want = "row" if decl.kind == "image" else "rel"
                    raise ParseError(f"expected '{want}' line in module {decl.name}", no, col)
            elif block[0] == "complex":
                decl = block[1]
                if key_is(words, "d"):
                    if len(words) != 2:
                        raise ParseError("expected 'd <index>' or 'd n'", no, col)
                    block = ("complex", decl, words[1], no)
                    if words[1] != "n":
                        try:
                            int(words[1])
                        except ValueError:
                            raise ParseError(f"bad map index {words[1]!r}", no, col + 2)
                elif key_is(words, "row"):
                    if len(block) < 3:
                        raise ParseError("matrix row before any 'd' line", no, col)
                    deferred.append(("crow", (decl, block[2]), s[3:], no, col + 3))
                else:
                    raise ParseError("expected 'd' or 'row' inside a complex", no, col)
            continue
        block = None
        key = words[0]
        if key == "field":
            if field is None:
                f = parse_field(words[1:], no)
        elif key == "vars":
            variables = _expand_vars(words[1:], no)
            if len(set(variables)) != len(variables):
                raise ParseError("repeated variable name", no, col)
        elif key == "nilpotency":
            try:
                nilpotency = int(words[1])
            except (IndexError, ValueError):
                raise ParseError("expected 'nilpotency <int>'", no, col)
        elif key == "param":
            m = _PARAM.match(s)
            name = m.group(1)
            val = Fraction(param_src[name])
            params[name] = int(val) if val.denominator == 1 else val
            if m.group(3):
                deferred.append(("notin", name, m.group(3), no, col))
        elif key == "ideal":
            block = ("ideal",)
        elif key == "module":
            decl = _module_header(words, no, col)
            if decl.name in modules:
                raise ParseError(f"module {decl.name} declared twice", no, col)
            modules[decl.name] = decl
            block = ("module", decl)
        elif key == "complex":
            m = re.fullmatch(r"complex\s+(\w+)\s+window\s+(-?\d+)\.\.(-?\d+)(?:\s+rank\s+\d+)?", s)
            if not m:
                raise ParseError("expected 'complex NAME window a..b'", no, col)
            decl = ComplexDecl(m.group(1), int(m.group(2)), int(m.group(3)), line=no)
            if decl.start > decl.stop:
                raise ParseError("empty window", no, col)
            complexes[decl.name] = decl
            block = ("complex", decl)
        elif key == "task":
            if len(words) < 2:
                raise ParseError("expected 'task COMMAND [key=value ...]'", no, col)
            opts = {}
            for w in words[2:]:
                if "=" not in w:
                    raise ParseError(f"task option {w!r} is not key=value", no, col)
                k, v = w.split("=", 1)
                opts[k] = v
            tasks.append(TaskDecl(words[1], opts, no))
        elif key == "note":
            notes.append(s[4:].strip())
        else:
            raise ParseError(f"unknown keyword {key!r}", no, col)

    if f is None:
        raise ParseError("missing 'field' line")
    if variables is None:
        raise ParseError("missing 'vars' line")
    if nilpotency is None or nilpotency < 1:
        raise ParseError("missing or invalid 'nilpotency' line")

    scalars = dict(params)
    for kind, obj, payload, no, col in deferred:
        if kind == "notin":
            bad = [x.strip() for x in payload.split(",") if x.strip()]
            v = f.scalar(params[obj])
            for b in bad:
                if f.scalar(Fraction(b)) == v:
                    raise ParseError(f"parameter {obj} = {params[obj]} violates 'notin {{{payload}}}'", no, col)

    for s, no, col in ideal_lines:
        m = re.fullmatch(r"maxideal\s*\^\s*(\d+)", s)
        if m:
            if int(m.group(1)) > nilpotency:
                raise ParseError(f"degree >= N term: maxideal^{m.group(1)} lies in m^{nilpotency + 1}", no, col)
            for e in monomials_of_degree(len(variables), int(m.group(1))):
                generators.append(((f.scalar(1), e),))
            continue
        poly = parse_polynomial(s, f, variables, scalars, no, col - 1)
        _check_degrees(poly, nilpotency, no, col)
        if poly:
            generators.append(poly)

    for kind, obj, payload, no, col in deferred:
        if kind == "row":
            entries = []
            for text, off in _split_entries(payload):
                if not text.strip():
                    raise ParseError("empty matrix entry", no, col + off)
                entries.append(parse_polynomial(text, f, variables, scalars, no, col + off - 1))
            obj.rows.append(entries)
        elif kind == "crow":
            decl, idx = obj
            indices = range(decl.start, decl.stop + 1) if idx == "n" else [int(idx)]
            for n in indices:
                local = dict(scalars)
                local["n"] = n
                entries = []
                for text, off in _split_entries(payload):
                    entries.append(parse_polynomial(text, f, variables, local, no, col + off - 1))
                decl.maps.setdefault(n, []).append(entries)

    for decl in modules.values():
        _check_module_decl(decl)
    for decl in complexes.values():
        missing = [n for n in range(decl.start, decl.stop + 1) if n not in decl.maps]
        if missing:
            raise ParseError(f"complex {decl.name} has no map for index {missing[0]}", decl.line, 1)
        for n, rows in decl.maps.items():
            if len({len(r) for r in rows}) != 1:
                raise ParseError(f"complex {decl.name}: ragged matrix at index {n}", decl.line, 1)

    try:
        spec = PolySpec(f, tuple(variables), nilpotency, tuple(generators))
    except ValueError as exc:
        raise ParseError(str(exc))
    return ParsedInput(spec, params, modules, complexes, tasks, notes)


def key_is(words: List[str], key: str) -> bool:
    return bool(words) and words[0] == key


def _module_header(words: List[str], no: int, col: int) -> ModuleDecl:
    if len(words) < 3:
        raise ParseError("expected 'module NAME KIND ...'", no, col)
    name, kind, rest = words[1], words[2], words[3:]
    if kind == "presented":
        if len(rest) != 2 or rest[0] != "gens" or not rest[1].isdigit():
            raise ParseError("expected 'module NAME presented gens <int>'", no, col)
        return ModuleDecl(name, kind, gens=int(rest[1]), line=no)
    if kind == "image":
        if len(rest) != 2 or rest[0] != "rows" or not rest[1].isdigit():
            raise ParseError("expected 'module NAME image rows <int>'", no, col)
        return ModuleDecl(name, kind, gens=int(rest[1]), line=no)
    if kind in ("free", "residue"):
        if len(rest) > 1 or (rest and not rest[0].isdigit()):
            raise ParseError(f"expected 'module NAME {kind} [<int>]'", no, col)
        return ModuleDecl(name, kind, args=rest or ["1"], line=no)
    if kind == "canonical":
        return ModuleDecl(name, kind, line=no)
    if kind == "dual" and len(rest) == 1:
        return ModuleDecl(name, kind, args=rest, line=no)
    if kind in ("sum", "tensor", "hom") and len(rest) == 2:
        return ModuleDecl(name, kind, args=rest, line=no)
    raise ParseError(f"bad module declaration for {name!r}", no, col)


def _check_module_decl(decl: ModuleDecl) -> None:
    if decl.kind == "image":
        if len(decl.rows) != decl.gens:
            raise ParseError(f"module {decl.name}: expected {decl.gens} rows, got {len(decl.rows)}", decl.line, 1)
        if len({len(r) for r in decl.rows}) > 1:
            raise ParseError(f"module {decl.name}: rows have different lengths", decl.line, 1)
    if decl.kind == "presented":
        for r in decl.rows:
            if len(r) != decl.gens:
                raise ParseError(f"module {decl.name}: each relation needs {decl.gens} entries", decl.line, 1)
