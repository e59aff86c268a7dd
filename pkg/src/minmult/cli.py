"""Command-line interface.

Exit codes: 0 when the computation finished and every check passed, 1 when a
mathematical check failed (law violated, certificate rejected, complex not
exact), 2 for input errors.
"""

from __future__ import annotations

import hashlib
import json
import logging
import sys
import time
from typing import Callable, Dict, Optional

import click

from .algebra import AlgebraError, invariants, socle_subspace
from .cache import DiskCache, cached_resolution
from .duality import (
    auslander_class_check,
    bass_class_check,
    canonical_criterion,
    ext_dual_route,
    is_gorenstein_module_test,
    matlis_dual,
    radical_square_zero,
    socle_top_duality,
)
from .hmm import (
    CertificateError,
    check_hmm_certificate,
    check_shmm_certificate,
    classify_growth,
    from_betti,
    verify_betti_laws,
)
from .modules import ModuleError
from .parser import ParseError, parse_field
from .report import ReportDocument, render_human
from .resolution import NonComposableWindow, check_complete_resolution, ext, tor
from .session import Session, SessionConfig, locate_input
from .verify import run_suite

log = logging.getLogger("minmult")

INPUT_ERRORS = (ParseError, KeyError, FileNotFoundError, AlgebraError, ModuleError, NonComposableWindow)


class InputError(Exception):
    pass


def _resolution(session: Session, cfg: SessionConfig, name: str, length: int):
    disk = DiskCache(cfg.cache_dir) if cfg.cache_dir else None
    res = cached_resolution(session.module(name), length, disk)
    warnings = disk.warnings if disk else []
    return res, warnings


def cmd_invariants(s: Session, cfg: SessionConfig, o: Dict):
    A = s.algebra
    inv = invariants(A)
    soc = socle_subspace(A)
    res = {
        "variables": list(A.variables),
        "nilpotency": A.nilpotency,
        "basis": [A.element_str(_unit(A, i)) for i in range(A.dim)],
        "length": inv.length,
        "embedding_dimension": inv.embedding_dimension,
        "hilbert_function": list(inv.hilbert_function),
        "type": inv.socle_dimension,
        "socle_dimension": soc.dim,
        "multiplicity": inv.multiplicity,
        "gorenstein": inv.is_gorenstein,
        "minimal_multiplicity": inv.has_minimal_multiplicity,
        "fingerprint": A.fingerprint,
    }
    return res, True, {}


def _unit(A, i):
    v = A.field.zeros(A.dim)
    v[i] = 1
    return v


def cmd_resolve(s, cfg, o):
    name = o.get("module") or "omega"
    res, warnings = _resolution(s, cfg, name, cfg.length)
    chk = res.check()
    out = {"module": name, "dim": res.module.dim, "betti": res.betti, "checks": chk}
    if warnings:
        out["cache_warnings"] = warnings
    return out, all(chk.values()), {"length": cfg.length}


def cmd_canonical(s, cfg, o):
    A = s.algebra
    omega = s.module("omega")
    crit = canonical_criterion(A, min(cfg.bound, 4))
    gor = is_gorenstein_module_test(A, min(cfg.length, 4))
    betti, _ = _resolution(s, cfg, "omega", cfg.length)
    ok = crit == [1] + [0] * (len(crit) - 1)
    return {
        "dim": omega.dim,
        "ext_k_omega": crit,
        "betti": betti.betti,
        "type": gor["type"],
        "gorenstein_by_betti": gor["betti_match"],
        "isomorphism_to_ring_found": gor["isomorphism_found"],
    }, ok, {"length": cfg.length, "ext_bound": len(crit) - 1}


def cmd_tor(s, cfg, o):
    M, N = s.module(o.get("module") or "k"), s.module(o.get("with") or "k")
    a = tor(M, N, cfg.length)
    b = tor(N, M, cfg.length)
    return {"module": M.label, "with": N.label, "tor_dims": a, "symmetric": a == b}, a == b, \
        {"length": cfg.length}


def cmd_ext(s, cfg, o):
    M, N = s.module(o.get("module") or "k"), s.module(o.get("with") or "omega")
    a = ext(M, N, cfg.length)
    b = ext_dual_route(M, N, cfg.length)
    return {"module": M.label, "with": N.label, "ext_dims": a, "dual_route_agrees": a == b}, a == b, \
        {"length": cfg.length}


def cmd_dual(s, cfg, o):
    M = s.module(o.get("module") or "omega")
    pair = matlis_dual(M)
    sq = radical_square_zero(M) == radical_square_zero(pair.dual)
    top = socle_top_duality(M)
    ok = pair.biduality_ok and sq and top and pair.dual.dim == M.dim
    return {"module": M.label, "dim": M.dim, "dual_dim": pair.dual.dim,
            "biduality_bijective": pair.biduality_ok, "radical_square_zero_agrees": sq,
            "top_equals_dual_socle": top}, ok, {}


def cmd_class_check(s, cfg, o):
    M = s.module(o.get("module") or "R")
    which = (o.get("class") or "auslander").lower()
    fn = {"auslander": auslander_class_check, "bass": bass_class_check}.get(which)
    if fn is None:
        raise InputError(f"unknown class {which!r}; use auslander or bass")
    rep = fn(M, cfg.bound, s.module("omega"))
    out = rep.as_dict()
    out["note"] = "membership is only checked up to the bound"
    return out, rep.member, {"bound": cfg.bound}


def _certificate(s, cfg, o, strong: bool):
    M = s.module(o.get("module") or "R")
    try:
        if strong:
            cert = check_shmm_certificate(s.algebra, M, cfg.bound, s.module("omega"))
        else:
            cert = check_hmm_certificate(s.algebra, M, int(o.get("t") or 1), cfg.bound, s.module("omega"))
    except CertificateError as exc:
        out = {"module": M.label, "certified": False, "verdict": f"rejected: {exc}"}
        if exc.witness is not None:
            out["witness"] = exc.witness
        return out, False, {"bound": cfg.bound}
    out = cert.as_dict()
    out["module"] = M.label
    out["growth"] = str(classify_growth(cert.m, cert.n))
    return out, cert.certified, {"bound": cfg.bound}


def cmd_hmm_check(s, cfg, o):
    return _certificate(s, cfg, o, strong=False)


def cmd_shmm_check(s, cfg, o):
    return _certificate(s, cfg, o, strong=True)


def cmd_betti_laws(s, cfg, o):
    M = s.module(o.get("module") or "R")
    N = s.module(o.get("with") or "omega")
    try:
        rep = verify_betti_laws(s.algebra, M, N, int(o.get("t") or 1), cfg.bound, s.module("omega"))
    except CertificateError as exc:
        return {"verdict": f"rejected: {exc}"}, False, {"bound": cfg.bound}
    return rep.as_dict(), rep.ok, {"bound": cfg.bound}


def cmd_poincare(s, cfg, o):
    name = o.get("module") or "omega"
    res, _ = _resolution(s, cfg, name, cfg.length)
    P = from_betti(res.betti)
    out = {"module": name, "betti": res.betti, "series": P.as_dict(), "display": str(P)}
    if P.tail is not None:
        out["tail_ratio"] = P.tail[2]
    return out, True, {"length": cfg.length}


def cmd_complete_resolution(s, cfg, o):
    names = list(s.parsed.complexes)
    name = o.get("complex") or (names[0] if names else None)
    if name is None:
        raise InputError("the input declares no complex")
    rep = check_complete_resolution(s.complex(name))
    rep["complex"] = name
    return rep, rep["verdict"], {"window": f"{min(rep['positions'], default=0)}..{max(rep['positions'], default=0)}"}


COMMANDS: Dict[str, Callable] = {
    "invariants": cmd_invariants,
    "resolve": cmd_resolve,
    "canonical": cmd_canonical,
    "tor": cmd_tor,
    "ext": cmd_ext,
    "dual": cmd_dual,
    "class-check": cmd_class_check,
    "hmm-check": cmd_hmm_check,
    "shmm-check": cmd_shmm_check,
    "betti-laws": cmd_betti_laws,
    "poincare": cmd_poincare,
    "complete-resolution": cmd_complete_resolution,
}


def fingerprint_inputs(text: str, cfg: SessionConfig, params: Dict[str, str]) -> str:
    h = hashlib.sha256(text.encode())
    h.update(repr((str(cfg.field), sorted(params.items()))).encode())
    return h.hexdigest()[:16]


def run_command(cfg: SessionConfig, session: Session, command: str, options: Optional[Dict] = None,
                fingerprint: str = "") -> ReportDocument:
    """Dispatch one command; raises on input errors."""
    if command not in COMMANDS:
        raise InputError(f"unknown command {command!r}")
    t0 = time.perf_counter()
    results, ok, bounds = COMMANDS[command](session, cfg, dict(options or {}))
    ms = int((time.perf_counter() - t0) * 1000)
    return ReportDocument(command, fingerprint, results, bounds, {"milliseconds": ms}, bool(ok))


def bundled_checks_report(cfg: SessionConfig, quick: bool = False) -> ReportDocument:
    t0 = time.perf_counter()
    checks = run_suite(cfg.field, quick)
    ms = int((time.perf_counter() - t0) * 1000)
    ok = all(c.passed for c in checks)
    results = {"checks": [c.as_dict() for c in checks],
               "passed": sum(c.passed for c in checks), "total": len(checks)}
    return ReportDocument("verify-paper", "bundled", results, {}, {"milliseconds": ms}, ok)


# click wrappers

def _emit(doc: ReportDocument, fmt: str) -> None:
    click.echo(doc.to_json() if fmt == "json" else render_human(doc))


def _fail_input(msg: str) -> None:
    click.echo(f"input error: {msg}", err=True)
    sys.exit(2)


def _config(field, length, bound, cache_dir, fmt) -> SessionConfig:
    try:
        f = parse_field(field.split()) if field else None
        return SessionConfig(f, length, bound, cache_dir, fmt)
    except (ParseError, ValueError) as exc:
        _fail_input(str(exc))


def _parse_params(params) -> Dict[str, str]:
    out = {}
    for p in params:
        if "=" not in p:
            _fail_input(f"--param expects name=value, got {p!r}")
        k, v = p.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def common(fn):
    opts = [
        click.option("--field", default=None, help="Override the field: a prime p, 'fp p' or 'q'."),
        click.option("--length", default=6, show_default=True, type=int, help="Resolution length."),
        click.option("--bound", default=6, show_default=True, type=int, help="Tor/Ext/class bound."),
        click.option("--cache-dir", default=None, help="Resolution cache directory (or $MINMULT_CACHE_DIR)."),
        click.option("--format", "fmt", default="human", type=click.Choice(["human", "json"])),
        click.option("--param", "params", multiple=True, help="Override a 'param' line: name=value."),
    ]
    for o in reversed(opts):
        fn = o(fn)
    return fn


def _run_file(command, path, field, length, bound, cache_dir, fmt, params, **options):
    cfg = _config(field, length, bound, cache_dir, fmt)
    pv = _parse_params(params)
    try:
        text = locate_input(path).read_text()
        session = Session.from_text(text, cfg.field, pv)
        doc = run_command(cfg, session, command, {k: v for k, v in options.items() if v is not None},
                          fingerprint_inputs(text, cfg, pv))
    except INPUT_ERRORS + (InputError,) as exc:
        _fail_input(exc.args[0] if exc.args else str(exc))
    except MemoryError:
        _fail_input(f"{command}: out of memory at length={length}, bound={bound}; "
                    "lower --length or --bound")
    _emit(doc, cfg.format)
    sys.exit(0 if doc.ok else 1)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Betti numbers of canonical modules over artinian local algebras."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


_module = click.option("--module", default=None, help="Module name (declared, or omega, k, R).")
_with = click.option("--with", "with_", default=None, help="Second module.")
_t = click.option("--t", default=None, type=int, help="Start index of the Tor window.")


for _name, _doc, _extra in [
    ("invariants", "Length, embedding dimension, Hilbert function, type.", []),
    ("resolve", "Minimal free resolution and Betti numbers of a module.", [_module]),
    ("canonical", "The canonical module and the Ext(k, omega) test.", []),
    ("tor", "dim Tor_i(M, N), computed from both sides.", [_module, _with]),
    ("ext", "dim Ext^i(M, N) by two routes.", [_module, _with]),
    ("dual", "Matlis dual, biduality and the socle/top exchange.", [_module]),
    ("class-check", "Auslander or Bass class membership up to the bound.",
     [_module, click.option("--class", "class_", default="auslander")]),
    ("hmm-check", "Tor-vanishing certificate with witness module.", [_module, _t]),
    ("shmm-check", "Auslander-class certificate with witness module.", [_module]),
    ("betti-laws", "Check every applicable Betti-number law.", [_module, _with, _t]),
    ("poincare", "Poincare series with geometric tail detection.", [_module]),
    ("complete-resolution", "Exactness of a complex window and of its dual.",
     [click.option("--complex", "complex_", default=None)]),
]:
    def _make(name):
        def cmd(path, field, length, bound, cache_dir, fmt, params, **options):
            opts = {}
            for k, v in options.items():
                opts[k.rstrip("_")] = v
            _run_file(name, path, field, length, bound, cache_dir, fmt, params, **opts)
        return cmd

    _cmd = _make(_name)
    _cmd.__doc__ = _doc
    _cmd = common(_cmd)
    for _o in reversed(_extra):
        _cmd = _o(_cmd)
    _cmd = click.argument("path")(_cmd)
    main.command(_name)(_cmd)


@main.command("verify-paper")
@click.option("--field", default=None, help="Override the field of every bundled example.")
@click.option("--format", "fmt", default="human", type=click.Choice(["human", "json"]))
@click.option("--quick", is_flag=True, help="Skip the slower law suite.")
def verify_bundled(field, fmt, quick):
    """Run the bundled example checks."""
    cfg = _config(field, 6, 6, None, fmt)
    try:
        doc = bundled_checks_report(cfg, quick)
    except INPUT_ERRORS as exc:
        _fail_input(str(exc))
    if fmt == "json":
        click.echo(doc.to_json())
    else:
        for c in doc.results["checks"]:
            click.echo(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}: computed {c['computed']}")
        click.echo(f"{doc.results['passed']}/{doc.results['total']} checks passed")
    sys.exit(0 if doc.ok else 1)


@main.command("tasks")
@click.argument("path")
@common
def tasks(path, field, length, bound, cache_dir, fmt, params):
    """Run the 'task' lines of an input file."""
    cfg = _config(field, length, bound, cache_dir, fmt)
    pv = _parse_params(params)
    ok = True
    docs = []
    try:
        text = locate_input(path).read_text()
        session = Session.from_text(text, cfg.field, pv)
        for task in session.parsed.tasks:
            opts = dict(task.options)
            tcfg = SessionConfig(cfg.field, int(opts.pop("length", cfg.length)),
                                 int(opts.pop("bound", cfg.bound)), cfg.cache_dir, cfg.format)
            doc = run_command(tcfg, session, task.command, opts, fingerprint_inputs(text, cfg, pv))
            docs.append(doc)
            ok = ok and doc.ok
    except INPUT_ERRORS + (InputError, ValueError) as exc:
        _fail_input(exc.args[0] if exc.args else str(exc))
    except MemoryError:
        _fail_input("tasks: out of memory; lower --length or --bound")
    if cfg.format == "json":
        # one document per run: the task reports in file order
        click.echo(json.dumps([d.to_dict() for d in docs], indent=2, sort_keys=True))
    else:
        for d in docs:
            click.echo(render_human(d))
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
