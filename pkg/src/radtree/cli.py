"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 mathematical precondition violated.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from . import io as rio
from ._parallel import default_workers
from .couplings import check_conditions, reconstruct_coupling, reduce_coupling
from .errors import MathematicalError, SpecValidationError
from .halfline import monodromy, propagate
from .seqgen import periodic_word, power2_word, substitution_word
from .spectra import (
    band_structure,
    halfline_eigenvalues,
    reflectionless_defect,
    weyl_m,
    weyl_m_boundary,
)
from .tree import (
    RadialTreeSpec,
    compare_spectra,
    symmetric_halfline,
    tree_eigenvalues,
)
from .worked_examples import run_checks

COMMANDS = (
    "check", "reduce", "reconstruct", "transfer", "bands", "weyl", "reflectionless",
    "eigs-halfline", "eigs-tree", "compare", "gen-seq", "examples",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise SpecValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="radtree", description=__doc__.splitlines()[0])
    p.add_argument("positional_command", nargs="?", choices=COMMANDS, metavar="command")
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--input", type=Path, help="JSON input file ('-' for stdin)")
    p.add_argument("--emin", type=float, default=0.0)
    p.add_argument("--emax", type=float, default=100.0)
    p.add_argument("--grid", type=float, default=None,
                   help="grid density: points per unit sqrt|E| (bands: total points)")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--format", choices=("json", "csv", "text"), default=None)
    p.add_argument("--output", type=Path, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--z", type=str, default=None, help="complex energy, e.g. 2+0.5j")
    p.add_argument("--start", type=float, default=None)
    p.add_argument("--end", type=float, default=None)
    p.add_argument("--energy", type=float, action="append", default=None)
    p.add_argument("--basepoint", type=float, default=None)
    p.add_argument("--right-end", type=float, default=None)
    return p


class _Job:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        cmd = args.command or args.positional_command
        if cmd is None:
            raise SpecValidationError("no command given")
        if args.command and args.positional_command and args.command != args.positional_command:
            raise SpecValidationError("conflicting commands")
        self.command = cmd
        if args.emax <= args.emin:
            raise SpecValidationError("--emax must exceed --emin")
        if args.depth is not None and args.depth < 1:
            raise SpecValidationError("--depth must be positive")
        if args.eta is not None and args.eta <= 0:
            raise SpecValidationError("--eta must be positive")
        if args.grid is not None and args.grid <= 0:
            raise SpecValidationError("--grid must be positive")
        if args.threads is not None and args.threads < 1:
            raise SpecValidationError("--threads must be positive")
        self.workers = args.threads if args.threads is not None else default_workers()
        self._doc = None

    @property
    def window(self) -> tuple[float, float]:
        return self.args.emin, self.args.emax

    def doc(self) -> Any:
        if self._doc is None:
            path = self.args.input
            if path is None:
                raise SpecValidationError(f"command {self.command!r} needs --input")
            try:
                text = sys.stdin.read() if str(path) == "-" else path.read_text()
                self._doc = json.loads(text)
            except (OSError, json.JSONDecodeError) as exc:
                raise SpecValidationError(f"cannot read input: {exc}") from exc
        return self._doc

    def tree(self) -> RadialTreeSpec:
        if not rio.is_tree_doc(self.doc()):
            raise SpecValidationError("expected a tree spec (with 'generations')")
        return rio.parse_tree_spec(self.doc())

    def depth(self, spec: RadialTreeSpec) -> int:
        return self.args.depth if self.args.depth is not None else len(spec.couplings) + 1

    def halfline(self):
        doc = self.doc()
        if rio.is_tree_doc(doc):
            return symmetric_halfline(rio.parse_tree_spec(doc), rio.tree_period(doc))
        return rio.parse_halfline(doc)

    def z(self) -> complex:
        if self.args.z is None:
            raise SpecValidationError("--z is required")
        try:
            return complex(self.args.z.replace(" ", ""))
        except ValueError as exc:
            raise SpecValidationError(f"cannot parse --z {self.args.z!r}") from exc


def cmd_check(job: _Job) -> dict:
    spec = job.tree()
    horizon = job.args.depth if job.args.depth is not None else len(spec.couplings)
    r = check_conditions(spec, horizon, **({"tol": job.args.tol} if job.args.tol else {}))
    rows = []
    for n in range(1, horizon + 1):
        c = spec.couplings[n - 1]
        g = complex(c.gamma)
        rows.append({
            "generation": n, "b": c.b, "alpha": float(c.alpha), "beta": float(c.beta),
            "gamma_re": g.real, "gamma_im": g.imag,
            "separating": n in r.offending_b,
            "condition_c_ok": n not in r.offending_c,
            "condition_d_ok": n not in r.offending_d,
        })
    summary = {
        "horizon": r.horizon, "tail_start": r.tail_start,
        "condition_a": r.condition_a, "condition_b": r.condition_b,
        "condition_c": r.condition_c, "condition_d": r.condition_d,
        "gap_bounded_below": r.gap_bounded_below, "tau": r.tau,
        "distinct_counts": r.distinct_counts,
        "offending": {"a": list(r.offending_a), "b": list(r.offending_b),
                      "c": list(r.offending_c), "d": list(r.offending_d)},
        "finite_horizon": r.finite_horizon,
    }
    return {"rows": rows, "summary": summary}


def cmd_reduce(job: _Job) -> dict:
    spec = job.tree()
    rows = []
    for n, c in enumerate(spec.couplings, start=1):
        try:
            m = reduce_coupling(c)
        except MathematicalError as exc:
            exc.generation = n
            raise
        cz = m.c_complex
        rows.append({"generation": n, "a": m.a, "q": m.q, "c_re": cz.real, "c_im": cz.imag})
    return {"rows": rows, "summary": {"generations": len(rows)}}


def cmd_reconstruct(job: _Job) -> dict:
    doc = job.doc()
    if rio.is_tree_doc(doc):
        raise SpecValidationError("reconstruct expects interface couplings, not a tree spec")
    entries = doc.get("couplings") if isinstance(doc, dict) else doc
    if entries is None and isinstance(doc, dict) and "cell" in doc:
        entries = doc["cell"].get("couplings")
    if not isinstance(entries, list):
        raise SpecValidationError("expected a list of interface couplings")
    rows = []
    for k, e in enumerate(entries, start=1):
        try:
            v = reconstruct_coupling(rio.parse_interface_coupling(e))
        except MathematicalError as exc:
            exc.generation = k
            raise
        g = complex(v.gamma)
        rows.append({"index": k, "alpha": v.alpha, "beta": v.beta,
                     "gamma_re": g.real, "gamma_im": g.imag, "b": v.b})
    return {"rows": rows, "summary": {"count": len(rows)}}


def cmd_transfer(job: _Job) -> dict:
    sys_ = job.halfline()
    z = job.z()
    if job.args.start is None and job.args.end is None:
        T = monodromy(sys_, z)
        kind = "monodromy"
    else:
        start = job.args.start if job.args.start is not None else sys_.origin
        if job.args.end is None:
            raise SpecValidationError("--end is required with --start")
        T = propagate(sys_, z, start, job.args.end)
        kind = "propagate"
    rows = []
    for i in range(2):
        for j in range(2):
            v = complex(T[i, j])
            rows.append({"row": i, "col": j, "re": v.real, "im": v.imag})
    det = complex(T[0, 0] * T[1, 1] - T[0, 1] * T[1, 0])
    return {"rows": rows, "summary": {"kind": kind, "z": rio.complex_obj(z),
                                      "det": rio.complex_obj(det)}}


def cmd_bands(job: _Job) -> dict:
    sys_ = job.halfline()
    points = int(job.args.grid) if job.args.grid else 2000
    bs = band_structure(sys_, job.window, points, workers=job.workers,
                        **({"tol": job.args.tol} if job.args.tol else {}))
    rows = [{"band": i, "lower": lo, "upper": hi} for i, (lo, hi) in enumerate(bs.bands)]
    return {"rows": rows, "summary": {
        "window": list(bs.window), "grid_points": bs.grid_points,
        "trace_test_applicable": bs.trace_test_applicable, "disagreements": bs.disagreements}}


def _energies(job: _Job) -> list[float]:
    if not job.args.energy:
        raise SpecValidationError("at least one --energy is required")
    return list(job.args.energy)


def cmd_weyl(job: _Job) -> dict:
    sys_ = job.halfline()
    rows = []
    if job.args.z is not None:
        values = [weyl_m(sys_, job.z(), job.args.basepoint, job.args.eta)]
    elif job.args.eta is not None:
        values = [weyl_m(sys_, e, job.args.basepoint, job.args.eta) for e in _energies(job)]
    else:
        values = [weyl_m_boundary(sys_, e, job.args.basepoint) for e in _energies(job)]
    for v in values:
        rows.append({"energy_re": v.energy.real, "energy_im": v.energy.imag,
                     "basepoint": v.basepoint,
                     "m_plus_re": v.m_plus.real, "m_plus_im": v.m_plus.imag,
                     "m_minus_re": v.m_minus.real, "m_minus_im": v.m_minus.imag})
    return {"rows": rows, "summary": {"extrapolated": job.args.z is None and job.args.eta is None}}


def cmd_reflectionless(job: _Job) -> dict:
    sys_ = job.halfline()
    rows = [{"energy": e, "eta": job.args.eta,
             "defect": reflectionless_defect(sys_, e, job.args.eta, job.args.basepoint)}
            for e in sorted(_energies(job))]
    return {"rows": rows, "summary": {"max_defect": max(r["defect"] for r in rows)}}


def _density(job: _Job) -> float:
    return job.args.grid if job.args.grid else 2000.0


def cmd_eigs_halfline(job: _Job) -> dict:
    sys_ = job.halfline()
    if job.args.right_end is None:
        raise SpecValidationError("--right-end is required")
    eigs = halfline_eigenvalues(sys_, job.args.right_end, job.window, _density(job),
                                workers=job.workers)
    return {"rows": [{"index": i, "energy": e} for i, e in enumerate(eigs, start=1)],
            "summary": {"count": len(eigs), "right_end": job.args.right_end}}


def _pair_rows(pairs):
    return [{"index": i, "energy": e, "multiplicity": m} for i, (e, m) in enumerate(pairs, start=1)]


def cmd_eigs_tree(job: _Job) -> dict:
    spec = job.tree()
    depth = job.depth(spec)
    tree = tree_eigenvalues(spec, depth, job.window, _density(job), workers=job.workers)
    return {"rows": _pair_rows(tree),
            "summary": {"depth": depth, "count": sum(m for _, m in tree)}}


def cmd_compare(job: _Job) -> dict:
    spec = job.tree()
    depth = job.depth(spec)
    tol = job.args.tol if job.args.tol is not None else 1e-6
    r = compare_spectra(spec, depth, job.window, _density(job), tol, workers=job.workers)
    rows = [{"index": i, "tree": a, "direct_sum": b, "mismatch": abs(a - b)}
            for i, (a, b) in enumerate(r.pairs, start=1)]
    status = "PASS" if r.passed else "FAIL"
    print(f"{status} compare depth={depth} max_mismatch={rio.fmt_float(r.max_mismatch)} "
          f"tree={r.tree_count} direct_sum={r.direct_sum_count}", file=sys.stderr)
    return {"rows": rows, "summary": {
        "passed": r.passed, "max_mismatch": r.max_mismatch, "tol": tol, "depth": depth,
        "tree_count": r.tree_count, "direct_sum_count": r.direct_sum_count}}


def _letter(d: dict):
    if not isinstance(d, dict):
        raise SpecValidationError("letters must be objects {gap, coupling}")
    return rio.parse_number(d.get("gap", 1)), rio.parse_vertex_coupling(_require(d, "coupling"))


def _require(d: dict, key: str):
    if key not in d:
        raise SpecValidationError(f"missing key {key!r}")
    return d[key]


def cmd_gen_seq(job: _Job) -> dict:
    cfg = job.doc()
    if not isinstance(cfg, dict):
        raise SpecValidationError("gen-seq config must be an object")
    kind = _require(cfg, "kind")
    if kind == "periodic":
        word = periodic_word([_letter(x) for x in _require(cfg, "block")],
                             [_letter(x) for x in cfg.get("preperiod", [])],
                             int(_require(cfg, "length")))
    elif kind == "power2":
        word = power2_word(_letter(_require(cfg, "special")), _letter(_require(cfg, "default")),
                           int(_require(cfg, "length")))
    elif kind == "substitution":
        rules = {k: list(v) for k, v in _require(cfg, "rules").items()}
        letters = {k: _letter(v) for k, v in _require(cfg, "letters").items()}
        word = substitution_word(rules, _require(cfg, "seed"), int(_require(cfg, "iterations")),
                                 letters)
    else:
        raise SpecValidationError(f"unknown sequence kind {kind!r}")
    root_gap = rio.parse_number(cfg.get("root_gap", 1))
    spec = RadialTreeSpec((root_gap,) + tuple(g for g, _ in word.letters),
                          tuple(c for _, c in word.letters),
                          rio.parse_angle(cfg.get("root_angle", "dirichlet")))
    return {"spec": rio.tree_spec_doc(spec), "alphabet_size": len(word.alphabet)}


def cmd_examples(job: _Job) -> dict:
    checks = run_checks()
    rows = [{"name": c.name, "status": "PASS" if c.passed else "FAIL", "detail": c.detail}
            for c in checks]
    return {"rows": rows, "summary": {"passed": sum(c.passed for c in checks),
                                      "failed": sum(not c.passed for c in checks)}}


HANDLERS = {
    "check": cmd_check, "reduce": cmd_reduce, "reconstruct": cmd_reconstruct,
    "transfer": cmd_transfer, "bands": cmd_bands, "weyl": cmd_weyl,
    "reflectionless": cmd_reflectionless, "eigs-halfline": cmd_eigs_halfline,
    "eigs-tree": cmd_eigs_tree, "compare": cmd_compare, "gen-seq": cmd_gen_seq,
    "examples": cmd_examples,
}


def render(command: str, result: dict, fmt: str) -> str:
    if command == "gen-seq":
        if fmt == "csv":
            spec = result["spec"]
            rows = [{"generation": n, "gap": spec["gaps"][n], **{
                k: v for k, v in g.items() if k not in ("gamma", "eigenphases")},
                "gamma_re": g["gamma"]["re"], "gamma_im": g["gamma"]["im"],
                "eigenphases": " ".join(rio.fmt_float(t) for t in g["eigenphases"])}
                for n, g in enumerate(spec["generations"], start=1)]
            return rio.rows_to_csv(rows)
        return rio.dumps(result["spec"])
    if fmt == "csv":
        return rio.rows_to_csv(result["rows"])
    if fmt == "text":
        if command == "examples":
            return "".join(f"{r['status']} {r['name']}: {r['detail']}\n" for r in result["rows"])
        lines = [" ".join(f"{k}={_text(v)}" for k, v in r.items()) for r in result["rows"]]
        lines.append(" ".join(f"{k}={_text(v)}" for k, v in result["summary"].items()))
        return "\n".join(lines) + "\n"
    return rio.dumps({"command": command, "status": "ok", "rows": result["rows"],
                      "summary": result["summary"]})


def _text(v) -> str:
    if isinstance(v, float):
        return rio.fmt_float(v)
    if isinstance(v, (dict, list)):
        return rio.dumps(v).strip()
    return str(v)


def _error(exc: Exception, code: int) -> int:
    payload = {"error": type(exc).__name__, "message": exc.args[0] if exc.args else str(exc),
               "generation": getattr(exc, "generation", None), "exit_code": code}
    sys.stderr.write(rio.dumps(payload))
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SpecValidationError as exc:
        return _error(exc, 1)
    except SystemExit as exc:  # --help
        return 1 if exc.code else 0
    try:
        job = _Job(args)
        fmt = args.format or ("text" if job.command == "examples" else "json")
        result = HANDLERS[job.command](job)
        text = render(job.command, result, fmt)
    except SpecValidationError as exc:
        return _error(exc, 1)
    except MathematicalError as exc:
        return _error(exc, 2)
    if args.output is not None:
        args.output.write_text(text, newline="")
    else:
        sys.stdout.write(text)
    if job.command == "examples" and result["summary"]["failed"]:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
