"""Command-line front end: ``bergdbar <verb> [flags]``.

Verbs: norms, block, spectrum, solve, geometry, reproduce.  Output is JSON (with a
``schema`` header) or CSV (with ``#`` header lines), written to stdout or to
the path given by ``--emit``/``--output``.  Exit status: 0 success, 1 domain
or input error, 2 numerical accuracy error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Sequence

from . import __version__
from .acceptance import run_all
from .basis import has_closed_form, norm_closed_form, norm_quadrature, verify_duality_identity
from .errors import AccuracyError, BergdbarError, DomainError, ParseError
from .geometry import check_duality, curvature_condition, parse_profile, torsion_profile
from .models import parse_model
from .numerics import enumerate_multiindices
from .operators import assemble_block
from .spectral import form_from_json, solve_dbar, spectrum

SCHEMA = 1
EXIT_OK, EXIT_DOMAIN, EXIT_ACCURACY, EXIT_IO = 0, 1, 2, 3

# identities each verb reports on
IDENTITIES = {
    "norms": ["monomial norms from Gamma-function ratios", "norm duality c |z^(J+e_k)|^2 = (d z^(J+e_k), z^J dz^k)"],
    "block": ["degree-m block of the (1,0)-Laplacian in an orthonormal basis"],
    "spectrum": ["block eigenvalues of the Laplacian", "Gershgorin enclosure per block"],
    "solve": ["canonical solution f = adj(d) N eta", "sharp estimate c |f|^2 <= |eta|^2"],
    "geometry": ["holomorphicity of the dual of d-bar psi - conj(tau)", "torsion trace", "curvature criterion"],
    "reproduce": ["acceptance suite"],
}


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2, which is reserved for accuracy failures here
    def error(self, message):
        raise ParseError(message)


def _header(verb: str, model=None) -> dict:
    head = {"schema": SCHEMA, "tool": "bergdbar", "version": __version__, "verb": verb,
            "identities": IDENTITIES[verb]}
    if model is not None:
        head["model"] = model.to_dict()
    return head


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def _csv_text(header: dict, columns: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    for k, v in header.items():
        buf.write(f"# {k}: {json.dumps(v, ensure_ascii=False)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


# ---------------------------------------------------------------------------
# verbs


def _cmd_norms(args) -> tuple[str, str]:
    model = parse_model(args.model)
    rows = []
    for m in range(args.max_degree + 1):
        if m > model.max_monomial_degree(args.p):
            break
        for J in enumerate_multiindices(model.n, m):
            comps = range(model.n) if args.p == 1 else [None]
            for k in comps:
                closed = norm_closed_form(model, args.p, J, k) if has_closed_form(model) else None
                quad = norm_quadrature(model, args.p, J, k)
                rel = abs(closed - quad) / closed if closed is not None else None
                dual = None
                if args.p == 1 and J.increment(k).degree <= model.max_monomial_degree(0):
                    dual = verify_duality_identity(model, J, k)
                rows.append([model.label(), args.p, " ".join(map(str, J)), "" if k is None else k + 1,
                             _fmt(closed), _fmt(quad), _fmt(rel), _fmt(dual)])
    columns = ["model", "p", "J", "k", "closed_form", "quadrature", "rel_diff", "duality_residual"]
    if args.format == "json":
        body = _header("norms", model)
        body["rows"] = [dict(zip(columns, r)) for r in rows]
        return _dump_json(body), "json"
    return _csv_text(_header("norms", model), columns, rows), "csv"


def _cmd_block(args) -> tuple[str, str]:
    model = parse_model(args.model)
    block = assemble_block(model, args.degree, args.p)
    if args.format == "csv":
        rows = [[i] + [repr(float(x)) for x in row] for i, row in enumerate(block.matrix.array)]
        return _csv_text(_header("block", model), ["row"] + [f"c{j}" for j in range(block.order)], rows), "csv"
    return _dump_json({**_header("block", model), **block.to_dict()}), "json"


def _cmd_spectrum(args) -> tuple[str, str]:
    model = parse_model(args.model)
    report = spectrum(model, args.mmax, args.p, workers=args.workers)
    if args.format == "csv":
        rows = [[b.m, repr(v), mult] for b in report.blocks for v, mult in b.clusters]
        return _csv_text(_header("spectrum", model), ["m", "eigenvalue", "multiplicity"], rows), "csv"
    return _dump_json({**_header("spectrum", model), **report.to_dict()}), "json"


def _cmd_solve(args) -> tuple[str, str]:
    model = parse_model(args.model)
    try:
        with open(args.eta, encoding="utf-8") as fh:
            rows = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{args.eta}: invalid JSON ({exc.msg})") from exc
    if not isinstance(rows, list):
        raise ParseError("eta must be a JSON list of {J, k, re, im} entries")
    report = solve_dbar(model, form_from_json(model, rows, 1))
    return _dump_json({**_header("solve", model), **report.to_dict()}), "json"


def _cmd_geometry(args) -> tuple[str, str]:
    profile = parse_profile(args.profile)
    n = args.n
    if n is None:
        try:
            n = parse_model(args.profile).n
        except ParseError:
            n = 1
    report = check_duality(profile, n)
    out = {**_header("geometry"), "n": n, **report.to_dict()}
    coeff, _ = torsion_profile(profile, n, report.grid)
    out["torsion_coefficient"] = coeff.tolist()
    if args.epsilon is not None:
        out["epsilon"] = args.epsilon
        out["sigma"] = args.sigma
        out["curvature_verdicts"] = curvature_condition(profile, args.epsilon, args.sigma, report.grid, n).tolist()
    if args.format == "csv":
        cols = ["r", "coefficient", "torsion_norm"] + (["curvature_min_eigenvalue"] if args.epsilon is not None else [])
        data = [out["grid"], out["coefficient"], out["torsion_norm_profile"]]
        if args.epsilon is not None:
            data.append(out["curvature_verdicts"])
        head = {k: v for k, v in out.items() if not isinstance(v, list) or k == "identities"}
        return _csv_text(head, cols, [[repr(x) for x in row] for row in zip(*data)]), "csv"
    return _dump_json(out), "json"


def _cmd_reproduce(args) -> tuple[str, str]:
    lines: list[str] = []
    results = run_all(lines.append)
    failed = [r.number for r in results if not r.passed]
    if args.format == "json":
        body = {**_header("reproduce"), "results": [r.to_dict() for r in results], "all_passed": not failed}
        text = _dump_json(body)
    else:
        text = "\n".join(lines) + f"\n{len(results) - len(failed)}/{len(results)} criteria passed\n"
    args._failed = failed
    return text, args.format


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bergdbar", description="d-bar complex on weighted Bergman spaces of radial models")
    parser.add_argument("--version", action="version", version=f"bergdbar {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(p, default_format="json"):
        p.add_argument("--emit", help="output path, or 'json'/'csv' to pick the format for stdout")
        p.add_argument("--output", "-o", help="output path (default stdout)")
        p.add_argument("--format", choices=["json", "csv"], default=None)
        p.add_argument("--workers", type=int, default=os.cpu_count() or 1, help="worker threads (>= 1)")
        p.set_defaults(default_format=default_format)

    p = sub.add_parser("norms", help="monomial norms, closed form against quadrature")
    p.add_argument("--model", required=True)
    p.add_argument("--p", type=int, choices=[0, 1], default=1)
    p.add_argument("--max-degree", type=int, default=4)
    common(p, "csv")

    p = sub.add_parser("block", help="matrix of one degree block")
    p.add_argument("--model", required=True)
    p.add_argument("--degree", "--m", type=int, required=True)
    p.add_argument("--p", type=int, choices=[0, 1], default=1)
    common(p)

    p = sub.add_parser("spectrum", help="block eigenvalues up to a maximal degree")
    p.add_argument("--model", required=True)
    p.add_argument("--mmax", type=int, default=8)
    p.add_argument("--p", type=int, choices=[0, 1], default=1)
    common(p)

    p = sub.add_parser("solve", help="canonical solution of d f = eta")
    p.add_argument("--model", required=True)
    p.add_argument("--eta", required=True, help="JSON list of {J, k, re, im}")
    common(p)

    p = sub.add_parser("geometry", help="duality constant, torsion and curvature on a radial grid")
    p.add_argument("--profile", required=True, help="model string, kahler:h=...,psi=... or conformal:phi=...,psi=...")
    p.add_argument("--n", type=int, default=None, help="complex dimension (defaults to the model's)")
    p.add_argument("--epsilon", type=float, default=None, help="coefficient of the metric in the curvature test")
    p.add_argument("--sigma", type=float, default=None, help="torsion weight parameter (> 1); omit to drop the torsion term")
    common(p)

    p = sub.add_parser("reproduce", help="run the acceptance suite")
    common(p, "table")
    return parser


def _resolve_output(args) -> None:
    path, fmt = args.output, args.format
    if args.emit in ("json", "csv"):
        fmt = fmt or args.emit
    elif args.emit:
        path = path or args.emit
        ext = os.path.splitext(args.emit)[1].lower().lstrip(".")
        if ext in ("json", "csv"):
            fmt = fmt or ext
    args.path = path
    args.format = fmt or args.default_format


_COMMANDS = {
    "norms": _cmd_norms,
    "block": _cmd_block,
    "spectrum": _cmd_spectrum,
    "solve": _cmd_solve,
    "geometry": _cmd_geometry,
    "reproduce": _cmd_reproduce,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _resolve_output(args)
        if args.workers < 1:
            raise DomainError(f"--workers must be at least 1, got {args.workers}")
        text, _ = _COMMANDS[args.verb](args)
    except AccuracyError as exc:
        print(f"bergdbar: accuracy error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except (DomainError, BergdbarError) as exc:
        print(f"bergdbar: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"bergdbar: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if args.path:
            with open(args.path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"bergdbar: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.verb == "reproduce" and args._failed:
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
