"""Batch command line: zeta values, torus and SU_q(2) runs, assembly, selftest.

Reports are JSON with sorted keys and fixed float formatting, so a run is
byte-identical for a given configuration regardless of the worker count.
Exit codes: 0 ok, 2 schema error, 3 tolerance failure, 4 unsupported input.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

from . import acceptance
from . import lattice_zeta as lz
from . import nc_torus as nt
from . import suq2
from .action_assembly import assemble, cutoff_moments

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_TOLERANCE = 3
EXIT_UNSUPPORTED = 4


class SchemaError(ValueError):
    pass


def _pmap(fn, items, threads: int):
    """Order-preserving map, threaded when asked; results are merged in
    input order so the report never depends on scheduling."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _cnum(x) -> dict | float:
    x = complex(x)
    if x.imag == 0:
        return x.real
    return {"re": x.real, "im": x.imag}


def _emit(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise SchemaError(f"cannot parse complex number {text!r}") from exc


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read input file {path}: {exc}") from exc


def _cutoff_spec(args) -> dict:
    return {"family": args.cutoff}


# ---------------------------------------------------------------------------
# subcommands


def _run_zeta(args) -> dict:
    ev = lz.EpsteinEvaluator(args.n, tol=args.tol)
    report = {"command": "zeta", "n": args.n, "tolerance": args.tol}
    if args.residue:
        report["residue"] = {"value": ev.residue(), "provenance": "analytic"}
        report["pole_fit"] = {"value": lz.epstein_pole_fit(args.n),
                              "provenance": "pole fit near s = n"}
    else:
        s = _parse_complex(args.s)
        value = ev.value(s)
        report["s"] = _cnum(s)
        report["value"] = {"value": _cnum(value),
                           "provenance": "incomplete-gamma continuation",
                           "tail_bound": ev.last_error_bound}
    return report


def _run_torus(args) -> dict:
    doc = _load_json(args.input)
    try:
        parsed = nt.load_potential(doc)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    n, theta, flag, A = (parsed["n"], parsed["theta"],
                         parsed["diophantine_asserted"], parsed["A"])
    if n not in (2, 4):
        raise UnsupportedError(f"torus action implemented for n in {{2, 4}}, got {n}")
    moments = cutoff_moments(_cutoff_spec(args), [1, 2, 3, 4][:n])
    ym = nt.yang_mills(A, theta)
    report = {
        "command": "torus",
        "n": n,
        "diophantine_asserted": flag,
        "yang_mills": {"value": ym, "provenance": "curvature double trace"},
        "moments": moments.to_dict(),
    }
    if n == 4:
        sums = _pmap(lambda q: nt.cs_sums(A, theta, q), (2, 3, 4),
                     args.threads)
        report["power_sums"] = {
            str(q): {"value": v, "provenance": "closed finite sum"}
            for q, v in zip((2, 3, 4), sums)}
        zshift_sums = 2.0 * sum((-1.0) ** q / q * v
                                for q, v in zip((2, 3, 4), sums))
        report["zeta0_shift_power_sums"] = {
            "value": zshift_sums, "provenance": "alternating power sums"}
    rep = nt.torus_action(A, theta, n, moments, args.lam,
                          diophantine_asserted=flag)
    report["zeta0_shift"] = {
        "value": nt.zeta0_shift(A, theta, n, diophantine_asserted=flag),
        "provenance": "curvature closed form"}
    report["expansion"] = rep.to_dict()
    return report


def _run_suq2(args) -> dict:
    doc = _load_json(args.one_form)
    try:
        q_file, pairs = suq2.load_one_form(doc)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    q = args.q if args.q is not None else q_file
    if q is None:
        raise SchemaError("q missing: pass --q or put it in the input file")
    ctx = suq2.QContext(q, tol=args.tol, max_terms=args.max_terms)
    A = suq2.one_form_from_pairs(pairs, ctx)
    if len(A.words) > args.trunc:
        raise UnsupportedError(
            f"one-form expands to {len(A.words)} ladder words, over the "
            f"cap {args.trunc}")
    moments = cutoff_moments(_cutoff_spec(args), [1, 2, 3])
    out = suq2.suq2_action(A, ctx, moments, args.lam,
                           with_reality=not args.no_reality,
                           parallel_map=lambda f, xs: _pmap(f, xs, args.threads))
    report = {
        "command": "suq2",
        "q": q,
        "with_reality": not args.no_reality,
        "tolerance": ctx.tol,
        "ladder_words": len(A.words),
        "integrals": {k: {"value": _cnum(v),
                          "provenance": "tau functionals on half-line legs"}
                      for k, v in out["integrals"].items()},
        "zeta0": {"value": _cnum(out["zeta0"]),
                  "provenance": "fluctuation assembly"},
        "coefficients": {str(k): _cnum(v)
                         for k, v in out["coefficients"].items()},
        "moments": moments.to_dict(),
        "expansion": out["report"].to_dict(),
    }
    return report


def _run_action(args) -> dict:
    doc = _load_json(args.input)
    try:
        cutoff = doc["cutoff"]
        lam = float(doc["lambda"])
        coeffs = {int(k): complex(v["re"], v.get("im", 0.0))
                  if isinstance(v, dict) else complex(v)
                  for k, v in doc["coefficients"].items()}
        zeta0 = float(doc.get("zeta0", 0.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed action document: {exc}") from exc
    moments = cutoff_moments(cutoff, sorted(coeffs))
    rep = assemble(coeffs, zeta0, moments, lam)
    return {"command": "action", "moments": moments.to_dict(),
            "expansion": rep.to_dict()}


def _run_selftest(args) -> int:
    failures = acceptance.run_all(report=print)
    return EXIT_TOLERANCE if failures else EXIT_OK


class UnsupportedError(ValueError):
    pass


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncspectral",
        description="Spectral-action coefficients on the noncommutative "
                    "torus and SU_q(2)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, default=1e-10,
                       help="series / evaluation tolerance")
        p.add_argument("--max-terms", type=int, default=20000,
                       help="cap on regularized-trace series terms")
        p.add_argument("--trunc", type=int, default=200000,
                       help="cap on expanded ladder words / lattice modes")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads (result is identical for any value)")
        p.add_argument("--out", default=None, help="write the report here")
        p.add_argument("--format", choices=["json"], default="json")

    p_zeta = sub.add_parser("zeta", help="Epstein zeta values and residues")
    p_zeta.add_argument("--n", type=int, required=True)
    p_zeta.add_argument("--s", default="0")
    p_zeta.add_argument("--residue", action="store_true",
                        help="report the residue at s = n instead of a value")
    common(p_zeta)

    p_torus = sub.add_parser("torus", help="noncommutative-torus action")
    p_torus.add_argument("--input", required=True,
                         help="JSON potential {n, theta, diophantine_asserted, A}")
    p_torus.add_argument("--lambda", dest="lam", type=float, required=True)
    p_torus.add_argument("--cutoff", default="exponential",
                         choices=["exponential", "gaussian"])
    common(p_torus)

    p_suq2 = sub.add_parser("suq2", help="SU_q(2) spectral action")
    p_suq2.add_argument("--q", type=float, default=None)
    p_suq2.add_argument("--one-form", required=True,
                        help="JSON one-form {q, one_form: [{x, y, coeff}]}")
    p_suq2.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p_suq2.add_argument("--cutoff", default="exponential",
                        choices=["exponential", "gaussian"])
    p_suq2.add_argument("--no-reality", action="store_true",
                        help="drop the real-structure doubling")
    common(p_suq2)

    p_action = sub.add_parser("action", help="assemble an expansion from "
                                             "coefficients and a cutoff")
    p_action.add_argument("--input", required=True,
                          help="JSON {cutoff, lambda, coefficients, zeta0}")
    common(p_action)

    p_self = sub.add_parser("selftest", help="run the acceptance suite")
    common(p_self)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        if args.command == "selftest":
            return _run_selftest(args)
        runner = {"zeta": _run_zeta, "torus": _run_torus,
                  "suq2": _run_suq2, "action": _run_action}[args.command]
        report = runner(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except lz.ToleranceError as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (lz.AssumptionError,) as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (UnsupportedError, lz.PoleError, MemoryError, ValueError) as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    _emit(report, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
