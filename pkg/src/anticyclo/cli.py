"""Command-line shell.

Exit codes: 0 for HOLDS / PROPAGATED / plain success, 2 for FAILS /
CONFLICT / parity violations, 3 for UNKNOWN outcomes, 1 for errors.
Reports are canonical JSON (or markdown with --report md) and are
byte-identical for identical inputs, regardless of thread count.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import series as iw
from .errors import (
    AnticycloError,
    NegativeResult,
    ParityViolation,
    PrecisionExhausted,
    UnknownLocalTerm,
)
from .eigenforms import check_congruence, load_form, twist
from .hypotheses import FAILS, HOLDS, RELAXED, SQUARE, UNKNOWN, hypothesis_report
from .localterms import lambda_table
from .padic import local_ring
from .quadfield import QuadFieldContext, check_ghh, factor_level
from .report import canonical_json, markdown_report
from .transfer import CONFLICT, CONGRUENT, NOT_CONGRUENT, PROPAGATED, run_transfer

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAIL = 2
EXIT_UNKNOWN = 3

DEFAULT_DEGREE = 64


def _default_prec() -> int:
    try:
        return int(os.environ.get("IWASAWA_PRECISION", "12"))
    except ValueError:
        return 12


def _error_exit_code(exc: Exception) -> int:
    if isinstance(exc, (ParityViolation, NegativeResult)):
        return EXIT_FAIL
    if isinstance(exc, (UnknownLocalTerm, PrecisionExhausted)):
        return EXIT_UNKNOWN
    return EXIT_ERROR


def _emit(payload: dict, args) -> None:
    if getattr(args, "report", "json") == "md":
        text = markdown_report(payload, title=payload.get("command", "report"))
    else:
        text = canonical_json(payload)
    sys.stdout.write(text)
    out = getattr(args, "out", None)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")


def _context(args) -> QuadFieldContext:
    return QuadFieldContext.create(args.disc, args.prime, prec=args.prec)


# ---------------------------------------------------------------------------
# subcommands


def _write_form_file(record_dict: dict, out: str) -> None:
    # form files must stay loadable: plain JSON with native integers, not the
    # stringified report encoding
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out).write_text(json.dumps(record_dict, sort_keys=True) + "\n",
                         encoding="utf-8")


def cmd_ingest(args) -> int:
    record = load_form(args.form)
    payload = {
        "command": "ingest",
        "status": "OK",
        "record": record.to_json_dict() if args.full else {
            "label": record.label, "level": record.level, "weight": record.weight,
            "bound": record.bound,
        },
        "checks": ["a_1 = 1", "multiplicativity", "Hecke recursion at good primes"],
    }
    if args.out:
        _write_form_file(record.to_json_dict(), args.out)
        payload["written"] = args.out
        args.out = None
    _emit(payload, args)
    return EXIT_OK


def cmd_twist(args) -> int:
    record = load_form(args.form)
    twisted = twist(record, args.disc)
    payload = {"command": "twist", "status": "OK", "record": twisted.to_json_dict()}
    if args.out:
        _write_form_file(twisted.to_json_dict(), args.out)
        payload["written"] = args.out
        args.out = None
    _emit(payload, args)
    return EXIT_OK


def cmd_factor_level(args) -> int:
    fact = factor_level(args.N, args.disc, args.prime)
    ok, reason = check_ghh(fact)
    payload = {"command": "factor-level", **fact.to_json_dict(),
               "ghh": {"holds": ok, "reason": reason}}
    _emit(payload, args)
    return EXIT_OK


def cmd_invariants(args) -> int:
    coeffs = json.loads(args.series)
    if not isinstance(coeffs, list) or not all(isinstance(c, int) for c in coeffs):
        raise AnticycloError("--series must be a JSON list of integers")
    ring = local_ring(args.prime, args.e, args.f)
    element = iw.from_integers(ring, coeffs, args.prec)
    ml = iw.mu_lambda(element)
    payload = {"command": "invariants", "mu": ml.mu, "lambda": ml.lam,
               "certainty": ml.certainty}
    _emit(payload, args)
    return EXIT_OK if ml.certainty == "CERTAIN" else EXIT_UNKNOWN


def cmd_local_terms(args) -> int:
    ctx = _context(args)
    record = load_form(args.form)
    primes = [int(q) for q in args.primes.split(",") if q]
    table = lambda_table(record, primes, ctx, degree=args.degree)
    payload = {"command": "local-terms", "context": ctx.to_json_dict(),
               **table.to_json_dict()}
    if args.plot_dir:
        from .plots import render_lambda_table

        target = Path(args.plot_dir) / f"local_terms_{record.label}.png"
        payload["figures"] = [render_lambda_table(table.to_json_dict(), target)]
    _emit(payload, args)
    return EXIT_OK if table.total() is not None else EXIT_UNKNOWN


def cmd_congruent(args) -> int:
    f1 = load_form(args.f1)
    f2 = load_form(args.f2)
    verdict = check_congruence(f1, f2, args.prime, args.prec)
    payload = {"command": "congruent", **verdict.to_json_dict()}
    _emit(payload, args)
    if verdict.holds is True:
        return EXIT_OK
    return EXIT_UNKNOWN if verdict.holds is None else EXIT_FAIL


def cmd_check(args) -> int:
    ctx = _context(args)
    f1 = load_form(args.f1)
    f2 = load_form(args.f2)
    report = hypothesis_report(f1, f2, ctx, strategy=args.strategy,
                               prec=args.cong_prec)
    payload = {"command": "check", **report.to_json_dict()}
    _emit(payload, args)
    overall = report.overall()
    if overall == HOLDS:
        return EXIT_OK
    return EXIT_FAIL if overall == FAILS else EXIT_UNKNOWN


def _transfer_payload(args_like) -> tuple[dict, int]:
    """Shared by `transfer` and batch rows; args_like is any namespace/dict."""
    get = (lambda k, d=None: args_like.get(k, d)) if isinstance(args_like, dict) \
        else (lambda k, d=None: getattr(args_like, k, d))
    mode = get("mode")
    prec = get("prec") or _default_prec()
    ctx = QuadFieldContext.create(get("disc"), get("prime"), prec=prec)
    f1 = load_form(get("f1"))
    f2 = load_form(get("f2")) if get("f2") else None
    strategy = get("strategy")
    report = run_transfer(
        mode, f1, f2, ctx,
        lambda_in=int(get("lambda_in") or 0),
        lambda_sel=int(get("lambda_sel") or 0),
        lambda_l=int(get("lambda_l") or 0),
        assert_fg=bool(get("assert_fg")),
        assert_alpha_unit=bool(get("assert_alpha_unit")),
        assert_mu=bool(get("assert_mu")),
        assert_imc_full_f1=bool(get("assert_imc_full_f1")),
        assert_imc_one_inclusion_f2=bool(get("assert_imc_one_inclusion_f2")),
        strategy=strategy.upper() if strategy else None,
        overrides=tuple(get("override") or ()),
        degree=get("degree") or DEFAULT_DEGREE,
        chi=get("chi"),
        decomposition=(get("n1"), get("n2"), get("n0")),
        side=(get("side") or "algebraic").upper(),
    )
    payload = {"command": "transfer", **report.to_json_dict()}
    code = {
        "OK": EXIT_OK, PROPAGATED: EXIT_OK, CONGRUENT: EXIT_OK,
        CONFLICT: EXIT_FAIL, NOT_CONGRUENT: EXIT_FAIL,
    }.get(report.status, EXIT_UNKNOWN)
    return payload, code


def cmd_transfer(args) -> int:
    try:
        payload, code = _transfer_payload(args)
    except AnticycloError as exc:
        payload = {"command": "transfer", "mode": args.mode,
                   "status": exc.code, "error": str(exc)}
        _emit(payload, args)
        return _error_exit_code(exc)
    if args.plot_dir and "tables" in payload:
        from .plots import render_lambda_table

        figures = []
        for label, table in sorted(payload["tables"].items()):
            target = Path(args.plot_dir) / f"transfer_{args.mode}_{label}.png"
            figures.append(render_lambda_table(table, target))
        payload["figures"] = figures
    _emit(payload, args)
    return code


def _run_row(index: int, row: dict) -> dict:
    entry: dict = {"index": index, "mode": row.get("mode"),
                   "f1": row.get("f1"), "f2": row.get("f2"),
                   "disc": row.get("disc"), "prime": row.get("prime")}
    try:
        payload, code = _transfer_payload(row)
        entry["status"] = payload["status"]
        entry["exit_class"] = code
        entry["report"] = payload
        entry["lambda_out"] = payload.get("lambda_out")
    except Exception as exc:  # rows are isolated
        entry["status"] = getattr(exc, "code", "ERROR")
        entry["exit_class"] = _error_exit_code(exc) if isinstance(exc, AnticycloError) \
            else EXIT_ERROR
        entry["error"] = str(exc)
        entry["lambda_out"] = None
    return entry


def _batch_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "mode", "f1", "f2", "disc", "prime", "status",
                     "lambda_out"])
    for r in rows:
        writer.writerow([r["index"], r.get("mode"), r.get("f1"), r.get("f2"),
                         r.get("disc"), r.get("prime"), r.get("status"),
                         "" if r.get("lambda_out") is None else r["lambda_out"]])
    return buf.getvalue()


def cmd_batch(args) -> int:
    with open(args.manifest, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if not isinstance(manifest, list):
        raise AnticycloError("manifest must be a JSON array of row objects")
    if args.jobs > 1 and manifest:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(lambda iv: _run_row(*iv), enumerate(manifest)))
    else:
        rows = [_run_row(i, row) for i, row in enumerate(manifest)]
    rows.sort(key=lambda r: r["index"])
    counts: dict[str, int] = {}
    for r in rows:
        counts[r["status"]] = counts.get(r["status"], 0) + 1
    worst = EXIT_OK
    if any(r["exit_class"] in (EXIT_ERROR, EXIT_FAIL) for r in rows):
        worst = EXIT_FAIL
    elif any(r["exit_class"] == EXIT_UNKNOWN for r in rows):
        worst = EXIT_UNKNOWN
    payload = {"command": "batch", "rows": rows,
               "summary": {"total": len(rows), "by_status": counts}}
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.json").write_text(canonical_json(payload), encoding="utf-8")
        (out_dir / "summary.csv").write_text(_batch_csv(rows), encoding="utf-8")
    if args.plot_dir:
        from .plots import render_batch_lambdas, render_verdict_counts

        plot_dir = Path(args.plot_dir)
        figures = [
            render_verdict_counts(counts, plot_dir / "batch_verdicts.png"),
            render_batch_lambdas(rows, plot_dir / "batch_lambdas.png"),
        ]
        payload["figures"] = figures
    _emit(payload, args)
    return worst


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(sp, prec=True, report=True):
    if prec:
        sp.add_argument("--prec", "--precision", dest="prec", type=int,
                        default=_default_prec(),
                        help="working pi-adic precision (env IWASAWA_PRECISION)")
    if report:
        sp.add_argument("--report", choices=["json", "md"], default="json")
        sp.add_argument("--out", help="also write the report to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anticyclo",
        description="Anticyclotomic Iwasawa invariants, local correction terms "
                    "and lambda-transfer identities for congruent eigenforms.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("ingest", help="validate and normalize a form file")
    sp.add_argument("--form", required=True)
    sp.add_argument("--full", action="store_true", help="echo the whole record")
    _add_common(sp, prec=False)
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("twist", help="quadratic twist of a form file")
    sp.add_argument("--form", required=True)
    sp.add_argument("--disc", type=int, required=True,
                    help="fundamental discriminant of the twisting character")
    _add_common(sp, prec=False)
    sp.set_defaults(func=cmd_twist)

    sp = sub.add_parser("factor-level", help="split/inert level factorization")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--disc", type=int, required=True)
    sp.add_argument("--prime", type=int, default=None)
    _add_common(sp, prec=False)
    sp.set_defaults(func=cmd_factor_level)

    sp = sub.add_parser("invariants", help="mu/lambda of a coefficient list")
    sp.add_argument("--series", required=True, help="JSON list of integers")
    sp.add_argument("--prime", type=int, required=True)
    sp.add_argument("--e", type=int, default=1)
    sp.add_argument("--f", type=int, default=1)
    _add_common(sp)
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("local-terms", help="local correction table for a form")
    sp.add_argument("--form", required=True)
    sp.add_argument("--disc", type=int, required=True)
    sp.add_argument("--prime", type=int, required=True)
    sp.add_argument("--primes", required=True, help="comma-separated rational primes")
    sp.add_argument("--degree", type=int, default=DEFAULT_DEGREE)
    sp.add_argument("--plot-dir", default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_local_terms)

    sp = sub.add_parser("congruent", help="coefficient congruence verdict")
    sp.add_argument("--f1", required=True)
    sp.add_argument("--f2", required=True)
    sp.add_argument("--prime", type=int, required=True)
    sp.add_argument("--prec", type=int, default=1, help="congruence power k")
    sp.add_argument("--report", choices=["json", "md"], default="json")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_congruent)

    sp = sub.add_parser("check", help="hypothesis report for a form pair")
    sp.add_argument("--f1", required=True)
    sp.add_argument("--f2", required=True)
    sp.add_argument("--disc", type=int, required=True)
    sp.add_argument("--prime", type=int, required=True)
    sp.add_argument("--strategy", choices=[RELAXED, SQUARE], default=RELAXED)
    sp.add_argument("--cong-prec", type=int, default=1)
    _add_common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("transfer", help="evaluate a transfer identity")
    sp.add_argument("--mode", required=True,
                    choices=["algebraic", "analytic", "imc", "heegner", "mu-cert"])
    sp.add_argument("--f1", required=True)
    sp.add_argument("--f2")
    sp.add_argument("--disc", type=int, required=True)
    sp.add_argument("--prime", type=int, required=True)
    sp.add_argument("--lambda-in", dest="lambda_in", type=int, default=0)
    sp.add_argument("--lambda-sel", dest="lambda_sel", type=int, default=0)
    sp.add_argument("--lambda-l", dest="lambda_l", type=int, default=0)
    sp.add_argument("--assert-fg", action="store_true")
    sp.add_argument("--assert-alpha-unit", action="store_true")
    sp.add_argument("--assert-mu", action="store_true")
    sp.add_argument("--assert-imc-full-f1", action="store_true")
    sp.add_argument("--assert-imc-one-inclusion-f2", action="store_true")
    sp.add_argument("--override", action="append", default=[],
                    help="override a gating hypothesis (recorded in the report)")
    sp.add_argument("--strategy", choices=[RELAXED, SQUARE], default=None)
    sp.add_argument("--chi", type=int, help="twisting discriminant for mu-cert")
    sp.add_argument("--n1", type=int)
    sp.add_argument("--n2", type=int)
    sp.add_argument("--n0", type=int)
    sp.add_argument("--side", choices=["algebraic", "analytic"], default="algebraic")
    sp.add_argument("--degree", type=int, default=DEFAULT_DEGREE)
    sp.add_argument("--plot-dir", default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_transfer)

    sp = sub.add_parser("batch", help="run a manifest of transfer rows")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out-dir", default=None)
    sp.add_argument("--plot-dir", default=None)
    _add_common(sp, prec=False)
    sp.set_defaults(func=cmd_batch)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except AnticycloError as exc:
        sys.stdout.write(canonical_json(
            {"command": args.command, "status": exc.code, "error": str(exc)}))
        return _error_exit_code(exc)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        sys.stdout.write(canonical_json(
            {"command": args.command, "status": "ERROR", "error": str(exc)}))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
