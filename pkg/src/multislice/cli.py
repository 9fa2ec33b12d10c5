"""Command-line front end.

One command per invocation:

    multislice info -k 2,1,1
    multislice spectrum -k 2,2 --format json
    multislice verify --sweep N=2..6
    multislice coarsen --from 1,1,1 --to 2,1
    multislice walk -k 2,2,2 --steps 1e6 --seed 7
    multislice export -k 2,1 --format edgelist

All machine-readable output uses one JSON envelope
{command, config, results, certificates, timing}; exit code 0 means every
requested certificate passed.
"""

from __future__ import annotations

import argparse
import io
import json
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import report
from .coarsening import intertwine_audit, is_coarser, spectrum_containment
from .core import (
    DEFAULT_BUDGET,
    BudgetError,
    Composition,
    reduced_compositions,
    to_dot,
    write_edge_list,
)
from .operators import laplacian, write_coo
from .spectral import (
    DEFAULT_DENSE_CAP,
    DEFAULT_TOL,
    certification_suite,
    exact_eigenvalue_multiplicity,
    full_spectrum,
)
from .walk import WalkConfig, relaxation_estimate, simulate

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _add_common(parser: argparse.ArgumentParser, composition: bool = True) -> None:
    if composition:
        parser.add_argument("-k", "--composition", help="comma-separated counts, e.g. 2,1,1")
    parser.add_argument("--tolerance", type=float, default=DEFAULT_TOL)
    parser.add_argument("--dense-cap", type=int, default=DEFAULT_DENSE_CAP)
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    parser.add_argument("-o", "--out", help="write the report here instead of stdout")
    parser.add_argument(
        "--format",
        choices=("json", "text", "csv", "dot", "edgelist", "coo"),
        default=None,
        help="output format (commands accept a sensible subset)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multislice",
        description="Multislice graphs: enumeration, spectra, certificates, walks.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_info = sub.add_parser("info", help="cardinality, degree, and status of a slice")
    _add_common(p_info)

    p_spec = sub.add_parser("spectrum", help="Laplacian spectrum with multiplicities")
    _add_common(p_spec)
    mode = p_spec.add_mutually_exclusive_group()
    mode.add_argument(
        "--exact",
        action="store_true",
        help="also certify multiplicities of rational eigenvalues by exact nullity",
    )
    mode.add_argument("--float", dest="float_only", action="store_true", help="floating spectrum only (default)")

    p_verify = sub.add_parser("verify", help="run the full certification suite")
    _add_common(p_verify)
    p_verify.add_argument("--sweep", help="certify all reduced compositions, e.g. N=2..6")
    p_verify.add_argument("--functions", type=int, default=20, help="random functions per identity audit")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--jobs", type=int, default=1, help="parallel workers for sweeps")

    p_coarsen = sub.add_parser("coarsen", help="audit a coarsening pair")
    _add_common(p_coarsen, composition=False)
    p_coarsen.add_argument("--from", dest="fine", required=True, help="fine composition")
    p_coarsen.add_argument("--to", dest="coarse", required=True, help="coarse composition")
    p_coarsen.add_argument("--functions", type=int, default=100)
    p_coarsen.add_argument("--seed", type=int, default=0)

    p_walk = sub.add_parser("walk", help="random transposition walk statistics")
    _add_common(p_walk)
    p_walk.add_argument("--steps", default="1e6", help="step count (accepts 1e6 notation)")
    p_walk.add_argument("--seed", type=int, default=0)
    p_walk.add_argument("--burn-in", type=int, default=0)
    p_walk.add_argument("--thin", type=int, default=1)
    p_walk.add_argument("--lags", type=int, default=12)
    p_walk.add_argument(
        "--dump-trajectory",
        action="store_true",
        help="include the raw visited-rank sequence in the report (size-capped)",
    )

    p_export = sub.add_parser("export", help="graph and matrix exports")
    _add_common(p_export)

    return parser


def _parse_composition(text: str | None) -> Composition:
    if not text:
        print("error: missing -k/--composition", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    try:
        return Composition.parse(text)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_envelope(args, command: str, config: dict, results, certificates, t0: float) -> None:
    doc = report.envelope(command, config, results, certificates, time.perf_counter() - t0)
    _emit(args, json.dumps(doc, indent=2, sort_keys=True))


def cmd_info(args) -> int:
    t0 = time.perf_counter()
    k = _parse_composition(args.composition)
    reduced, mapping = k.reduce()
    results = {
        "composition": str(k),
        "cardinality": k.cardinality(),
        "degree": k.degree(),
        "trivial": k.is_trivial,
        "reduced": k.is_reduced,
        "reduction": {"composition": str(reduced), "level_map": mapping},
        "particles": k.n,
        "levels": k.r,
        "active_levels": k.r_active,
    }
    if args.format in (None, "text"):
        lines = [
            f"composition {k}: {k.cardinality()} vertices, degree {k.degree()}",
            f"particles N={k.n}, levels r={k.r} (active {k.r_active})",
            f"trivial: {k.is_trivial}, reduced: {k.is_reduced}"
            + ("" if k.is_reduced else f" (reduces to {reduced})"),
        ]
        _emit(args, "\n".join(lines))
    else:
        _emit_envelope(args, "info", {"composition": str(k)}, results, [], t0)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    t0 = time.perf_counter()
    k = _parse_composition(args.composition)
    lap = laplacian(k, args.budget)
    spec = full_spectrum(
        lap,
        tol=args.tolerance,
        source=f"laplacian[{k}]",
        dense_cap=args.dense_cap,
    )
    results = {
        "composition": str(k),
        "cardinality": k.cardinality(),
        "degree": k.degree(),
        "spectrum": spec.as_dict(),
    }
    certificates = []
    if args.exact:
        dense = lap.toarray()
        for value, mult in spec.pairs:
            if value != round(value):
                certificates.append(
                    {"name": f"multiplicity[{value:g}]", "passed": None,
                     "details": {"status": "skipped", "reason": "non-integer cluster value"}}
                )
                continue
            exact_mult = exact_eigenvalue_multiplicity(dense, int(round(value)))
            certificates.append(
                {"name": f"multiplicity[{int(round(value))}]",
                 "passed": exact_mult == mult,
                 "details": {"float_multiplicity": mult, "exact_multiplicity": exact_mult}}
            )
    if args.format == "csv":
        _emit(args, report.csv_lines(("eigenvalue", "multiplicity"), spec.pairs))
    elif args.format == "text":
        body = ", ".join(f"{v:g} (x{m})" for v, m in spec.pairs)
        _emit(args, f"spectrum of {k}: {body}")
    else:
        _emit_envelope(
            args, "spectrum", {"composition": str(k), "exact": args.exact}, results, certificates, t0
        )
    return EXIT_FAILED if any(c["passed"] is False for c in certificates) else EXIT_OK


def _sweep_compositions(spec_text: str) -> list[Composition]:
    match = re.fullmatch(r"N=(\d+)(?:\.\.(\d+))?", spec_text.strip())
    if not match:
        print(f"error: bad sweep range {spec_text!r}; use N=2..6", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    lo = int(match.group(1))
    hi = int(match.group(2) or match.group(1))
    out: list[Composition] = []
    for n in range(lo, hi + 1):
        out.extend(sorted(reduced_compositions(n), key=lambda c: c.counts))
    return out


def _verify_one(payload) -> dict:
    counts, tol, dense_cap, budget, n_functions, seed = payload
    k = Composition(counts)
    try:
        rep = certification_suite(
            k, tol=tol, dense_cap=dense_cap, budget=budget, n_functions=n_functions, seed=seed
        )
        doc = rep.as_dict()
        doc["status"] = "trivial-skipped" if rep.trivial else ("pass" if rep.passed else "fail")
        return doc
    except BudgetError as exc:
        return {"composition": str(k), "status": "budget-exceeded", "reason": str(exc)}


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    if args.sweep:
        comps = _sweep_compositions(args.sweep)
    else:
        comps = [_parse_composition(args.composition)]
    payloads = [
        (k.counts, args.tolerance, args.dense_cap, args.budget, args.functions, args.seed)
        for k in comps
    ]
    if args.jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_verify_one, payloads))
    else:
        results = [_verify_one(p) for p in payloads]

    certificates = []
    for doc in results:
        for cert in doc.get("certificates", []):
            certificates.append({"composition": doc["composition"], **cert})
    n_fail = sum(1 for doc in results if doc["status"] == "fail")
    summary = {
        "instances": len(results),
        "passed": sum(1 for d in results if d["status"] == "pass"),
        "failed": n_fail,
        "skipped_trivial": sum(1 for d in results if d["status"] == "trivial-skipped"),
        "budget_exceeded": sum(1 for d in results if d["status"] == "budget-exceeded"),
    }
    if args.format == "text":
        lines = []
        for doc in results:
            extra = ""
            if doc.get("gap") is not None:
                extra = f" gap={doc['gap']:g} delta={doc['delta']:g}"
            lines.append(f"{doc['composition']}: {doc['status']}{extra}")
        lines.append(f"summary: {summary}")
        _emit(args, "\n".join(lines))
    else:
        _emit_envelope(
            args,
            "verify",
            {"sweep": args.sweep, "compositions": [str(k) for k in comps]},
            {"summary": summary, "instances": results},
            certificates,
            t0,
        )
    return EXIT_FAILED if n_fail else EXIT_OK


def cmd_coarsen(args) -> int:
    t0 = time.perf_counter()
    fine = Composition.parse(args.fine)
    coarse = Composition.parse(args.coarse)
    phi = is_coarser(coarse, fine)
    if phi is None:
        _emit_envelope(
            args,
            "coarsen",
            {"from": str(fine), "to": str(coarse)},
            {"witness": None, "reason": "no surjection merges the counts"},
            [{"name": "coarsening-witness", "passed": False}],
            t0,
        )
        return EXIT_FAILED
    audit = intertwine_audit(phi, fine, n_functions=args.functions, seed=args.seed, budget=args.budget)
    containment = spectrum_containment(phi, fine, args.tolerance, args.dense_cap, args.budget)
    certs = [
        {"name": "intertwining", "passed": audit["all_exact"], "details": audit},
        {
            "name": "spectrum-containment",
            "passed": containment.contained and containment.gap_monotone,
            "details": containment.as_dict(),
        },
    ]
    ok = all(c["passed"] for c in certs)
    _emit_envelope(
        args,
        "coarsen",
        {"from": str(fine), "to": str(coarse)},
        {"witness": json.loads(phi.to_json()), "containment": containment.as_dict()},
        certs,
        t0,
    )
    return EXIT_OK if ok else EXIT_FAILED


def cmd_walk(args) -> int:
    t0 = time.perf_counter()
    k = _parse_composition(args.composition)
    steps = int(float(args.steps))
    cfg = WalkConfig(
        composition=k,
        steps=steps,
        seed=args.seed,
        burn_in=args.burn_in,
        thin=args.thin,
        lags=args.lags,
        dump_trajectory=args.dump_trajectory,
    )
    stats = simulate(cfg, budget=args.budget)
    if args.format == "csv":
        _emit(args, report.csv_lines(("lag", "autocorrelation", "stderr"), stats.csv_rows()))
        return EXIT_OK
    results = stats.as_dict()
    if not stats.degenerate:
        ratio, stderr = relaxation_estimate(stats)
        target = 1.0 - 2.0 / (k.n - 1)
        results["relaxation"] = {
            "ratio": ratio,
            "stderr": stderr,
            "target": target,
            "periodic": stats.periodic,
        }
    _emit_envelope(
        args,
        "walk",
        {"composition": str(k), "steps": steps, "seed": args.seed, "thin": args.thin},
        results,
        [],
        t0,
    )
    return EXIT_OK


def cmd_export(args) -> int:
    t0 = time.perf_counter()
    k = _parse_composition(args.composition)
    fmt = args.format or "edgelist"
    if fmt == "edgelist":
        buf = io.StringIO()
        write_edge_list(k, buf, args.budget)
        _emit(args, buf.getvalue())
    elif fmt == "dot":
        _emit(args, to_dot(k, args.budget))
    elif fmt == "coo":
        buf = io.StringIO()
        write_coo(laplacian(k, args.budget), buf)
        _emit(args, buf.getvalue())
    elif fmt == "json":
        _emit_envelope(
            args,
            "export",
            {"composition": str(k)},
            {"composition": json.loads(k.to_json())},
            [],
            t0,
        )
    else:
        print(f"error: export cannot produce {fmt!r}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "info": cmd_info,
        "spectrum": cmd_spectrum,
        "verify": cmd_verify,
        "coarsen": cmd_coarsen,
        "walk": cmd_walk,
        "export": cmd_export,
    }
    try:
        return handlers[args.cmd](args)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
