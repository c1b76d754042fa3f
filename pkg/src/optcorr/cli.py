"""Command-line front end: ``discover``, ``evaluate`` and ``verify``.

Exit codes: 0 success, 1 verification failure or table mismatch, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .cones import ray_table_csv, ray_table_json
from .discovery import (
    REFERENCE_FINITE_TAGS,
    alpha_cone,
    classify_ray,
    expected_rays,
    finiteness_check,
    named_alpha,
)
from .entropy_space import ALPHA_SLOTS, AlphaVector
from .estimator import InfiniteMeasureError, estimate_measure
from .states import NAMED_STATE_HELP, StateError, load_state, named_state

TOOL = f"optcorr {__version__}"


class UsageError(Exception):
    pass


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _format_rows(rays, tags=None) -> str:
    width = max(len(s) for s in ALPHA_SLOTS) + 2
    head = "".join(f"{'a_' + s:>{width + 2}}" for s in ALPHA_SLOTS)
    lines = [head + ("  tag" if tags else "")]
    for k, r in enumerate(rays):
        line = "".join(f"{x:>{width + 2}d}" for x in r)
        if tags:
            line += f"  {tags[k]}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def _reference_table(finite: bool) -> str:
    """Both reference blocks (00 then 10) in reference row order, for eyeball diffing."""
    out = []
    title = ("extreme rays of C ∩ 00 and C ∩ 10" if finite
             else "extreme rays of the 00 and 10 cones")
    out.append(f"# {TOOL}: {title}")
    cols = ["Cone", *(f"a_{s}" for s in ALPHA_SLOTS)] + (["label"] if finite else [])
    out.append(" | ".join(f"{c:>6}" for c in cols))
    for label in ("00", "10"):
        res = alpha_cone(int(label[0]), int(label[1]), finite)
        ref = expected_rays(label, finite)
        # computed rays in reference order, then anything unexpected
        rows = [r for r in ref if r in set(res.rays)]
        rows += [r for r in res.rays if r not in set(ref)]
        for k, r in enumerate(rows):
            name = (("C∩" if finite else "") + label) if k == 0 else ""
            cells = [f"{name:>6}", *(f"{x:>6d}" for x in r)]
            if finite:
                idx = ref.index(r) if r in ref else None
                cells.append(f"{REFERENCE_FINITE_TAGS[label][idx] if idx is not None else '?':>6}")
            out.append(" | ".join(cells))
    return "\n".join(out) + "\n"


def cmd_discover(args) -> int:
    a, b = int(args.cone[0]), int(args.cone[1])
    res = alpha_cone(a, b, args.finite)
    tags = None
    if args.classify:
        tags = [classify_ray(r, seed=args.seed) if finiteness_check(r) else "infinite"
                for r in res.rays]
    cfg = _config(args)
    if args.format == "json":
        doc = {"tool": TOOL, "config": cfg,
               **ray_table_json(res.rays, ALPHA_SLOTS, res.label,
                                "classification" if tags else None, tags)}
        text = json.dumps(doc, indent=2) + "\n"
    elif args.format == "csv":
        text = (f"# {TOOL}\n# config: {json.dumps(cfg)}\n"
                + ray_table_csv(res.rays, ALPHA_SLOTS, res.label,
                                "classification" if tags else None, tags))
    else:
        text = (f"# {TOOL}\n# config: {json.dumps(cfg)}\n# cone {res.label}: "
                f"{len(res.rays)} generators\n" + _format_rows(res.rays, tags))
    _emit(text, args.output)
    if args.paper_tables:
        os.makedirs(args.paper_tables, exist_ok=True)
        for finite, name in ((False, "cones.txt"), (True, "finite_cones.txt")):
            with open(os.path.join(args.paper_tables, name), "w") as fh:
                fh.write(_reference_table(finite))
    if args.expect == "paper":
        extra, missing = res.diff(expected_rays(args.cone, args.finite))
        if extra or missing:
            print(f"MISMATCH for cone {res.label}", file=sys.stderr)
            for r in extra:
                print(f"+ {r}", file=sys.stderr)
            for r in missing:
                print(f"- {r}", file=sys.stderr)
            return 1
        print(f"cone {res.label}: {len(res.rays)} rays match the reference set",
              file=sys.stderr)
    return 0


def _parse_alpha(text: str) -> AlphaVector:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--alpha expects 7 comma-separated numbers, got {text!r}") from None
    if len(vals) != 7:
        raise UsageError(f"--alpha expects 7 values, got {len(vals)}")
    return AlphaVector.real(vals)


def cmd_evaluate(args) -> int:
    if (args.measure is None) == (args.alpha is None):
        raise UsageError("give exactly one of --measure and --alpha")
    if (args.state_file is None) == (args.named is None):
        raise UsageError("give exactly one of --state-file and --named")
    alpha = named_alpha(args.measure) if args.measure else _parse_alpha(args.alpha)
    try:
        rho = load_state(args.state_file) if args.state_file else named_state(args.named)
    except StateError as exc:
        raise UsageError(f"invalid state: {exc}") from None
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read state: {exc}") from None
    if rho.labels != ("A", "B"):
        raise UsageError(f"state must have subsystems (A, B), got {rho.labels}")
    try:
        est = estimate_measure(alpha, rho, d_V=args.dv, d_F=args.df, restarts=args.restarts,
                               max_iters=args.max_iters, seed=args.seed, tol=args.tol)
    except InfiniteMeasureError as exc:
        raise UsageError(f"infinite measure: {exc}") from None
    doc = {"tool": TOOL, "config": _config(args), "estimate": est.to_json()}
    text = json.dumps(doc, indent=2) + "\n"
    if args.output:
        _emit(text, args.output)
    lb = "none" if est.lower_bound is None else f"{est.lower_bound:.6f}"
    gap = "n/a" if est.gap is None else f"{est.gap:.6f}"
    print(f"value {est.value:.6f}  lower bound {lb}  gap {gap}  "
          f"(upper bound at d_V = {est.d_V}, converged {est.converged})")
    if not args.output:
        sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    from .verify import run_suite

    checks = run_suite(args.suite, seed=args.seed)
    for c in checks:
        print(c.line())
    ok = all(c.passed for c in checks)
    print(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    if args.output:
        doc = {"tool": TOOL, "config": _config(args), "passed": ok,
               "checks": [c.to_json() for c in checks]}
        with open(args.output, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="optcorr",
        description="Monotone cones and variational estimates of optimized entropic "
                    "correlation measures.",
        formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=TOOL)
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("discover", help="compute a monotone cone's generators")
    d.add_argument("--cone", required=True, choices=["00", "10", "01", "11"])
    d.add_argument("--finite", action="store_true",
                   help="intersect with the finiteness halfspace")
    d.add_argument("--expect", choices=["paper"],
                   help="compare with the embedded reference rays (exit 1 on mismatch)")
    d.add_argument("--format", choices=["json", "csv", "table"], default="table")
    d.add_argument("--output", "-o")
    d.add_argument("--classify", action="store_true",
                   help="tag each ray with the heuristic triviality classifier")
    d.add_argument("--paper-tables", metavar="DIR",
                   help="also write both reference-layout tables into DIR")
    d.add_argument("--seed", type=int, default=0)
    d.set_defaults(func=cmd_discover)

    e = sub.add_parser("evaluate", help="estimate E_alpha of a bipartite state",
                       epilog="named states:\n" + NAMED_STATE_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    e.add_argument("--measure", choices=["P", "Q", "R", "sq"])
    e.add_argument("--alpha", help="7 comma-separated coefficients A,B,V,AB,AV,BV,ABV")
    e.add_argument("--state-file")
    e.add_argument("--named")
    e.add_argument("--dv", type=int, help="extension dimension (default d_A * d_B)")
    e.add_argument("--df", type=int, help="Stinespring environment dimension")
    e.add_argument("--restarts", type=int, default=8)
    e.add_argument("--max-iters", type=int, default=2000)
    e.add_argument("--tol", type=float, default=1e-8)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--output", "-o")
    e.set_defaults(func=cmd_evaluate)

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("--suite", default="all",
                   choices=["tables", "bounds", "additivity", "monotonicity", "domination",
                            "duality", "closed-forms", "divergence", "hygiene", "all"])
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--output", "-o", help="JSON report path")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
