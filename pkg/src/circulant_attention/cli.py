"""Command-line entry point ``circattn``.

Exit codes: 0 success, 1 verification failure, 2 usage or validation error,
3 I/O failure. Structured output goes to stdout, status messages to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import analysis, bench, costmodel, io, verify
from .errors import DomainError, FormatError, ShapeMismatch, TooLarge
from .rng import SplitMix64
from .spectral import GridShape

log = logging.getLogger("circattn")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("CIRC_ATTN_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"CIRC_ATTN_SEED must be an integer, got {raw!r}") from None


def _grid(text: str) -> GridShape:
    try:
        return GridShape.parse(text)
    except FormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _grids(text: str) -> list[GridShape]:
    return [_grid(t) for t in text.split(",") if t.strip()]


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def cmd_verify(args) -> int:
    if args.cases < 1:
        raise UsageError("--cases must be >= 1")
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    results = verify.run_suites(names, args.seed, args.cases)
    for r in results:
        print(verify.format_result(r))
    failed = [r[0] for r in results if not r[1]]
    if failed:
        log.error("%d of %d checks failed", len(failed), len(results))
        return EXIT_FAIL
    log.info("all %d checks passed", len(results))
    return EXIT_OK


def cmd_project(args) -> int:
    A = io.read_matrix_csv(args.inp)
    report = analysis.bccb_similarity_report(A, args.grid)
    if args.out_kernel:
        io.write_matrix_csv(args.out_kernel, report.kernel.reshape(1, -1))
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_json(), indent=2) + "\n")
    _emit(report.to_json())
    return EXIT_OK


def cmd_kernels(args) -> int:
    if args.count < 0 or args.dim < 1:
        raise UsageError("--count must be >= 0 and --dim >= 1")
    g = args.grid
    rng = SplitMix64(args.seed)
    written = []
    if args.count:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        Q = rng.uniform((g.H, g.W, args.dim), -1.0, 1.0)
        K = rng.uniform((g.H, g.W, args.dim), -1.0, 1.0)
        kernel = analysis.extract_equivalent_kernel(Q, K)
        base = Path(args.out_dir) / f"kernel_{i}"
        analysis.export_kernel_pgm(kernel, f"{base}.pgm")
        io.write_matrix_csv(f"{base}.csv", kernel)
        written += [f"{base}.pgm", f"{base}.csv"]
    log.info("wrote %d files", len(written))
    _emit({"written": written})
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = bench.wallclock_sweep(args.impl, args.grids, args.dim, args.heads, args.reps,
                                 args.seed, allow_large=args.allow_large)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            bench.write_csv(rows, fh)
    else:
        bench.write_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_flops(args) -> int:
    layer = [args.N, args.dim, args.heads]
    if args.model is not None:
        if any(v is not None for v in layer):
            raise UsageError("--model cannot be combined with --N/--dim/--heads")
        N = costmodel.tokens_for_resolution(args.resolution, args.patch)
        spec = costmodel.MODELS[args.model]
        _emit({"model": args.model, "resolution": args.resolution, "N": N,
               "flops": costmodel.model_flops(spec, N)})
        return EXIT_OK
    if any(v is None for v in layer):
        raise UsageError("give either --model, or all of --N, --dim, --heads")
    rep = costmodel.attention_flops(args.N, args.dim, args.heads)
    _emit(vars(rep))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="circattn", description="Circulant (BCCB) attention toolkit.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def seeded(sp):
        sp.add_argument("--seed", type=int, default=None,
                        help="PRNG seed (default: $CIRC_ATTN_SEED or 0)")
        return sp

    sp = seeded(sub.add_parser("verify", help="run property suites"))
    sp.add_argument("--suite", choices=[*verify.SUITES, "all"], default="all")
    sp.add_argument("--cases", type=int, default=10)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("project", help="project a matrix onto the BCCB subspace")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--grid", type=_grid, required=True)
    sp.add_argument("--out-kernel")
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_project)

    sp = seeded(sub.add_parser("kernels", help="export equivalent convolution kernels"))
    sp.add_argument("--grid", type=_grid, default=GridShape(14, 14))
    sp.add_argument("--dim", type=int, default=1)
    sp.add_argument("--count", type=int, default=8)
    sp.add_argument("--out-dir", default="kernels")
    sp.set_defaults(func=cmd_kernels)

    sp = seeded(sub.add_parser("bench", help="wall-clock scaling sweep (CSV)"))
    sp.add_argument("--impl", choices=sorted(bench.IMPLS), default="ca_fast")
    sp.add_argument("--grids", type=_grids, default=[GridShape(32, 32), GridShape(64, 64)])
    sp.add_argument("--dim", type=int, default=8)
    sp.add_argument("--heads", type=int, default=1)
    sp.add_argument("--reps", type=int, default=5)
    sp.add_argument("--out")
    sp.add_argument("--allow-large", action="store_true")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("flops", help="analytic FLOP counts (JSON)")
    sp.add_argument("--N", type=int)
    sp.add_argument("--dim", type=int)
    sp.add_argument("--heads", type=int)
    sp.add_argument("--model", choices=sorted(costmodel.MODELS))
    sp.add_argument("--resolution", type=int, default=224)
    sp.add_argument("--patch", type=int, default=16)
    sp.set_defaults(func=cmd_flops)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on bad flags
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        return args.func(args)
    except (UsageError, ShapeMismatch, FormatError, DomainError, TooLarge) as exc:
        parser.print_usage(sys.stderr)
        print(f"circattn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"circattn: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
