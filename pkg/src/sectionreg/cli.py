"""Command-line front end.

Examples::

    sectionreg synth --sections 8 --points 400 --overlap 20 --noise 0.02 --seed 1 \\
        --out chain.json --truth truth.json
    sectionreg solve --chain chain.json --out transforms.json --report report.json
    sectionreg baseline --chain chain.json --method pairwise --out pairwise.json
    sectionreg eval --chain chain.json --transforms transforms.json --truth truth.json --metric mse
    sectionreg sweep --ratios 0:0.1:0.01 --trials 20 --seed 0 --out sweep.csv

Exit codes: 0 success, 1 usage error, 2 data/invariant error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import io as _io
import json
import sys
from decimal import Decimal, InvalidOperation

import numpy as np

from . import io
from .baselines import sequential_solve
from .chain import ChainValidationError
from .pipeline import nsrr_solve
from .rotation import ClosureError
from .so2 import NotARotationError
from .synthetic import NoiseSpec, epe, fish_outline, generate, mse, noise_sweep, write_sweep_csv

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_ratios(text: str) -> list[float]:
    """Parse ``a:b:step`` (inclusive of ``b``) or a comma-separated list."""
    try:
        if ":" in text:
            a, b, step = (Decimal(x) for x in text.split(":"))
            if step <= 0 or b < a:
                raise UsageError(f"bad ratio range {text!r}")
            count = int((b - a) / step)
            out = [float(a + k * step) for k in range(count + 1)]
        else:
            out = [float(Decimal(x)) for x in text.split(",")]
    except (InvalidOperation, ValueError) as exc:
        raise UsageError(f"cannot parse ratios {text!r}") from exc
    if any(r < 0 for r in out):
        raise UsageError("noise ratios must be non-negative")
    return out


def _positive(name, value, minimum=1):
    if value < minimum:
        raise UsageError(f"--{name} must be >= {minimum}")


def cmd_solve(args) -> int:
    chain = io.read_chain(args.chain)
    reg, report = nsrr_solve(chain)
    io.write_transforms(reg, args.out)
    if args.report:
        doc = {"method": "nsrr", "n": chain.n, **report.to_dict()}
        io.atomic_write_text(args.report, json.dumps(doc, indent=1) + "\n")
    return EXIT_OK


def cmd_baseline(args) -> int:
    chain = io.read_chain(args.chain)
    io.write_transforms(sequential_solve(chain), args.out, endpoints_fixed=False)
    return EXIT_OK


def cmd_synth(args) -> int:
    _positive("sections", args.sections, 2)
    _positive("points", args.points)
    _positive("overlap", args.overlap)
    if args.overlap > args.points:
        raise UsageError("--overlap cannot exceed --points")
    if not args.noise >= 0:
        raise UsageError("--noise must be >= 0")
    gt = generate(
        args.sections,
        args.overlap,
        fish_outline(args.points),
        noise=NoiseSpec(args.noise, args.seed),
    )
    io.write_chain(gt.chain, args.out, {"description": f"synthetic fish chain, seed {args.seed}"})
    io.write_truth(gt, args.truth)
    return EXIT_OK


def cmd_eval(args) -> int:
    chain = io.read_chain(args.chain)
    transforms = io.read_transforms(args.transforms)
    if len(transforms) != chain.n:
        raise io.DocumentError(
            f"{args.transforms}: {len(transforms)} transforms for a chain of {chain.n} sections"
        )
    if args.metric == "mse":
        if not args.truth:
            raise UsageError("--metric mse requires --truth")
        value = mse(transforms, io.read_truth(args.truth, chain))
    else:
        value = epe(chain, transforms)
    print(repr(float(value)))
    return EXIT_OK


def cmd_sweep(args) -> int:
    ratios = parse_ratios(args.ratios)
    _positive("trials", args.trials)
    _positive("sections", args.sections, 2)
    _positive("overlap", args.overlap)
    if args.overlap > args.points:
        raise UsageError("--overlap cannot exceed --points")
    rows = noise_sweep(
        ratios,
        trials=args.trials,
        seed=args.seed,
        sections=args.sections,
        points_per_overlap=args.overlap,
        base_shape=fish_outline(args.points),
    )
    buf = _io.StringIO()
    write_sweep_csv(rows, buf)
    io.atomic_write_text(args.out, buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sectionreg", description="Rigid registration of serial-section landmark chains.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="simultaneous registration with fixed end sections")
    s.add_argument("--chain", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--report")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("baseline", help="sequential pairwise registration")
    s.add_argument("--chain", required=True)
    s.add_argument("--method", choices=["pairwise"], default="pairwise")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_baseline)

    s = sub.add_parser("synth", help="generate a synthetic chain with ground truth")
    s.add_argument("--sections", type=int, required=True)
    s.add_argument("--points", type=int, default=400, help="points sampled on the fish outline")
    s.add_argument("--overlap", type=int, default=20, help="landmarks shared per adjacent pair")
    s.add_argument("--noise", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--truth", required=True)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("eval", help="score a registration")
    s.add_argument("--chain", required=True)
    s.add_argument("--transforms", required=True)
    s.add_argument("--truth")
    s.add_argument("--metric", choices=["mse", "epe"], required=True)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("sweep", help="MSE versus noise ratio")
    s.add_argument("--ratios", default="0:0.1:0.01")
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--sections", type=int, default=8)
    s.add_argument("--points", type=int, default=400)
    s.add_argument("--overlap", type=int, default=20)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sectionreg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (io.DocumentError, ChainValidationError, NotARotationError) as exc:
        print(f"sectionreg: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ClosureError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"sectionreg: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"sectionreg: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
