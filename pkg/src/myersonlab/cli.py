"""Command-line harness around the experiment suite.

Each subcommand runs one experiment and writes its report as JSON (default)
or CSV rows. Exit status: 0 for a pass verdict, 2 for fail, 1 for input
errors including precondition violations.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import lab
from .curves import iron, ironing_intervals, monopoly, revenue_curve
from .dist import ProductDist, ValueDist
from .feasible import feasible_from_json


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _finish(report: lab.Report, args) -> int:
    if args.format == "csv":
        text = "\n".join(["experiment,params,metric,value,verdict"] + report.csv_rows())
    else:
        text = json.dumps(report.to_json(), sort_keys=True, indent=2)
    _emit(text, args.out)
    return 0 if report.passed else 2


def _add_common(sp) -> None:
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out", metavar="PATH", default=None)


def _cmd_nonmonotone(args) -> int:
    return _finish(lab.run_nonmonotone(args.eps), args)


def _cmd_copies(args) -> int:
    return _finish(lab.run_copies(args.k, args.trials, args.seed), args)


def _cmd_embed(args) -> int:
    fs = feasible_from_json(_load_json(args.feasible))
    return _finish(lab.embed_counterexample(fs, args.eps), args)


def _cmd_approx_monotone(args) -> int:
    dd = ProductDist.from_json(_load_json(args.dd))
    dtilde = ProductDist.from_json(_load_json(args.dtilde))
    fs = feasible_from_json(_load_json(args.feasible))
    return _finish(lab.check_approx_monotone(dd, dtilde, args.eps, fs, args.uniform), args)


def _cmd_lipschitz_lb(args) -> int:
    return _finish(lab.run_lipschitz_lb(args.n, args.k, args.eps), args)


def _cmd_sample_complexity(args) -> int:
    fs = feasible_from_json(_load_json(args.feasible))
    d = ProductDist.from_json(_load_json(args.dist))
    return _finish(
        lab.run_sample_complexity(
            fs, d, args.eps, args.delta, args.constant, args.trials, args.seed
        ),
        args,
    )


def _cmd_lb_family(args) -> int:
    return _finish(
        lab.run_lb_family(args.n, args.k, args.eps, args.budget, args.trials, args.seed),
        args,
    )


def _cmd_curves(args) -> int:
    d = ValueDist.from_json(_load_json(args.dist))
    raw = revenue_curve(d)
    price, revenue = monopoly(d)
    payload = {
        "revenue_curve": raw.to_json(),
        "ironed_curve": iron(raw).to_json(),
        "ironing_intervals": [list(iv) for iv in ironing_intervals(d)],
        "monopoly": {"price": price, "revenue": revenue},
    }
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.dump_curves:
        _emit(text, args.dump_curves)
    _emit(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="myersonlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("nonmonotone", help="rank-2 counterexample revenues")
    sp.add_argument("--eps", type=float, default=0.1)
    _add_common(sp)
    sp.set_defaults(func=_cmd_nonmonotone)

    sp = sub.add_parser("copies", help="gadget copies with additive gap")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    _add_common(sp)
    sp.set_defaults(func=_cmd_copies)

    sp = sub.add_parser("embed", help="embed the gadget into a non-matroid system")
    sp.add_argument("--feasible", required=True, metavar="FILE")
    sp.add_argument("--eps", type=float, default=0.1)
    _add_common(sp)
    sp.set_defaults(func=_cmd_embed)

    sp = sub.add_parser("approx-monotone", help="approximate-monotonicity inequality")
    sp.add_argument("--dd", required=True, metavar="FILE")
    sp.add_argument("--dtilde", required=True, metavar="FILE")
    sp.add_argument("--feasible", required=True, metavar="FILE")
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--uniform", action="store_true")
    _add_common(sp)
    sp.set_defaults(func=_cmd_approx_monotone)

    sp = sub.add_parser("lipschitz-lb", help="revenue gap of a close prior pair")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--eps", type=float, required=True)
    _add_common(sp)
    sp.set_defaults(func=_cmd_lipschitz_lb)

    sp = sub.add_parser("sample-complexity", help="dominated-empirical learning trials")
    sp.add_argument("--feasible", required=True, metavar="FILE")
    sp.add_argument("--dist", required=True, metavar="FILE")
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--constant", type=float, default=2.0)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    _add_common(sp)
    sp.set_defaults(func=_cmd_sample_complexity)

    sp = sub.add_parser("lb-family", help="indistinguishable prior family regret")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--budget", type=int, required=True)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    _add_common(sp)
    sp.set_defaults(func=_cmd_lb_family)

    sp = sub.add_parser("curves", help="dump revenue and ironed curves of a distribution")
    sp.add_argument("--dist", required=True, metavar="FILE")
    sp.add_argument("--dump-curves", metavar="PATH", default=None)
    _add_common(sp)
    sp.set_defaults(func=_cmd_curves)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
