"""Command-line front end.

Exit status: 0 success, 1 a verification found counterexamples (or a check
came out false), 2 usage or input error, 3 resource limit or unsupported
request. Configuration precedence: defaults < TOML file (``--config`` or
``$CACC_CONFIG``) < flags.
"""

from __future__ import annotations

import argparse
import itertools
import json
from importlib import resources
import sys
from pathlib import Path
from typing import Sequence

from . import classifier, protocols, tree
from .config import Config, load_config
from .errors import BudgetExceeded, CAError, InvalidInput, Unsupported
from .matrix import (
    SplitSpec,
    build_matrix,
    cc1_from_d,
    cc1_profile,
    distinct_counts,
    export_matrix_image,
    profiles_to_csv,
    reduced_matrix,
    verify_fooling_set,
)
from .linalg import ranks_mod_primes
from .rescaling import RescalingParams, check_simulation, rescale
from .rules import format_rule, parse_rule

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


def load_schema(command: str) -> dict:
    """JSON schema of a subcommand's JSON output."""
    path = resources.files("cacc") / "schemas" / f"{command}.schema.json"
    return json.loads(path.read_text())


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInput(f"{self.prog}: {message}")


def _primes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"primes must be a comma-separated list, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML config file (default: $CACC_CONFIG)")
    common.add_argument("--budget", type=int, dest="memory_budget_bytes", help="per-matrix memory budget in bytes")
    common.add_argument("--primes", type=_primes, help="comma-separated primes for rank bounds")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--format", dest="output_format", choices=["json", "csv", "text"])
    common.add_argument("-o", "--output", help="write the report here instead of stdout")

    parser = _Parser(prog="cacc", description="Communication complexity of cellular automata.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("matrix", parents=[common], help="build the matrix of one split")
    p.add_argument("rule")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--split", type=int, required=True, help="cells held by Alice")
    p.add_argument("--image", help="write a PBM/PGM image of the matrix")

    p = sub.add_parser("profile", parents=[common], help="distinct counts over all splits")
    p.add_argument("rule")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("sweep", parents=[common], help="profiles for n = 1..n-max")
    p.add_argument("rule")
    p.add_argument("--n-max", type=int)

    p = sub.add_parser("classify", parents=[common], help="classify the 88 symmetry classes")
    p.add_argument("--n-max", type=int)

    p = sub.add_parser("verify", parents=[common], help="verify a protocol exhaustively")
    p.add_argument("protocol", choices=["178", "218", "linear", "tree"])
    p.add_argument("--n", type=int, required=True, help="iterations (tree height for 'tree')")
    p.add_argument("--rule", default="eca:90", help="rule for the linear protocol")

    p = sub.add_parser("fooling", parents=[common], help="check a lower-bound family")
    p.add_argument("family", choices=["178", "218"])
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("rank", parents=[common], help="rank lower bound of one split")
    p.add_argument("rule")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--split", type=int, required=True)

    p = sub.add_parser("rescale", parents=[common], help="rescaled rule table")
    p.add_argument("rule")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--z", type=int, default=0)

    p = sub.add_parser("simcheck", parents=[common], help="search a sub-automaton witness between rescalings")
    p.add_argument("a")
    p.add_argument("b")
    for k in ("1", "2"):
        p.add_argument(f"--m{k}", type=int, default=1)
        p.add_argument(f"--t{k}", type=int, default=1)
        p.add_argument(f"--z{k}", type=int, default=0)
    return parser


def _config(args) -> Config:
    return load_config(args.config).updated(
        memory_budget_bytes=args.memory_budget_bytes,
        primes=args.primes,
        workers=args.workers,
        output_format=args.output_format,
        n_max=getattr(args, "n_max", None),
    )


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _text(obj) -> str:
    if isinstance(obj, dict):
        return "".join(f"{k}: {json.dumps(v)}\n" for k, v in obj.items())
    return _json(obj)


def _csv_of_dict(obj: dict) -> str:
    flat = {k: v for k, v in obj.items() if not isinstance(v, (list, dict))}
    return ",".join(flat) + "\n" + ",".join("" if v is None else str(v) for v in flat.values()) + "\n"


def _render(obj, cfg: Config) -> str:
    if cfg.output_format == "json":
        return _json(obj)
    if cfg.output_format == "csv":
        return _csv_of_dict(obj)
    return _text(obj)


# -- subcommands ------------------------------------------------------------------


def cmd_matrix(args, cfg):
    rule = parse_rule(args.rule)
    split = SplitSpec(args.n, args.split)
    m = build_matrix(rule, split, cfg.memory_budget_bytes)
    rows, cols, d = distinct_counts(m)
    out = {"rule": format_rule(rule), "n": args.n, "split": args.split, "n_rows": m.n_rows,
           "n_cols": m.n_cols, "rows": rows, "cols": cols, "d": d, "cc1": cc1_from_d(d),
           "image": None}
    if args.image:
        Path(args.image).write_bytes(export_matrix_image(m))
        out["image"] = args.image
    return _render(out, cfg), EXIT_OK


def cmd_profile(args, cfg):
    p = cc1_profile(parse_rule(args.rule), args.n, cfg.memory_budget_bytes, cfg.primes)
    if cfg.output_format == "csv":
        return profiles_to_csv([p]), EXIT_OK
    if cfg.output_format == "text":
        lines = [f"{p.rule} n={p.n} worst_cc1={p.worst_cc1} s_n={p.s_n} rank_lb={p.rank_lb}"]
        lines += [f"  i={s.i:>3} rows={s.rows:>6} cols={s.cols:>6} d={s.d:>6} cc1={s.cc1}" for s in p.splits]
        return "\n".join(lines) + "\n", EXIT_OK
    return _json(p.to_dict()), EXIT_OK


def cmd_sweep(args, cfg):
    rule = parse_rule(args.rule)
    result = classifier.sweep(rule, cfg.n_max, cfg.memory_budget_bytes, cfg.primes)
    if cfg.output_format == "csv":
        return profiles_to_csv(result.profiles), EXIT_OK
    growth = classifier.classify_growth(result.profiles, config=cfg, kind="central")
    worst = classifier.classify_growth(result.profiles, config=cfg, kind="worst")
    out = {"rule": format_rule(rule), "n_max": cfg.n_max, "stop_reason": result.stop_reason,
           "central_d": [classifier.central_d(p) for p in result.profiles],
           "worst_d": [p.worst_d for p in result.profiles],
           "growth": growth.to_dict(), "worst_split_growth": worst.to_dict(),
           "profiles": [p.to_dict() for p in result.profiles]}
    if cfg.output_format == "text":
        return _text({k: v for k, v in out.items() if k != "profiles"}), EXIT_OK
    return _json(out), EXIT_OK


def cmd_classify(args, cfg):
    reports = classifier.classify_all(cfg.n_max, cfg)
    if cfg.output_format == "csv":
        return classifier.reports_to_csv(reports), EXIT_OK
    if cfg.output_format == "text":
        return classifier.reports_to_text(reports), EXIT_OK
    return _json([r.to_dict() for r in reports]), EXIT_OK


def _verify_tree(h: int) -> dict:
    if not 1 <= h <= tree.TREE_VERIFY_MAX_HEIGHT:
        raise Unsupported(
            f"exhaustive tree verification supports 1 <= h <= {tree.TREE_VERIFY_MAX_HEIGHT}"
        )
    bad = []
    size = 2 ** (h + 1) - 1
    for labels in itertools.product((0, 1), repeat=size):
        inst = tree.TreeInstance(h, labels)
        t = tree.tree_multiround_cost(inst)
        if len(t) != h or t.value != tree.tree_value(inst):
            bad.append("".join(map(str, labels)))
    return {"rule": "tree", "n": h, "protocol": "tree-multiround", "cost": h,
            "distinct_messages": 2**h, "domain_size": 2**size,
            "counterexample_count": len(bad),
            "first_counterexamples": [{"labels": b} for b in bad[:32]]}


def cmd_verify(args, cfg):
    budget = cfg.memory_budget_bytes
    n = args.n
    if args.protocol == "tree":
        out = _verify_tree(n)
        return _render(out, cfg), EXIT_OK if out["counterexample_count"] == 0 else EXIT_FALSE
    if args.protocol == "178":
        p = protocols.rule178_protocol(n)
        report = protocols.verify_one_round(p, protocols.RULE_178, p.split, None, budget)
    elif args.protocol == "218":
        p = protocols.rule218_protocol(n)
        report = protocols.verify_one_round(p, protocols.RULE_218, p.split, 0, budget)
    else:
        rule = parse_rule(args.rule)
        p = protocols.linear_protocol(rule, n)
        report = protocols.verify_one_round(p, rule, p.split, None, budget)
    out = report.to_dict()
    return _render(out, cfg), EXIT_OK if report.ok else EXIT_FALSE


def cmd_fooling(args, cfg):
    n = args.n
    if args.family == "178":
        fs = protocols.rule178_fooling_set(n)
        verdict = verify_fooling_set(protocols.RULE_178, SplitSpec(n, n), fs)
        out = {"family": "178", "n": n, "size": len(fs),
               "formula_size": protocols.rule178_fooling_set_formula_size(n),
               "value": fs.value, "holds": verdict.holds, "violation": verdict.violation,
               "cc_lower_bound": verdict.cc_lower_bound}
        half = protocols.rule178_fooling_subset(n)
        half_verdict = verify_fooling_set(protocols.RULE_178, SplitSpec(n, n), half)
        out["subset"] = {"size": len(half), "value": half.value, "holds": half_verdict.holds,
                         "violation": half_verdict.violation}
        return _render(out, cfg), EXIT_OK if verdict.holds else EXIT_FALSE
    fam = protocols.rule218_lower_bound_family(n, cfg.memory_budget_bytes)
    out = {"family": "218", "n": n, "size": fam.total, "set_sizes": [len(s) for s in fam.sets],
           "holds": fam.distinct,
           "violation": None if fam.clash is None else
           f"rows {''.join(map(str, fam.clash[0]))} and {''.join(map(str, fam.clash[1]))} are equal",
           "cc_lower_bound": cc1_from_d(fam.total) if fam.distinct else 0}
    return _render(out, cfg), EXIT_OK if fam.distinct else EXIT_FALSE


def cmd_rank(args, cfg):
    rule = parse_rule(args.rule)
    m = build_matrix(rule, SplitSpec(args.n, args.split), cfg.memory_budget_bytes)
    rows, cols, d = distinct_counts(m)
    ranks = ranks_mod_primes(reduced_matrix(m), cfg.primes)
    out = {"rule": format_rule(rule), "n": args.n, "split": args.split, "rows": rows, "cols": cols,
           "d": d, "rank_by_prime": {str(p): r for p, r in sorted(ranks.items())},
           "rank_lb": max(ranks.values())}
    return _render(out, cfg), EXIT_OK


def cmd_rescale(args, cfg):
    rule = parse_rule(args.rule)
    params = RescalingParams(args.m, args.t, args.z)
    r = rescale(rule, params, cfg.memory_budget_bytes)
    out = {"rule": format_rule(rule), "m": args.m, "t": args.t, "z": args.z,
           "states": r.states, "radius": r.radius, "rescaled": format_rule(r)}
    return _render(out, cfg), EXIT_OK


def cmd_simcheck(args, cfg):
    a, b = parse_rule(args.a), parse_rule(args.b)
    p1 = RescalingParams(args.m1, args.t1, args.z1)
    p2 = RescalingParams(args.m2, args.t2, args.z2)
    w = check_simulation(a, b, p1, p2, cfg.memory_budget_bytes)
    out = {"a": format_rule(a), "b": format_rule(b),
           "p1": {"m": p1.m, "t": p1.t, "z": p1.z}, "p2": {"m": p2.m, "t": p2.t, "z": p2.z},
           "found": w is not None, "witness": None if w is None else w.to_dict()}
    return _render(out, cfg), EXIT_OK if w is not None else EXIT_FALSE


COMMANDS = {
    "matrix": cmd_matrix, "profile": cmd_profile, "sweep": cmd_sweep, "classify": cmd_classify,
    "verify": cmd_verify, "fooling": cmd_fooling, "rank": cmd_rank, "rescale": cmd_rescale,
    "simcheck": cmd_simcheck,
}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:  # --help
            return int(exc.code or 0)
        cfg = _config(args)
        text, status = COMMANDS[args.command](args, cfg)
    except InvalidInput as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except (BudgetExceeded, MemoryError) as exc:
        print(f"resource error: {exc}", file=stderr)
        return EXIT_RESOURCE
    except Unsupported as exc:
        print(f"unsupported: {exc}", file=stderr)
        return EXIT_RESOURCE
    except CAError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:  # unreadable or malformed config
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    if args.output:
        Path(args.output).write_text(text)
    else:
        stdout.write(text)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
