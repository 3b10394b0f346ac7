"""binwise command line.

Examples
--------
  binwise analyze corpus.txt --lmax 12
  binwise attack --train leak_a.tsv --test leak_b.tsv --input-format freq --checkpoints 20,30,40,50,56
  binwise policy --users 2^25 --budget 2^56 --tolerated 2^10
  binwise policy --users 2^25 --rate 350e9 --duration 2.5d --tolerated 2^10 --salted
  binwise assign --strategy all --universe-spec "length=4" --users 1000 --seed 7
  binwise grammar
  binwise longpass corpus.txt --popular top1000.txt --min-length 12
  binwise utilization corpus.txt --lengths 1-12
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import re
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from . import attack, bins, grammar
from .corpus import ingest, read_word_list
from .explorer import (
    STRATEGIES,
    PolicyParams,
    comparison_csv,
    make_assigner,
    min_length,
    parse_universe,
    strategy_comparison,
)
from .partition import density_order, probability_order, uniform_expected_success

log = logging.getLogger("binwise")

DEFAULT_PATTERNS = ("L+", "D+", "L+D+", "U1L+D+")
_POWER = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*\^\s*(\d+)\s*$")
_DURATION = re.compile(r"^\s*([\d.eE+]+)\s*([smhdw]?)\s*$")
_UNITS = {"": 1, "s": 1, "m": 60, "h": 3600, "d": 86400, "w": 604800}


class CliError(Exception):
    pass


def parse_quantity(text: str) -> Fraction:
    """``2^25``, ``95^10``, ``350e9``, ``40000`` or ``0.5`` as an exact number."""
    m = _POWER.match(text)
    if m:
        return Fraction(m.group(1)) ** int(m.group(2))
    try:
        return Fraction(text.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def parse_int_quantity(text: str) -> int:
    q = parse_quantity(text)
    if q.denominator != 1:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    return int(q)


def parse_duration(text: str) -> Fraction:
    m = _DURATION.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"bad duration {text!r}; use e.g. 216000, 2.5d, 6h")
    return Fraction(m.group(1)) * _UNITS[m.group(2)]


def parse_checkpoints(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad checkpoint list {text!r}") from None


def parse_lengths(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        elif part.strip():
            out.append(int(part))
    return out


def big(n: int | Fraction) -> dict:
    """Exact decimal string plus log2 to two places."""
    value = Fraction(n)
    if value <= 0:
        lg = None
    else:
        lg = round(math.log2(value.numerator) - math.log2(value.denominator), 2)
    exact = str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    return {"exact": exact, "log2": lg}


def write_output(text: str, out: str | None) -> None:
    """Write atomically: a failed run leaves no partial file behind."""
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    target = Path(out)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


# --- subcommands ----------------------------------------------------------------

def cmd_analyze(args) -> str:
    corpus = ingest(args.corpus, args.input_format)
    if corpus.total == 0:
        raise CliError("corpus is empty")
    model = attack.build_bin_model(corpus, args.lmax)
    patterns = read_word_list(args.patterns) if args.patterns else list(DEFAULT_PATTERNS)

    def bin_row(p):
        return {"bin": p.id, "count": p.count, "capacity": big(p.capacity),
                "density": big(p.density), "share": round(p.count / model.total_count, 6)}

    util = attack.utilization_report(model, range(1, args.lmax + 1))
    report = {
        "total": corpus.total,
        "distinct": corpus.distinct,
        "skipped_lines": dict(corpus.skipped),
        "longer_than_lmax": model.excluded_count,
        "lmax": args.lmax,
        "search_space": big(model.total_capacity),
        "utilized_bins": len(model),
        "utilization": [{"length": r.length, "available": r.available, "utilized": r.utilized,
                         "cumulative_utilized": r.cumulative_utilized} for r in util],
        "top_by_density": [bin_row(p) for p in density_order(model)[: args.top]],
        "top_by_count": [bin_row(p) for p in probability_order(model)[: args.top]],
        "pattern_shares": {
            pat: round(float(attack.pattern_share(model, pat)), 6) for pat in patterns
        },
    }
    return dump_json(report)


def cmd_attack(args) -> str:
    train = ingest(args.train, args.input_format)
    test = ingest(args.test, args.input_format) if args.test else train
    if args.k > 0:
        model = attack.build_hybrid_model(train, args.k, args.lmax)
    else:
        model = attack.build_bin_model(train, args.lmax)
    curve = attack.simulate_attack(model, test, args.ordering, args.checkpoints, l_max=args.lmax)
    if curve.unknown_mass:
        log.info("%d test passwords fall outside trained bins; credited via the unutilized remainder",
                 curve.unknown_mass)
    if args.format == "json":
        return dump_json({
            "ordering": curve.ordering,
            "test_total": curve.test_total,
            "excluded": curve.excluded,
            "unknown_mass": curve.unknown_mass,
            "points": [{"log2_budget": p.log2_budget, "expected_cracked": attack.format_decimal(p.expected_cracked),
                        "fraction": round(p.fraction, 6)} for p in curve],
        })
    return curve.to_csv()


def cmd_policy(args) -> str:
    if args.budget is None and args.rate is None:
        raise CliError("give --budget or --rate with --duration")
    report = {"users": big(args.users), "tolerated": big(args.tolerated), "alphabet_size": args.alphabet}
    if args.budget is not None:
        budget = args.budget
    else:
        if args.duration is None:
            raise CliError("--rate needs --duration")
        budget = attack.budget_from_rate(args.rate, args.duration)
        report["rate"] = big(args.rate)
        report["duration_seconds"] = big(args.duration)
    report["budget"] = big(budget)
    if args.salted is not None:
        salted_users = args.salted or args.users
        budget = attack.effective_budget_after_salting(budget, salted_users)
        report["salted_users"] = big(salted_users)
        report["effective_budget"] = big(budget)
    if budget < 1:
        raise CliError("effective budget is below one guess")
    params = PolicyParams(args.users, budget, args.tolerated, args.alphabet)
    length = min_length(params)
    g = args.alphabet
    report["min_length"] = length
    report["witness"] = {
        "alphabet_pow_l_times_tolerated": big(g**length * Fraction(args.tolerated)),
        "users_times_budget": big(args.users * budget),
        "holds_at_l": g**length * Fraction(args.tolerated) >= args.users * budget,
        "holds_at_l_minus_1": length > 0 and g ** (length - 1) * Fraction(args.tolerated) >= args.users * budget,
    }
    report["uniform_success_at_l"] = big(uniform_expected_success(args.users, g**length, budget).value)
    return dump_json(report)


def _universe(args) -> list[str]:
    if args.universe:
        return parse_universe(Path(args.universe).read_text().splitlines())
    if args.universe_spec:
        return parse_universe([args.universe_spec])
    raise CliError("give --universe FILE or --universe-spec 'length=L pattern=P'")


def cmd_assign(args) -> str:
    if args.seed is None:
        raise CliError("--seed is required for assign")
    universe = _universe(args)
    if args.per_bin:
        if args.strategy == "all":
            raise CliError("--per-bin needs a single strategy")
        state = make_assigner(args.strategy, universe, args.seed)
        state.assign(args.users)
        lines = ["bin,capacity,count"]
        lines += [f"{b},{c},{n}" for b, c, n in zip(state.bins, state.capacities, state.counts)]
        return "\n".join(lines) + "\n"
    names = STRATEGIES if args.strategy == "all" else (args.strategy,)
    seeds = [f"{args.seed}:{t}" for t in range(args.trials)]
    rows = strategy_comparison(universe, args.users, seeds, names)
    return comparison_csv(rows)


def cmd_grammar(args) -> str:
    if args.instance:
        pts, dicts = grammar.load_instance(Path(args.instance).read_text())
    else:
        pts, dicts = grammar.toy_instance()
    sections = []
    for title, blocks in (("probability", grammar.preterminal_probability_order(pts, dicts)),
                          ("density", grammar.preterminal_density_order(pts, dicts))):
        lines = [f"## {title} order"]
        for pt in blocks:
            d = grammar.density(pt, dicts)
            lines.append(f"# {pt.id} count={pt.count} size={len(dicts[pt.slot])} density={d}")
            lines.extend(pt.fill(w) for w in dicts[pt.slot])
        sections.append("\n".join(lines))
    sections.append(f"## terminal order matches density order: {grammar.equivalence_check(pts, dicts)}")
    return "\n\n".join(sections) + "\n"


def cmd_longpass(args) -> str:
    corpus = ingest(args.corpus, args.input_format)
    popular = read_word_list(args.popular)
    share = attack.long_password_substring_share(corpus, popular, args.min_length)
    return dump_json({"min_length": args.min_length, "popular_entries": len(popular),
                      "share": {"exact": f"{share.numerator}/{share.denominator}", "value": round(float(share), 6)}})


def cmd_utilization(args) -> str:
    corpus = ingest(args.corpus, args.input_format)
    lengths = parse_lengths(args.lengths)
    model = attack.build_bin_model(corpus, max(lengths))
    rows = attack.utilization_report(model, lengths)
    if args.format == "json":
        return dump_json([r.__dict__ for r in rows])
    lines = ["length,available,utilized,cumulative_utilized"]
    lines += [f"{r.length},{r.available},{r.utilized},{r.cumulative_utilized}" for r in rows]
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lmax", type=int, default=12, help="longest password length modelled")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--input-format", choices=("raw", "freq"), default="raw")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="binwise", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="bin statistics of a corpus")
    p.add_argument("corpus")
    p.add_argument("--patterns", help="file of bin patterns, one per line")
    p.add_argument("--top", type=int, default=20)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("attack", parents=[common], help="guess curve of a bin attacker")
    p.add_argument("--train", required=True)
    p.add_argument("--test", help="target corpus (default: the training corpus)")
    p.add_argument("--ordering", choices=attack.ORDERINGS, default="density")
    p.add_argument("--checkpoints", type=parse_checkpoints, default=list(range(10, 81, 2)),
                   help="comma-separated log2 budgets")
    p.add_argument("--k", type=int, default=0, help="popular passwords kept as unit partitions")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("policy", parents=[common], help="minimum password length")
    p.add_argument("--users", type=parse_int_quantity, required=True)
    p.add_argument("--budget", type=parse_int_quantity)
    p.add_argument("--rate", type=parse_quantity, help="guesses per second")
    p.add_argument("--duration", type=parse_duration, help="seconds, or with s/m/h/d/w suffix")
    p.add_argument("--tolerated", type=parse_quantity, required=True)
    p.add_argument("--alphabet", type=int, default=bins.ALPHABET_SIZE)
    p.add_argument("--salted", type=parse_int_quantity, nargs="?", const=0, default=None,
                   help="divide the budget by the salted user count (default: --users)")
    p.set_defaults(func=cmd_policy)

    p = sub.add_parser("assign", parents=[common], help="user-to-bin assignment strategies")
    p.add_argument("--strategy", choices=(*STRATEGIES, "all"), default="all")
    p.add_argument("--universe", help="file of signatures or generator lines")
    p.add_argument("--universe-spec", help="generator line, e.g. 'length=4 pattern=L*D*'")
    p.add_argument("--users", type=int, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--per-bin", action="store_true", help="emit per-bin counts instead of stretch")
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("grammar", parents=[common], help="pre-terminal orderings")
    p.add_argument("--instance", help="JSON instance (default: built-in toy)")
    p.set_defaults(func=cmd_grammar)

    p = sub.add_parser("longpass", parents=[common], help="popular substrings in long passwords")
    p.add_argument("corpus")
    p.add_argument("--popular", required=True)
    p.add_argument("--min-length", type=int, default=12)
    p.set_defaults(func=cmd_longpass)

    p = sub.add_parser("utilization", parents=[common], help="available vs utilized bins")
    p.add_argument("corpus")
    p.add_argument("--lengths", default="1-12")
    p.set_defaults(func=cmd_utilization)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = args.func(args)
        write_output(text, args.out)
    except (CliError, OSError, ValueError) as exc:
        print(f"binwise {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
