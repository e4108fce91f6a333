"""``fsi`` command line: gen, build, intersect, bench, stats.

Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys

from fsi import bench, engine, io
from fsi.baselines import merge_intersect
from fsi.core import Config, HashSuite
from fsi.workload import (InfeasibleSpec, WorkloadSpec, beta2, collision_experiment, delta,
                          filter_probability_experiment, generate, group_size_experiment,
                          lemma_a1_bound)

EXIT_USAGE, EXIT_DATA, EXIT_VERIFY = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_seed() -> int:
    raw = os.environ.get("FSI_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"FSI_SEED must be an integer, got {raw!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _algo(name: str):
    try:
        return engine.get(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _config(args) -> Config:
    try:
        return Config(w=args.w, m=args.m, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_config(p, m_default=2):
    p.add_argument("--w", type=int, default=64, help="logical word width (16 or 64)")
    p.add_argument("--m", type=int, default=m_default, help="number of filter hashes")
    p.add_argument("--seed", type=int, default=None, help="defaults to $FSI_SEED or 0")


# -- commands -------------------------------------------------------------------

def cmd_gen(args) -> int:
    sizes = args.sizes
    if len(sizes) == 1:
        sizes = sizes * args.k
    if len(sizes) != args.k:
        raise UsageError(f"--sizes lists {len(sizes)} sizes but --k is {args.k}")
    spec = WorkloadSpec(tuple(sizes), args.r, args.universe, args.seed)
    sets = generate(spec)
    for i, s in enumerate(sets, 1):
        path = f"{args.out_prefix}{i}.set"
        io.write_set(path, s)
        print(f"wrote {path} ({len(s)} elements)")
    print(f"intersection size: {len(merge_intersect(sets).elements)}")
    return 0


def cmd_build(args) -> int:
    elements = io.read_set(args.input)
    suite = HashSuite.from_config(_config(args))
    algo = args.algo
    if algo == "ranscan":
        algo = "ranscan-lowbits" if args.compressed else "ranscan"
    index = engine.get(algo if algo != "multires" else "rangroup").prepare(elements, suite)
    io.write_index(args.out, index)
    n = len(elements)
    tag = io.index_tag(index)
    print(f"algorithm: {tag}")
    print(f"elements: {n}")
    if tag == "ranscan-compressed":
        budget = index.bit_budget()
        for k, v in budget.items():
            print(f"bits.{k}: {v}")
        if n:
            print(f"ratio: {budget['total'] / (64 * n):.4f}")
        return 0
    if tag == "ranscan-raw":
        words = index.space_words()
    elif tag == "multires":
        words = index.space_report()
    else:
        words = index.space_words()
        words["total"] = sum(words.values())
    for k, v in words.items():
        print(f"words.{k}: {v}")
    if n:
        print(f"ratio: {words['total'] / n:.4f}")
    return 0


def _load_inputs(paths, algo_name, args):
    kinds = {io.sniff(p) for p in paths}
    if len(kinds) != 1:
        raise UsageError("mix of set files and index files; pass one kind")
    if kinds == {"index"}:
        indexes = [io.read_index(p) for p in paths]
        io.check_compatible(indexes)
        tags = [io.index_tag(ix) for ix in indexes]
        allowed = [a for a in engine.INDEX_ALGOS[tags[0]]
                   if all(a in engine.INDEX_ALGOS[t] for t in tags)]
        if not allowed:
            raise UsageError(f"no algorithm runs on index kinds {sorted(set(tags))}")
        algo_name = algo_name or allowed[0]
        if algo_name not in allowed:
            raise UsageError(f"--algo {algo_name} cannot run on {sorted(set(tags))} indexes")
        elements = [_index_elements(ix) for ix in indexes] if args.verify else None
        return engine.get(algo_name), indexes, elements
    sets = [io.read_set(p) for p in paths]
    algo = engine.get(algo_name or "merge")
    suite = HashSuite.from_config(_config(args))
    return algo, [algo.prepare(s, suite) for s in sets], sets


def _index_elements(ix) -> list[int]:
    if hasattr(ix, "elements") and not callable(ix.elements):
        return sorted(ix.elements)
    return ix.elements()


def cmd_intersect(args) -> int:
    if args.algo is not None:
        _algo(args.algo)
    algo, prepared, sets = _load_inputs(args.inputs, args.algo, args)
    if not engine.supports(algo, len(prepared)):
        raise UsageError(f"{algo.name} handles at most {algo.max_k} sets")
    res = algo.run(prepared)
    if args.out:
        io.write_set(args.out, res.elements)
    else:
        for x in res.elements:
            print(x)
    print(f"algo={algo.name} result_size={len(res.elements)}", file=sys.stderr)
    for k, v in res.counters.as_dict().items():
        print(f"{k}={v}", file=sys.stderr)
    if args.verify:
        expected = merge_intersect(sets).elements
        if expected != res.elements:
            print(f"VERIFY FAILED: {algo.name} returned {len(res.elements)} elements, "
                  f"merge returned {len(expected)}", file=sys.stderr)
            return EXIT_VERIFY
        print("verify: ok", file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    for name in args.algos:
        _algo(name)
    config = _config(args)
    if args.sizes:
        points = [p for n in args.sizes for p in bench.default_points(args.suite, n)]
    else:
        points = bench.default_points(args.suite)
    if args.repeats < 1:
        raise UsageError("--repeats must be at least 1")
    records = bench.run_suite(args.suite, args.algos, args.repeats, config, args.seed, points)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        bench.write_csv(records, out)
    finally:
        if args.out:
            out.close()
    bad = sorted({(r.algo, r.sizes) for r in records if r.result_size != r.oracle_size})
    for algo, sizes in bad:
        print(f"fsi: {algo} disagrees with merge at sizes {sizes}", file=sys.stderr)
    return EXIT_VERIFY if bad else 0


def cmd_stats(args) -> int:
    config = _config(args)
    rows = []
    if args.exp == "filterprob":
        ests = filter_probability_experiment(config, args.m, args.trials, k=args.k,
                                             group_size=args.group_size)
        for m, est in enumerate(ests, 1):
            rows.append({"exp": "filterprob", "param": f"m={m}", "value": est.value,
                         "sigma": est.sigma, "ci95": est.ci95, "trials": est.trials,
                         "bound": lemma_a1_bound(config.w) if args.k == 2 else beta2(config.w)})
    elif args.exp == "groupsize":
        summ = group_size_experiment(config, args.n, args.trials)
        rows.append({"exp": "groupsize", "param": f"t={summ.t}", "value": summ.mean,
                     "sigma": "", "ci95": "", "trials": args.trials,
                     "bound": f"[{config.s / 2},{config.s}]"})
        rows.append({"exp": "groupsize", "param": f"tail>{summ.threshold:.3f}",
                     "value": summ.tail_fraction, "sigma": summ.tail_sigma,
                     "ci95": 1.96 * summ.tail_sigma, "trials": args.trials,
                     "bound": 1 / (4 * config.s)})
        rows.append({"exp": "groupsize", "param": "max", "value": summ.max, "sigma": "",
                     "ci95": "", "trials": args.trials, "bound": delta(config.w) * config.s})
    else:
        sizes = tuple(args.sizes) if args.sizes else None
        if sizes is not None and len(sizes) != 2:
            raise UsageError("--sizes takes two group sizes for collisions")
        est = collision_experiment(config, args.trials, sizes)
        rows.append({"exp": "collisions", "param": "x".join(map(str, sizes or (config.s,) * 2)),
                     "value": est.value, "sigma": est.sigma, "ci95": est.ci95,
                     "trials": est.trials, "bound": 1.0})
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=["exp", "param", "value", "sigma", "ci95",
                                                 "trials", "bound"])
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fsi", description="Fast in-memory set intersection toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate synthetic set files")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--sizes", type=_int_list, required=True)
    p.add_argument("--r", type=int, default=0)
    p.add_argument("--universe", type=int, default=2 * 10**8)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-prefix", default="set")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("build", help="build and serialize an index")
    p.add_argument("--algo", choices=["intgroup", "multires", "ranscan"], required=True)
    p.add_argument("--compressed", action="store_true", help="lowbits layout (ranscan only)")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    _add_config(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("intersect", help="intersect set or index files")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--algo", default=None, help=f"one of {sorted(engine.ALGORITHMS)}")
    p.add_argument("--out", default=None, help="write result as a set file")
    p.add_argument("--verify", action="store_true", help="cross-check against merge")
    _add_config(p)
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("bench", help="run a benchmark sweep, CSV to stdout or --out")
    p.add_argument("--suite", choices=bench.SUITES, required=True)
    p.add_argument("--sizes", type=_int_list, default=None, help="override the suite's set size(s)")
    p.add_argument("--algos", type=lambda s: s.split(","), default=list(bench.DEFAULT_ALGOS))
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--out", default=None)
    _add_config(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="Monte Carlo checks of the probabilistic guarantees")
    p.add_argument("--exp", choices=["filterprob", "groupsize", "collisions"], required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--n", type=int, default=1 << 16, help="set size (groupsize)")
    p.add_argument("--k", type=int, default=2, help="groups per tuple (filterprob)")
    p.add_argument("--group-size", type=int, default=None)
    p.add_argument("--sizes", type=_int_list, default=None, help="two group sizes (collisions)")
    p.add_argument("--out", default=None)
    _add_config(p, m_default=4)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        return args.func(args)
    except UsageError as exc:
        print(f"fsi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (io.FormatError, InfeasibleSpec, FileNotFoundError) as exc:
        print(f"fsi: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"fsi: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
