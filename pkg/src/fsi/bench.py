"""Benchmark sweeps mirroring the synthetic experiments, median of repeats, CSV out."""
from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

from fsi import engine
from fsi.core import Config, HashSuite
from fsi.result import Counters
from fsi.workload import BenchRecord, WorkloadSpec, generate

SUITES = ("size", "isize", "ratio", "k")
DEFAULT_ALGOS = ("merge", "hash", "galloping", "intgroup", "rangroup", "ranscan",
                 "ranscan-lowbits", "hashbin")
MAX_K = 4


@dataclass(frozen=True)
class SweepPoint:
    sizes: tuple[int, ...]
    r: int


def default_points(suite: str, n: int | None = None) -> list[SweepPoint]:
    """Desk-scale grids; ``n`` overrides the fixed set size of a suite."""
    if suite == "size":
        sizes = [n] if n else [10**4, 10**5, 10**6]
        return [SweepPoint((s, s), s // 100) for s in sizes]
    if suite == "isize":
        base = n or 10**5
        return [SweepPoint((base, base), int(base * f))
                for f in (0.005, 0.01, 0.1, 0.3, 0.5, 0.7, 1.0)]
    if suite == "ratio":
        large = n or 10**5
        return [SweepPoint((large // sr, large), max(1, large // sr // 100))
                for sr in (1, 10, 100, 1000) if large // sr >= 1]
    if suite == "k":
        base = n or 10**5
        return [SweepPoint((base,) * k, base // 100) for k in (2, 3, 4)]
    raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")


def run_point(suite_name: str, point: SweepPoint, algos: Sequence[str], repeats: int,
              config: Config, seed: int) -> list[BenchRecord]:
    sets = generate(WorkloadSpec(point.sizes, point.r, seed=seed))
    suite = HashSuite.from_config(config)
    oracle = len(engine.intersect_sets("merge", sets, suite).elements)
    records = []
    for name in algos:
        algo = engine.get(name)
        if not engine.supports(algo, len(sets)):
            continue
        prepared = [algo.prepare(s, suite) for s in sets]
        algo.run(prepared)  # warm-up, not recorded
        times = []
        for rep in range(repeats):
            t0 = time.perf_counter_ns()
            res = algo.run(prepared)
            elapsed = time.perf_counter_ns() - t0
            times.append(elapsed)
            records.append(BenchRecord(suite_name, name, point.sizes, point.r, rep, elapsed,
                                       len(res.elements), res.counters.as_dict(), oracle))
        records.append(BenchRecord(suite_name, name, point.sizes, point.r, "median",
                                   int(statistics.median(times)), len(res.elements),
                                   res.counters.as_dict(), oracle))
    return records


def run_suite(suite_name: str, algos: Sequence[str] = DEFAULT_ALGOS, repeats: int = 5,
              config: Config | None = None, seed: int = 0,
              points: Iterable[SweepPoint] | None = None) -> list[BenchRecord]:
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    config = config or Config(seed=seed)
    out = []
    for i, point in enumerate(points or default_points(suite_name)):
        out.extend(run_point(suite_name, point, algos, repeats, config, seed + i))
    return out


CSV_FIELDS = (["suite", "algo"] + [f"n{i}" for i in range(1, MAX_K + 1)]
              + ["r", "repeat", "wall_ns", "result_size", "oracle_size"] + Counters.names())


def write_csv(records: Iterable[BenchRecord], fh: TextIO) -> None:
    writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
    writer.writeheader()
    for rec in records:
        row = {"suite": rec.suite, "algo": rec.algo, "r": rec.r, "repeat": rec.repeat,
               "wall_ns": rec.wall_ns, "result_size": rec.result_size,
               "oracle_size": rec.oracle_size}
        for i in range(MAX_K):
            row[f"n{i + 1}"] = rec.sizes[i] if i < len(rec.sizes) else ""
        row.update(rec.counters)
        writer.writerow(row)
