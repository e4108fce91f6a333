"""Synthetic workloads and the Monte Carlo experiments behind the filter,
group-size and collision guarantees."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from fsi.core import MACHINE_BITS, Config, HashFn, PermFn
from fsi.rangroup import size_resolution

DEFAULT_UNIVERSE = 2 * 10**8


class InfeasibleSpec(ValueError):
    pass


@dataclass(frozen=True)
class WorkloadSpec:
    sizes: tuple[int, ...]
    r: int
    universe: int = DEFAULT_UNIVERSE
    seed: int = 0

    @property
    def k(self) -> int:
        return len(self.sizes)

    def validate(self) -> None:
        if not self.sizes:
            raise InfeasibleSpec("need at least one set")
        if any(n < 0 for n in self.sizes) or self.r < 0:
            raise InfeasibleSpec("sizes and r must be nonnegative")
        if self.r > min(self.sizes):
            raise InfeasibleSpec(f"r={self.r} exceeds the smallest set size {min(self.sizes)}")
        need = self.r + sum(n - self.r for n in self.sizes)
        if need > self.universe:
            raise InfeasibleSpec(f"{need} distinct elements needed but universe has {self.universe}")


@dataclass
class BenchRecord:
    suite: str
    algo: str
    sizes: tuple[int, ...]
    r: int
    repeat: int | str
    wall_ns: int
    result_size: int
    counters: dict[str, int] = field(default_factory=dict)
    oracle_size: int | None = None


def generate(spec: WorkloadSpec) -> list[list[int]]:
    """k sorted sets whose common intersection has exactly ``spec.r`` elements.

    A shared core of ``r`` elements is planted in every set; the remainders
    are drawn disjoint from each other and from the core.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    rest = [n - spec.r for n in spec.sizes]
    pool = rng.choice(spec.universe, size=spec.r + sum(rest), replace=False)
    core = pool[:spec.r]
    out = []
    pos = spec.r
    for extra in rest:
        members = np.concatenate([core, pool[pos:pos + extra]])
        pos += extra
        out.append(np.sort(members).astype(np.uint64).tolist())
    return out


# -- analytic constants -------------------------------------------------------

def lemma_a1_bound(w: int) -> float:
    """``(1 - 1/sqrt(w))**sqrt(w)``: single-hash filter probability floor for size-sqrt(w) groups."""
    s = math.sqrt(w)
    return (1 - 1 / s) ** s


def delta(w: int) -> float:
    s = math.sqrt(w)
    return 1 + math.sqrt(6 * math.log(4 * s) / s)


def beta1(w: int) -> float:
    s, d = math.sqrt(w), delta(w)
    return (1 - (1 + d * s) / (4 * s)) * (1 - d / s) ** (d * s)


def beta2(w: int) -> float:
    s, d = math.sqrt(w), delta(w)
    return (1 - math.exp(-s / 12) - 3 / 8) * (1 - d / s) ** (3 * s / 2)


# -- experiments --------------------------------------------------------------

@dataclass
class Estimate:
    value: float
    sigma: float
    trials: int

    @property
    def ci95(self) -> float:
        return 1.96 * self.sigma


def _proportion(hits: int, trials: int) -> Estimate:
    p = hits / trials
    return Estimate(p, math.sqrt(max(p * (1 - p), 0.0) / trials), trials)


def _disjoint_groups(rng: np.random.Generator, sizes: Sequence[int], universe: int) -> list[list[int]]:
    pool = rng.choice(universe, size=sum(sizes), replace=False).tolist()
    out, pos = [], 0
    for s in sizes:
        out.append(pool[pos:pos + s])
        pos += s
    return out


def filter_probability_experiment(config: Config, m_max: int, trials: int, k: int = 2,
                                  group_size: int | None = None,
                                  universe: int = DEFAULT_UNIVERSE) -> list[Estimate]:
    """P(some of the first m hashes gives an empty image AND) over pairwise
    disjoint random groups, for m = 1..m_max; fresh hashes every trial."""
    if trials < 1000:
        raise ValueError("use at least 1000 trials")
    s = group_size or config.s
    rng = np.random.default_rng([config.seed, 0xF117])
    hits = [0] * m_max
    for _ in range(trials):
        groups = _disjoint_groups(rng, [s] * k, universe)
        first = m_max
        for j in range(m_max):
            h = HashFn.draw(rng, config.w)
            acc = -1
            for grp in groups:
                img = 0
                for x in grp:
                    img |= 1 << h(x)
                acc &= img
            if not acc:
                first = j
                break
        for j in range(first, m_max):
            hits[j] += 1
    return [_proportion(c, trials) for c in hits]


@dataclass
class GroupSizeSummary:
    t: int
    mean: float
    max: int
    threshold: float
    tail_fraction: float
    tail_sigma: float
    blocks: int


def group_size_experiment(config: Config, n: int, trials: int, t: int | None = None,
                          universe: int = DEFAULT_UNIVERSE) -> GroupSizeSummary:
    """Block sizes of random n-sets under ``g_t`` with a fresh permutation per trial.

    ``mean`` averages over all ``2**t`` blocks, empty ones included.
    """
    if n < config.w and t is None:
        raise ValueError("n must be at least w")
    if t is None:
        t = size_resolution(n, config.w)
    rng = np.random.default_rng([config.seed, 0x6505])
    threshold = delta(config.w) * config.s
    counts = []
    for trial in range(trials):
        elems = rng.choice(universe, size=n, replace=False)
        g = PermFn.from_seed(int(rng.integers(0, 2**63)))
        gv = g.many(elems)
        z = (gv >> np.uint64(MACHINE_BITS - t)).astype(np.int64) if t else np.zeros(n, dtype=np.int64)
        counts.append(np.bincount(z, minlength=1 << t))
    allc = np.concatenate(counts)
    tail = int((allc > threshold).sum())
    est = _proportion(tail, len(allc))
    return GroupSizeSummary(t, float(allc.mean()), int(allc.max()), threshold,
                            est.value, est.sigma, len(allc))


def collision_experiment(config: Config, trials: int, sizes: tuple[int, int] | None = None,
                         universe: int = DEFAULT_UNIVERSE) -> Estimate:
    """Mean number of cross pairs with equal h-value between disjoint random groups."""
    if trials < 1000:
        raise ValueError("use at least 1000 trials")
    s1, s2 = sizes or (config.s, config.s)
    rng = np.random.default_rng([config.seed, 0xC011])
    vals = np.empty(trials)
    for i in range(trials):
        a, b = _disjoint_groups(rng, [s1, s2], universe)
        h = HashFn.draw(rng, config.w)
        ha = np.bincount([h(x) for x in a], minlength=config.w)
        hb = np.bincount([h(x) for x in b], minlength=config.w)
        vals[i] = float(ha @ hb)
    return Estimate(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(trials)), trials)
