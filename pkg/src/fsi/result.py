from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields


@dataclass
class Counters:
    tuples_tested: int = 0
    tuples_filtered: int = 0
    tuples_merged: int = 0
    false_positives: int = 0
    image_ands: int = 0
    same_hash_pairs: int = 0
    collisions: int = 0
    comparisons: int = 0
    boundary_probes: int = 0

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


@dataclass
class IntersectionResult:
    """Sorted, duplicate-free intersection plus per-call instrumentation."""

    elements: list[int]
    counters: Counters = field(default_factory=Counters)

    def __len__(self):
        return len(self.elements)
