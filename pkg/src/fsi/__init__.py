"""Fast in-memory intersection of sorted integer sets."""
from fsi.baselines import galloping_intersect, hash_probe_intersect, merge_intersect
from fsi.core import Config, HashSuite
from fsi.engine import ALGORITHMS, intersect_sets
from fsi.result import Counters, IntersectionResult

__all__ = ["ALGORITHMS", "Config", "Counters", "HashSuite", "IntersectionResult",
           "galloping_intersect", "hash_probe_intersect", "intersect_sets", "merge_intersect"]
__version__ = "0.1.0"
