"""
Partition-parallel map with a deterministic merge order.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def map_partitions(func: Callable[[T], R], partitions: Sequence[T], threads: int = 1) -> List[R]:
    """Apply func to every partition; results come back in partition order"""
    if threads <= 1 or len(partitions) <= 1:
        return [func(p) for p in partitions]
    with ThreadPoolExecutor(max_workers=min(threads, len(partitions))) as pool:
        return list(pool.map(func, partitions))
