"""Integer partition helpers shared by the weight-vector and reduction code."""
from __future__ import annotations

from typing import Iterator, Sequence


def is_partition(parts: Sequence[int]) -> bool:
    """True for a nonincreasing sequence of nonnegative integers."""
    return all(int(p) == p and p >= 0 for p in parts) and all(
        parts[i] >= parts[i + 1] for i in range(len(parts) - 1)
    )


def conjugate_partition(parts: Sequence[int]) -> tuple[int, ...]:
    """Column heights of the Young diagram of ``parts``."""
    if not is_partition(parts):
        raise ValueError(f"not a partition: {parts}")
    width = parts[0] if parts else 0
    return tuple(sum(1 for p in parts if p >= c + 1) for c in range(width))


def partitions_of(k: int, max_parts: int) -> Iterator[tuple[int, ...]]:
    """All partitions of k into at most max_parts parts, in lexicographic
    (largest-first) order."""
    if k < 0 or max_parts < 0:
        raise ValueError("k and max_parts must be nonnegative")

    def rec(remaining: int, bound: int, slots: int):
        if remaining == 0:
            yield ()
            return
        if slots == 0:
            return
        for first in range(min(remaining, bound), 0, -1):
            for rest in rec(remaining - first, first, slots - 1):
                yield (first,) + rest

    yield from rec(k, k, max_parts)
