"""Sample sort for medium sets (target <= 256 elements).

Three splitters are chosen from an oversampled, evenly spaced sample and
conceptually live in registers for the whole classification: each element
is routed into one of four buckets by two comparisons, a select that
overwrites the left subtree splitter with the right one, and a shift/add
building the bucket index.  Buckets are materialized out of place, sorted
recursively, and concatenated back, so the outer contract is in-place.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, MutableSequence, NamedTuple, Sequence

import numpy as np

from . import _kernels
from .networks import NetworkOrigin
from .smallsort import insertion_sort_elements, small_sorter, sort_small_elements
from .swaps import Element, SwapStrategy

__all__ = [
    "BucketSet",
    "DegenerateInputError",
    "SampleSortConfig",
    "SplitterSet",
    "classify",
    "classify_element",
    "parse_config_code",
    "sample_sort",
    "sample_sort_elements",
    "select_splitters",
]

SPLITTER_COUNT = 3  # 4 buckets; a 7-splitter mode is deliberately not offered


class DegenerateInputError(ValueError):
    """Input too small to draw the requested splitter sample from."""


@dataclass(frozen=True)
class SampleSortConfig:
    """Tuning knobs: ``-Sxyz`` maps to (splitters, oversampling, block size)."""

    oversampling_factor: int = 3
    block_size: int = 2
    base_case_limit: int = 16
    splitter_count: int = SPLITTER_COUNT

    def __post_init__(self):
        if self.splitter_count != SPLITTER_COUNT:
            raise ValueError("splitter count is fixed at 3")
        if self.oversampling_factor < 1:
            raise ValueError("oversampling factor must be >= 1")
        if not 1 <= self.block_size <= 5:
            raise ValueError("block size must be in [1, 5]")
        if self.base_case_limit < 1:
            raise ValueError("base case limit must be >= 1")

    @property
    def code(self) -> str:
        return f"{self.splitter_count}{self.oversampling_factor}{self.block_size}"


def parse_config_code(code: str) -> SampleSortConfig:
    """Parse a three-digit ``xyz`` config string (x must be 3)."""
    if len(code) != 3 or not code.isdigit():
        raise ValueError(f"config code must be three digits, got {code!r}")
    x, y, z = (int(ch) for ch in code)
    if x != SPLITTER_COUNT:
        raise ValueError(f"splitter count is fixed at 3, got {x}")
    return SampleSortConfig(oversampling_factor=y, block_size=z)


class SplitterSet(NamedTuple):
    s0: int
    s1: int
    s2: int


class BucketSet(NamedTuple):
    """Four element sequences; bucket j holds keys in (s_{j-1}, s_j]."""

    b0: list[Element]
    b1: list[Element]
    b2: list[Element]
    b3: list[Element]


def select_splitters(
    data: Sequence[Element],
    a: int,
    sample_sorter: Callable[[MutableSequence[Element]], None] | None = None,
) -> SplitterSet:
    """Sort an evenly spaced sample of 4a elements; splitters sit at
    1-based sorted positions a, 2a, 3a."""
    n = len(data)
    m = 4 * a
    if n < m:
        raise DegenerateInputError(f"need at least {m} elements for a={a}, got {n}")
    sample = [data[(t * n) // m] for t in range(m)]
    if sample_sorter is None:
        sample_sorter = sort_small_elements
    sample_sorter(sample)
    return SplitterSet(sample[a - 1].key, sample[2 * a - 1].key, sample[3 * a - 1].key)


def classify_element(key: int, s: SplitterSet, less: Callable = operator.lt) -> int:
    """Bucket index in [0, 3] via the branchless two-level splitter walk.

    Comparison, flag, select of the surviving subtree splitter, second
    comparison, then shift+add assembles the index; no control-flow fork.
    """
    p1 = int(less(s.s1, key))
    splitterx = (s.s0, s.s2)[p1]
    p2 = int(less(splitterx, key))
    return (p1 << 1) + p2


def classify(data: Sequence[Element], s: SplitterSet, block_size: int = 1) -> BucketSet:
    """Distribute elements into four buckets, ``block_size`` lanes per loop.

    Full blocks run ``block_size`` independent classification dataflows and
    then place their elements in lane order; the remainder is classified one
    at a time.  Output order matches one-at-a-time classification exactly.
    """
    if not 1 <= block_size <= 5:
        raise ValueError("block size must be in [1, 5]")
    buckets = BucketSet([], [], [], [])
    n = len(data)
    full = (n // block_size) * block_size
    states = [0] * block_size
    i = 0
    while i < full:
        for t in range(block_size):
            states[t] = classify_element(data[i + t].key, s)
        for t in range(block_size):
            buckets[states[t]].append(data[i + t])
        i += block_size
    while i < n:
        buckets[classify_element(data[i].key, s)].append(data[i])
        i += 1
    return buckets


@lru_cache(maxsize=None)
def _compiled(kind: NetworkOrigin | None, strategy: SwapStrategy | None):
    if kind is None:
        base = _kernels.insertion_guarded
    else:
        base = small_sorter(kind, strategy)
    return _kernels.build_sample_sort(base)


def sample_sort(
    keys: np.ndarray,
    refs: np.ndarray,
    cfg: SampleSortConfig = SampleSortConfig(),
    network_kind: NetworkOrigin | None = NetworkOrigin.BEST_KNOWN,
    strategy: SwapStrategy = SwapStrategy.FOUR_SELECT_SPLIT,
) -> None:
    """Sort parallel key/ref arrays in place.

    The base-case sorter (and the splitter-sample sorter, which is the same
    one) is the small-sort dispatcher for ``network_kind``, or plain
    insertion sort when ``network_kind`` is None.
    """
    _compiled(network_kind, None if network_kind is None else strategy)(
        keys, refs, cfg.oversampling_factor, cfg.block_size, cfg.base_case_limit
    )


def sample_sort_elements(
    data: MutableSequence[Element],
    cfg: SampleSortConfig = SampleSortConfig(),
    small_sorter_fn: Callable[[MutableSequence[Element]], None] | None = None,
) -> None:
    """Element-level reference sample sort; ``small_sorter_fn`` sorts both
    the splitter sample and every base case (instrumentable)."""
    if small_sorter_fn is None:
        small_sorter_fn = sort_small_elements
    n = len(data)
    if n <= cfg.base_case_limit or n < 4 * cfg.oversampling_factor:
        small_sorter_fn(data)
        return
    splitters = select_splitters(data, cfg.oversampling_factor, small_sorter_fn)
    buckets = classify(data, splitters, cfg.block_size)
    if any(len(b) == n for b in buckets):
        # no progress possible (duplicate-heavy input)
        insertion_sort_elements(data)
        return
    pos = 0
    for bucket in buckets:
        sample_sort_elements(bucket, cfg, small_sorter_fn)
        for e in bucket:
            data[pos] = e
            pos += 1
