"""Introsort-style quicksort with pluggable small-partition handling.

Partitions of 16 elements or fewer are either left for one final insertion
pass (the classic shape), insertion-sorted immediately, or handed to a
sorting network.  The pivot is the median of three picked by the 3-channel
network applied with value selects, and recursion deeper than
2*floor(log2 n) falls back to heapsort.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import MutableSequence

import numpy as np

from . import _kernels
from .networks import BoseNelsonOrder, NetworkOrigin, generate_bose_nelson
from .smallsort import NETWORK_MAX_SIZE, small_sorter, sort_small_elements
from .swaps import Element, SwapStrategy, compare_exchange

__all__ = [
    "BaseCaseKind",
    "BaseCasePolicy",
    "QuicksortStats",
    "insertion_final_pass",
    "insertion_per_partition",
    "median_of_three",
    "network_per_partition",
    "quicksort",
    "quicksort_elements",
]


class BaseCaseKind(enum.Enum):
    INSERTION_FINAL_PASS = "final"
    INSERTION_PER_PARTITION = "insertion"
    NETWORK_PER_PARTITION = "network"


@dataclass(frozen=True)
class BaseCasePolicy:
    kind: BaseCaseKind
    network_kind: NetworkOrigin | None = None
    strategy: SwapStrategy | None = None

    def __post_init__(self):
        needs_net = self.kind is BaseCaseKind.NETWORK_PER_PARTITION
        if needs_net and (self.network_kind is None or self.strategy is None):
            raise ValueError("network policy needs a network kind and a strategy")
        if not needs_net and (self.network_kind is not None or self.strategy is not None):
            raise ValueError("network kind/strategy only apply to the network policy")


def insertion_final_pass() -> BaseCasePolicy:
    return BaseCasePolicy(BaseCaseKind.INSERTION_FINAL_PASS)


def insertion_per_partition() -> BaseCasePolicy:
    return BaseCasePolicy(BaseCaseKind.INSERTION_PER_PARTITION)


def network_per_partition(
    network_kind: NetworkOrigin = NetworkOrigin.BEST_KNOWN,
    strategy: SwapStrategy = SwapStrategy.FOUR_SELECT_SPLIT,
) -> BaseCasePolicy:
    return BaseCasePolicy(BaseCaseKind.NETWORK_PER_PARTITION, network_kind, strategy)


@lru_cache(maxsize=None)
def _pivot_network():
    return generate_bose_nelson(3, BoseNelsonOrder.LOCALITY).comparators


def median_of_three(
    a: Element,
    b: Element,
    c: Element,
    strategy: SwapStrategy = SwapStrategy.FOUR_SELECT_SPLIT,
) -> Element:
    """Key-median of three elements via the 3-channel network.

    The comparators run with a select-based strategy, so no control flow
    forks on the key comparisons.
    """
    trio = [a, b, c]
    for lo, hi in _pivot_network():
        trio[lo], trio[hi] = compare_exchange(strategy, trio[lo], trio[hi])
    return trio[1]


_MODE_OF = {
    BaseCaseKind.INSERTION_FINAL_PASS: _kernels.BASE_FINAL_INSERTION,
    BaseCaseKind.INSERTION_PER_PARTITION: _kernels.BASE_INSERTION_PER_PARTITION,
    BaseCaseKind.NETWORK_PER_PARTITION: _kernels.BASE_NETWORK_PER_PARTITION,
}


@lru_cache(maxsize=None)
def _compiled(kind: BaseCaseKind, network_kind, strategy):
    if kind is BaseCaseKind.NETWORK_PER_PARTITION:
        base = small_sorter(network_kind, strategy)
    else:
        base = _kernels.insertion_guarded  # placeholder, branch never taken
    return _kernels.build_quicksort(_MODE_OF[kind], base)


def quicksort(keys: np.ndarray, refs: np.ndarray, policy: BaseCasePolicy) -> None:
    """Sort parallel key/ref arrays in place under the given policy."""
    _compiled(policy.kind, policy.network_kind, policy.strategy)(keys, refs)


@dataclass
class QuicksortStats:
    """Filled in by :func:`quicksort_elements` when passed as ``stats``."""

    base_case_sizes: list[int] = field(default_factory=list)
    max_depth: int = 0
    heapsort_calls: int = 0


def _hoare_elements(data, lo, hi, pivot_key):
    i = lo - 1
    j = hi + 1
    while True:
        i += 1
        while data[i].key < pivot_key:
            i += 1
        j -= 1
        while data[j].key > pivot_key:
            j -= 1
        if i >= j:
            return j
        data[i], data[j] = data[j], data[i]


def _heapsort_elements(data, lo, hi):
    n = hi - lo

    def sift(root, end):
        while True:
            child = 2 * root + 1
            if child >= end:
                return
            if child + 1 < end and data[lo + child].key < data[lo + child + 1].key:
                child += 1
            if data[lo + root].key < data[lo + child].key:
                data[lo + root], data[lo + child] = data[lo + child], data[lo + root]
                root = child
            else:
                return

    for s in range(n // 2 - 1, -1, -1):
        sift(s, n)
    for end in range(n - 1, 0, -1):
        data[lo], data[lo + end] = data[lo + end], data[lo]
        sift(0, end)


def _insertion_elements_range(data, lo, hi):
    for i in range(lo + 1, hi):
        e = data[i]
        j = i - 1
        while j >= lo and data[j].key > e.key:
            data[j + 1] = data[j]
            j -= 1
        data[j + 1] = e


def quicksort_elements(
    data: MutableSequence[Element],
    policy: BaseCasePolicy,
    stats: QuicksortStats | None = None,
) -> None:
    """Element-level reference quicksort mirroring the compiled kernel.

    With ``stats`` it records base-case partition sizes, the deepest
    recursion level reached, and heapsort fallbacks.
    """
    n = len(data)

    def base_case(lo, hi):
        m = hi - lo + 1
        if m < 2:
            return
        if policy.kind is BaseCaseKind.INSERTION_PER_PARTITION:
            _insertion_elements_range(data, lo, hi + 1)
        elif policy.kind is BaseCaseKind.NETWORK_PER_PARTITION:
            if stats is not None:
                stats.base_case_sizes.append(m)
            chunk = data[lo:hi + 1]
            sort_small_elements(chunk, policy.network_kind, policy.strategy)
            data[lo:hi + 1] = chunk

    def intro(lo, hi, depth_left, depth):
        while hi - lo + 1 > NETWORK_MAX_SIZE:
            if stats is not None and depth > stats.max_depth:
                stats.max_depth = depth
            if depth_left == 0:
                _heapsort_elements(data, lo, hi + 1)
                if stats is not None:
                    stats.heapsort_calls += 1
                return
            depth_left -= 1
            depth += 1
            mid = lo + (hi - lo) // 2
            pivot = median_of_three(data[lo], data[mid], data[hi]).key
            j = _hoare_elements(data, lo, hi, pivot)
            if j - lo < hi - j:
                intro(lo, j, depth_left, depth)
                lo = j + 1
            else:
                intro(j + 1, hi, depth_left, depth)
                hi = j
        base_case(lo, hi)

    if n >= 2:
        intro(0, n - 1, 2 * (n.bit_length() - 1), 0)
    if policy.kind is BaseCaseKind.INSERTION_FINAL_PASS:
        _insertion_elements_range(data, 0, n)
