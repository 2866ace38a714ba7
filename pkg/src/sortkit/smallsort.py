"""Baseline small-set sorters and the network/insertion dispatcher.

The dispatcher mirrors the combination used as a base case inside larger
sorters: sets of 2..16 elements go to a sorting network, anything larger to
insertion sort, and the routing is resolved once per (network kind,
strategy) pair so the hot path stays monomorphic.
"""

from __future__ import annotations

import enum
from functools import lru_cache
from typing import Callable, MutableSequence

import numpy as np

from . import _kernels
from .networks import BoseNelsonOrder, Network, NetworkOrigin, best_network, generate_bose_nelson
from .swaps import Element, SwapStrategy, compare_exchange

__all__ = [
    "NETWORK_MAX_SIZE",
    "SmallSorterId",
    "insertion_sort",
    "insertion_sort_elements",
    "insertion_sort_unguarded",
    "network_for",
    "small_sorter",
    "sort_small",
    "sort_small_elements",
]

NETWORK_MAX_SIZE = 16


class SmallSorterId(enum.Enum):
    INSERTION_GUARDED = "I Def"
    INSERTION_UNGUARDED = "I Ung"
    NETWORK_BEST = "N Best"
    NETWORK_BOSE_NELSON_LOCALITY = "N BoNeL"
    NETWORK_BOSE_NELSON_PARALLELISM = "N BoNeP"


def network_for(kind: NetworkOrigin, n: int) -> Network:
    """The size-``n`` network of the given kind."""
    if kind is NetworkOrigin.BEST_KNOWN:
        return best_network(n)
    if kind is NetworkOrigin.BOSE_NELSON_LOCALITY:
        return generate_bose_nelson(n, BoseNelsonOrder.LOCALITY)
    return generate_bose_nelson(n, BoseNelsonOrder.PARALLELISM)


def insertion_sort(keys: np.ndarray, refs: np.ndarray) -> None:
    """Guarded insertion sort, in place (bounds-checked inner scan)."""
    _kernels.insertion_guarded(keys, refs, 0, keys.shape[0])


def insertion_sort_unguarded(keys: np.ndarray, refs: np.ndarray) -> None:
    """Unguarded insertion sort: minimum moved to front as scan sentinel."""
    _kernels.insertion_unguarded(keys, refs, 0, keys.shape[0])


@lru_cache(maxsize=None)
def _packed_networks(kind: NetworkOrigin):
    """Flatten the size-2..16 networks of one kind into offset-indexed arrays."""
    los: list[int] = []
    his: list[int] = []
    offs = [0, 0, 0]  # sizes 0 and 1 contribute nothing
    for n in range(2, NETWORK_MAX_SIZE + 1):
        net = network_for(kind, n)
        for c in net.comparators:
            los.append(c.lo)
            his.append(c.hi)
        offs.append(len(los))
    return (
        np.array(los, dtype=np.int64),
        np.array(his, dtype=np.int64),
        np.array(offs, dtype=np.int64),
    )


@lru_cache(maxsize=None)
def small_sorter(kind: NetworkOrigin, strategy: SwapStrategy):
    """Compiled range sorter ``f(keys, refs, lo, hi)`` for one combination."""
    los, his, offs = _packed_networks(kind)
    return _kernels.build_small_sorter(los, his, offs, _kernels.SWAP_KERNELS[strategy.code])


def sort_small(
    keys: np.ndarray,
    refs: np.ndarray,
    network_kind: NetworkOrigin = NetworkOrigin.BEST_KNOWN,
    strategy: SwapStrategy = SwapStrategy.FOUR_SELECT_SPLIT,
) -> None:
    """Sort in place: n <= 1 no-op, 2..16 network, larger insertion sort."""
    small_sorter(network_kind, strategy)(keys, refs, 0, keys.shape[0])


def insertion_sort_elements(data: MutableSequence[Element], unguarded: bool = False) -> None:
    """Reference element-level insertion sort (mirrors the kernels)."""
    n = len(data)
    if n < 2:
        return
    if unguarded:
        m = 0
        for i in range(1, n):
            if data[i].key < data[m].key:
                m = i
        if m != 0:
            data[0], data[m] = data[m], data[0]
        for i in range(2, n):
            e = data[i]
            j = i - 1
            while data[j].key > e.key:  # min sentinel stops the scan
                data[j + 1] = data[j]
                j -= 1
            data[j + 1] = e
    else:
        for i in range(1, n):
            e = data[i]
            j = i - 1
            while j >= 0 and data[j].key > e.key:
                data[j + 1] = data[j]
                j -= 1
            data[j + 1] = e


def sort_small_elements(
    data: MutableSequence[Element],
    network_kind: NetworkOrigin = NetworkOrigin.BEST_KNOWN,
    strategy: SwapStrategy = SwapStrategy.FOUR_SELECT_SPLIT,
    swap: Callable | None = None,
) -> None:
    """Element-level dispatcher; ``swap`` admits instrumented wrappers."""
    n = len(data)
    if n <= 1:
        return
    if n <= NETWORK_MAX_SIZE:
        net = network_for(network_kind, n)
        if swap is None:
            swap = lambda a, b: compare_exchange(strategy, a, b)
        for lo, hi in net.comparators:
            data[lo], data[hi] = swap(data[lo], data[hi])
    else:
        insertion_sort_elements(data)
