"""Compare-exchange strategies over key/reference elements.

Every strategy computes the same relation: given two elements, the one with
the smaller key ends up on the left, the larger on the right, and an
equal-key pair is left untouched (the comparison is strict ``right < left``).
They differ in *how* the move is expressed, which is the point: the
branch-based forms fork control flow on the key comparison, while the
select-based forms reduce it to comparison -> flag -> value/slot selection,
the dataflow shape a compiler lowers to conditional-move instructions.

Strategy codes used in CLI flags and CSV output: Def, QMa, Tie, 4Cm, 4CS,
6Cm, Cla, CPr.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, MutableSequence, Sequence

import numpy as np

from . import _kernels
from .networks import Network

__all__ = [
    "CountingSwap",
    "Element",
    "LengthMismatchError",
    "SwapStrategy",
    "compare_exchange",
    "execute_network",
    "execute_network_elements",
    "execute_network_rows",
    "from_arrays",
    "to_arrays",
]


class LengthMismatchError(ValueError):
    """Data length does not match the network size."""


@dataclass(frozen=True)
class Element:
    """Sortable record: unsigned 64-bit key plus an opaque 64-bit payload.

    Ordering compares keys only; the reference rides along and never
    influences a comparison.  Equality (and hashing) still use both fields
    so multiset bookkeeping in tests stays exact.
    """

    key: int
    reference: int = 0

    def __lt__(self, other: "Element") -> bool:
        return self.key < other.key

    def __le__(self, other: "Element") -> bool:
        return self.key <= other.key

    def __gt__(self, other: "Element") -> bool:
        return self.key > other.key

    def __ge__(self, other: "Element") -> bool:
        return self.key >= other.key


class SwapStrategy(enum.Enum):
    """Identifier for one compare-exchange implementation contract."""

    BRANCH_IF = "Def"
    SELECT_EXPR = "QMa"
    TUPLE_SELECT = "Tie"
    FOUR_SELECT = "4Cm"
    FOUR_SELECT_SPLIT = "4CS"
    SIX_SELECT = "6Cm"
    SLOT_SELECT = "Cla"
    PREDICATE_SLOT_SELECT = "CPr"

    @property
    def code(self) -> str:
        return self.value

    @classmethod
    def from_code(cls, code: str) -> "SwapStrategy":
        for s in cls:
            if s.value == code:
                return s
        raise ValueError(f"unknown swap strategy code {code!r}")


def _branch_if(left: Element, right: Element):
    # Control flow forks on the comparison; plain swap in the taken arm.
    if right.key < left.key:
        return right, left
    return left, right


def _select_expr(left: Element, right: Element):
    # Conditional expressions with trivial else parts; whether this becomes
    # a conditional move is left to the compiler.
    r = left.key > right.key
    temp = left
    left = right if r else left
    right = temp if r else right
    return left, right


def _tuple_select(left: Element, right: Element):
    # One conditional expression selecting between two preassembled tuples.
    left, right = (right, left) if right.key < left.key else (left, right)
    return left, right


def _four_select(left: Element, right: Element):
    # One comparison, four value-selects fed by two temporaries: the idiom
    # of four conditional moves of values.
    tmp_key = left.key
    tmp_ref = left.reference
    f = int(right.key < tmp_key)
    lk = (left.key, right.key)[f]
    lr = (left.reference, right.reference)[f]
    rk = (right.key, tmp_key)[f]
    rr = (right.reference, tmp_ref)[f]
    return Element(lk, lr), Element(rk, rr)


def _four_select_split(left: Element, right: Element):
    # Same dataflow as the four-select form, but each select is a separate
    # single-assignment step with no dependency on its siblings, so a
    # scheduler may interleave unrelated work between them.
    tmp_key = left.key
    tmp_ref = left.reference
    f = int(right.key < tmp_key)
    lk = (left.key, right.key)[f]
    lr = (left.reference, right.reference)[f]
    rk = (right.key, tmp_key)[f]
    rr = (right.reference, tmp_ref)[f]
    return Element(lk, lr), Element(rk, rr)


def _six_select(left: Element, right: Element):
    # Six value-selects: even the temporaries are conditionally loaded
    # instead of being unconditional copies.
    f = int(right.key < left.key)
    tmp_key = (0, left.key)[f]
    tmp_ref = (0, left.reference)[f]
    lk = (left.key, right.key)[f]
    lr = (left.reference, right.reference)[f]
    rk = (right.key, tmp_key)[f]
    rr = (right.reference, tmp_ref)[f]
    return Element(lk, lr), Element(rk, rr)


def _slot_select(left: Element, right: Element):
    # Slot-move idiom: the select picks *which storage slot* each output
    # reads from (a conditional move of a pointer), then values are copied
    # through the chosen slot.  Slot 2 is the temporary copy of the left.
    slots = (left, right, left)
    f = int(right.key < slots[2].key)
    left_slot = (0, 1)[f]
    right_slot = (1, 2)[f]
    return slots[left_slot], slots[right_slot]


def _key_less(a: Element, b: Element) -> int:
    """External predicate: 1 if ``a.key < b.key`` else 0."""
    return int(a.key < b.key)


def _predicate_slot_select(left: Element, right: Element):
    # Same slot-move idiom, but the comparison is hidden behind an external
    # predicate; the select only tests the returned flag against zero, so
    # the dataflow needs no knowledge of the key type.
    slots = (left, right, left)
    pred = _key_less(right, slots[2])
    f = int(pred != 0)
    left_slot = (0, 1)[f]
    right_slot = (1, 2)[f]
    return slots[left_slot], slots[right_slot]


_STRATEGY_FUNCS: dict[SwapStrategy, Callable] = {
    SwapStrategy.BRANCH_IF: _branch_if,
    SwapStrategy.SELECT_EXPR: _select_expr,
    SwapStrategy.TUPLE_SELECT: _tuple_select,
    SwapStrategy.FOUR_SELECT: _four_select,
    SwapStrategy.FOUR_SELECT_SPLIT: _four_select_split,
    SwapStrategy.SIX_SELECT: _six_select,
    SwapStrategy.SLOT_SELECT: _slot_select,
    SwapStrategy.PREDICATE_SLOT_SELECT: _predicate_slot_select,
}


def compare_exchange(strategy: SwapStrategy, left: Element, right: Element):
    """Return ``(min-by-key, max-by-key)``; equal keys come back unchanged."""
    return _STRATEGY_FUNCS[strategy](left, right)


class CountingSwap:
    """Instrumented swap wrapper: counts compare-exchange invocations."""

    def __init__(self, strategy: SwapStrategy = SwapStrategy.FOUR_SELECT_SPLIT):
        self._func = _STRATEGY_FUNCS[strategy]
        self.count = 0

    def __call__(self, left: Element, right: Element):
        self.count += 1
        return self._func(left, right)


def execute_network_elements(
    net: Network,
    data: MutableSequence[Element],
    strategy: SwapStrategy = SwapStrategy.FOUR_SELECT_SPLIT,
    swap: Callable | None = None,
) -> None:
    """Apply the network's comparators in order, in place, element-wise.

    Reference executor for tests and instrumentation; ``swap`` may replace
    the strategy function (e.g. with a :class:`CountingSwap`).
    """
    if len(data) != net.size:
        raise LengthMismatchError(
            f"data length {len(data)} != network size {net.size}"
        )
    if swap is None:
        swap = _STRATEGY_FUNCS[strategy]
    for lo, hi in net.comparators:
        data[lo], data[hi] = swap(data[lo], data[hi])


def execute_network(
    net: Network,
    keys: np.ndarray,
    refs: np.ndarray,
    strategy: SwapStrategy = SwapStrategy.FOUR_SELECT_SPLIT,
) -> None:
    """Apply the network in place on parallel ``uint64`` key/ref arrays.

    Compiled per strategy; the comparator sequence runs exactly as stored,
    independent of the data (same swap count for every permutation).
    """
    if keys.shape[0] != net.size or refs.shape[0] != net.size:
        raise LengthMismatchError(
            f"data length {keys.shape[0]} != network size {net.size}"
        )
    los, his = _kernels.comparator_arrays(net)
    _kernels.network_runner(strategy.code)(keys, refs, los, his)


def execute_network_rows(
    net: Network,
    keys: np.ndarray,
    refs: np.ndarray,
    strategy: SwapStrategy = SwapStrategy.FOUR_SELECT_SPLIT,
) -> None:
    """Run the network on every row of 2-D key/ref arrays (batch form)."""
    if keys.shape[1] != net.size:
        raise LengthMismatchError(
            f"row length {keys.shape[1]} != network size {net.size}"
        )
    los, his = _kernels.comparator_arrays(net)
    _kernels.network_rows_runner(strategy.code)(keys, refs, los, his)


def to_arrays(data: Sequence[Element]) -> tuple[np.ndarray, np.ndarray]:
    """Split elements into parallel ``uint64`` key and reference arrays."""
    keys = np.fromiter((e.key for e in data), dtype=np.uint64, count=len(data))
    refs = np.fromiter((e.reference for e in data), dtype=np.uint64, count=len(data))
    return keys, refs


def from_arrays(keys: np.ndarray, refs: np.ndarray) -> list[Element]:
    """Zip parallel arrays back into a list of elements."""
    return [Element(int(k), int(r)) for k, r in zip(keys, refs)]
