"""Bitmask subsets and partition enumeration helpers.

Coordinate subsets are plain ints: bit j set means coordinate j is in the
subset. Keeping them as ints makes subset iteration, unions and popcounts
cheap and hashable.
"""

from __future__ import annotations

from typing import Iterator


def bits(mask: int) -> list[int]:
    """Indices of the set bits, ascending."""
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


def mask_of(indices) -> int:
    m = 0
    for j in indices:
        m |= 1 << j
    return m


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask`` including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def masks_of_size(n: int, k: int) -> Iterator[int]:
    """All k-subsets of [n] as bitmasks, in lexicographic bit order."""
    if k == 0:
        yield 0
        return
    if k > n:
        return
    # Gosper's hack
    mask = (1 << k) - 1
    limit = 1 << n
    while mask < limit:
        yield mask
        c = mask & -mask
        r = mask + c
        mask = (((r ^ mask) >> 2) // c) | r


def all_masks(n: int) -> Iterator[int]:
    return iter(range(1 << n))


def set_partitions(r: int) -> list[list[list[int]]]:
    """All unordered partitions of {0,..,r-1} into non-empty blocks.

    Element i is appended either to an existing block or to a new one, so
    each partition is produced exactly once (restricted-growth order).
    """
    if r == 0:
        return [[]]
    parts: list[list[list[int]]] = []

    def rec(i: int, blocks: list[list[int]]):
        if i == r:
            parts.append([list(b) for b in blocks])
            return
        for b in blocks:
            b.append(i)
            rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        rec(i + 1, blocks)
        blocks.pop()

    rec(0, [])
    return parts


def integer_partitions(s: int) -> list[tuple[int, ...]]:
    """Integer partitions of s as multiplicity vectors.

    Entry j-1 of a result tuple counts the parts of size j, so every tuple
    has length s and satisfies sum over j of j * mult[j-1] == s.  For s = 0
    the single empty partition is returned as ().
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    if s == 0:
        return [()]
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, largest: int, mults: list[int]):
        if remaining == 0:
            out.append(tuple(mults))
            return
        for j in range(min(remaining, largest), 0, -1):
            mults[j - 1] += 1
            rec(remaining - j, j, mults)
            mults[j - 1] -= 1

    rec(s, s, [0] * s)
    return out
