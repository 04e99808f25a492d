"""Inter-transaction Jaccard similarity and the threshold-graph oracle.

The component oracle is deliberately O(n^2); it exists to validate cleansing
effects on small databases, not to cluster at scale.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .core import Transaction, TransactionDatabase


def jaccard_parts(t1: Transaction, t2: Transaction) -> tuple[int, int]:
    """(intersection size, union size) of the two item sets.

    Raises ValueError when both transactions are empty (0/0 undefined).
    """
    a = t1.item_set()
    b = t2.item_set()
    if not a and not b:
        raise ValueError("similarity undefined for two empty transactions")
    return len(a & b), len(a | b)


def jaccard(t1: Transaction, t2: Transaction) -> float:
    """|T1 n T2| / |T1 u T2|; symmetric, 1 iff equal sets, 0 if disjoint."""
    inter, union = jaccard_parts(t1, t2)
    return inter / union


def threshold_components(
    db: TransactionDatabase,
    theta: float,
) -> list[list[int]]:
    """Connected components of the graph linking transactions with
    jaccard >= theta.

    Comparison is exact (rational arithmetic against the binary value of
    ``theta``), so boundary pairs like 2/4 vs 0.5 are never lost to float
    rounding. Components are returned sorted by smallest member tid, members
    ascending.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    threshold = Fraction(theta)

    parent = list(range(db.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t1, t2 in combinations(db.transactions, 2):
        inter, union = jaccard_parts(t1, t2)
        if Fraction(inter, union) >= threshold:
            ra, rb = find(t1.tid), find(t2.tid)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

    groups: dict[int, list[int]] = {}
    for tid in range(db.n):
        groups.setdefault(find(tid), []).append(tid)
    return [groups[root] for root in sorted(groups)]


__all__ = ["jaccard", "jaccard_parts", "threshold_components"]
