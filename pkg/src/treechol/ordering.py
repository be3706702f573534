"""Approximate minimum-degree elimination ordering.

A lazy bucket queue: bucket b holds degrees in (2^(b-1), 2^b] (degrees 0 and
1 share bucket 0).  Every degree change pushes a freshly stamped entry into
the bucket of the new degree; pop scans from the lowest non-empty bucket and
discards entries that are stale or belong to already-popped vertices.  The
vertex returned therefore has true degree within its bucket, which bounds the
popped degree by twice the current minimum.  All operations are amortized
O(1) plus the bucket scan.

The compiled factorization kernel re-implements the same semantics; the
reference eliminator uses this class, and a cross test pins the two to
identical elimination orders.
"""

from __future__ import annotations


def degree_bucket(d: int) -> int:
    if d <= 1:
        return 0
    return int(d - 1).bit_length()


class MinDegreeQueue:
    """Streaming vertex choice with O(1) amortized degree-update notifications."""

    def __init__(self, degrees):
        n = len(degrees)
        self.n = n
        self._heads: list[list] = [[] for _ in range(66)]
        self._stamp = [0] * n
        self._popped = [False] * n
        self._serial = 0
        self._min_b = 0
        self._remaining = n
        for v in range(n):
            self.update(v, degrees[v])

    def update(self, v: int, degree: int) -> None:
        """Notify the queue that v's current degree changed."""
        if self._popped[v]:
            return
        self._serial += 1
        self._stamp[v] = self._serial
        b = degree_bucket(degree)
        self._heads[b].append((v, self._serial, b))
        if b < self._min_b:
            self._min_b = b

    def pop(self) -> int:
        """Next vertex to eliminate; each vertex is returned exactly once."""
        if self._remaining == 0:
            raise IndexError("queue is empty")
        b = self._min_b
        while True:
            bucket = self._heads[b]
            while bucket:
                v, s, _ = bucket.pop()
                if self._popped[v] or s != self._stamp[v]:
                    continue
                self._popped[v] = True
                self._remaining -= 1
                self._min_b = b
                return v
            b += 1

    def __len__(self):
        return self._remaining

    def __bool__(self):
        return self._remaining > 0


def elimination_order(g) -> MinDegreeQueue:
    """Min-degree queue primed with a multi-graph's current degrees.

    The caller pops vertices one at a time and must call ``update`` for every
    vertex whose degree changes during elimination, so the queue reflects
    sampled fill before the next pop.
    """
    return MinDegreeQueue([g.degree(v) for v in range(g.n)])
