"""
Bounded partitions Lambda^(n,m) and their elementary moves
"""
import logging
from itertools import combinations_with_replacement
from math import comb
from typing import Dict, List, Sequence, Tuple

from utils.errors import DomainError

logger = logging.getLogger(__name__)

Partition = Tuple[int, ...]
Move = Tuple[int, int]  # (j, epsilon) with 1-based j


def validate_partition(lam: Sequence[int], n: int, m: int) -> Partition:
    """Return lam as a Partition tuple, raising DomainError if it is not in Lambda^(n,m)"""
    lam = tuple(int(x) for x in lam)
    if len(lam) != n:
        raise DomainError(f"Partition {lam} must have length {n}")
    if any(x < 0 or x > m for x in lam):
        raise DomainError(f"Partition {lam} has parts outside [0, {m}]")
    if any(lam[i] < lam[i + 1] for i in range(n - 1)):
        raise DomainError(f"Partition {lam} is not weakly decreasing")
    return lam


def enumerate_partitions(n: int, m: int) -> List[Partition]:
    """
    All partitions with n parts bounded by m, in graded lexicographic order

    Ordered by |lam| ascending, then lexicographically descending, so the
    zero partition comes first.

    Args:
        n: number of parts (particles)
        m: largest allowed part

    Returns:
        List of C(n+m, n) partitions
    """
    if n < 1 or m < 1:
        raise DomainError(f"Need n >= 1 and m >= 1, got n={n}, m={m}")
    parts = [tuple(sorted(c, reverse=True)) for c in combinations_with_replacement(range(m + 1), n)]
    parts.sort(key=lambda lam: (sum(lam), tuple(-x for x in lam)))
    return parts


def shift(lam: Partition, j: int, eps: int) -> Tuple[int, ...]:
    """lam + eps e_j for 1-based j (not necessarily a partition)"""
    out = list(lam)
    out[j - 1] += eps
    return tuple(out)


class PartitionLattice:
    """Ranked configuration space Lambda^(n,m)"""

    def __init__(self, n: int, m: int):
        self.n = n
        self.m = m
        self.partitions = enumerate_partitions(n, m)
        self._rank: Dict[Partition, int] = {lam: i for i, lam in enumerate(self.partitions)}
        if len(self.partitions) != comb(n + m, n):
            raise DomainError("Partition enumeration size mismatch")
        logger.debug(f"Lattice Lambda^({n},{m}) with {len(self.partitions)} points")

    def __len__(self) -> int:
        return len(self.partitions)

    def __iter__(self):
        return iter(self.partitions)

    def __contains__(self, lam) -> bool:
        return tuple(lam) in self._rank

    @property
    def zero(self) -> Partition:
        return self.partitions[0]

    def rank(self, lam: Sequence[int]) -> int:
        try:
            return self._rank[tuple(lam)]
        except KeyError:
            raise DomainError(f"{tuple(lam)} is not in Lambda^({self.n},{self.m})") from None

    def unrank(self, index: int) -> Partition:
        if not 0 <= index < len(self.partitions):
            raise DomainError(f"Rank {index} out of range [0, {len(self.partitions)})")
        return self.partitions[index]

    def is_admissible(self, lam: Partition, j: int, eps: int) -> bool:
        """Whether lam + eps e_j stays inside Lambda^(n,m)"""
        n, m = self.n, self.m
        if eps == 1:
            return lam[j - 1] < m and (j == 1 or lam[j - 2] > lam[j - 1])
        return lam[j - 1] > 0 and (j == n or lam[j - 1] > lam[j])

    def moves(self, lam: Partition) -> List[Move]:
        """Admissible moves (j, eps), ordered by j then raise before lower"""
        return [(j, eps) for j in range(1, self.n + 1) for eps in (1, -1)
                if self.is_admissible(lam, j, eps)]

    def neighbors(self, lam: Partition) -> List[Tuple[Move, Partition]]:
        return [((j, eps), shift(lam, j, eps)) for j, eps in self.moves(lam)]

    def column(self, k: int) -> Partition:
        """The column partition (1^k) for m >= 1"""
        if not 0 <= k <= self.n:
            raise DomainError(f"Column length {k} outside [0, {self.n}]")
        return tuple([1] * k + [0] * (self.n - k))
