"""
Persistent homology over Z2 by boundary-matrix column reduction with clearing.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Set, Tuple

from ..config.settings import Config
from ..exceptions import DimensionUnavailable
from .filtration import Filtration

logger = logging.getLogger(__name__)

INF = math.inf
Interval = Tuple[float, float]


@dataclass(frozen=True)
class Barcode:
    """Multiset of persistence intervals of one homology degree."""

    degree: int
    intervals: Tuple[Interval, ...] = ()

    @classmethod
    def of(cls, degree: int, intervals: Iterable[Interval]) -> "Barcode":
        kept = [(float(b), float(d)) for b, d in intervals if d - b > Config.INTERVAL_TOLERANCE]
        return cls(degree, tuple(sorted(kept)))

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    @property
    def finite(self) -> Tuple[Interval, ...]:
        return tuple(iv for iv in self.intervals if iv[1] != INF)

    @property
    def essential(self) -> Tuple[Interval, ...]:
        return tuple(iv for iv in self.intervals if iv[1] == INF)

    def counter(self) -> Counter:
        return Counter(self.intervals)

    def betti(self, eps: float) -> int:
        """Number of intervals alive at eps, b ≤ eps < d."""
        return sum(1 for b, d in self.intervals if b <= eps < d)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "intervals": [[b, "inf" if d == INF else d] for b, d in self.intervals],
        }

    @classmethod
    def from_dict(cls, document: dict) -> "Barcode":
        return cls.of(int(document["degree"]),
                      ((float(b), INF if d == "inf" else float(d)) for b, d in document["intervals"]))


@dataclass(frozen=True)
class BarcodeSet:
    pb0: Barcode
    pb1: Barcode
    pb2: Barcode
    pb1_finite: Barcode
    pb1_inf: Barcode
    pb2_complete: bool = True

    def group(self, name: str) -> Barcode:
        """Barcode by descriptor group name (pb0, pb1_finite, pb1_inf, pb2, pb1)."""
        return getattr(self, name)

    def to_dict(self) -> dict:
        return {
            "pb0": self.pb0.to_dict(),
            "pb1": self.pb1.to_dict(),
            "pb1_finite": self.pb1_finite.to_dict(),
            "pb1_inf": self.pb1_inf.to_dict(),
            "pb2": self.pb2.to_dict(),
            "pb2_complete": self.pb2_complete,
        }


def decompose_pb1(pb1: Barcode) -> Tuple[Barcode, Barcode]:
    """Split PB1 into its finite and infinite intervals."""
    if pb1.degree != 1:
        raise ValueError(f"expected a degree-1 barcode, got degree {pb1.degree}")
    return Barcode(1, pb1.finite), Barcode(1, pb1.essential)


def _boundary_columns(f: Filtration) -> List[Set[int]]:
    columns: List[Set[int]] = []
    for s in f.simplices:
        if s.dim == 0:
            columns.append(set())
            continue
        vertices = s.vertices
        columns.append({f.index_of(vertices[:i] + vertices[i + 1:]) for i in range(len(vertices))})
    return columns


def persistence_pairs(f: Filtration) -> Tuple[List[Tuple[int, int]], List[int]]:
    """
    Reduce the boundary matrix; return (birth, death) index pairs and the
    indices of essential simplices.

    Columns are reduced from the top dimension down so that every column
    whose index already appeared as a pivot row can be cleared unreduced.
    """
    columns = _boundary_columns(f)
    dims = [s.dim for s in f.simplices]
    pivot_col: Dict[int, int] = {}
    cleared: Set[int] = set()
    negative: Set[int] = set()

    for dim in range(f.dimension, 0, -1):
        for j, column in enumerate(columns):
            if dims[j] != dim:
                continue
            if j in cleared:
                columns[j] = set()
                continue
            while column:
                low = max(column)
                k = pivot_col.get(low)
                if k is None:
                    pivot_col[low] = j
                    negative.add(j)
                    cleared.add(low)
                    break
                column ^= columns[k]

    pairs = sorted((i, j) for i, j in pivot_col.items())
    paired_births = set(pivot_col)
    essential = [i for i in range(len(columns)) if i not in negative and i not in paired_births]
    return pairs, essential


def reduce(f: Filtration, require_pb2: bool = False) -> BarcodeSet:
    """Barcodes of degrees 0-2, zero-length intervals dropped."""
    pb2_complete = f.max_dim is None or f.max_dim >= 3
    if not pb2_complete:
        if require_pb2:
            raise DimensionUnavailable(
                f"PB2 needs 3-simplices; filtration was expanded to dimension {f.max_dim}"
            )
        logger.warning(f"filtration expanded only to dimension {f.max_dim}; PB2 may be incomplete")

    pairs, essential = persistence_pairs(f)
    by_degree: Dict[int, List[Interval]] = {0: [], 1: [], 2: []}
    simplices = f.simplices
    for i, j in pairs:
        q = simplices[i].dim
        if q in by_degree:
            by_degree[q].append((simplices[i].value, simplices[j].value))
    for i in essential:
        q = simplices[i].dim
        if q in by_degree:
            by_degree[q].append((simplices[i].value, INF))

    pb1 = Barcode.of(1, by_degree[1])
    pb1_finite, pb1_inf = decompose_pb1(pb1)
    pb2 = Barcode.of(2, by_degree[2])
    if f.max_dim is not None and pb2.essential:
        logger.warning(
            f"{len(pb2.essential)} PB2 class(es) still alive at the largest radius, "
            f"reported with infinite death"
        )
    return BarcodeSet(
        pb0=Barcode.of(0, by_degree[0]),
        pb1=pb1,
        pb2=pb2,
        pb1_finite=pb1_finite,
        pb1_inf=pb1_inf,
        pb2_complete=pb2_complete,
    )


def barcode_betti(bs: BarcodeSet, eps: float) -> Tuple[int, int, int]:
    """Betti numbers at eps read off the barcodes."""
    return (bs.pb0.betti(eps), bs.pb1.betti(eps), bs.pb2.betti(eps))


def is_submultiset(small: Barcode, large: Barcode) -> bool:
    big = large.counter()
    return all(big[iv] >= count for iv, count in small.counter().items())
