"""
Brute-force Z2 homology of a filtration level, used as ground truth.

Every call rebuilds the boundary matrices of the restricted complex and ranks
them by dense Gaussian elimination; nothing is cached between levels.
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from ..config.settings import Config
from ..exceptions import ComplexTooLarge
from .filtration import Filtration


@dataclass(frozen=True)
class BettiTriple:
    b0: int
    b1: int
    b2: int

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.b0, self.b1, self.b2)


def z2_rank(matrix: np.ndarray) -> int:
    """Rank over Z2 by row reduction."""
    A = (np.asarray(matrix, dtype=np.uint8) & 1).copy()
    m, n = A.shape
    rank = 0
    for c in range(n):
        if rank == m:
            break
        rows = np.flatnonzero(A[rank:, c]) + rank
        if rows.size == 0:
            continue
        pivot = rows[0]
        if pivot != rank:
            A[[rank, pivot]] = A[[pivot, rank]]
        below = rows[1:]
        if below.size:
            A[below] ^= A[rank]
        rank += 1
    return rank


def boundary_matrix(faces: List[Tuple[int, ...]], cofaces: List[Tuple[int, ...]]) -> np.ndarray:
    """Boundary map from q-simplices (columns) to (q-1)-simplices (rows)."""
    row_of: Dict[Tuple[int, ...], int] = {s: i for i, s in enumerate(faces)}
    D = np.zeros((len(faces), len(cofaces)), dtype=np.uint8)
    for j, simplex in enumerate(cofaces):
        for i in range(len(simplex)):
            D[row_of[simplex[:i] + simplex[i + 1:]], j] = 1
    return D


def betti_numbers(f: Filtration, eps: float,
                  max_simplices: int = Config.ORACLE_MAX_SIMPLICES) -> List[int]:
    """Betti numbers of every degree of the complex at level eps."""
    complex_ = f.restrict(eps)
    if len(complex_) > max_simplices:
        raise ComplexTooLarge(len(complex_), max_simplices)
    if not complex_:
        return [0, 0, 0]

    top = max(s.dim for s in complex_)
    by_dim: List[List[Tuple[int, ...]]] = [[] for _ in range(top + 1)]
    for s in complex_:
        by_dim[s.dim].append(s.vertices)

    # ranks[q] = rank of ∂_q : C_q -> C_{q-1}; ∂_0 = 0
    ranks = [0] * (top + 2)
    for q in range(1, top + 1):
        if by_dim[q] and by_dim[q - 1]:
            ranks[q] = z2_rank(boundary_matrix(by_dim[q - 1], by_dim[q]))

    betti = [len(by_dim[q]) - ranks[q] - ranks[q + 1] for q in range(top + 1)]
    betti.extend([0] * (3 - len(betti)))
    return betti


def betti_at(f: Filtration, eps: float,
             max_simplices: int = Config.ORACLE_MAX_SIMPLICES) -> BettiTriple:
    """Exact β0, β1, β2 of the complex at level eps."""
    b = betti_numbers(f, eps, max_simplices)
    return BettiTriple(b[0], b[1], b[2])


def euler_characteristic(f: Filtration, eps: float) -> int:
    return sum((-1) ** q * count for q, count in enumerate(f.count_by_dim(eps)))
