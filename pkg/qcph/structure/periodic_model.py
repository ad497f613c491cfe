"""
Lattice bases, element-specific atom sets and the extended motif with its
periodic equivalence classes.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..config.settings import Config
from ..exceptions import DegenerateCell, EmptyMotif, UnknownAtomSet
from .models import CellParams, CrystalStructure

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LatticeBasis:
    """Rows of `vectors` are v1, v2, v3 in Cartesian Å."""

    vectors: np.ndarray

    @property
    def v1(self) -> np.ndarray:
        return self.vectors[0]

    @property
    def v2(self) -> np.ndarray:
        return self.vectors[1]

    @property
    def v3(self) -> np.ndarray:
        return self.vectors[2]

    @property
    def lengths(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=1)

    def to_cartesian(self, frac: np.ndarray) -> np.ndarray:
        return np.asarray(frac, dtype=float).reshape(-1, 3) @ self.vectors

    def to_fractional(self, cart: np.ndarray) -> np.ndarray:
        return np.linalg.solve(self.vectors.T, np.asarray(cart, dtype=float).reshape(-1, 3).T).T


@dataclass(frozen=True, eq=False)
class Motif:
    points: np.ndarray
    elements: Tuple[str, ...]
    atom_set_tag: str
    frac: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))

    @property
    def is_empty(self) -> bool:
        return len(self.elements) == 0

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True, eq=False)
class ExtendedMotif:
    """V = M ∪ (M+v1) ∪ (M+v2) ∪ (M+v3) with its ∼V classes."""

    points: np.ndarray
    in_original: np.ndarray
    class_id: np.ndarray
    basis: LatticeBasis

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])

    @property
    def n_original(self) -> int:
        return int(np.count_nonzero(self.in_original))

    @property
    def classes(self) -> List[List[int]]:
        """Class partition as lists of point ids, ordered by smallest member."""
        groups: Dict[int, List[int]] = {}
        for idx, cid in enumerate(self.class_id.tolist()):
            groups.setdefault(cid, []).append(idx)
        return sorted(groups.values(), key=lambda members: members[0])


def _cos_deg(angle: float) -> float:
    # exact zero for right angles keeps orthogonal cells orthogonal
    return 0.0 if angle == 90.0 else math.cos(math.radians(angle))


def _sin_deg(angle: float) -> float:
    return 1.0 if angle == 90.0 else math.sin(math.radians(angle))


def cell_basis(cell: CellParams) -> LatticeBasis:
    """Conventional basis: v1 along x, v2 in the xy-plane, right-handed."""
    ca, cb, cg = _cos_deg(cell.alpha), _cos_deg(cell.beta), _cos_deg(cell.gamma)
    sg = _sin_deg(cell.gamma)
    discriminant = 1.0 - ca * ca - cb * cb - cg * cg + 2.0 * ca * cb * cg
    if discriminant <= 0.0 or sg <= 0.0:
        raise DegenerateCell(
            f"cell angles ({cell.alpha}, {cell.beta}, {cell.gamma}) give no real positive volume"
        )

    v1 = np.array([cell.a, 0.0, 0.0])
    v2 = np.array([cell.b * cg, cell.b * sg, 0.0])
    v3 = np.array([
        cell.c * cb,
        cell.c * (ca - cb * cg) / sg,
        cell.c * math.sqrt(discriminant) / sg,
    ])
    vectors = np.vstack([v1, v2, v3])
    if np.linalg.det(vectors) <= 0.0:
        raise DegenerateCell("cell basis is not right-handed")
    return LatticeBasis(vectors)


def _is_b_site(element: str) -> bool:
    return element not in Config.ORGANIC_ELEMENTS and element not in Config.NON_B_HALOGENS


def _is_x_site(element: str) -> bool:
    return element in Config.HALIDE_ELEMENTS


def _is_a_carbon(element: str) -> bool:
    return element == "C"


def _single(symbol: str) -> Callable[[str], bool]:
    return lambda element: element == symbol


def _any_of(*predicates: Callable[[str], bool]) -> Callable[[str], bool]:
    return lambda element: any(p(element) for p in predicates)


ATOM_SET_PREDICATES: Dict[str, Callable[[str], bool]] = {
    "A_C-B": _any_of(_is_a_carbon, _is_b_site),
    "A_C-X": _any_of(_is_a_carbon, _is_x_site),
    "B-X": _any_of(_is_b_site, _is_x_site),
    "A_C-B-X": _any_of(_is_a_carbon, _is_b_site, _is_x_site),
    "B": _is_b_site,
    "X": _is_x_site,
}
for _symbol in ("C", "O", "N", "Bi", "Cd", "Ge", "Pb", "Sn", "Cl", "Br", "I"):
    ATOM_SET_PREDICATES[_symbol] = _single(_symbol)


def select_atom_set(structure: CrystalStructure, tag: str,
                    basis: Optional[LatticeBasis] = None) -> Motif:
    """Cartesian motif of the atoms matching the atom set's element predicate."""
    predicate = ATOM_SET_PREDICATES.get(tag)
    if predicate is None:
        raise UnknownAtomSet(tag)
    if basis is None:
        basis = cell_basis(structure.cell)

    chosen = [atom for atom in structure.atoms if predicate(atom.element)]
    frac = np.array([atom.frac for atom in chosen], dtype=float).reshape(-1, 3)
    motif = Motif(
        points=basis.to_cartesian(frac),
        elements=tuple(atom.element for atom in chosen),
        atom_set_tag=tag,
        frac=frac,
    )
    if motif.is_empty:
        logger.debug(f"{structure.name}: atom set {tag} is empty")
    return motif


def _lattice_equivalent(f1: np.ndarray, f2: np.ndarray) -> bool:
    diff = f1 - f2
    return bool(np.all(np.abs(diff - np.round(diff)) < Config.LATTICE_TOLERANCE))


def extend_motif(motif: Motif, basis: LatticeBasis) -> ExtendedMotif:
    """Union of M and its three basis translates, labelled by ∼V class."""
    if motif.is_empty:
        raise EmptyMotif(f"atom set {motif.atom_set_tag} has no atoms")

    frac = basis.to_fractional(motif.points)
    kept: List[int] = []
    for idx in range(len(motif)):
        if any(_lattice_equivalent(frac[idx], frac[k]) for k in kept):
            logger.warning(
                f"atom set {motif.atom_set_tag}: site {idx} is a lattice translate "
                f"of an earlier site and was dropped"
            )
            continue
        kept.append(idx)

    base = motif.points[kept]
    n = len(kept)
    points = np.vstack([base] + [base + basis.vectors[i] for i in range(3)])
    in_original = np.zeros(4 * n, dtype=bool)
    in_original[:n] = True
    class_id = np.tile(np.arange(n), 4)
    return ExtendedMotif(points=points, in_original=in_original, class_id=class_id, basis=basis)
