"""
Crystal structure records shared by the readers and the periodic model.
"""

from dataclasses import dataclass, field
from typing import Tuple

Frac = Tuple[float, float, float]


@dataclass(frozen=True)
class CellParams:
    """Unit-cell lengths in Å and angles in degrees."""

    a: float
    b: float
    c: float
    alpha: float
    beta: float
    gamma: float

    def as_tuple(self) -> Tuple[float, float, float, float, float, float]:
        return (self.a, self.b, self.c, self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class Atom:
    """A typed site; `recognized` is False for symbols outside the periodic table."""

    element: str
    frac: Frac
    recognized: bool = field(default=True, compare=False)


@dataclass(frozen=True)
class CrystalStructure:
    name: str
    cell: CellParams
    atoms: Tuple[Atom, ...] = ()

    @property
    def elements(self) -> Tuple[str, ...]:
        return tuple(atom.element for atom in self.atoms)

    @property
    def unrecognized(self) -> Tuple[str, ...]:
        return tuple(sorted({atom.element for atom in self.atoms if not atom.recognized}))
