"""
Shared fixtures for the qcph test suite.
"""

from pathlib import Path

import pytest

from qcph.structure.models import Atom, CellParams, CrystalStructure
from qcph.topology.filtration import parse_explicit_filtration

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
FIXTURES_DIR = DATA_DIR / "fixtures"
SYNTHETIC_DIR = DATA_DIR / "synthetic"


MINIMAL_CIF = """data_minimal
_cell_length_a 10
_cell_length_b 10
_cell_length_c 10
_cell_angle_alpha 90
_cell_angle_beta 90
_cell_angle_gamma 90
loop_
_atom_site_label
_atom_site_type_symbol
_atom_site_fract_x
_atom_site_fract_y
_atom_site_fract_z
Pb1 Pb 0.5 0.5 0.5
"""


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture
def synthetic_dir() -> Path:
    return SYNTHETIC_DIR


@pytest.fixture
def minimal_cif() -> str:
    return MINIMAL_CIF


@pytest.fixture
def single_atom_structure() -> CrystalStructure:
    """One Pb atom at the origin of an orthogonal 10 x 20 x 30 cell."""
    return CrystalStructure(
        name="single_atom_cell",
        cell=CellParams(10.0, 20.0, 30.0, 90.0, 90.0, 90.0),
        atoms=(Atom("Pb", (0.0, 0.0, 0.0)),),
    )


@pytest.fixture
def perovskite_structure() -> CrystalStructure:
    """Cubic MAPbI3-like cell: organic C and N, one Pb, three I."""
    return CrystalStructure(
        name="mapbi3",
        cell=CellParams(6.33, 6.33, 6.33, 90.0, 90.0, 90.0),
        atoms=(
            Atom("C", (0.0, 0.0, 0.0)),
            Atom("N", (0.18, 0.18, 0.18)),
            Atom("Pb", (0.5, 0.5, 0.5)),
            Atom("I", (0.5, 0.5, 0.0)),
            Atom("I", (0.5, 0.0, 0.5)),
            Atom("I", (0.0, 0.5, 0.5)),
        ),
    )


@pytest.fixture
def two_periodic_filtration():
    text = (FIXTURES_DIR / "two_periodic_filtration.json").read_text(encoding="utf-8")
    return parse_explicit_filtration(text)
