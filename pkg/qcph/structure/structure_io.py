"""
Readers and writer for crystal structures: a minimal P1 CIF subset and the
native JSON format.
"""

import json
import logging
import re
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..config.settings import Config
from ..exceptions import (
    DegenerateCell,
    MalformedLoop,
    MissingCellParameter,
    NonNumericCoordinate,
    SchemaViolation,
    StructureError,
)
from ..utils.helpers import json_pointer, round_significant, wrap_unit
from .models import Atom, CellParams, CrystalStructure
from .periodic_model import cell_basis

logger = logging.getLogger(__name__)

ELEMENT_SYMBOLS = frozenset("""
H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni Cu
Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I Xe Cs Ba
La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt Au Hg Tl Pb
Bi Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr Rf Db Sg Bh Hs
Mt Ds Rg Cn Nh Fl Mc Lv Ts Og
""".split())

CELL_TAGS = (
    "_cell_length_a", "_cell_length_b", "_cell_length_c",
    "_cell_angle_alpha", "_cell_angle_beta", "_cell_angle_gamma",
)
FRACT_TAGS = ("_atom_site_fract_x", "_atom_site_fract_y", "_atom_site_fract_z")

# hydrogen isotopes are hydrogen for every atom set
HYDROGEN_ISOTOPES = {"D": "H", "T": "H"}

# bare token, or a quoted string whose closing quote is followed by whitespace
_CIF_TOKEN = re.compile(r"""([^'"\s]\S*)|'(.*?)'(?!\S)|"(.*?)"(?!\S)""")
_UNCERTAINTY = re.compile(r"\(\d*\)$")
_LEADING_ALPHA = re.compile(r"[A-Za-z]+")
_COMMENT = re.compile(r"(^|\s)#.*$")


def canonical_element(token: str, from_label: bool = False) -> Tuple[str, bool]:
    """
    Leading alphabetic part of a CIF symbol, canonicalized when recognised.

    Site labels are free text, so with `from_label` an upper-case second
    letter starts a suffix ("CA1" is a carbon, not calcium).
    """
    match = _LEADING_ALPHA.match(token.strip())
    if not match:
        return token.strip(), False
    raw = match.group(0)
    if from_label and len(raw) > 1 and raw[1].isupper():
        raw = raw[:1]
    # "Pb1" labels and "Pb2+" type symbols both reduce to the leading letters
    for candidate in (raw, raw[:2], raw[:1]):
        canonical = candidate[0].upper() + candidate[1:].lower()
        canonical = HYDROGEN_ISOTOPES.get(canonical, canonical)
        if canonical in ELEMENT_SYMBOLS:
            return canonical, True
    return raw, False


def _cif_number(token: str, line: Optional[int] = None) -> float:
    cleaned = _UNCERTAINTY.sub("", token.strip())
    try:
        value = float(cleaned)
    except ValueError:
        raise NonNumericCoordinate(token, line) from None
    if not np.isfinite(value):
        raise NonNumericCoordinate(token, line)
    return value


def _tokenize(line: str, line_no: int) -> List[str]:
    """CIF tokens of one line; quotes only delimit when they open a token."""
    tokens: List[str] = []
    position = 0
    for match in _CIF_TOKEN.finditer(line):
        if line[position:match.start()].strip():
            break
        tokens.append(next(group for group in match.groups() if group is not None))
        position = match.end()
    if line[position:].strip():
        raise MalformedLoop(line_no, f"unterminated quoted value in {line.strip()!r}")
    return tokens


def _first_block(lines: Sequence[str]) -> Tuple[Optional[str], List[Tuple[int, str]]]:
    """Lines of the first data block, numbered from 1, text fields skipped."""
    name = None
    body: List[Tuple[int, str]] = []
    in_text_field = False
    for line_no, raw in enumerate(lines, start=1):
        if raw.startswith(";"):
            in_text_field = not in_text_field
            continue
        if in_text_field:
            continue
        stripped = _COMMENT.sub("", raw).strip()
        if not stripped:
            body.append((line_no, ""))
            continue
        if stripped.lower().startswith("data_"):
            if name is not None:
                break
            name = stripped[5:].strip() or None
            continue
        body.append((line_no, stripped))
    return name, body


def _read_items_and_loops(body: List[Tuple[int, str]]):
    items: Dict[str, Tuple[str, int]] = {}
    loops: List[Tuple[int, List[str], List[Tuple[List[str], int]]]] = []
    i = 0
    while i < len(body):
        line_no, text = body[i]
        if not text:
            i += 1
            continue
        if text.lower() == "loop_":
            start = line_no
            tags: List[str] = []
            i += 1
            while i < len(body) and body[i][1].startswith("_"):
                tags.append(body[i][1].split()[0].lower())
                i += 1
            rows: List[Tuple[List[str], int]] = []
            pending: List[str] = []
            pending_line = start
            while i < len(body):
                row_line, row_text = body[i]
                if not row_text:
                    i += 1
                    continue
                lowered = row_text.lower()
                if lowered.startswith(("_", "loop_", "data_")):
                    break
                if not pending:
                    pending_line = row_line
                pending.extend(_tokenize(row_text, row_line))
                while tags and len(pending) >= len(tags):
                    rows.append((pending[:len(tags)], pending_line))
                    pending = pending[len(tags):]
                    pending_line = row_line
                i += 1
            if not tags:
                raise MalformedLoop(start, "loop_ without tags")
            if pending:
                raise MalformedLoop(pending_line, f"expected {len(tags)} values per row")
            loops.append((start, tags, rows))
            continue
        if text.startswith("_"):
            parts = text.split(None, 1)
            tag = parts[0].lower()
            if len(parts) == 2:
                tokens = _tokenize(parts[1], line_no)
                value = tokens[0] if tokens else ""
            else:
                # value on the following line
                i += 1
                value = body[i][1] if i < len(body) else ""
            items[tag] = (value, line_no)
        i += 1
    return items, loops


def parse_cif(text: str) -> CrystalStructure:
    """Parse the first data block of a P1-style CIF."""
    block_name, body = _first_block(text.splitlines())
    items, loops = _read_items_and_loops(body)

    cell_values = []
    for tag in CELL_TAGS:
        if tag not in items:
            raise MissingCellParameter(tag)
        value, line_no = items[tag]
        try:
            cell_values.append(float(_UNCERTAINTY.sub("", value)))
        except ValueError:
            raise StructureError(f"{tag} at line {line_no} is not a number: {value!r}") from None
    cell = CellParams(*cell_values)
    _check_cell(cell)

    site_loop = next((loop for loop in loops if FRACT_TAGS[0] in loop[1]), None)
    if site_loop is None:
        raise MalformedLoop(body[-1][0] if body else 0, "no atom_site loop with fractional coordinates")
    start, tags, rows = site_loop
    missing = [tag for tag in FRACT_TAGS if tag not in tags]
    if missing:
        raise MalformedLoop(start, f"atom_site loop lacks {', '.join(missing)}")
    from_label = "_atom_site_type_symbol" not in tags
    if not from_label:
        symbol_col = tags.index("_atom_site_type_symbol")
    elif "_atom_site_label" in tags:
        symbol_col = tags.index("_atom_site_label")
    else:
        raise MalformedLoop(start, "atom_site loop has no type symbol or label column")
    coord_cols = [tags.index(tag) for tag in FRACT_TAGS]

    atoms = []
    for values, row_line in rows:
        element, recognized = canonical_element(values[symbol_col], from_label)
        frac = tuple(_cif_number(values[col], row_line) for col in coord_cols)
        atoms.append(_make_atom(element, frac, recognized))

    return _finalize(block_name or "structure", cell, atoms)


class _NativeCell(BaseModel):
    model_config = ConfigDict(strict=True, extra="forbid", allow_inf_nan=False)

    a: float = Field(gt=0)
    b: float = Field(gt=0)
    c: float = Field(gt=0)
    alpha: float = Field(gt=0, lt=180)
    beta: float = Field(gt=0, lt=180)
    gamma: float = Field(gt=0, lt=180)


class _NativeAtom(BaseModel):
    model_config = ConfigDict(strict=True, extra="forbid", allow_inf_nan=False)

    element: str
    frac: List[float] = Field(min_length=3, max_length=3)


class _NativeStructure(BaseModel):
    model_config = ConfigDict(strict=True, extra="forbid", allow_inf_nan=False)

    name: str
    cell: _NativeCell
    atoms: List[_NativeAtom]


def parse_native(text: str) -> CrystalStructure:
    """Parse the native JSON structure format."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaViolation("", f"not valid JSON: {e}") from None
    try:
        native = _NativeStructure.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        raise SchemaViolation(json_pointer(first["loc"]), first["msg"]) from None

    cell = CellParams(**native.cell.model_dump())
    atoms = []
    for atom in native.atoms:
        element, recognized = canonical_element(atom.element)
        atoms.append(_make_atom(element, tuple(atom.frac), recognized))
    return _finalize(native.name, cell, atoms)


def serialize_native(structure: CrystalStructure) -> str:
    """
    Native JSON with keys in schema order and 12 significant digits.

    Values with more digits than that do not survive a round trip exactly.
    """
    digits = Config.JSON_SIGNIFICANT_DIGITS

    def number(x: float):
        value = round_significant(float(x), digits)
        return int(value) if value.is_integer() else value

    document = {
        "name": structure.name,
        "cell": {key: number(getattr(structure.cell, key))
                 for key in ("a", "b", "c", "alpha", "beta", "gamma")},
        "atoms": [{"element": atom.element, "frac": [number(x) for x in atom.frac]}
                  for atom in structure.atoms],
    }
    return json.dumps(document)


def load_structure(path, fmt: Optional[str] = None) -> CrystalStructure:
    """Read a structure file, choosing the reader by extension unless `fmt` is given."""
    path = Path(path)
    fmt = fmt or Config.STRUCTURE_EXTENSIONS.get(path.suffix.lower())
    if fmt not in ("cif", "json"):
        raise StructureError(f"{path.name}: cannot tell the structure format from the extension")
    text = path.read_text(encoding="utf-8")
    structure = parse_cif(text) if fmt == "cif" else parse_native(text)
    if fmt == "cif" and structure.name == "structure":
        structure = CrystalStructure(path.stem, structure.cell, structure.atoms)
    logger.info(f"Loaded structure from {fmt.upper()}: {path.name} ({len(structure.atoms)} atoms)")
    return structure


def _make_atom(element: str, frac: Sequence[float], recognized: bool) -> Atom:
    if not recognized:
        logger.warning(f"unrecognised element symbol {element!r} kept verbatim")
    return Atom(element, tuple(wrap_unit(float(x)) for x in frac), recognized)


def _check_cell(cell: CellParams) -> None:
    for key in ("a", "b", "c"):
        if not getattr(cell, key) > 0:
            raise StructureError(f"cell length {key} must be positive")
    for key in ("alpha", "beta", "gamma"):
        if not 0 < getattr(cell, key) < 180:
            raise StructureError(f"cell angle {key} must lie in (0, 180)")


def _finalize(name: str, cell: CellParams, atoms: List[Atom]) -> CrystalStructure:
    return CrystalStructure(name, cell, tuple(_deduplicate(cell, atoms, name)))


def _deduplicate(cell: CellParams, atoms: List[Atom], name: str) -> List[Atom]:
    """Drop same-element sites closer than the dedup tolerance (minimum image)."""
    if len(atoms) < 2:
        return atoms
    try:
        basis = cell_basis(cell)
    except DegenerateCell:
        logger.warning(f"{name}: degenerate cell, duplicate-site check skipped")
        return atoms

    kept: List[Atom] = []
    kept_frac: List[np.ndarray] = []
    for atom in atoms:
        frac = np.asarray(atom.frac)
        duplicate = False
        for other, other_frac in zip(kept, kept_frac):
            if other.element != atom.element:
                continue
            diff = frac - other_frac
            diff -= np.round(diff)
            if np.linalg.norm(diff @ basis.vectors) < Config.DEDUP_TOLERANCE:
                duplicate = True
                break
        if duplicate:
            logger.warning(f"{name}: duplicate {atom.element} site at {atom.frac} dropped")
            continue
        kept.append(atom)
        kept_frac.append(frac)
    return kept
