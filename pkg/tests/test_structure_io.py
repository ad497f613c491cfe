"""
Tests for the CIF and native JSON structure readers.
"""

import json

import pytest

from qcph.exceptions import (
    MalformedLoop,
    MissingCellParameter,
    NonNumericCoordinate,
    SchemaViolation,
    StructureError,
)
from qcph.structure.models import Atom, CellParams, CrystalStructure
from qcph.structure.structure_io import (
    canonical_element,
    load_structure,
    parse_cif,
    parse_native,
    serialize_native,
)


def native_text(atoms, **cell_overrides):
    cell = {"a": 10, "b": 20, "c": 30, "alpha": 90, "beta": 90, "gamma": 90}
    cell.update(cell_overrides)
    return json.dumps({"name": "x", "cell": cell, "atoms": atoms})


class TestParseCif:
    """CIF subset: cell tags plus one atom_site loop."""

    def test_minimal_cif(self, minimal_cif):
        structure = parse_cif(minimal_cif)
        assert structure.name == "minimal"
        assert structure.cell.as_tuple() == (10, 10, 10, 90, 90, 90)
        assert structure.atoms == (Atom("Pb", (0.5, 0.5, 0.5)),)

    def test_coordinates_are_wrapped(self, minimal_cif):
        text = minimal_cif.replace("Pb1 Pb 0.5 0.5 0.5", "Pb1 Pb 1.25 -0.5 0.0")
        assert parse_cif(text).atoms[0].frac == pytest.approx((0.25, 0.5, 0.0))

    def test_missing_cell_parameter_names_the_tag(self, minimal_cif):
        text = minimal_cif.replace("_cell_length_b 10\n", "")
        with pytest.raises(MissingCellParameter) as excinfo:
            parse_cif(text)
        assert excinfo.value.tag == "_cell_length_b"
        assert str(excinfo.value) == "_cell_length_b"

    def test_uncertainties_and_charges_are_stripped(self):
        text = """data_charged
_cell_length_a 6.3(2)
_cell_length_b 6.3(2)
_cell_length_c 6.3(2)
_cell_angle_alpha 90
_cell_angle_beta 90
_cell_angle_gamma 90
loop_
_atom_site_label
_atom_site_type_symbol
_atom_site_fract_x
_atom_site_fract_y
_atom_site_fract_z
Pb1 Pb2+ 0.5000(3) 0.5 0.5
I1 I1- 0.5 0.5 0.0
"""
        structure = parse_cif(text)
        assert structure.cell.a == pytest.approx(6.3)
        assert structure.elements == ("Pb", "I")
        assert structure.atoms[0].frac == pytest.approx((0.5, 0.5, 0.5))

    def test_label_used_without_type_symbol(self):
        text = """data_labels
_cell_length_a 5
_cell_length_b 5
_cell_length_c 5
_cell_angle_alpha 90
_cell_angle_beta 90
_cell_angle_gamma 90
loop_
_atom_site_label
_atom_site_fract_x
_atom_site_fract_y
_atom_site_fract_z
Sn1 0 0 0
Br2 0.5 0.5 0
"""
        assert parse_cif(text).elements == ("Sn", "Br")

    def test_primed_label(self, minimal_cif):
        structure = parse_cif(minimal_cif + "C1' C 0.1 0.2 0.3\n")
        assert structure.elements == ("Pb", "C")
        assert structure.atoms[1].frac == pytest.approx((0.1, 0.2, 0.3))

    def test_backslash_in_label_is_kept_literally(self, minimal_cif):
        structure = parse_cif(minimal_cif + "I\\a1 I 0.7 0.7 0.7\n")
        assert structure.elements == ("Pb", "I")

    def test_quoted_value_with_space(self, minimal_cif):
        structure = parse_cif(minimal_cif + "'Sn 1' Sn 0.1 0.2 0.3\n")
        assert structure.elements == ("Pb", "Sn")

    def test_unterminated_quote_reports_line(self, minimal_cif):
        with pytest.raises(MalformedLoop) as excinfo:
            parse_cif(minimal_cif + "'Sn1 Sn 0.1 0.2 0.3\n")
        assert excinfo.value.line == 15

    def test_label_with_uppercase_suffix(self):
        text = """data_labels
_cell_length_a 5
_cell_length_b 5
_cell_length_c 5
_cell_angle_alpha 90
_cell_angle_beta 90
_cell_angle_gamma 90
loop_
_atom_site_label
_atom_site_fract_x
_atom_site_fract_y
_atom_site_fract_z
CA1 0 0 0
Ca2 0.5 0.5 0
D1 0.5 0 0
"""
        assert parse_cif(text).elements == ("C", "Ca", "H")

    def test_deuterium_is_hydrogen(self, minimal_cif):
        structure = parse_cif(minimal_cif + "D1 D 0.1 0.2 0.3\n")
        assert structure.elements == ("Pb", "H")
        assert structure.unrecognized == ()

    def test_only_first_block_is_read(self, minimal_cif):
        second = minimal_cif.replace("data_minimal", "data_second").replace("Pb1 Pb", "Sn1 Sn")
        structure = parse_cif(minimal_cif + "\n" + second)
        assert structure.elements == ("Pb",)

    def test_non_numeric_coordinate(self, minimal_cif):
        text = minimal_cif.replace("Pb1 Pb 0.5 0.5 0.5", "Pb1 Pb 0.5 abc 0.5")
        with pytest.raises(NonNumericCoordinate) as excinfo:
            parse_cif(text)
        assert excinfo.value.value == "abc"

    def test_short_loop_row_reports_line(self, minimal_cif):
        text = minimal_cif.replace("Pb1 Pb 0.5 0.5 0.5", "Pb1 Pb 0.5 0.5")
        with pytest.raises(MalformedLoop) as excinfo:
            parse_cif(text)
        assert excinfo.value.line == 14

    def test_missing_site_loop(self, minimal_cif):
        text = minimal_cif.split("loop_")[0]
        with pytest.raises(MalformedLoop):
            parse_cif(text)

    def test_duplicate_sites_are_dropped(self, minimal_cif):
        text = minimal_cif + "Pb2 Pb 1.5 0.5 -0.5\n"
        assert len(parse_cif(text).atoms) == 1

    def test_unknown_symbol_is_kept_and_flagged(self, minimal_cif):
        text = minimal_cif + "Q1 Qx 0.1 0.1 0.1\n"
        structure = parse_cif(text)
        assert structure.elements == ("Pb", "Qx")
        assert structure.unrecognized == ("Qx",)


class TestParseNative:
    """Native JSON schema."""

    def test_single_atom(self):
        structure = parse_native(native_text([{"element": "Pb", "frac": [0, 0, 0]}]))
        assert structure.cell == CellParams(10, 20, 30, 90, 90, 90)
        assert structure.atoms == (Atom("Pb", (0.0, 0.0, 0.0)),)

    def test_empty_atom_list_is_accepted(self):
        assert parse_native(native_text([])).atoms == ()

    def test_zero_angle_points_at_the_field(self):
        with pytest.raises(SchemaViolation) as excinfo:
            parse_native(native_text([], alpha=0))
        assert excinfo.value.pointer == "/cell/alpha"

    def test_missing_key(self):
        with pytest.raises(SchemaViolation) as excinfo:
            parse_native(json.dumps({"name": "x", "atoms": []}))
        assert excinfo.value.pointer == "/cell"

    def test_bad_frac_length(self):
        with pytest.raises(SchemaViolation) as excinfo:
            parse_native(native_text([{"element": "Pb", "frac": [0, 0]}]))
        assert excinfo.value.pointer.startswith("/atoms/0/frac")

    def test_invalid_json(self):
        with pytest.raises(SchemaViolation):
            parse_native("{not json")

    def test_element_symbols_are_canonicalized(self):
        structure = parse_native(native_text([{"element": "pb", "frac": [0.2, 0.2, 0.2]}]))
        assert structure.elements == ("Pb",)

    def test_matches_cif_reader(self, minimal_cif):
        text = json.dumps({
            "name": "minimal",
            "cell": {"a": 10, "b": 10, "c": 10, "alpha": 90, "beta": 90, "gamma": 90},
            "atoms": [{"element": "Pb", "frac": [0.5, 0.5, 0.5]}],
        })
        assert parse_native(text) == parse_cif(minimal_cif)


class TestSerializeNative:

    def test_round_trip(self, perovskite_structure):
        assert parse_native(serialize_native(perovskite_structure)) == perovskite_structure

    def test_key_order_and_integers(self, single_atom_structure):
        text = serialize_native(single_atom_structure)
        assert text.startswith('{"name": "single_atom_cell", "cell": {"a": 10, "b": 20, "c": 30,')
        assert list(json.loads(text)) == ["name", "cell", "atoms"]

    def test_twelve_significant_digits(self):
        structure = CrystalStructure("p", CellParams(1 / 3, 1, 1, 90, 90, 90), ())
        assert json.loads(serialize_native(structure))["cell"]["a"] == 0.333333333333

    def test_round_trip_rounds_long_values(self):
        structure = CrystalStructure("p", CellParams(1 / 3, 1, 1, 90, 90, 90),
                                     (Atom("Pb", (0.123456789012345, 0.5, 0.5)),))
        back = parse_native(serialize_native(structure))
        assert back != structure
        assert back.cell.a == pytest.approx(1 / 3, rel=1e-11)
        assert back.atoms[0].frac[0] == 0.123456789012


class TestCanonicalElement:

    @pytest.mark.parametrize("token,expected", [
        ("Pb", ("Pb", True)),
        ("PB", ("Pb", True)),
        ("Pb2+", ("Pb", True)),
        ("Cl1", ("Cl", True)),
        ("I1-", ("I", True)),
        ("D", ("H", True)),
        ("T1", ("H", True)),
        ("Xq", ("Xq", False)),
    ])
    def test_tokens(self, token, expected):
        assert canonical_element(token) == expected

    def test_label_suffix_is_not_a_second_letter(self):
        assert canonical_element("CA1", from_label=True) == ("C", True)
        assert canonical_element("CA1") == ("Ca", True)


class TestLoadStructure:

    def test_by_extension(self, tmp_path, minimal_cif):
        path = tmp_path / "cubic.cif"
        path.write_text(minimal_cif.replace("data_minimal", "data_"), encoding="utf-8")
        structure = load_structure(path)
        assert structure.name == "cubic"
        assert structure.elements == ("Pb",)

    def test_native_fixture(self, fixtures_dir):
        structure = load_structure(fixtures_dir / "single_atom_cell.json")
        assert structure.cell.as_tuple() == (10, 20, 30, 90, 90, 90)

    def test_unknown_extension(self, tmp_path):
        path = tmp_path / "cell.xyz"
        path.write_text("", encoding="utf-8")
        with pytest.raises(StructureError):
            load_structure(path)
