"""
Quotient-complex descriptors: statistics of barcode collections, Betti
curves and unit-cell lengths, assembled into one flat feature vector.

The layout of the vector depends only on the DescriptorConfig, never on the
structure, so rows of different structures always line up.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import Config, RunConfig
from ..exceptions import EmptyMotif, QCPHError
from ..structure.models import CrystalStructure
from ..structure.periodic_model import LatticeBasis, cell_basis, extend_motif, select_atom_set
from ..topology.filtration import build_quotient_filtration
from ..topology.persistence import Barcode, BarcodeSet, reduce
from ..utils.helpers import format_significant, safe_divide

logger = logging.getLogger(__name__)

# collections per barcode group, in slot order
COLLECTIONS: Dict[str, Tuple[str, ...]] = {
    "pb0": ("death", "death_norm"),
    "pb1_finite": ("birth", "birth_norm", "death", "death_norm",
                   "midpoint", "midpoint_norm", "lifespan", "lifespan_norm"),
    "pb1_inf": ("birth", "birth_norm"),
    "pb2": ("birth", "birth_norm", "death", "death_norm",
            "midpoint", "midpoint_norm", "lifespan", "lifespan_norm"),
}
CURVES = ("bc", "nbc")


@dataclass(frozen=True)
class StatDescriptor:
    max: float = 0.0
    min: float = 0.0
    q25: float = 0.0
    q50: float = 0.0
    q75: float = 0.0
    mean: float = 0.0
    std: float = 0.0

    def as_list(self) -> List[float]:
        return [getattr(self, name) for name in Config.STATISTICS]


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    names: Tuple[str, ...]

    def __len__(self) -> int:
        return len(self.names)

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(self.names, self.values.tolist()))


@dataclass(frozen=True)
class DescriptorConfig:
    atom_sets: Tuple[str, ...] = tuple(Config.ATOM_SETS)
    max_filtration: float = Config.MAX_FILTRATION
    betti_bins: int = Config.BETTI_BINS
    max_dim: int = Config.MAX_DIM
    barcodes: Tuple[str, ...] = tuple(Config.BARCODES)
    include_statistics: bool = True
    include_curves: bool = True
    include_counts: bool = False
    include_cell: bool = True

    def __post_init__(self):
        # slot order is canonical whatever order the caller listed things in
        object.__setattr__(self, "atom_sets",
                           tuple(t for t in Config.ATOM_SETS if t in self.atom_sets))
        object.__setattr__(self, "barcodes",
                           tuple(b for b in Config.BARCODES if b in self.barcodes))

    @classmethod
    def from_run_config(cls, run: RunConfig) -> "DescriptorConfig":
        return cls(
            atom_sets=tuple(run.atom_sets),
            max_filtration=run.max_filtration,
            betti_bins=run.betti_bins,
            max_dim=run.max_dim,
            barcodes=tuple(run.barcodes),
            include_statistics=run.include_statistics,
            include_curves=run.include_curves,
            include_counts=run.include_counts,
            include_cell=run.include_cell,
        )


def stat_descriptor(collection: Iterable[float]) -> StatDescriptor:
    """Max, min, quartiles (inclusive linear interpolation), mean, population std."""
    values = np.sort(np.asarray(list(collection), dtype=float))
    if values.size == 0:
        return StatDescriptor()
    q25, q50, q75 = np.percentile(values, [25, 50, 75], method="linear")
    # sorted input and fsum make the result independent of input order
    mean = math.fsum(values) / values.size
    variance = math.fsum((values - mean) ** 2) / values.size
    return StatDescriptor(
        max=float(values[-1]),
        min=float(values[0]),
        q25=float(q25),
        q50=float(q50),
        q75=float(q75),
        mean=mean,
        std=math.sqrt(variance),
    )


def _normalized(values: List[float]) -> List[float]:
    total = math.fsum(values)
    return [safe_divide(v, total) for v in values]


def _with_norm(name: str, values: List[float]) -> Dict[str, List[float]]:
    return {name: values, f"{name}_norm": _normalized(values)}


def _finite_collections(intervals: Sequence[Tuple[float, float]]) -> Dict[str, List[float]]:
    births = [b for b, _ in intervals]
    deaths = [d for _, d in intervals]
    collections: Dict[str, List[float]] = {}
    collections.update(_with_norm("birth", births))
    collections.update(_with_norm("death", deaths))
    collections.update(_with_norm("midpoint", [(b + d) / 2.0 for b, d in intervals]))
    collections.update(_with_norm("lifespan", [d - b for b, d in intervals]))
    return collections


def barcode_collections(bs: BarcodeSet) -> Dict[str, Dict[str, List[float]]]:
    """The twenty collections of the statistical descriptors, keyed by group then name."""
    pb0_deaths = [d for _, d in bs.pb0.finite]
    pb1_inf_births = [b for b, _ in bs.pb1_inf.intervals]
    if bs.pb2.essential:
        logger.warning(f"{len(bs.pb2.essential)} essential PB2 interval(s) left out of the statistics")

    grouped = {
        "pb0": _with_norm("death", pb0_deaths),
        "pb1_finite": _finite_collections(bs.pb1_finite.intervals),
        "pb1_inf": _with_norm("birth", pb1_inf_births),
        "pb2": _finite_collections(bs.pb2.finite),
    }
    return {group: {name: grouped[group][name] for name in names}
            for group, names in COLLECTIONS.items()}


def betti_curve(pb: Barcode, T: float, bins: int, normalized: bool = False) -> np.ndarray:
    """Intervals alive at t_i = i·T/bins, optionally divided by the interval count."""
    if T <= 0 or bins < 1:
        raise ValueError("betti_curve needs T > 0 and bins >= 1")
    t = np.arange(bins) * (T / bins)
    curve = np.zeros(bins)
    for b, d in pb.intervals:
        curve += (t >= b) & (t < d)
    if normalized:
        return curve / len(pb) if len(pb) else curve
    return curve


def unit_cell_features(basis: LatticeBasis) -> np.ndarray:
    """|v1|, |v2|, |v3|, |v1+v2|, |v1+v3|, |v2+v3|, |v1+v2+v3| with |v1| ≤ |v2| ≤ |v3|."""
    order = np.argsort(basis.lengths, kind="stable")
    v1, v2, v3 = basis.vectors[order]
    combos = (v1, v2, v3, v1 + v2, v1 + v3, v2 + v3, v1 + v2 + v3)
    return np.array([np.linalg.norm(v) for v in combos])


def _atom_set_names(tag: str, config: DescriptorConfig) -> List[str]:
    names: List[str] = []
    for group in config.barcodes:
        if config.include_statistics:
            names.extend(f"{tag}.{group}.{collection}.{stat}"
                         for collection in COLLECTIONS[group] for stat in Config.STATISTICS)
    for group in config.barcodes:
        if config.include_curves:
            names.extend(f"{tag}.{group}.{curve}.{i}"
                         for curve in CURVES for i in range(config.betti_bins))
    if config.include_counts:
        names.extend(f"{tag}.{group}.count" for group in config.barcodes)
    return names


def feature_names(config: Optional[DescriptorConfig] = None) -> List[str]:
    config = config or DescriptorConfig()
    names: List[str] = []
    for tag in config.atom_sets:
        names.extend(_atom_set_names(tag, config))
    if config.include_cell:
        names.extend(f"cell.{k}" for k in range(Config.CELL_SLOTS))
    return names


def feature_length(config: Optional[DescriptorConfig] = None) -> int:
    return len(feature_names(config))


def atom_set_values(bs: Optional[BarcodeSet], config: DescriptorConfig) -> List[float]:
    """Slots of one atom set; an empty motif (bs None) gives all zeros."""
    values: List[float] = []
    if config.include_statistics:
        collections = barcode_collections(bs) if bs is not None else None
        for group in config.barcodes:
            for name in COLLECTIONS[group]:
                stats = stat_descriptor(collections[group][name]) if collections else StatDescriptor()
                values.extend(stats.as_list())
    if config.include_curves:
        for group in config.barcodes:
            for normalized in (False, True):
                if bs is None:
                    values.extend([0.0] * config.betti_bins)
                    continue
                values.extend(betti_curve(bs.group(group), config.max_filtration,
                                          config.betti_bins, normalized).tolist())
    if config.include_counts:
        values.extend(float(len(bs.group(g))) if bs is not None else 0.0 for g in config.barcodes)
    return values


def quotient_barcodes(structure: CrystalStructure, tag: str, config: DescriptorConfig,
                      basis: Optional[LatticeBasis] = None) -> Optional[Tuple[BarcodeSet, BarcodeSet]]:
    """Barcodes of K and K̃ for one atom set, or None when the atom set is empty."""
    basis = basis if basis is not None else cell_basis(structure.cell)
    motif = select_atom_set(structure, tag, basis)
    try:
        em = extend_motif(motif, basis)
    except EmptyMotif:
        return None
    k, k_tilde = build_quotient_filtration(em, config.max_filtration, config.max_dim)
    return reduce(k), reduce(k_tilde)


def assemble_features(structure: CrystalStructure,
                      config: Optional[DescriptorConfig] = None) -> FeatureVector:
    """Full descriptor vector of a structure: atom sets in canonical order, then the cell."""
    config = config or DescriptorConfig()
    basis = cell_basis(structure.cell)
    values: List[float] = []
    for tag in config.atom_sets:
        bars = quotient_barcodes(structure, tag, config, basis)
        values.extend(atom_set_values(bars[1] if bars else None, config))
        logger.debug(f"{structure.name}: atom set {tag} {'empty' if bars is None else 'done'}")
    if config.include_cell:
        values.extend(unit_cell_features(basis).tolist())
    return FeatureVector(np.asarray(values, dtype=float), tuple(feature_names(config)))


def features_csv(rows: Sequence[Tuple[str, FeatureVector]],
                 config: Optional[DescriptorConfig] = None) -> str:
    """Feature CSV text: `id` then slot names, 9 significant digits, LF endings."""
    names = feature_names(config)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["id"] + names)
    digits = Config.CSV_SIGNIFICANT_DIGITS
    for structure_id, vector in rows:
        writer.writerow([structure_id] + [format_significant(v, digits) for v in vector.values])
    return buffer.getvalue()


def read_features_csv(text: str) -> Tuple[List[str], List[str], np.ndarray]:
    """(ids, slot names, matrix) from a feature CSV."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header or header[0] != "id":
        raise QCPHError("feature CSV must start with an 'id' column")
    ids: List[str] = []
    rows: List[List[float]] = []
    for line_no, record in enumerate(reader, start=2):
        if not record:
            continue
        if len(record) != len(header):
            raise QCPHError(f"feature CSV line {line_no}: {len(record)} fields, header has {len(header)}")
        try:
            rows.append([float(cell) for cell in record[1:]])
        except ValueError as e:
            raise QCPHError(f"feature CSV line {line_no}: {e}") from None
        ids.append(record[0])
    matrix = np.asarray(rows, dtype=float).reshape(len(rows), len(header) - 1)
    return ids, header[1:], matrix
