"""
Configuration settings for the quotient-complex descriptor pipeline.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..exceptions import ConfigError
from ..utils.helpers import deep_update, json_pointer


class Config:
    """Application configuration constants"""

    # Filtration settings
    MAX_FILTRATION = 10.0  # Å - largest Rips radius
    MAX_DIM = 3  # 3-simplices are needed for H2 deaths
    BETTI_BINS = 100
    STAR_VALUE = 0.0  # filtration value of gluing-star simplices

    # Atom sets, in the order their slots appear in the feature vector
    ATOM_SETS = [
        "A_C-B", "A_C-X", "B-X", "A_C-B-X",
        "C", "O", "N",
        "B", "Bi", "Cd", "Ge", "Pb", "Sn",
        "X", "Cl", "Br", "I",
    ]
    ORGANIC_ELEMENTS = frozenset({"C", "H", "D", "T", "N", "O"})
    HALIDE_ELEMENTS = frozenset({"Cl", "Br", "I"})
    NON_B_HALOGENS = frozenset({"F", "Cl", "Br", "I"})

    # Geometry tolerances
    LATTICE_TOLERANCE = 1e-6  # fractional residual for v - w in Λ
    DEDUP_TOLERANCE = 1e-6  # Å - duplicate sites after wrapping
    BASIS_RELATIVE_TOLERANCE = 1e-9
    INTERVAL_TOLERANCE = 1e-9  # Å - shorter bars are float noise from broken ties

    # Descriptor layout
    BARCODES = ["pb0", "pb1_finite", "pb1_inf", "pb2"]
    STATISTICS = ["max", "min", "q25", "q50", "q75", "mean", "std"]
    CELL_SLOTS = 7

    # Oracle
    ORACLE_MAX_SIMPLICES = 20000

    # Output formatting
    CSV_SIGNIFICANT_DIGITS = 9
    JSON_SIGNIFICANT_DIGITS = 12

    # Gradient boosting presets
    DESK_GBT = {
        "n_estimators": 500,
        "max_depth": 7,
        "learning_rate": 0.05,
        "subsample": 0.7,
        "min_samples_split": 2,
        "seed": 0,
    }
    LONG_RUN_GBT = {
        "n_estimators": 10000,
        "max_depth": 7,
        "learning_rate": 0.001,
        "subsample": 0.7,
        "min_samples_split": 2,
        "seed": 0,
    }

    # Cross-validation
    CV_FOLDS = 5
    CV_REPEATS = 5

    # Theorem verification
    VERIFY_TRIALS = 100
    VERIFY_MAX_POINTS = 8
    VERIFY_BOX = 10.0  # points drawn in [0, VERIFY_BOX]^3
    VERIFY_GRID = 12

    # Input formats
    STRUCTURE_EXTENSIONS = {".cif": "cif", ".json": "json"}
    FORMATS = ["cif", "json", "filtration"]


class GbtParams(BaseModel):
    """Hyperparameters of the gradient-boosted regressor."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_estimators: int = Field(Config.DESK_GBT["n_estimators"], ge=1)
    max_depth: int = Field(Config.DESK_GBT["max_depth"], ge=1)
    learning_rate: float = Field(Config.DESK_GBT["learning_rate"], gt=0)
    subsample: float = Field(Config.DESK_GBT["subsample"], gt=0, le=1)
    min_samples_split: int = Field(Config.DESK_GBT["min_samples_split"], ge=2)
    seed: int = Config.DESK_GBT["seed"]

    @classmethod
    def desk(cls) -> "GbtParams":
        return cls(**Config.DESK_GBT)

    @classmethod
    def long_run(cls) -> "GbtParams":
        return cls(**Config.LONG_RUN_GBT)


class RunConfig(BaseModel):
    """Everything a CLI run needs, validated against downstream preconditions."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    atom_sets: List[str] = Field(default_factory=lambda: list(Config.ATOM_SETS))
    max_filtration: float = Field(Config.MAX_FILTRATION, gt=0)
    betti_bins: int = Field(Config.BETTI_BINS, ge=1)
    max_dim: int = Field(Config.MAX_DIM, ge=1, le=3)
    gbt: GbtParams = Field(default_factory=GbtParams)
    seed: int = 0
    folds: int = Field(Config.CV_FOLDS, ge=2)
    repeats: int = Field(Config.CV_REPEATS, ge=1)
    workers: int = Field(1, ge=0)
    barcodes: List[str] = Field(default_factory=lambda: list(Config.BARCODES))
    include_statistics: bool = True
    include_curves: bool = True
    include_counts: bool = False
    include_cell: bool = True

    @field_validator("atom_sets")
    @classmethod
    def _known_atom_sets(cls, value: List[str]) -> List[str]:
        unknown = [tag for tag in value if tag not in Config.ATOM_SETS]
        if unknown:
            raise ValueError(f"unknown atom set(s): {', '.join(unknown)}")
        return value

    @field_validator("barcodes")
    @classmethod
    def _known_barcodes(cls, value: List[str]) -> List[str]:
        unknown = [name for name in value if name not in Config.BARCODES]
        if unknown:
            raise ValueError(f"unknown barcode group(s): {', '.join(unknown)}")
        return value


def build_run_config(path: Optional[str] = None,
                     overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Merge a JSON config file and CLI overrides over the defaults."""
    settings: Dict[str, Any] = {}
    if path:
        try:
            settings = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError("/", f"config file is not valid JSON: {e}") from e
        if not isinstance(settings, dict):
            raise ConfigError("/", "config file must hold a JSON object")
    if overrides:
        settings = deep_update(settings, {k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**settings)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(json_pointer(first["loc"]), first["msg"]) from e
