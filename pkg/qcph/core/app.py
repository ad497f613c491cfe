"""
Main pipeline class tying structure input, barcodes, descriptors and the
regressor together.
"""

import csv
import io
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import Config, RunConfig
from ..exceptions import IdMismatch, QCPHError, StructureError
from ..features.descriptors import (
    DescriptorConfig,
    features_csv,
    quotient_barcodes,
    read_features_csv,
)
from ..regress.evaluation import CrossValidationResult, EvalReport, cross_validate, evaluate
from ..regress.gbt import GbtModel, fit, predict, split_counts
from ..structure.structure_io import load_structure
from ..topology.filtration import augment_gluing_stars, parse_explicit_filtration
from ..topology.persistence import reduce
from .extraction_controller import ExtractionController, ExtractionResult

logger = logging.getLogger(__name__)


def _detect_format(path: Path, fmt: Optional[str]) -> str:
    if fmt:
        return fmt
    detected = Config.STRUCTURE_EXTENSIONS.get(path.suffix.lower())
    if detected is None:
        raise StructureError(f"{path.name}: unknown extension, pass --format")
    return detected


def read_labels_csv(text: str) -> Dict[str, float]:
    """`id,<value>` rows (header required) to an id -> label map."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header or len(header) < 2 or header[0] != "id":
        raise QCPHError("label CSV must have a header starting with 'id' and a value column")
    labels: Dict[str, float] = {}
    for line_no, record in enumerate(reader, start=2):
        if not record:
            continue
        try:
            labels[record[0]] = float(record[1])
        except (IndexError, ValueError):
            raise QCPHError(f"label CSV line {line_no}: expected 'id,value', got {record}") from None
    return labels


def align_labels(ids: Sequence[str], labels: Dict[str, float],
                 require_all_labels_used: bool = True) -> np.ndarray:
    """Targets in feature-row order; raises IdMismatch listing unmatched ids."""
    missing_labels = [i for i in ids if i not in labels]
    unused = [i for i in labels if i not in set(ids)] if require_all_labels_used else []
    if missing_labels or unused:
        raise IdMismatch(missing_labels, unused)
    return np.array([labels[i] for i in ids], dtype=float)


class QCPipeline:
    """Runs every CLI command against one validated RunConfig."""

    def __init__(self, config: Optional[RunConfig] = None):
        self.config = config or RunConfig()
        self.descriptor_config = DescriptorConfig.from_run_config(self.config)
        self.controller = ExtractionController(self.descriptor_config, self.config.workers)

    # Descriptors

    def extract(self, paths: Sequence[str], fmt: Optional[str] = None) -> List[ExtractionResult]:
        return self.controller.run(paths, fmt)

    def features_csv(self, results: Sequence[ExtractionResult]) -> str:
        rows = [(r.structure_id, r.vector) for r in results if r.ok]
        return features_csv(rows, self.descriptor_config)

    # Barcodes

    def barcodes(self, path: str, fmt: Optional[str] = None) -> dict:
        """Barcode sets of K and K̃ for every configured atom set, or for an explicit filtration."""
        path_ = Path(path)
        fmt = _detect_format(path_, fmt)
        if fmt == "filtration":
            k = parse_explicit_filtration(path_.read_text(encoding="utf-8"))
            k_tilde = augment_gluing_stars(k, k.classes)
            results = [{"atom_set": None, "K": reduce(k).to_dict(), "K_quotient": reduce(k_tilde).to_dict()}]
            return {"input": path_.name, "results": results}

        structure = load_structure(path_, fmt)
        results = []
        for tag in self.descriptor_config.atom_sets:
            bars = quotient_barcodes(structure, tag, self.descriptor_config)
            if bars is None:
                logger.info(f"{structure.name}: atom set {tag} is empty, no barcodes")
                continue
            results.append({"atom_set": tag, "K": bars[0].to_dict(), "K_quotient": bars[1].to_dict()})
        return {"input": path_.name, "results": results}

    # Regression

    def load_training_data(self, features_path: str, labels_path: str,
                           require_all_labels_used: bool = True) -> Tuple[List[str], List[str], np.ndarray, np.ndarray]:
        ids, names, X = read_features_csv(Path(features_path).read_text(encoding="utf-8"))
        labels = read_labels_csv(Path(labels_path).read_text(encoding="utf-8"))
        y = align_labels(ids, labels, require_all_labels_used)
        return ids, names, X, y

    def train(self, X: np.ndarray, y: np.ndarray, names: Optional[Sequence[str]] = None) -> GbtModel:
        model = fit(X, y, self.config.gbt)
        if names is not None and model.trees:
            counts = split_counts(model)
            top = np.argsort(-counts, kind="stable")[:10]
            summary = ", ".join(f"{names[i]}={counts[i]}" for i in top if counts[i] > 0)
            logger.info(f"most used features: {summary or 'none'}")
        return model

    def predict(self, model: GbtModel, X: np.ndarray) -> np.ndarray:
        return predict(model, X)

    def evaluate(self, y_true: np.ndarray, y_pred: np.ndarray) -> EvalReport:
        return evaluate(y_true, y_pred)

    def cross_validate(self, X: np.ndarray, y: np.ndarray) -> CrossValidationResult:
        return cross_validate(X, y, self.config.folds, self.config.repeats,
                              self.config.gbt, self.config.seed)
