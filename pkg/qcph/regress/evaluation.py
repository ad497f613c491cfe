"""
Regression metrics and the repeated k-fold cross-validation harness.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.stats import pearsonr
from sklearn.metrics import mean_absolute_error, mean_squared_error, r2_score
from sklearn.model_selection import RepeatedKFold

from ..config.settings import Config, GbtParams
from ..exceptions import LengthMismatch, TooFewRows
from .gbt import fit, predict

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalReport:
    cod: float
    pcc: float
    mae: float
    rmse: float
    pcc_defined: bool = True

    def to_dict(self) -> dict:
        return {
            "cod": self.cod,
            "pcc": self.pcc,
            "pcc_defined": self.pcc_defined,
            "mae": self.mae,
            "rmse": self.rmse,
        }


@dataclass(frozen=True)
class FoldReport:
    repeat: int
    fold: int
    n_train: int
    n_test: int
    report: EvalReport


@dataclass
class CrossValidationResult:
    mean: EvalReport
    folds: List[FoldReport] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            **self.mean.to_dict(),
            "folds": [
                {"repeat": f.repeat, "fold": f.fold, "n_train": f.n_train, "n_test": f.n_test,
                 **f.report.to_dict()}
                for f in self.folds
            ],
        }


def evaluate(y_true, y_pred) -> EvalReport:
    """COD, PCC, MAE and RMSE of a prediction."""
    y_true = np.asarray(y_true, dtype=float).ravel()
    y_pred = np.asarray(y_pred, dtype=float).ravel()
    if y_true.shape != y_pred.shape:
        raise LengthMismatch(f"{y_true.size} true values but {y_pred.size} predictions")
    if y_true.size == 0:
        raise LengthMismatch("cannot evaluate an empty prediction")

    mse = float(mean_squared_error(y_true, y_pred))
    # constant truth: perfect predictions score 1, anything else 0
    if np.ptp(y_true) == 0.0:
        cod = 1.0 if mse == 0.0 else 0.0
    else:
        cod = float(r2_score(y_true, y_pred))

    if np.ptp(y_true) == 0.0 or np.ptp(y_pred) == 0.0:
        logger.warning("PCC undefined for a constant vector, reported as 0")
        pcc, pcc_defined = 0.0, False
    else:
        pcc, pcc_defined = float(pearsonr(y_true, y_pred).statistic), True

    return EvalReport(
        cod=cod,
        pcc=pcc,
        mae=float(mean_absolute_error(y_true, y_pred)),
        rmse=math.sqrt(mse),
        pcc_defined=pcc_defined,
    )


def mean_report(reports: List[EvalReport]) -> EvalReport:
    return EvalReport(
        cod=float(np.mean([r.cod for r in reports])),
        pcc=float(np.mean([r.pcc for r in reports])),
        mae=float(np.mean([r.mae for r in reports])),
        rmse=float(np.mean([r.rmse for r in reports])),
        pcc_defined=all(r.pcc_defined for r in reports),
    )


def cross_validate(X, y, folds: int = Config.CV_FOLDS, repeats: int = Config.CV_REPEATS,
                   p: Optional[GbtParams] = None, seed: int = 0) -> CrossValidationResult:
    """Repeated k-fold CV; every repeat reshuffles the rows, all driven by `seed`."""
    p = p or GbtParams()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n = y.shape[0]
    if X.ndim != 2 or X.shape[0] != n:
        raise LengthMismatch(f"{X.shape[0] if X.ndim else 0} feature rows but {n} targets")
    if folds < 2:
        raise TooFewRows("cross-validation needs at least two folds")
    if n < folds:
        raise TooFewRows(f"{n} rows cannot be split into {folds} folds")
    if n - math.ceil(n / folds) < 2:
        raise TooFewRows(f"{n} rows in {folds} folds leave fewer than two training rows")

    splitter = RepeatedKFold(n_splits=folds, n_repeats=repeats, random_state=seed)
    results: List[FoldReport] = []
    for index, (train, test) in enumerate(splitter.split(X)):
        repeat, fold = divmod(index, folds)
        model = fit(X[train], y[train], p)
        report = evaluate(y[test], predict(model, X[test]))
        results.append(FoldReport(repeat, fold, train.size, test.size, report))
        logger.info(
            f"repeat {repeat + 1}/{repeats} fold {fold + 1}/{folds}: "
            f"COD {report.cod:.4f} MAE {report.mae:.4f}"
        )
    return CrossValidationResult(mean=mean_report([f.report for f in results]), folds=results)
