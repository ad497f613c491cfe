"""
Randomized check of the quotient-complex barcode theorems.

Each trial draws a small point cloud, a random partition of its points and
compares the Rips filtration K with its gluing-star augmentation K̃:
PB0(K̃) ⊆ PB0(K), PB1(K) ⊆ PB1(K̃), PB2(K) = PB2(K̃), the matching Betti
inequalities on a grid of radii, and agreement of both barcodes with the
brute-force oracle.
"""

import json
import logging
import time
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from ..config.settings import Config
from ..utils.helpers import format_duration
from .filtration import DistanceMatrix, Filtration, augment_gluing_stars, build_rips
from .oracle import betti_at, betti_numbers
from .persistence import BarcodeSet, barcode_betti, is_submultiset, reduce

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialFailure:
    trial: int
    check: str
    detail: str
    instance: str  # explicit-filtration JSON for replay

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "check": self.check,
            "detail": self.detail,
            "instance": json.loads(self.instance),
        }


@dataclass
class VerificationReport:
    seed: int
    trials: int
    failures: List[TrialFailure] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def failed_checks(self) -> List[str]:
        return sorted({failure.check for failure in self.failures})

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed,
            "failures": [failure.to_dict() for failure in self.failures],
            "elapsed_seconds": round(self.elapsed, 3),
        }


def random_instance(rng: np.random.Generator,
                    max_points: int = Config.VERIFY_MAX_POINTS,
                    box: float = Config.VERIFY_BOX) -> Tuple[Filtration, List[List[int]]]:
    """A complete Rips filtration on random points plus a random partition."""
    n = int(rng.integers(1, max_points + 1))
    points = rng.uniform(0.0, box, size=(n, 3))
    n_classes = int(rng.integers(1, n + 1))
    labels = rng.integers(0, n_classes, size=n)

    groups = {}
    for v, label in enumerate(labels.tolist()):
        groups.setdefault(label, []).append(v)
    classes = sorted(groups.values(), key=lambda members: members[0])

    entries = cdist(points, points)
    max_value = max(float(entries.max()), 1.0)
    rips = build_rips(DistanceMatrix(entries), max_value=max_value, max_dim=3)
    rips = Filtration(rips.simplices, n, tuple(tuple(c) for c in classes), 3)
    return rips, classes


def _check_pair(k: Filtration, k_tilde: Filtration, grid: Sequence[float]) -> List[Tuple[str, str]]:
    bars_k: BarcodeSet = reduce(k)
    bars_kt: BarcodeSet = reduce(k_tilde)
    problems: List[Tuple[str, str]] = []

    if not is_submultiset(bars_kt.pb0, bars_k.pb0):
        problems.append(("pb0_inclusion", f"PB0(K̃)={list(bars_kt.pb0)} PB0(K)={list(bars_k.pb0)}"))
    if not is_submultiset(bars_k.pb1, bars_kt.pb1):
        problems.append(("pb1_inclusion", f"PB1(K)={list(bars_k.pb1)} PB1(K̃)={list(bars_kt.pb1)}"))
    if bars_k.pb2.counter() != bars_kt.pb2.counter():
        problems.append(("pb2_equality", f"PB2(K)={list(bars_k.pb2)} PB2(K̃)={list(bars_kt.pb2)}"))

    for eps in grid:
        b_k = barcode_betti(bars_k, eps)
        b_kt = barcode_betti(bars_kt, eps)
        if not (b_kt[0] <= b_k[0] and b_k[1] <= b_kt[1] and b_k[2] == b_kt[2]):
            problems.append(("betti_inequalities", f"eps={eps:.4g}: K {b_k}, K̃ {b_kt}"))
        for label, f, bars in (("K", k, bars_k), ("K̃", k_tilde, bars_kt)):
            expected = betti_at(f, eps).as_tuple()
            got = barcode_betti(bars, eps)
            if expected != got:
                problems.append(("oracle_agreement",
                                 f"{label} eps={eps:.4g}: barcodes {got}, oracle {expected}"))

    # β alternating sum must match the simplex alternating sum at the top level
    for label, f in (("K", k), ("K̃", k_tilde)):
        top = grid[-1]
        simplex_sum = sum((-1) ** q * c for q, c in enumerate(f.count_by_dim(top)))
        betti_sum = sum((-1) ** q * b for q, b in enumerate(betti_numbers(f, top)))
        if simplex_sum != betti_sum:
            problems.append(("euler_characteristic", f"{label}: {simplex_sum} != {betti_sum}"))
    return problems


def run_theorem_suite(seed: int = 0, trials: int = Config.VERIFY_TRIALS,
                      star_value: float = Config.STAR_VALUE,
                      max_points: int = Config.VERIFY_MAX_POINTS,
                      grid_size: int = Config.VERIFY_GRID) -> VerificationReport:
    """
    Run `trials` random instances and collect every failed check.

    `star_value` is the filtration value given to the apex-to-member edges;
    anything other than the default breaks the theorems and is only useful to
    confirm the suite can fail.
    """
    rng = np.random.default_rng(seed)
    report = VerificationReport(seed=seed, trials=trials)
    started = time.perf_counter()

    for trial in range(trials):
        k, classes = random_instance(rng, max_points=max_points)
        k_tilde = augment_gluing_stars(k, classes, star_edge_value=star_value)
        grid = np.linspace(0.0, k.values[-1], grid_size).tolist()
        for check, detail in _check_pair(k, k_tilde, grid):
            report.failures.append(TrialFailure(trial, check, detail, k.to_explicit_json()))
        logger.debug(f"trial {trial}: {k.n_vertices} points, {len(classes)} classes")

    report.elapsed = time.perf_counter() - started
    if report.passed:
        logger.info(f"{trials} trial(s) passed in {format_duration(report.elapsed)}")
    else:
        logger.warning(
            f"{len(report.failures)} failed check(s) over {trials} trial(s): "
            f"{', '.join(report.failed_checks)}"
        )
    return report
