"""
Batch feature extraction over many structure files.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from ..exceptions import QCPHError
from ..features.descriptors import DescriptorConfig, FeatureVector, assemble_features
from ..structure.structure_io import load_structure
from ..utils.helpers import format_duration, physical_core_count

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtractionResult:
    path: str
    structure_id: str
    vector: Optional[FeatureVector] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.vector is not None


def extract_one(path: str, fmt: Optional[str], config: DescriptorConfig) -> ExtractionResult:
    """Features of one file; data errors are captured, not raised."""
    structure_id = Path(path).stem
    try:
        structure = load_structure(path, fmt)
        return ExtractionResult(path, structure_id, assemble_features(structure, config))
    except (QCPHError, OSError, UnicodeDecodeError) as e:
        return ExtractionResult(path, structure_id, error=f"{type(e).__name__}: {e}")


def _extract_star(args) -> ExtractionResult:
    return extract_one(*args)


class ExtractionController:
    """Runs extraction serially or across worker processes, keeping input order."""

    def __init__(self, config: DescriptorConfig, workers: int = 1):
        self.config = config
        self.workers = physical_core_count() if workers == 0 else max(1, workers)

    def run(self, paths: Sequence[str], fmt: Optional[str] = None) -> List[ExtractionResult]:
        started = time.perf_counter()
        jobs = [(str(path), fmt, self.config) for path in paths]
        if self.workers == 1 or len(jobs) < 2:
            results = [_extract_star(job) for job in jobs]
        else:
            with ProcessPoolExecutor(max_workers=min(self.workers, len(jobs))) as pool:
                # map yields in submission order whatever the completion order
                results = list(pool.map(_extract_star, jobs))

        for result in results:
            if result.ok:
                logger.info(f"{result.structure_id}: {len(result.vector)} features")
            else:
                logger.warning(f"skipped {result.path}: {result.error}")
        failed = sum(1 for r in results if not r.ok)
        logger.info(
            f"extracted {len(results) - failed}/{len(results)} structure(s) "
            f"with {self.workers} worker(s) in {format_duration(time.perf_counter() - started)}"
        )
        return results

    def get_status(self, results: Sequence[ExtractionResult]) -> dict:
        return {
            "workers": self.workers,
            "total": len(results),
            "succeeded": sum(1 for r in results if r.ok),
            "failed": [r.path for r in results if not r.ok],
        }
