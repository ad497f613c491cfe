"""
qcph - quotient-complex persistent homology descriptors for periodic crystals.

This package turns crystal structures into persistence barcodes of the
quotient complex of their extended motif, summarizes those barcodes as a
fixed-length descriptor vector and fits a gradient-boosted regressor on it.
"""

__version__ = "1.0.0"
__author__ = "QCPH Team"

from .config.settings import Config, GbtParams, RunConfig
from .core.app import QCPipeline
from .core.extraction_controller import ExtractionController
from .exceptions import QCPHError
from .features.descriptors import DescriptorConfig, FeatureVector, assemble_features
from .structure.models import Atom, CellParams, CrystalStructure
from .structure.structure_io import load_structure, parse_cif, parse_native, serialize_native
from .topology.filtration import Filtration, build_quotient_filtration
from .topology.persistence import Barcode, BarcodeSet, reduce

__all__ = [
    'QCPipeline',
    'ExtractionController',
    'Config',
    'GbtParams',
    'RunConfig',
    'QCPHError',
    'DescriptorConfig',
    'FeatureVector',
    'assemble_features',
    'Atom',
    'CellParams',
    'CrystalStructure',
    'load_structure',
    'parse_cif',
    'parse_native',
    'serialize_native',
    'Filtration',
    'build_quotient_filtration',
    'Barcode',
    'BarcodeSet',
    'reduce',
]
