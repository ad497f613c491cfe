"""
Bipartite distances, Vietoris–Rips filtrations and gluing-star augmentation.

The quotient K/∼V is never built directly: one apex vertex per equivalence
class is coned onto the class members at value 0, which gives a complex K̃
homotopy equivalent to the quotient at every level.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from ..config.settings import Config
from ..exceptions import FiltrationError, NotFaceClosed, ValueInversion
from ..structure.periodic_model import ExtendedMotif

logger = logging.getLogger(__name__)

Vertices = Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric n×n matrix, +inf between two translated (non-original) points."""

    entries: np.ndarray

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    def __getitem__(self, pair: Tuple[int, int]) -> float:
        return float(self.entries[pair])


@dataclass(frozen=True)
class Simplex:
    vertices: Vertices
    value: float
    gluing_star: bool = False

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def sort_key(self) -> Tuple[float, int, Vertices]:
        return (self.value, self.dim, self.vertices)


@dataclass(frozen=True, eq=False)
class Filtration:
    """
    Simplices in filtration order (value, dimension, vertex tuple).

    `n_vertices` counts the real vertices; apexes added by gluing stars are
    numbered from n_vertices upwards. `max_dim` is the Rips expansion
    dimension, or None for explicit filtrations.
    """

    simplices: Tuple[Simplex, ...]
    n_vertices: int
    classes: Tuple[Tuple[int, ...], ...] = ()
    max_dim: Optional[int] = None
    _index: Dict[Vertices, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index.update({s.vertices: i for i, s in enumerate(self.simplices)})

    def __len__(self) -> int:
        return len(self.simplices)

    def __iter__(self):
        return iter(self.simplices)

    def index_of(self, vertices: Vertices) -> int:
        return self._index[vertices]

    @property
    def dimension(self) -> int:
        return max((s.dim for s in self.simplices), default=-1)

    @property
    def values(self) -> List[float]:
        return sorted({s.value for s in self.simplices})

    def count_by_dim(self, eps: float = float("inf")) -> List[int]:
        counts = [0] * (self.dimension + 1)
        for s in self.simplices:
            if s.value <= eps:
                counts[s.dim] += 1
        return counts

    def restrict(self, eps: float) -> List[Simplex]:
        """Simplices of the complex at level eps, in filtration order."""
        return [s for s in self.simplices if s.value <= eps]

    def without_gluing_stars(self) -> "Filtration":
        kept = tuple(s for s in self.simplices if not s.gluing_star)
        return Filtration(kept, self.n_vertices, self.classes, self.max_dim)

    def to_explicit_json(self) -> str:
        """Explicit-filtration JSON of the non-gluing simplices and the classes."""
        document = {
            "vertices": self.n_vertices,
            "classes": [list(c) for c in self.classes],
            "simplices": [{"v": [int(v) for v in s.vertices], "t": s.value}
                          for s in self.simplices if not s.gluing_star],
        }
        return json.dumps(document)


def _sorted_filtration(simplices: Iterable[Simplex], n_vertices: int,
                       classes: Sequence[Sequence[int]], max_dim: Optional[int]) -> Filtration:
    ordered = tuple(sorted(simplices, key=Simplex.sort_key))
    return Filtration(ordered, n_vertices, tuple(tuple(c) for c in classes), max_dim)


def bipartite_distances(em: ExtendedMotif) -> DistanceMatrix:
    """Euclidean distances, except +inf when neither point lies in the motif."""
    entries = cdist(em.points, em.points)
    translated = ~em.in_original
    entries[np.ix_(translated, translated)] = np.inf
    np.fill_diagonal(entries, 0.0)
    return DistanceMatrix(entries)


def build_rips(d: DistanceMatrix, max_value: float = Config.MAX_FILTRATION,
               max_dim: int = Config.MAX_DIM) -> Filtration:
    """Vietoris–Rips filtration: every simplex of diameter ≤ max_value up to max_dim."""
    if max_value <= 0:
        raise ValueError("max_value must be positive")
    if max_dim not in (1, 2, 3):
        raise ValueError("max_dim must be 1, 2 or 3")

    n = d.n
    entries = d.entries
    simplices: List[Simplex] = [Simplex((v,), 0.0) for v in range(n)]
    # upper neighbours: j > i joined by a finite edge within range
    within = np.isfinite(entries) & (entries <= max_value)
    upper = [set(np.flatnonzero(within[i, i + 1:]) + i + 1) for i in range(n)]

    def expand(vertices: Vertices, value: float, candidates: set):
        simplices.append(Simplex(vertices, value))
        if len(vertices) > max_dim:
            return
        for w in sorted(candidates):
            diameter = max(value, max(float(entries[v, w]) for v in vertices))
            expand(vertices + (w,), diameter, candidates & upper[w])

    for i in range(n):
        for j in sorted(upper[i]):
            expand((i, j), float(entries[i, j]), upper[i] & upper[j])

    logger.debug(f"Rips filtration: {n} vertices, {len(simplices)} simplices (T={max_value})")
    return _sorted_filtration(simplices, n, [(v,) for v in range(n)], max_dim)


def augment_gluing_stars(f: Filtration, classes: Sequence[Sequence[int]],
                         star_edge_value: float = Config.STAR_VALUE) -> Filtration:
    """
    Cone each equivalence class to its own apex vertex (K̃ = K ∪ S).

    Apexes enter at the star value. Any `star_edge_value` other than the
    star value no longer glues the class; the theorem suite uses it for
    mutation runs.
    """
    if not f.simplices:
        return f
    ordered_classes = sorted((tuple(sorted(c)) for c in classes if c), key=lambda c: c[0])
    added: List[Simplex] = []
    for k, members in enumerate(ordered_classes):
        apex = f.n_vertices + k
        added.append(Simplex((apex,), Config.STAR_VALUE, True))
        added.extend(Simplex((member, apex), star_edge_value, True) for member in members)
    return _sorted_filtration(list(f.simplices) + added, f.n_vertices, ordered_classes, f.max_dim)


def build_quotient_filtration(em: ExtendedMotif, max_value: float = Config.MAX_FILTRATION,
                              max_dim: int = Config.MAX_DIM) -> Tuple[Filtration, Filtration]:
    """Plain Rips filtration K and its gluing-star augmentation K̃."""
    rips = build_rips(bipartite_distances(em), max_value, max_dim)
    rips = Filtration(rips.simplices, rips.n_vertices, tuple(tuple(c) for c in em.classes), max_dim)
    return rips, augment_gluing_stars(rips, em.classes)


def _faces(vertices: Vertices) -> List[Vertices]:
    return [vertices[:i] + vertices[i + 1:] for i in range(len(vertices))]


def validate_filtration(simplices: Sequence[Simplex]) -> None:
    """Raise unless every face is present with a value no larger than its coface."""
    values = {s.vertices: s.value for s in simplices}
    for s in simplices:
        if s.dim == 0:
            continue
        for face in _faces(s.vertices):
            if face not in values:
                raise NotFaceClosed(s.vertices, face)
            if values[face] > s.value:
                raise ValueInversion(face, s.vertices)


def parse_explicit_filtration(text: str) -> Filtration:
    """Read and validate the explicit-filtration JSON fixture format."""
    try:
        document = json.loads(text)
        n = int(document["vertices"])
        raw_simplices = document["simplices"]
        raw_classes = document.get("classes", [])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise FiltrationError(f"not an explicit filtration: {e}") from None

    simplices: List[Simplex] = []
    seen = set()
    for entry in raw_simplices:
        vertices = tuple(sorted(int(v) for v in entry["v"]))
        value = float(entry["t"])
        if not vertices or len(set(vertices)) != len(vertices):
            raise FiltrationError(f"simplex {list(entry['v'])} has repeated or no vertices")
        if any(v < 0 or v >= n for v in vertices):
            raise FiltrationError(f"simplex {vertices} uses a vertex outside 0..{n - 1}")
        if value < 0 or not np.isfinite(value):
            raise FiltrationError(f"simplex {vertices} has invalid value {value}")
        if vertices in seen:
            raise FiltrationError(f"simplex {vertices} listed twice")
        seen.add(vertices)
        simplices.append(Simplex(vertices, value))
    validate_filtration(simplices)

    classes: List[Tuple[int, ...]] = []
    covered = set()
    for raw in raw_classes:
        members = tuple(sorted(int(v) for v in raw))
        if covered.intersection(members) or any(v < 0 or v >= n for v in members):
            raise FiltrationError(f"class {list(raw)} overlaps another class or leaves 0..{n - 1}")
        covered.update(members)
        if members:
            classes.append(members)
    classes.extend((v,) for v in range(n) if v not in covered)
    classes.sort(key=lambda c: c[0])
    return _sorted_filtration(simplices, n, classes, None)
