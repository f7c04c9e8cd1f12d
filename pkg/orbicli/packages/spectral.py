"""Per-sector generalized eigendecomposition, degeneracy clusters and the
UV/IR split at a cutoff Λ."""

import hashlib
import logging
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy.linalg

from ..errors import ChartMismatchError, DomainError, GuardExceededError
from ..errors import UnknownSectorError
from .algebra import AlgebraElement
from .space import centralizer_projector, closed_form_spectrum, generalized_laplacian

_logger = logging.getLogger(__name__)

DEFAULT_CLUSTER_TOLERANCE = 1e-9
DEFAULT_SYMMETRY_TOLERANCE = 1e-10
DEFAULT_MAX_SECTOR_DIMENSION = 2000
ZERO_TOLERANCE = 1e-12


class SectorModes(object):
    """Modes of one sector, ascending in eigenvalue.

    ``vectors`` holds one W-orthonormal eigenvector per column. ``invariant``
    flags the modes that are C_G(g)-invariant; only those count as states.
    """

    continuum = False

    def __init__(self, label, values, vectors, weights, invariant, rel_tol):
        self.label = label
        self.values = values
        self.vectors = vectors
        self.weights = weights
        self.invariant = invariant
        self.rel_tol = rel_tol
        self.cluster_of, self.cluster_values, self.cluster_sizes = cluster_eigenvalues(
            values, rel_tol
        )
        self.cluster_invariant = np.bincount(
            self.cluster_of[invariant], minlength=len(self.cluster_values)
        ).astype(np.int64)

    @property
    def dimension(self):
        return len(self.values)

    @property
    def size(self):
        return len(self.weights)

    def invariant_count(self):
        return int(self.invariant.sum())

    def mode_cluster_values(self):
        """Each mode's cluster eigenvalue."""
        return self.cluster_values[self.cluster_of]

    def first_uv(self, cutoff):
        return int(np.searchsorted(self.mode_cluster_values(), cutoff, side="right"))

    def residual(self, stiffness):
        """max_i ‖L v_i − λ_i W v_i‖."""
        if not self.dimension:
            return 0.0
        lhs = stiffness.dot(self.vectors)
        rhs = self.weights[:, None] * self.vectors * self.values[None, :]
        return float(np.abs(lhs - rhs).max())

    def __repr__(self):
        return "SectorModes(%s, modes=%d, clusters=%d)" % (
            self.label,
            self.dimension,
            len(self.cluster_values),
        )


class ContinuumSector(object):
    """Cluster eigenvalues and multiplicities only, for analytic spectra."""

    continuum = True

    def __init__(self, label, values, multiplicities):
        self.label = label
        self.cluster_values = np.asarray(values, dtype=float)
        self.cluster_sizes = np.asarray(multiplicities, dtype=np.int64)
        self.cluster_invariant = self.cluster_sizes

    @property
    def dimension(self):
        return int(self.cluster_sizes.sum())

    def invariant_count(self):
        return self.dimension

    def first_uv(self, cutoff):
        # counted in clusters, a continuum sector has no per-mode index
        return int(np.searchsorted(self.cluster_values, cutoff, side="right"))

    def __repr__(self):
        return "ContinuumSector(%s, clusters=%d)" % (
            self.label,
            len(self.cluster_values),
        )


class ModeBasis(object):
    """The spectral data of every sector of a chart, in class order."""

    def __init__(self, key, sectors, rel_tol=DEFAULT_CLUSTER_TOLERANCE):
        self.key = key if isinstance(key, tuple) else tuple(key)
        self.sectors = tuple(sectors)
        self.rel_tol = rel_tol

    def __len__(self):
        return len(self.sectors)

    def __getitem__(self, c):
        return self.sectors[c]

    def __iter__(self):
        return iter(self.sectors)

    @property
    def labels(self):
        return [label for label, _ in self.key]

    def is_continuum(self):
        return any(s.continuum for s in self.sectors)

    def check_element(self, a):
        if not isinstance(a, AlgebraElement) or a.key != self.key:
            raise ChartMismatchError("element does not belong to this mode basis")
        return a

    def check_class(self, c):
        if not isinstance(c, (int, np.integer)) or not 0 <= c < len(self.sectors):
            raise UnknownSectorError("unknown sector class %r" % (c,))
        return int(c)

    def weights(self):
        return tuple(s.weights for s in self.sectors if not s.continuum)

    def max_eigenvalue(self):
        tops = [s.cluster_values[-1] for s in self.sectors if len(s.cluster_values)]
        return float(max(tops)) if tops else 0.0

    def min_positive_eigenvalue(self):
        positive = [
            v for s in self.sectors for v in s.cluster_values if v > 0.0
        ]
        return float(min(positive)) if positive else None

    def digest(self):
        """sha256 over labels, cluster eigenvalues (12 significant digits) and sizes."""
        h = hashlib.sha256()
        for s in self.sectors:
            h.update(s.label.encode("utf-8"))
            for value, size, inv in zip(
                s.cluster_values, s.cluster_sizes, s.cluster_invariant
            ):
                h.update(("%.12g:%d:%d;" % (value, size, inv)).encode("utf-8"))
        return h.hexdigest()

    def rows(self):
        """Spectra CSV rows: one per mode, or one per cluster for continuum sectors."""
        for s in self.sectors:
            if s.continuum:
                for k, (value, size) in enumerate(
                    zip(s.cluster_values, s.cluster_sizes)
                ):
                    yield (s.label, k, float(value), k, int(size), True)
                continue
            for i in range(s.dimension):
                k = int(s.cluster_of[i])
                yield (
                    s.label,
                    i,
                    float(s.values[i]),
                    k,
                    int(s.cluster_sizes[k]),
                    bool(s.invariant[i]),
                )


SPECTRA_HEADERS = (
    "sector",
    "mode_index",
    "eigenvalue",
    "cluster_id",
    "multiplicity",
    "invariant",
)


def check_symmetric(stiffness, sym_tol=DEFAULT_SYMMETRY_TOLERANCE):
    scale = max(1.0, float(np.abs(stiffness).max())) if stiffness.size else 1.0
    asym = float(np.abs(stiffness - stiffness.T).max()) if stiffness.size else 0.0
    if asym > sym_tol * scale:
        raise DomainError(
            "stiffness matrix is not symmetric: max |L - Lᵀ| = %.3g" % asym
        )


def _fix_signs(vectors):
    for j in range(vectors.shape[1]):
        column = vectors[:, j]
        big = np.abs(column)
        first = np.flatnonzero(big > ZERO_TOLERANCE * big.max())[0]
        if column[first] < 0:
            vectors[:, j] = -column
    return vectors


def _range_basis(projector):
    """Orthonormal bases of the range and kernel of a symmetric projector."""
    values, vectors = np.linalg.eigh(projector)
    keep = values > 0.5
    return vectors[:, keep], vectors[:, ~keep]


def _solve_block(reduced, basis):
    if not basis.shape[1]:
        return np.zeros(0), np.zeros((basis.shape[0], 0))
    block = basis.T.dot(reduced).dot(basis)
    values, vectors = np.linalg.eigh((block + block.T) / 2.0)
    return values, basis.dot(vectors)


def eigendecompose(
    stiffness,
    weights,
    projector=None,
    label="",
    rel_tol=DEFAULT_CLUSTER_TOLERANCE,
    sym_tol=DEFAULT_SYMMETRY_TOLERANCE,
):
    """Solve L v = λ W v for one sector.

    With a *projector* (the centralizer's Reynolds average) the basis is split
    into invariant and complementary modes. Eigenvalues within
    1e-12·max(1, ‖L‖) of zero are set to 0, and each eigenvector is signed so
    that its first non-negligible entry is positive.
    """
    stiffness = np.asarray(stiffness, dtype=float)
    weights = np.asarray(weights, dtype=float).reshape(-1)
    size = len(weights)
    if stiffness.shape != (size, size):
        raise DomainError(
            "stiffness is %s but there are %d weights" % (stiffness.shape, size)
        )
    if (weights <= 0).any():
        raise DomainError("quadrature weights must be strictly positive")
    if not size:
        return SectorModes(
            label,
            np.zeros(0),
            np.zeros((0, 0)),
            weights,
            np.zeros(0, dtype=bool),
            rel_tol,
        )
    check_symmetric(stiffness, sym_tol)
    stiffness = (stiffness + stiffness.T) / 2.0

    if projector is None:
        values, vectors = scipy.linalg.eigh(stiffness, np.diag(weights))
        invariant = np.ones(size, dtype=bool)
    else:
        root = np.sqrt(weights)
        reduced = stiffness / root[:, None] / root[None, :]
        inside, outside = _range_basis(
            root[:, None] * np.asarray(projector, dtype=float) / root[None, :]
        )
        v_in, u_in = _solve_block(reduced, inside)
        v_out, u_out = _solve_block(reduced, outside)
        values = np.concatenate([v_in, v_out])
        vectors = np.hstack([u_in, u_out]) / root[:, None]
        invariant = np.concatenate(
            [np.ones(len(v_in), dtype=bool), np.zeros(len(v_out), dtype=bool)]
        )
        order = np.argsort(values, kind="mergesort")
        values, vectors, invariant = values[order], vectors[:, order], invariant[order]

    norm = float(np.linalg.norm(stiffness, 2))
    values = np.where(np.abs(values) <= ZERO_TOLERANCE * max(1.0, norm), 0.0, values)
    vectors = _fix_signs(np.array(vectors))
    return SectorModes(label, values, vectors, weights, invariant, rel_tol)


def cluster_eigenvalues(values, rel_tol=DEFAULT_CLUSTER_TOLERANCE):
    """Greedy sweep over sorted eigenvalues.

    Consecutive values join a cluster while |λ_{i+1} − λ_i| ≤ rel_tol·max(1, λ_i).
    Returns (cluster_of, cluster_values, cluster_sizes); each cluster's value
    is the mean of its members.
    """
    values = np.asarray(values, dtype=float)
    cluster_of = np.zeros(len(values), dtype=np.int64)
    current = 0
    for i in range(1, len(values)):
        if abs(values[i] - values[i - 1]) > rel_tol * max(1.0, abs(values[i - 1])):
            current += 1
        cluster_of[i] = current
    count = current + 1 if len(values) else 0
    sizes = np.bincount(cluster_of, minlength=count).astype(np.int64)
    sums = np.bincount(cluster_of, weights=values, minlength=count)
    return cluster_of, sums / np.maximum(sizes, 1), sizes


def cluster_modes(sector, rel_tol):
    """Re-cluster a sector with a different tolerance."""
    if sector.continuum:
        return sector
    return SectorModes(
        sector.label,
        sector.values,
        sector.vectors,
        sector.weights,
        sector.invariant,
        rel_tol,
    )


def cluster_projectors(sector):
    """Π_k = Σ_{i∈k} v_i v_iᵀ W, one matrix per cluster."""
    W = sector.weights
    out = []
    for k in range(len(sector.cluster_values)):
        V = sector.vectors[:, sector.cluster_of == k]
        out.append(V.dot(V.T) * W[None, :])
    return out


ScaleSplit = namedtuple("ScaleSplit", "cutoff first_uv")


def scale_split(modes, cutoff):
    """Per sector, the index of the first mode whose cluster eigenvalue exceeds Λ.

    λ = Λ counts as IR."""
    if cutoff < 0:
        raise DomainError("cutoff must be nonnegative, got %r" % cutoff)
    return ScaleSplit(cutoff, tuple(s.first_uv(cutoff) for s in modes))


def cutoff_projector(modes, c, cutoff):
    """P_{≤Λ} on sector c as a matrix acting on locus vectors."""
    c = modes.check_class(c)
    sector = modes[c]
    if sector.continuum:
        raise DomainError("continuum sectors have no locus vectors")
    k = sector.first_uv(cutoff)
    V = sector.vectors[:, :k]
    return V.dot(V.T) * sector.weights[None, :]


def apply_laplacian(operators, a):
    """Δa with Δ = W⁻¹L on each sector."""
    if len(operators) != len(a):
        raise ChartMismatchError("operator and element have different sector counts")
    return AlgebraElement(
        a.key,
        [op.stiffness.dot(comp) / op.weights for op, comp in zip(operators, a.components)],
    )


def _check_guard(chart, max_dimension):
    for label, size in chart.key:
        if size > max_dimension:
            raise GuardExceededError(
                "sector %s has dimension %d" % (label, size), max_dimension
            )


def build_mode_basis(
    chart,
    operators=None,
    projectors=None,
    rel_tol=DEFAULT_CLUSTER_TOLERANCE,
    sym_tol=DEFAULT_SYMMETRY_TOLERANCE,
    max_dimension=DEFAULT_MAX_SECTOR_DIMENSION,
    workers=1,
):
    if chart.space.is_continuum():
        return continuum_mode_basis(chart)
    _check_guard(chart, max_dimension)
    if operators is None:
        operators = generalized_laplacian(chart)
    if projectors is None:
        projectors = [centralizer_projector(chart, c) for c in range(len(chart))]

    def solve(c):
        _logger.debug("Eigensolve for sector %s (%d points).", *chart.key[c])
        return eigendecompose(
            operators[c].stiffness,
            operators[c].weights,
            projectors[c],
            label=chart.labels[c],
            rel_tol=rel_tol,
            sym_tol=sym_tol,
        )

    if workers > 1 and len(chart) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sectors = list(pool.map(solve, range(len(chart))))
    else:
        sectors = [solve(c) for c in range(len(chart))]
    return ModeBasis(chart.key, sectors, rel_tol)


def continuum_mode_basis(chart):
    """A single sector holding the closed-form spectrum of a continuum tag."""
    if chart.group.order != 1:
        raise DomainError("continuum spaces only support the trivial group")
    values, multiplicities = closed_form_spectrum(chart.space)
    sector = ContinuumSector(chart.labels[0], values, multiplicities)
    return ModeBasis(chart.key, [sector])
