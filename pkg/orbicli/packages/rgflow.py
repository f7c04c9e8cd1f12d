"""The scale-ℓ RG map in its two forms.

Filtering keeps the IR part of each sector component and returns an algebra
element. Compression sandwiches the multiplication operator of an element
between IR projectors and returns a matrix on the retained modes.
"""

import logging
from collections import OrderedDict, namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy.linalg

from ..errors import DomainError
from .algebra import (
    AlgebraElement,
    diagonal_product,
    fusion_product,
    idempotent,
    pairing_norm,
    unit,
)
from .spectral import scale_split

_logger = logging.getLogger(__name__)

DEFAULT_FIXED_TOLERANCE = 1e-9
DEFAULT_SCALE_GRID_POINTS = 33


class RGState(object):
    def __init__(self, modes, scale):
        if not scale > 0:
            raise DomainError("scale ℓ must be positive, got %r" % (scale,))
        if modes.is_continuum():
            raise DomainError("the RG map needs locus vectors; continuum sectors have none")
        self.modes = modes
        self.scale = float(scale)
        self.cutoff = 1.0 / self.scale
        self.split = scale_split(modes, self.cutoff)

    def retained(self, c):
        """IR eigenvectors of sector c, one per column."""
        return self.modes[c].vectors[:, : self.split.first_uv[c]]

    def retained_counts(self):
        return tuple(self.split.first_uv)

    def __repr__(self):
        return "RGState(ℓ=%g, Λ=%g, retained=%s)" % (
            self.scale,
            self.cutoff,
            self.retained_counts(),
        )


def rg_filter(state, a):
    modes = state.modes
    modes.check_element(a)
    comps = []
    for c, comp in enumerate(a.components):
        V = state.retained(c)
        comps.append(V.dot(V.T.dot(modes[c].weights * comp)))
    return AlgebraElement(a.key, comps)


def rg_compress(state, a):
    """P_{≤Λ} M_a P_{≤Λ} in the retained-mode basis, block diagonal by sector."""
    modes = state.modes
    modes.check_element(a)
    blocks = []
    for c, comp in enumerate(a.components):
        V = state.retained(c)
        blocks.append(V.T.dot((modes[c].weights * comp)[:, None] * V))
    if not blocks:
        return np.zeros((0, 0), dtype=complex)
    return scipy.linalg.block_diag(*blocks).astype(complex)


def _spectral_norm(matrix):
    if not matrix.size:
        return 0.0
    return float(np.linalg.norm(matrix, 2))


def multiplicativity_defect(state, a, b):
    lhs = rg_compress(state, diagonal_product(a, b))
    rhs = rg_compress(state, a).dot(rg_compress(state, b))
    return _spectral_norm(lhs - rhs)


def _norm(modes, a):
    return pairing_norm(a, modes.weights())


def beta_estimate(modes, a, scale, step):
    """ℓ·(Φ_{ℓ+δℓ}(a) − Φ_ℓ(a))/δℓ."""
    if not scale > 0 or not step > 0:
        raise DomainError(
            "ℓ and δℓ must be positive, got ℓ=%r, δℓ=%r" % (scale, step)
        )
    finer = rg_filter(RGState(modes, scale), a)
    coarser = rg_filter(RGState(modes, scale + step), a)
    return (coarser - finer) * (scale / step)


RGFixedVerdict = namedtuple("RGFixedVerdict", "fixed witness deviation")


def is_rg_fixed(modes, a, grid, tol=DEFAULT_FIXED_TOLERANCE):
    """Fixed iff ‖Φ_ℓ(a) − a‖ ≤ tol at every grid ℓ; witness is the first ℓ that fails."""
    grid = list(grid)
    if not grid:
        raise DomainError("the scale grid is empty")
    worst = 0.0
    for scale in grid:
        deviation = _norm(modes, rg_filter(RGState(modes, scale), a) - a)
        worst = max(worst, deviation)
        if deviation > tol:
            return RGFixedVerdict(False, float(scale), deviation)
    return RGFixedVerdict(True, None, worst)


def fusion_commutation_defect(state, a, b, chart, warn=True):
    if warn and not chart.group.is_abelian():
        _logger.warning(
            "Fusion commutation on non-abelian group %s uses fixed representatives.",
            chart.group.name,
        )
    lhs = rg_filter(state, fusion_product(a, b, chart))
    rhs = fusion_product(rg_filter(state, a), rg_filter(state, b), chart)
    return _norm(state.modes, lhs - rhs)


def module_defect(state, a, phi):
    """‖Φ_ℓ(a·φ) − a·Φ_ℓ(φ)‖, the failure of Φ_ℓ to be a module map."""
    lhs = rg_filter(state, diagonal_product(a, phi))
    rhs = diagonal_product(a, rg_filter(state, phi))
    return _norm(state.modes, lhs - rhs)


def idempotent_defect(state, chart):
    """max over e_[g] and the unit of ‖Φ_ℓ(e) − e‖."""
    targets = [idempotent(chart, c) for c in range(len(chart))] + [unit(chart)]
    return max(_norm(state.modes, rg_filter(state, e) - e) for e in targets)


def default_scale_grid(modes, points=DEFAULT_SCALE_GRID_POINTS):
    """Log-spaced from 1/(2λ_max) to 2/λ_min⁺; logspace(−1, 1) without positive modes."""
    low = modes.min_positive_eigenvalue()
    if low is None:
        return np.logspace(-1.0, 1.0, points)
    return np.geomspace(0.5 / modes.max_eigenvalue(), 2.0 / low, points)


FlowRow = namedtuple(
    "FlowRow", "scale cutoff retained multiplicativity idempotent module fusion"
)

FLOW_HEADERS = ("scale", "cutoff", "multiplicativity", "idempotent", "module", "fusion")


class FlowReport(object):
    def __init__(self, labels, rows, fixed):
        self.labels = list(labels)
        self.rows = list(rows)
        self.fixed = fixed

    @property
    def scales(self):
        return [row.scale for row in self.rows]

    def headers(self):
        return (
            FLOW_HEADERS[:2]
            + tuple("retained %s" % label for label in self.labels)
            + FLOW_HEADERS[2:]
        )

    def table(self):
        for row in self.rows:
            yield (
                (row.scale, row.cutoff)
                + tuple(row.retained)
                + (row.multiplicativity, row.idempotent, row.module, row.fusion)
            )

    def to_serializable(self):
        return OrderedDict(
            [
                ("labels", self.labels),
                (
                    "rows",
                    [
                        OrderedDict(
                            [
                                ("scale", row.scale),
                                ("cutoff", row.cutoff),
                                ("retained", list(row.retained)),
                                ("multiplicativity_defect", row.multiplicativity),
                                ("idempotent_defect", row.idempotent),
                                ("module_defect", row.module),
                                ("fusion_commutation_defect", row.fusion),
                            ]
                        )
                        for row in self.rows
                    ],
                ),
                (
                    "fixed",
                    OrderedDict(
                        (
                            name,
                            OrderedDict(
                                [
                                    ("fixed", v.fixed),
                                    ("witness", v.witness),
                                    ("deviation", v.deviation),
                                ]
                            ),
                        )
                        for name, v in self.fixed.items()
                    ),
                ),
            ]
        )


def flow_sweep(modes, chart, grid, a, b, tol=DEFAULT_FIXED_TOLERANCE, workers=1):
    """Evaluate every diagnostic at each grid ℓ (ascending) for the sample elements a and b."""
    grid = sorted(float(s) for s in grid)
    if not grid:
        raise DomainError("the scale grid is empty")
    if not chart.group.is_abelian():
        _logger.warning(
            "Fusion commutation on non-abelian group %s uses fixed representatives.",
            chart.group.name,
        )

    def evaluate(scale):
        state = RGState(modes, scale)
        return FlowRow(
            state.scale,
            state.cutoff,
            state.retained_counts(),
            multiplicativity_defect(state, a, b),
            idempotent_defect(state, chart),
            module_defect(state, a, b),
            fusion_commutation_defect(state, a, b, chart, warn=False),
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate, grid))
    else:
        rows = [evaluate(scale) for scale in grid]

    fixed = OrderedDict()
    for c in range(len(chart)):
        fixed["e%s" % chart.labels[c]] = is_rg_fixed(modes, idempotent(chart, c), grid, tol)
    fixed["unit"] = is_rg_fixed(modes, unit(chart), grid, tol)
    fixed["sample"] = is_rg_fixed(modes, a, grid, tol)
    return FlowReport(chart.labels, rows, fixed)
