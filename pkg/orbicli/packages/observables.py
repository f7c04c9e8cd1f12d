"""Partition functions, sector correlators, heat-trace fits, anomaly defects
and the comparison against the plain (trivial group) pipeline."""

import logging
from collections import OrderedDict, namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..errors import AutomorphismError, ChartMismatchError, DomainError, HeatFitError
from ..errors import failed, passed
from .algebra import AlgebraElement, frobenius_pairing, trace
from .group import preset_group
from .space import identity_action, sector_chart
from .spectral import DEFAULT_CLUSTER_TOLERANCE, build_mode_basis

_logger = logging.getLogger(__name__)

MIN_FIT_SAMPLES = 4
TRUNCATION_THRESHOLD = 25.0
SMOOTH_LIMIT_TOLERANCE = 1e-12


def _check_beta(beta):
    if not beta > 0:
        raise DomainError("β must be positive, got %r" % (beta,))


def sector_partition(modes, c, beta):
    """Z_[g](β): Σ over the sector's invariant modes of e^{−βλ}."""
    _check_beta(beta)
    sector = modes[modes.check_class(c)]
    return float(
        np.sum(sector.cluster_invariant * np.exp(-beta * sector.cluster_values))
    )


def partition_function(modes, beta):
    _check_beta(beta)
    return sum(sector_partition(modes, c, beta) for c in range(len(modes)))


class PartitionTable(object):
    """Z and every Z_[g] over a β-grid."""

    def __init__(self, betas, labels, sectors, spectral_top):
        self.betas = np.asarray(betas, dtype=float)
        self.labels = list(labels)
        # rows follow the β-grid, columns the classes
        self.sectors = np.asarray(sectors, dtype=float).reshape(
            len(self.betas), len(self.labels)
        )
        self.totals = np.array([sum(row) for row in self.sectors.tolist()])
        self.spectral_top = spectral_top

    def headers(self):
        return ("beta", "Z") + tuple("Z%s" % label for label in self.labels)

    def table(self):
        for beta, total, row in zip(self.betas, self.totals, self.sectors):
            yield (float(beta), float(total)) + tuple(float(z) for z in row)

    def to_serializable(self):
        return OrderedDict(
            [
                ("labels", self.labels),
                ("spectral_top", self.spectral_top),
                ("beta", [float(b) for b in self.betas]),
                ("Z", [float(z) for z in self.totals]),
                (
                    "sectors",
                    OrderedDict(
                        (label, [float(z) for z in self.sectors[:, c]])
                        for c, label in enumerate(self.labels)
                    ),
                ),
            ]
        )


def partition_table(modes, betas, workers=1):
    betas = [float(b) for b in betas]
    for beta in betas:
        _check_beta(beta)

    def row(beta):
        return [sector_partition(modes, c, beta) for c in range(len(modes))]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, betas))
    else:
        rows = [row(beta) for beta in betas]
    return PartitionTable(betas, modes.labels, rows, modes.max_eigenvalue())


def sector_correlator(modes, fields, c, beta):
    """tr(e^{−βΔ} M_Φ₁ ⋯ M_Φm e_[g]) over the sector's invariant modes."""
    _check_beta(beta)
    if not fields:
        raise DomainError("a correlator needs at least one field")
    c = modes.check_class(c)
    for field in fields:
        modes.check_element(field)
    sector = modes[c]
    if sector.continuum:
        raise DomainError("correlators need locus vectors; %s is a continuum sector" % sector.label)
    product = np.ones(sector.size, dtype=complex)
    for field in fields:
        product = product * field.components[c]
    V = sector.vectors[:, sector.invariant]
    if not V.shape[1]:
        return 0j
    heat = np.exp(-beta * sector.mode_cluster_values()[sector.invariant])
    diagonal = np.einsum("ij,i,ij->j", V, sector.weights * product, V)
    return complex(np.sum(heat * diagonal))


HeatFit = namedtuple("HeatFit", "leading constant residual dimension samples")


def heat_fit(table, dimension=2, window=None):
    """Least-squares fit of Z(β) ≈ c₋₁·β^{−n/2} + c₀ over the table's β-grid.

    *window* ``(lo, hi)`` restricts the samples used.
    """
    betas, totals = table.betas, table.totals
    if window is not None:
        lo, hi = window
        keep = (betas >= lo * (1 - 1e-9)) & (betas <= hi * (1 + 1e-9))
        betas, totals = betas[keep], totals[keep]
    if len(betas) < MIN_FIT_SAMPLES:
        raise HeatFitError(
            "heat fit needs at least %d β samples, got %d" % (MIN_FIT_SAMPLES, len(betas))
        )
    if not table.spectral_top > 0:
        raise HeatFitError("no positive eigenvalue, so no power law present")
    reach = float(betas.min()) * table.spectral_top
    if reach < TRUNCATION_THRESHOLD:
        raise HeatFitError(
            "truncated spectrum dominates the window: min(β)·λ_max = %.3g < %g"
            % (reach, TRUNCATION_THRESHOLD)
        )
    design = np.column_stack([betas ** (-dimension / 2.0), np.ones_like(betas)])
    (leading, constant), _, _, _ = np.linalg.lstsq(design, totals, rcond=None)
    residual = float(np.sqrt(np.mean((design.dot([leading, constant]) - totals) ** 2)))
    return HeatFit(float(leading), float(constant), residual, dimension, len(betas))


# Anomalies

Automorphism = namedtuple("Automorphism", "element_map point_maps")


def identity_automorphism(chart):
    return Automorphism(
        np.arange(chart.group.order), [locus.points.copy() for locus in chart.loci]
    )


def class_map(chart, sigma):
    reps = chart.conjugacy.representative
    return [chart.conjugacy.class_of(int(sigma.element_map[g])) for g in reps]


def validate_automorphism(chart, sigma):
    group = chart.group
    n = group.order
    pi = np.asarray(sigma.element_map, dtype=np.int64)
    if pi.shape != (n,) or not np.array_equal(np.sort(pi), np.arange(n)):
        return failed("element map is not a bijection of the group")
    lhs = pi[group.table]
    rhs = group.table[pi[:, None], pi[None, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        pair = tuple(int(i) for i in bad[0])
        return failed("element map is not a homomorphism at (g, h) = %s" % (pair,), pair)
    for c, members in enumerate(chart.conjugacy.classes):
        images = set(chart.conjugacy.class_of(int(pi[g])) for g in members)
        if len(images) != 1:
            return failed("class %s is not mapped onto a single class" % chart.labels[c], (c,))
    targets = class_map(chart, sigma)
    if len(sigma.point_maps) != len(chart):
        return failed(
            "%d point maps for %d sectors" % (len(sigma.point_maps), len(chart))
        )
    for c, (target, points) in enumerate(zip(targets, sigma.point_maps)):
        points = np.asarray(points, dtype=np.int64)
        expected = np.sort(chart.loci[target].points)
        if len(points) != len(chart.loci[c].points) or not np.array_equal(
            np.sort(points), expected
        ):
            return failed(
                "point map of %s is not a bijection onto the locus of %s"
                % (chart.labels[c], chart.labels[target]),
                (c, target),
            )
    return passed()


def apply_automorphism(chart, sigma, a):
    """σ(a): the component of [g] moves to [π(g)] along the point map."""
    comps = [np.zeros(size, dtype=complex) for size in chart.sizes]
    for c, (target, points) in enumerate(zip(class_map(chart, sigma), sigma.point_maps)):
        rows = [chart._position[target][int(p)] for p in points]
        comps[target][rows] = a.components[c]
    return AlgebraElement(a.key, comps)


ANOMALY_KINDS = ("trace", "pairing", "partition")


def anomaly_defect(
    kind, sigma, a, chart, weights=None, b=None, modes=None, beta=None
):
    """𝒪(σ(a)) − 𝒪(a) for the observable named by *kind*."""
    if kind not in ANOMALY_KINDS:
        raise DomainError(
            "unknown observable %r, expected one of %s" % (kind, ", ".join(ANOMALY_KINDS))
        )
    report = validate_automorphism(chart, sigma)
    if not report.passed:
        raise AutomorphismError(report)
    if a.key != chart.key:
        raise ChartMismatchError("element does not belong to this sector chart")
    weights = chart.weights() if weights is None else weights
    moved = apply_automorphism(chart, sigma, a)

    if kind == "trace":
        return trace(moved, weights) - trace(a, weights)
    if kind == "pairing":
        if b is None:
            raise DomainError("the pairing observable needs a fixed element b")
        return frobenius_pairing(moved, b, weights) - frobenius_pairing(a, b, weights)
    if modes is None or beta is None:
        raise DomainError("the partition observable needs modes and β")

    def weighted(x):
        return sum(
            sector_partition(modes, c, beta) * np.sum(w * comp)
            for c, (w, comp) in enumerate(zip(weights, x.components))
        )

    return complex(weighted(moved) - weighted(a))


SmoothLimitReport = namedtuple(
    "SmoothLimitReport", "betas untwisted plain difference max_difference agree"
)


def smooth_limit_compare(space, action, group, betas, rel_tol=DEFAULT_CLUSTER_TOLERANCE):
    """Untwisted sector of the orbifold against the same space with G = {1}."""
    chart = sector_chart(space, action, group)
    orbifold = build_mode_basis(chart, rel_tol=rel_tol)
    trivial = preset_group("trivial")
    plain_chart = sector_chart(space, identity_action(space, trivial), trivial)
    plain = build_mode_basis(plain_chart, rel_tol=rel_tol)
    identity_class = chart.identity_class

    betas = [float(b) for b in betas]
    untwisted = np.array([sector_partition(orbifold, identity_class, b) for b in betas])
    reference = np.array([partition_function(plain, b) for b in betas])
    difference = np.abs(untwisted - reference)
    worst = float(difference.max()) if len(difference) else 0.0
    scale = max(1.0, float(np.abs(reference).max())) if len(reference) else 1.0
    return SmoothLimitReport(
        betas,
        untwisted.tolist(),
        reference.tolist(),
        difference.tolist(),
        worst,
        worst <= SMOOTH_LIMIT_TOLERANCE * scale,
    )
