"""Elements of the orbifold algebra and its two products.

An element is one complex vector per conjugacy class, indexed by the points
of that class's fixed locus. The diagonal product multiplies sector by
sector; the fusion product sends content of classes [g] and [h] into class
[g·h] through the intersection of their loci.
"""

import logging
from collections import OrderedDict

import numpy as np

from ..errors import ChartMismatchError, DomainError, UnknownSectorError
from .space import centralizer_projector

_logger = logging.getLogger(__name__)


class AlgebraElement(object):
    __slots__ = ("key", "components")

    def __init__(self, key, components):
        self.key = key if isinstance(key, tuple) else tuple(key)
        self.components = tuple(np.asarray(c, dtype=complex) for c in components)
        if len(self.components) != len(self.key):
            raise ChartMismatchError(
                "%d components for %d sectors" % (len(self.components), len(self.key))
            )
        for (label, size), comp in zip(self.key, self.components):
            if comp.shape != (size,):
                raise ChartMismatchError(
                    "component %s has shape %s, locus has %d points"
                    % (label, comp.shape, size)
                )

    @classmethod
    def zeros(cls, key):
        return cls(key, [np.zeros(size, dtype=complex) for _, size in key])

    def __len__(self):
        return len(self.components)

    def __getitem__(self, c):
        return self.components[c]

    def _same(self, other):
        if not isinstance(other, AlgebraElement) or other.key != self.key:
            raise ChartMismatchError("elements live over different sector charts")

    def __add__(self, other):
        self._same(other)
        return AlgebraElement(
            self.key, [a + b for a, b in zip(self.components, other.components)]
        )

    def __sub__(self, other):
        self._same(other)
        return AlgebraElement(
            self.key, [a - b for a, b in zip(self.components, other.components)]
        )

    def __mul__(self, scalar):
        return AlgebraElement(self.key, [scalar * a for a in self.components])

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def flat(self):
        if not self.components:
            return np.zeros(0, dtype=complex)
        return np.concatenate(self.components)

    def max_abs(self):
        flat = self.flat()
        return float(np.abs(flat).max()) if flat.size else 0.0

    def to_serializable(self):
        return OrderedDict(
            (label, [[float(z.real), float(z.imag)] for z in comp])
            for (label, _), comp in zip(self.key, self.components)
        )

    def __repr__(self):
        return "AlgebraElement(%s)" % ", ".join(
            "%s:%d" % (label, size) for label, size in self.key
        )


def check_same_chart(*elements):
    key = elements[0].key
    for e in elements[1:]:
        if e.key != key:
            raise ChartMismatchError("elements live over different sector charts")
    return key


def from_components(chart, components):
    return AlgebraElement(chart.key, components)


def random_element(chart_or_key, rng, complex_values=False):
    """Entries uniform in [-1, 1] (real and imaginary parts when complex)."""
    key = getattr(chart_or_key, "key", chart_or_key)
    comps = []
    for _, size in key:
        comp = rng.uniform(-1.0, 1.0, size)
        if complex_values:
            comp = comp + 1j * rng.uniform(-1.0, 1.0, size)
        comps.append(comp)
    return AlgebraElement(key, comps)


def idempotent(chart, c):
    c = chart.check_class(c)
    comps = [np.zeros(size, dtype=complex) for size in chart.sizes]
    comps[c][:] = 1.0
    return AlgebraElement(chart.key, comps)


def unit(chart):
    """Σ e_[g], the unit of the diagonal product."""
    return AlgebraElement(chart.key, [np.ones(size) for size in chart.sizes])


def fusion_unit(chart):
    """e_[1], the unit of the fusion product."""
    return idempotent(chart, chart.identity_class)


def diagonal_product(a, b):
    key = check_same_chart(a, b)
    return AlgebraElement(key, [x * y for x, y in zip(a.components, b.components)])


def fusion_product(a, b, chart):
    key = check_same_chart(a, b)
    if key != chart.key:
        raise ChartMismatchError("elements do not belong to this sector chart")
    out = [np.zeros(size, dtype=complex) for size in chart.sizes]
    n = len(chart)
    for c1 in range(n):
        left = a.components[c1]
        if not left.any():
            continue
        for c2 in range(n):
            fmap = chart.fusion[(c1, c2)]
            if not len(fmap.out):
                continue
            np.add.at(
                out[fmap.target],
                fmap.out,
                left[fmap.left] * b.components[c2][fmap.right],
            )
    return AlgebraElement(key, out)


def _check_weights(a, weights):
    if len(weights) != len(a.components):
        raise ChartMismatchError("weights have %d sectors, element %d" % (len(weights), len(a.components)))
    for w, comp in zip(weights, a.components):
        if np.shape(w) != comp.shape:
            raise ChartMismatchError("weight vector does not match its locus")


def frobenius_pairing(a, b, weights):
    """Σ_[g] Σ_x w(x) a(x) b(x), bilinear (no conjugation)."""
    check_same_chart(a, b)
    _check_weights(a, weights)
    return complex(
        sum(np.sum(w * x * y) for w, x, y in zip(weights, a.components, b.components))
    )


def trace(a, weights):
    _check_weights(a, weights)
    return complex(sum(np.sum(w * x) for w, x in zip(weights, a.components)))


def pairing_norm(a, weights):
    _check_weights(a, weights)
    return float(
        np.sqrt(sum(np.sum(w * np.abs(x) ** 2) for w, x in zip(weights, a.components)))
    )


def sector_project(a, c, chart=None):
    if chart is not None:
        c = chart.check_class(c)
    elif not isinstance(c, (int, np.integer)) or not 0 <= c < len(a.components):
        raise UnknownSectorError("unknown sector class %r" % (c,))
    comps = [
        comp if k == c else np.zeros_like(comp) for k, comp in enumerate(a.components)
    ]
    return AlgebraElement(a.key, comps)


def decompose_field(field, chart):
    """Sector decomposition of an ambient field.

    Each component is the field restricted to X^g and averaged over the
    centralizer C_G(g)."""
    field = np.asarray(field, dtype=complex)
    if field.shape != (chart.space.size,):
        raise ChartMismatchError(
            "field has %d values, space has %d points" % (field.size, chart.space.size)
        )
    comps = []
    for c, locus in enumerate(chart.loci):
        comps.append(centralizer_projector(chart, c).dot(field[locus.points]))
    return AlgebraElement(chart.key, comps)


def interaction_term(fields, weights):
    """τ(Φ₁ ⋯ Φ_m) with the diagonal product."""
    if not fields:
        raise DomainError("an interaction needs at least one field")
    product = fields[0]
    for f in fields[1:]:
        product = diagonal_product(product, f)
    return trace(product, weights)
