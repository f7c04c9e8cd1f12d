"""The exact ℂ/ℤ₂ model.

Truncated polynomials in z split by parity under z ↦ −z, together with one
complex number for the twisted sector (functions on the fixed point {0}).
The Laplacian is diagonal on monomials with λ(zⁿ) = n and the twisted mode
sits at λ = 0, so the RG map only ever drops monomials.
"""

import logging
from collections import OrderedDict, namedtuple

import numpy as np

from ..errors import DomainError
from .algebra import AlgebraElement
from .rgflow import RGState, rg_filter
from .spectral import ModeBasis, eigendecompose

_logger = logging.getLogger(__name__)

CROSS_CHECK_TOLERANCE = 1e-12
DEFAULT_GRID_POINTS = 33


class ParityElement(object):
    __slots__ = ("N", "even", "odd", "twisted")

    def __init__(self, N, even, odd, twisted=0.0):
        if N < 0:
            raise DomainError("truncation degree must be nonnegative, got %d" % N)
        self.N = int(N)
        self.even = np.asarray(even, dtype=complex)
        self.odd = np.asarray(odd, dtype=complex)
        self.twisted = complex(twisted)
        if self.even.shape != (len(even_degrees(N)),) or self.odd.shape != (
            len(odd_degrees(N)),
        ):
            raise DomainError("coefficient arrays do not match truncation degree %d" % N)

    def coefficients(self):
        """Coefficients over z⁰..z^N."""
        out = np.zeros(self.N + 1, dtype=complex)
        out[0::2] = self.even
        out[1::2] = self.odd
        return out

    def max_difference(self, other):
        return float(
            max(
                np.abs(self.coefficients() - other.coefficients()).max(),
                abs(self.twisted - other.twisted),
            )
        )

    def __eq__(self, other):
        return (
            isinstance(other, ParityElement)
            and self.N == other.N
            and np.array_equal(self.even, other.even)
            and np.array_equal(self.odd, other.odd)
            and self.twisted == other.twisted
        )

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return "ParityElement(N=%d, even=%s, odd=%s, twisted=%s)" % (
            self.N,
            self.even.tolist(),
            self.odd.tolist(),
            self.twisted,
        )


def even_degrees(N):
    return np.arange(0, N + 1, 2)


def odd_degrees(N):
    return np.arange(1, N + 1, 2)


def parity_split(coefficients):
    coefficients = np.atleast_1d(np.asarray(coefficients, dtype=complex))
    if not coefficients.size:
        coefficients = np.zeros(1, dtype=complex)
    N = len(coefficients) - 1
    return ParityElement(N, coefficients[0::2], coefficients[1::2], coefficients[0])


def toy_idempotent(sign, N=0):
    """e₊ is the even constant 1, e₋ the twisted unit."""
    even = np.zeros(len(even_degrees(N)))
    odd = np.zeros(len(odd_degrees(N)))
    if sign == "+":
        even[0] = 1.0
        return ParityElement(N, even, odd, 0.0)
    if sign == "-":
        return ParityElement(N, even, odd, 1.0)
    raise DomainError("idempotent sign must be '+' or '-', got %r" % (sign,))


def toy_product(a, b):
    if a.N != b.N:
        raise DomainError("truncation degrees differ: %d and %d" % (a.N, b.N))
    product = np.convolve(a.coefficients(), b.coefficients())[: a.N + 1]
    out = parity_split(product)
    out.twisted = a.twisted * b.twisted
    return out


def toy_rg(a, scale):
    if not scale > 0:
        raise DomainError("scale ℓ must be positive, got %r" % (scale,))
    cutoff = 1.0 / scale
    even = np.where(even_degrees(a.N) <= cutoff, a.even, 0)
    odd = np.where(odd_degrees(a.N) <= cutoff, a.odd, 0)
    return ParityElement(a.N, even, odd, a.twisted)


ToySpectrum = namedtuple("ToySpectrum", "even odd twisted")


def toy_spectrum(N):
    return ToySpectrum(
        even_degrees(N).astype(float), odd_degrees(N).astype(float), 0.0
    )


TOY_LABELS = ("even", "odd", "twisted")


def toy_mode_basis(N):
    """The same spectrum run through the generic eigensolver: even, odd, twisted blocks."""
    spectrum = toy_spectrum(N)
    blocks = [spectrum.even, spectrum.odd, np.zeros(1)]
    sectors = [
        eigendecompose(np.diag(values), np.ones(len(values)), label=label)
        for label, values in zip(TOY_LABELS, blocks)
    ]
    key = tuple((label, len(values)) for label, values in zip(TOY_LABELS, blocks))
    return ModeBasis(key, sectors)


def to_generic(element, key):
    return AlgebraElement(key, [element.even, element.odd, [element.twisted]])


def from_generic(element, N):
    even, odd, twisted = element.components
    return ParityElement(N, even, odd, twisted[0])


def default_toy_grid(N, points=DEFAULT_GRID_POINTS):
    return np.geomspace(1.0 / (2 * max(N, 1)), 2.0, points)


class ToyCrossCheck(object):
    def __init__(self, N, grid, trials, max_deviation, idempotents_fixed):
        self.N = N
        self.grid = [float(s) for s in grid]
        self.trials = trials
        self.max_deviation = max_deviation
        self.idempotents_fixed = idempotents_fixed

    @property
    def passed(self):
        return self.max_deviation <= CROSS_CHECK_TOLERANCE and self.idempotents_fixed

    def to_serializable(self):
        return OrderedDict(
            [
                ("N", self.N),
                ("grid", self.grid),
                ("trials", self.trials),
                ("max_deviation", self.max_deviation),
                ("idempotents_fixed", self.idempotents_fixed),
                ("passed", self.passed),
            ]
        )


def toy_cross_check(N, grid=None, trials=50, seed=0):
    """Compare toy_rg with the generic rg_filter on random elements."""
    grid = default_toy_grid(N) if grid is None else np.asarray(grid, dtype=float)
    modes = toy_mode_basis(N)
    rng = np.random.RandomState(seed)
    worst = 0.0
    for _ in range(trials):
        raw = rng.uniform(-1, 1, N + 1) + 1j * rng.uniform(-1, 1, N + 1)
        element = parity_split(raw)
        element.twisted = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        generic = to_generic(element, modes.key)
        for scale in grid:
            expected = toy_rg(element, scale)
            actual = from_generic(rg_filter(RGState(modes, scale), generic), N)
            worst = max(worst, expected.max_difference(actual))

    fixed = all(
        toy_rg(toy_idempotent(sign, N), scale) == toy_idempotent(sign, N)
        for sign in "+-"
        for scale in grid
    )
    _logger.debug("Toy cross-check N=%d: max deviation %.3g.", N, worst)
    return ToyCrossCheck(N, grid, trials, worst, fixed)
