"""Finite groups as Cayley tables.

Elements are dense indices 0..order-1 and ``table[g][h]`` is the index of
g·h. Everything downstream (sectors, fusion, cohomology) is driven by the
table and the conjugacy data derived from it.
"""

import itertools
import logging
from collections import OrderedDict, namedtuple
from fractions import Fraction

import numpy as np

from ..errors import DomainError, GroupValidationError, GuardExceededError
from ..errors import failed, passed

_logger = logging.getLogger(__name__)

DEFAULT_H2_CANDIDATE_LIMIT = 1 << 20


class FiniteGroupTable(object):
    def __init__(self, table, name=None):
        self.table = np.asarray(table, dtype=np.int64)
        self.order = int(self.table.shape[0]) if self.table.ndim == 2 else 0
        self.name = name
        self.identity = self._find_identity()
        self.inverse = self._find_inverses()

    def _find_identity(self):
        if self.table.ndim != 2 or self.table.shape[0] != self.table.shape[1]:
            return None
        expected = np.arange(self.order)
        for e in range(self.order):
            if np.array_equal(self.table[e], expected) and np.array_equal(
                self.table[:, e], expected
            ):
                return e
        return None

    def _find_inverses(self):
        if self.identity is None:
            return None
        inverse = np.full(self.order, -1, dtype=np.int64)
        for g in range(self.order):
            hits = np.flatnonzero(self.table[g] == self.identity)
            if len(hits) == 1 and self.table[hits[0], g] == self.identity:
                inverse[g] = hits[0]
        if (inverse < 0).any():
            return None
        return inverse

    def mul(self, g, h):
        return int(self.table[g, h])

    def conjugate(self, x, g):
        """x·g·x⁻¹"""
        return int(self.table[self.table[x, g], self.inverse[x]])

    def is_abelian(self):
        return bool(np.array_equal(self.table, self.table.T))

    def __eq__(self, other):
        return isinstance(other, FiniteGroupTable) and np.array_equal(
            self.table, other.table
        )

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.table.tobytes())

    def __repr__(self):
        return "FiniteGroupTable(%s, order=%d)" % (self.name or "?", self.order)


def validate_group(group):
    """Check the group axioms in order and report the first one that fails."""
    table = group.table
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        return failed("shape: table must be a non-empty square array")
    n = group.order
    if table.min() < 0 or table.max() >= n:
        bad = tuple(int(i) for i in np.argwhere((table < 0) | (table >= n))[0])
        return failed("closure: entry %s is not an element index" % (bad,), bad)
    if group.identity is None:
        return failed("identity: no two-sided identity element")
    expected = np.arange(n)
    for g in range(n):
        if not np.array_equal(np.sort(table[g]), expected):
            return failed("latin square: row %d is not a permutation" % g, (g,))
        if not np.array_equal(np.sort(table[:, g]), expected):
            return failed("latin square: column %d is not a permutation" % g, (g,))
    if group.inverse is None:
        return failed("inverse: some element has no two-sided inverse")
    lhs = table[table[:, :, None], np.arange(n)[None, None, :]]
    rhs = table[np.arange(n)[:, None, None], table[None, :, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        triple = tuple(int(i) for i in bad[0])
        return failed(
            "associativity: (g·h)·k != g·(h·k) for (g, h, k) = %s" % (triple,),
            triple,
        )
    return passed()


def check_group(group):
    report = validate_group(group)
    if not report.passed:
        raise GroupValidationError(report)
    return group


class ConjugacyData(object):
    """Conjugacy classes ordered by their (minimal) representative."""

    def __init__(self, classes, representative, centralizer, order):
        self.classes = classes
        self.representative = representative
        self.centralizer = centralizer
        self.class_index = np.empty(order, dtype=np.int64)
        for c, members in enumerate(classes):
            self.class_index[list(members)] = c

    def __len__(self):
        return len(self.classes)

    def class_of(self, g):
        return int(self.class_index[g])

    def label(self, c):
        return "[%d]" % self.representative[c]

    def labels(self):
        return [self.label(c) for c in range(len(self.classes))]


def conjugacy_classes(group):
    check_group(group)
    n = group.order
    seen = set()
    classes, reps, centralizers = [], [], []
    for g in range(n):
        if g in seen:
            continue
        members = sorted(set(group.conjugate(x, g) for x in range(n)))
        seen.update(members)
        classes.append(tuple(members))
        reps.append(g)
        centralizers.append(
            tuple(x for x in range(n) if group.table[x, g] == group.table[g, x])
        )
    return ConjugacyData(classes, reps, centralizers, n)


def conjugating_element(group, g, target):
    """Smallest x (identity first) with x·g·x⁻¹ = target."""
    candidates = [group.identity] + [
        x for x in range(group.order) if x != group.identity
    ]
    for x in candidates:
        if group.conjugate(x, g) == target:
            return x
    raise DomainError("%d and %d are not conjugate" % (g, target))


# Presets


_presets = OrderedDict()


def preset(name, presets=_presets):
    """Decorator registering a group builder under *name*."""

    def wrapper(wrapped):
        presets[name] = wrapped
        return wrapped

    return wrapper


def cyclic_table(n):
    idx = np.arange(n)
    return (idx[:, None] + idx[None, :]) % n


@preset("trivial")
def trivial_group():
    return FiniteGroupTable([[0]], name="trivial")


@preset("Z2")
def z2():
    return FiniteGroupTable(cyclic_table(2), name="Z2")


@preset("Z3")
def z3():
    return FiniteGroupTable(cyclic_table(3), name="Z3")


@preset("Z4")
def z4():
    return FiniteGroupTable(cyclic_table(4), name="Z4")


@preset("Z2xZ2")
def klein_four():
    # element i <-> (i // 2, i % 2); componentwise addition mod 2 is xor
    idx = np.arange(4)
    return FiniteGroupTable(idx[:, None] ^ idx[None, :], name="Z2xZ2")


def s3_permutations():
    return list(itertools.permutations(range(3)))


@preset("S3")
def s3():
    perms = s3_permutations()
    lookup = {p: i for i, p in enumerate(perms)}
    table = [
        [lookup[tuple(g[h[k]] for k in range(3))] for h in perms] for g in perms
    ]
    return FiniteGroupTable(table, name="S3")


def preset_names():
    return list(_presets)


def preset_group(name):
    try:
        return _presets[name]()
    except KeyError:
        raise DomainError(
            "Unknown group preset %r. Known presets: %s"
            % (name, ", ".join(_presets))
        )


# 2-cocycles with values in mu_m, stored additively as residues mod m


class TwoCocycle(object):
    def __init__(self, m, values):
        self.m = int(m)
        self.values = np.asarray(values, dtype=np.int64)
        if self.m > 0:
            self.values = self.values % self.m

    def key(self):
        return tuple(int(v) for v in self.values.ravel())

    def __eq__(self, other):
        return (
            isinstance(other, TwoCocycle)
            and self.m == other.m
            and np.array_equal(self.values, other.values)
        )

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.m, self.key()))

    def __repr__(self):
        return "TwoCocycle(m=%d, values=%s)" % (self.m, self.values.tolist())


def _cocycle_violations(table, values, m):
    """Boolean array over (..., g, h, k) marking failures of the cocycle law."""
    n = table.shape[0]
    g, h, k = np.ogrid[:n, :n, :n]
    lhs = values[..., g, h] + values[..., table[g, h], k]
    rhs = values[..., g, table[h, k]] + values[..., h, k]
    return (lhs - rhs) % m != 0


def validate_cocycle(group, alpha):
    if alpha.m <= 0:
        raise DomainError("invalid modulus m=%d, must be positive" % alpha.m)
    n = group.order
    if alpha.values.shape != (n, n):
        return failed(
            "shape: cocycle is %s, group order is %d" % (alpha.values.shape, n)
        )
    bad = np.argwhere(_cocycle_violations(group.table, alpha.values, alpha.m))
    if len(bad):
        triple = tuple(int(i) for i in bad[0])
        return failed("cocycle condition fails at (g, h, k) = %s" % (triple,), triple)
    return passed()


def coboundary(group, beta, m):
    """δβ(g, h) = β(g) + β(h) − β(g·h) mod m."""
    beta = np.asarray(beta, dtype=np.int64)
    values = beta[:, None] + beta[None, :] - beta[group.table]
    return TwoCocycle(m, values)


def _normalized_coboundaries(group, m):
    n = group.order
    others = [g for g in range(n) if g != group.identity]
    seen = OrderedDict()
    for digits in itertools.product(range(m), repeat=len(others)):
        beta = np.zeros(n, dtype=np.int64)
        beta[others] = digits
        delta = coboundary(group, beta, m)
        seen.setdefault(delta.key(), delta)
    return list(seen.values())


def is_coboundary(group, alpha):
    keys = set(b.key() for b in _normalized_coboundaries(group, alpha.m))
    return alpha.key() in keys


CohomologySummary = namedtuple(
    "CohomologySummary",
    "m cocycle_count coboundary_count class_count representatives",
)


def h2_brute_force(group, m, candidate_limit=DEFAULT_H2_CANDIDATE_LIMIT, chunk=4096):
    """Enumerate normalized μ_m-valued 2-cocycles and count classes mod coboundaries."""
    if m <= 0:
        raise DomainError("invalid modulus m=%d, must be positive" % m)
    check_group(group)
    n = group.order
    e = group.identity
    free = [(g, h) for g in range(n) for h in range(n) if g != e and h != e]
    total = m ** len(free)
    if total > candidate_limit:
        raise GuardExceededError(
            "H^2 search space for order %d and m=%d has %d candidates"
            % (n, m, total),
            candidate_limit,
        )
    _logger.debug("Enumerating %d normalized cochains (order %d, m=%d).", total, n, m)

    rows = np.array([g for g, _ in free], dtype=np.int64)
    cols = np.array([h for _, h in free], dtype=np.int64)
    powers = m ** np.arange(len(free) - 1, -1, -1, dtype=np.int64)
    cocycles = []
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (idx[:, None] // powers[None, :]) % m
        values = np.zeros((len(idx), n, n), dtype=np.int64)
        values[:, rows, cols] = digits
        bad = _cocycle_violations(group.table, values, m).reshape(len(idx), -1)
        for v in values[~bad.any(axis=1)]:
            cocycles.append(TwoCocycle(m, v))

    boundaries = _normalized_coboundaries(group, m)
    remaining = OrderedDict((c.key(), c) for c in cocycles)
    representatives = []
    while remaining:
        # insertion order is lexicographic, so the first key is the smallest
        rep = remaining[next(iter(remaining))]
        representatives.append(rep)
        for b in boundaries:
            remaining.pop(TwoCocycle(m, rep.values + b.values).key(), None)

    return CohomologySummary(
        m, len(cocycles), len(boundaries), len(representatives), representatives
    )


def age(rotation_angles):
    """Sum of the rotation exponents λ_j ∈ [0, 1) as an exact rational."""
    total = Fraction(0)
    for angle in rotation_angles:
        if isinstance(angle, float):
            raise DomainError(
                "rotation angle %r must be given exactly (Fraction, int or 'p/q')"
                % angle
            )
        value = Fraction(angle)
        if not 0 <= value < 1:
            raise DomainError("rotation angle %s is outside [0, 1)" % value)
        total += value
    return total
