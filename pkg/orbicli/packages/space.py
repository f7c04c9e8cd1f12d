"""Discretized target spaces, group actions on them and per-locus Laplacians.

A space is a weighted graph: quadrature weights on points and positive
weights on undirected edges. The continuum tags ``sphere`` and
``flat_torus`` carry no points at all; they exist for their closed-form
spectra.
"""

import logging
from collections import OrderedDict, namedtuple

import numpy as np

from ..errors import ActionValidationError, DomainError, UnknownSectorError
from ..errors import failed, passed
from .group import conjugacy_classes, conjugating_element

_logger = logging.getLogger(__name__)

GRAPH_TAGS = ("circle", "torus")
CONTINUUM_TAGS = ("sphere", "flat_torus")


class DiscreteSpace(object):
    def __init__(self, weights, edges=(), analytic=None):
        self.weights = np.asarray(weights, dtype=float).reshape(-1)
        edges = list(edges)
        self.edges = np.array(
            [(int(i), int(j)) for i, j, _ in edges], dtype=np.int64
        ).reshape(-1, 2)
        self.edge_weights = np.array([float(w) for _, _, w in edges], dtype=float)
        # (tag, params) e.g. ("circle", {"n": 8}); None for explicit graphs
        self.analytic = analytic
        self._check()

    def _check(self):
        if (self.weights <= 0).any():
            raise DomainError("quadrature weights must be strictly positive")
        if (self.edge_weights <= 0).any():
            raise DomainError("edge weights must be strictly positive")
        n = self.size
        seen = set()
        for i, j in self.edges:
            if not (0 <= i < n and 0 <= j < n):
                raise DomainError("edge (%d, %d) references a missing point" % (i, j))
            if i == j:
                raise DomainError("self-loop at point %d" % i)
            key = (min(i, j), max(i, j))
            if key in seen:
                raise DomainError("duplicate edge (%d, %d)" % key)
            seen.add(key)

    @property
    def size(self):
        return len(self.weights)

    @property
    def tag(self):
        return self.analytic[0] if self.analytic else None

    def is_continuum(self):
        return self.tag in CONTINUUM_TAGS

    def stiffness(self):
        """L = degree − adjacency of the whole edge-weighted graph."""
        return induced_stiffness(self, np.arange(self.size))

    def __repr__(self):
        if self.analytic:
            tag, params = self.analytic
            return "DiscreteSpace(%s%r)" % (tag, tuple(params.values()))
        return "DiscreteSpace(points=%d, edges=%d)" % (self.size, len(self.edges))


def circle(n):
    if n < 3:
        raise DomainError("circle needs at least 3 points, got %d" % n)
    edges = [(p, (p + 1) % n, 1.0) for p in range(n)]
    return DiscreteSpace(np.ones(n), edges, analytic=("circle", {"n": n}))


def torus(n):
    """n×n periodic grid; point (i, j) has id i·n + j."""
    if n < 3:
        raise DomainError("torus needs at least 3 points per axis, got %d" % n)
    edges = []
    for i in range(n):
        for j in range(n):
            p = i * n + j
            edges.append((p, ((i + 1) % n) * n + j, 1.0))
            edges.append((p, i * n + (j + 1) % n, 1.0))
    return DiscreteSpace(np.ones(n * n), edges, analytic=("torus", {"n": n}))


def sphere(l_max):
    if l_max < 0:
        raise DomainError("sphere needs l_max >= 0, got %d" % l_max)
    return DiscreteSpace([], (), analytic=("sphere", {"l_max": l_max}))


def flat_torus(k_max):
    if k_max < 0:
        raise DomainError("flat_torus needs k_max >= 0, got %d" % k_max)
    return DiscreteSpace([], (), analytic=("flat_torus", {"k_max": k_max}))


def explicit_space(points, edges):
    """Build from scenario arrays: points [[id, weight]], edges [[i, j, w]]."""
    ids = [int(p[0]) for p in points]
    if ids != list(range(len(ids))):
        raise DomainError("point ids must be 0-based, contiguous and in order")
    return DiscreteSpace([float(p[1]) for p in points], [tuple(e) for e in edges])


_builders = {"circle": circle, "torus": torus, "sphere": sphere, "flat_torus": flat_torus}


def analytic_space(tag, **params):
    try:
        builder = _builders[tag]
    except KeyError:
        raise DomainError("Unknown analytic tag %r" % tag)
    return builder(**params)


def closed_form_spectrum(space):
    """(eigenvalues, multiplicities) for a tagged space, ascending."""
    tag = space.tag
    if tag is None:
        raise DomainError("explicit graphs have no closed-form spectrum")
    params = space.analytic[1]
    if tag == "circle":
        n = params["n"]
        values = 2.0 - 2.0 * np.cos(2.0 * np.pi * np.arange(n) / n)
        return _collapse(values)
    if tag == "torus":
        n = params["n"]
        ring = 2.0 - 2.0 * np.cos(2.0 * np.pi * np.arange(n) / n)
        return _collapse((ring[:, None] + ring[None, :]).ravel())
    if tag == "sphere":
        l = np.arange(params["l_max"] + 1, dtype=float)
        return l * (l + 1.0), 2 * l.astype(np.int64) + 1
    # flat torus of area 4π: side sqrt(4π), so λ = π(j² + k²)
    k = np.arange(-params["k_max"], params["k_max"] + 1)
    squares = (k[:, None] ** 2 + k[None, :] ** 2).ravel()
    norms, counts = np.unique(squares, return_counts=True)
    return np.pi * norms.astype(float), counts.astype(np.int64)


def _collapse(values, tol=1e-9):
    values = np.sort(values)
    out, counts = [], []
    for v in values:
        if out and abs(v - out[-1]) <= tol * max(1.0, abs(out[-1])):
            counts[-1] += 1
        else:
            out.append(v)
            counts.append(1)
    return np.array(out), np.array(counts, dtype=np.int64)


# Group actions


class GroupAction(object):
    def __init__(self, perms):
        self.perms = np.asarray(perms, dtype=np.int64)
        if self.perms.ndim == 1 and self.perms.size == 0:
            self.perms = self.perms.reshape(1, 0)

    @property
    def order(self):
        return self.perms.shape[0]

    def __repr__(self):
        return "GroupAction(order=%d, points=%d)" % self.perms.shape


def validate_action(space, action, group):
    perms = action.perms
    n = space.size
    if perms.ndim != 2 or perms.shape[0] != group.order:
        return failed(
            "order mismatch: group has order %d, action has %d permutations"
            % (group.order, perms.shape[0] if perms.ndim else 0)
        )
    if perms.shape[1] != n:
        return failed(
            "size mismatch: space has %d points, permutations have length %d"
            % (n, perms.shape[1])
        )
    expected = np.arange(n)
    for g in range(group.order):
        if not np.array_equal(np.sort(perms[g]), expected):
            return failed("perms[%d] is not a permutation of the points" % g, (g,))
    if not np.array_equal(perms[group.identity], expected):
        return failed("the identity element does not act trivially", (group.identity,))
    for g in range(group.order):
        for h in range(group.order):
            if not np.array_equal(perms[group.table[g, h]], perms[g][perms[h]]):
                return failed(
                    "homomorphism: perms[g·h] != perms[g]∘perms[h] for (g, h) = (%d, %d)"
                    % (g, h),
                    (g, h),
                )
    edge_lookup = {}
    for (i, j), w in zip(space.edges, space.edge_weights):
        edge_lookup[(min(i, j), max(i, j))] = w
    for g in range(group.order):
        p = perms[g]
        moved = np.flatnonzero(space.weights[p] != space.weights)
        if len(moved):
            return failed(
                "element %d does not preserve the weight of point %d" % (g, moved[0]),
                (g, int(moved[0])),
            )
        for (i, j), w in zip(space.edges, space.edge_weights):
            a, b = p[i], p[j]
            image = edge_lookup.get((min(a, b), max(a, b)))
            if image is None or image != w:
                return failed(
                    "element %d maps edge (%d, %d) to a non-edge or a different weight"
                    % (g, i, j),
                    (g, int(i), int(j)),
                )
    return passed()


def check_action(space, action, group):
    report = validate_action(space, action, group)
    if not report.passed:
        raise ActionValidationError(report)
    return action


def identity_action(space, group):
    return GroupAction(np.tile(np.arange(space.size), (group.order, 1)))


def pullback(field, action, g, group):
    """(g·Φ)(x) = Φ(g⁻¹·x) on ambient vectors."""
    field = np.asarray(field)
    inverse_perm = action.perms[group.inverse[g]]
    return field[inverse_perm]


# Preset actions. Each builder receives (space, group) and returns perms.

_actions = OrderedDict()


def action_preset(name, spaces, groups, actions=_actions):
    """Decorator registering a preset action with the tags and groups it fits."""

    def wrapper(wrapped):
        actions[name] = (wrapped, spaces, groups)
        return wrapped

    return wrapper


def _side(space):
    return space.analytic[1]["n"]


@action_preset("identity", spaces=None, groups=None)
def _identity(space, group):
    return identity_action(space, group).perms


@action_preset("reflection", spaces=("circle",), groups=("Z2",))
def _reflection(space, group):
    n = _side(space)
    p = np.arange(n)
    return np.array([p, (-p) % n])


@action_preset("rotation", spaces=("circle",), groups=("Z2", "Z3", "Z4"))
def _rotation(space, group):
    n, k = _side(space), group.order
    if n % k:
        raise DomainError("rotation by Z%d needs n divisible by %d, got %d" % (k, k, n))
    p = np.arange(n)
    return np.array([(p + g * (n // k)) % n for g in range(k)])


def _grid_map(n, fn):
    i, j = np.divmod(np.arange(n * n), n)
    a, b = fn(i, j)
    return (a % n) * n + (b % n)


@action_preset("negation", spaces=("torus",), groups=("Z2",))
def _negation(space, group):
    n = _side(space)
    return np.array([np.arange(n * n), _grid_map(n, lambda i, j: (-i, -j))])


@action_preset("quarter_turn", spaces=("torus",), groups=("Z4",))
def _quarter_turn(space, group):
    n = _side(space)
    turn = _grid_map(n, lambda i, j: (-j, i))
    perms = [np.arange(n * n)]
    for _ in range(3):
        perms.append(turn[perms[-1]])
    return np.array(perms)


@action_preset("negate_swap", spaces=("torus",), groups=("Z2xZ2",))
def _negate_swap(space, group):
    # element i <-> (a, b) = (i // 2, i % 2) acts as negation^a ∘ swap^b
    n = _side(space)
    ident = np.arange(n * n)
    neg = _grid_map(n, lambda i, j: (-i, -j))
    swap = _grid_map(n, lambda i, j: (j, i))
    return np.array([ident, swap, neg, neg[swap]])


@action_preset("permutation", spaces=("circle",), groups=("S3",))
def _permutation(space, group):
    from .group import s3_permutations

    if _side(space) != 3:
        raise DomainError("the defining S3 action needs circle(3)")
    return np.array(s3_permutations())


def action_names():
    return list(_actions)


def action_fits(name):
    _, spaces, groups = _actions[name]
    return spaces, groups


def preset_action(name, space, group):
    try:
        builder, spaces, groups = _actions[name]
    except KeyError:
        raise DomainError(
            "Unknown action preset %r. Known presets: %s" % (name, ", ".join(_actions))
        )
    if spaces is not None and space.tag not in spaces:
        raise DomainError(
            "action %r needs a space tagged %s" % (name, " or ".join(spaces))
        )
    if groups is not None and group.name not in groups:
        raise DomainError(
            "action %r needs one of the groups %s" % (name, ", ".join(groups))
        )
    return GroupAction(builder(space, group))


# Fixed loci and sector charts

FixedLocus = namedtuple("FixedLocus", "representative points weights")


def fixed_locus(space, action, g):
    points = np.flatnonzero(action.perms[g] == np.arange(space.size))
    return FixedLocus(g, points, space.weights[points])


# Per class pair: (target class, conjugating element, positions in the first
# locus, positions in the second locus, positions in the target locus).
FusionMap = namedtuple("FusionMap", "target conjugator left right out")


class ChartKey(tuple):
    """(label, size) per sector; two chart keys also compare their locus points.

    A plain tuple of pairs compares equal to any chart key with the same
    labels and sizes.
    """

    def __new__(cls, pairs, loci=()):
        key = tuple.__new__(cls, pairs)
        key.loci = tuple(tuple(int(p) for p in points) for points in loci)
        return key

    def __eq__(self, other):
        if not isinstance(other, tuple):
            return NotImplemented
        if not tuple.__eq__(self, other):
            return False
        if isinstance(other, ChartKey):
            return self.loci == other.loci
        return True

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = tuple.__hash__


class SectorChart(object):
    """Conjugacy classes with their fixed loci, intersections and fusion data."""

    def __init__(self, space, action, group):
        self.space = space
        self.group = group
        self.action = action
        self.conjugacy = conjugacy_classes(group)
        reps = self.conjugacy.representative
        self.loci = [fixed_locus(space, action, g) for g in reps]
        self.centralizer_sizes = [len(c) for c in self.conjugacy.centralizer]
        self.labels = self.conjugacy.labels()
        self.warnings = []
        if not group.is_abelian():
            self.warnings.append(
                "group %s is non-abelian: the fusion class product uses the "
                "fixed minimal representatives and is representative-dependent"
                % (group.name or "(explicit table)")
            )
        self._position = [
            dict((int(p), k) for k, p in enumerate(locus.points)) for locus in self.loci
        ]
        self.intersections = {}
        self.fusion = {}
        for c1, g in enumerate(reps):
            for c2, h in enumerate(reps):
                self._link(c1, g, c2, h)

    def _link(self, c1, g, c2, h):
        common = np.intersect1d(self.loci[c1].points, self.loci[c2].points)
        self.intersections[(c1, c2)] = common
        product = self.group.mul(g, h)
        fixed_by_product = self.action.perms[product][common] == common
        if not fixed_by_product.all():
            raise ActionValidationError(
                failed(
                    "X^%d ∩ X^%d is not contained in X^%d" % (g, h, product),
                    (g, h),
                )
            )
        target = self.conjugacy.class_of(product)
        rep = self.conjugacy.representative[target]
        x = conjugating_element(self.group, product, rep)
        moved = self.action.perms[x][common]
        self.fusion[(c1, c2)] = FusionMap(
            target,
            x,
            np.array([self._position[c1][int(p)] for p in common], dtype=np.int64),
            np.array([self._position[c2][int(p)] for p in common], dtype=np.int64),
            np.array([self._position[target][int(p)] for p in moved], dtype=np.int64),
        )

    def __len__(self):
        return len(self.loci)

    @property
    def sizes(self):
        return tuple(len(locus.points) for locus in self.loci)

    @property
    def key(self):
        return ChartKey(
            zip(self.labels, self.sizes), [locus.points for locus in self.loci]
        )

    @property
    def identity_class(self):
        return self.conjugacy.class_of(self.group.identity)

    def weights(self):
        """Pairing weights: the locus quadrature weights, one vector per class."""
        return tuple(locus.weights for locus in self.loci)

    def check_class(self, c):
        if not isinstance(c, (int, np.integer)) or not 0 <= c < len(self.loci):
            raise UnknownSectorError("unknown sector class %r" % (c,))
        return int(c)

    def summary(self):
        return [
            OrderedDict(
                [
                    ("class", self.labels[c]),
                    ("members", list(self.conjugacy.classes[c])),
                    ("locus_size", len(locus.points)),
                    ("locus", [int(p) for p in locus.points]),
                    ("centralizer_size", self.centralizer_sizes[c]),
                ]
            )
            for c, locus in enumerate(self.loci)
        ]


def sector_chart(space, action, group):
    if action.order != group.order:
        raise ActionValidationError(
            failed(
                "order mismatch: group has order %d, action has %d permutations"
                % (group.order, action.order)
            )
        )
    chart = SectorChart(space, action, group)
    for w in chart.warnings:
        _logger.warning(w)
    return chart


def centralizer_projector(chart, c):
    """Reynolds average of C_G(g) acting on the locus of class c, as a matrix.

    Centralizer elements map X^g onto itself, so each one is a permutation of
    the locus positions."""
    locus = chart.loci[c]
    size = len(locus.points)
    position = chart._position[c]
    projector = np.zeros((size, size))
    for z in chart.conjugacy.centralizer[c]:
        image = chart.action.perms[z][locus.points]
        rows = np.array([position[int(p)] for p in image], dtype=np.int64)
        projector[rows, np.arange(size)] += 1.0
    return projector / len(chart.conjugacy.centralizer[c])


# Laplacians

SectorOperator = namedtuple("SectorOperator", "stiffness weights")


def induced_stiffness(space, points):
    """Stiffness matrix of the subgraph induced on *points* (ambient order)."""
    points = np.asarray(points, dtype=np.int64)
    size = len(points)
    position = -np.ones(space.size, dtype=np.int64)
    position[points] = np.arange(size)
    L = np.zeros((size, size))
    for (i, j), w in zip(space.edges, space.edge_weights):
        a, b = position[i], position[j]
        if a < 0 or b < 0:
            continue
        L[a, b] -= w
        L[b, a] -= w
        L[a, a] += w
        L[b, b] += w
    return L


def build_laplacian(space, locus):
    return SectorOperator(induced_stiffness(space, locus.points), locus.weights)


def generalized_laplacian(chart):
    """One (L, W) pair per class; the generalized Laplacian is block diagonal."""
    return tuple(build_laplacian(chart.space, locus) for locus in chart.loci)
