import numpy as np
import pytest

from orbicli.errors import DomainError, GuardExceededError, UnknownSectorError
from orbicli.packages.algebra import frobenius_pairing, random_element
from orbicli.packages.group import preset_group
from orbicli.packages.space import (
    centralizer_projector,
    circle,
    generalized_laplacian,
    identity_action,
    sector_chart,
    sphere,
)
from orbicli.packages.spectral import (
    SPECTRA_HEADERS,
    apply_laplacian,
    build_mode_basis,
    cluster_eigenvalues,
    cluster_modes,
    cluster_projectors,
    cutoff_projector,
    eigendecompose,
    scale_split,
)
from utils import ORBIFOLDS, make_chart, orbifold_id

RESIDUAL_TOL = 1e-10


def trivial_circle_modes(n):
    group = preset_group("trivial")
    space = circle(n)
    return build_mode_basis(sector_chart(space, identity_action(space, group), group))


@pytest.mark.parametrize("n", [4, 8, 16])
def test_circle_spectrum(n):
    modes = trivial_circle_modes(n)
    expected = np.sort(2 - 2 * np.cos(2 * np.pi * np.arange(n) / n))
    assert np.abs(modes[0].values - expected).max() <= 1e-10
    assert len(modes[0].cluster_values) == n // 2 + 1
    assert modes[0].cluster_sizes[0] == 1
    assert modes[0].cluster_sizes[-1] == 1


def test_circle8_clusters(trivial_modes):
    sector = trivial_modes[0]
    assert sector.cluster_sizes.tolist() == [1, 2, 2, 2, 1]
    assert np.allclose(
        sector.cluster_values, [0, 2 - np.sqrt(2), 2, 2 + np.sqrt(2), 4]
    )
    assert sector.values[0] == 0.0


@pytest.mark.parametrize("orbifold", ORBIFOLDS, ids=orbifold_id)
def test_residual_and_orthonormality(orbifold):
    chart = make_chart(*orbifold)
    operators = generalized_laplacian(chart)
    modes = build_mode_basis(chart, operators=operators)
    for op, sector in zip(operators, modes):
        assert sector.residual(op.stiffness) <= RESIDUAL_TOL
        V = sector.vectors
        gram = V.T.dot(sector.weights[:, None] * V)
        assert np.allclose(gram, np.eye(sector.dimension), atol=1e-10)


@pytest.mark.parametrize("orbifold", ORBIFOLDS, ids=orbifold_id)
def test_cluster_projectors_resolve_identity(orbifold):
    chart = make_chart(*orbifold)
    modes = build_mode_basis(chart)
    for sector in modes:
        projectors = cluster_projectors(sector)
        if not projectors:
            continue
        total = sum(projectors)
        assert np.allclose(total, np.eye(sector.size), atol=1e-10)
        for P in projectors:
            assert np.allclose(P.dot(P), P, atol=1e-10)


@pytest.mark.parametrize("orbifold", ORBIFOLDS, ids=orbifold_id)
def test_invariant_count_matches_projector_rank(orbifold):
    chart = make_chart(*orbifold)
    modes = build_mode_basis(chart)
    for c, sector in enumerate(modes):
        rank = int(round(np.trace(centralizer_projector(chart, c))))
        assert sector.invariant_count() == rank


def test_reflection_invariant_modes(z2_modes):
    untwisted, twisted = z2_modes
    # the cosine modes survive, one per distinct eigenvalue
    assert untwisted.cluster_invariant.tolist() == [1, 1, 1, 1, 1]
    assert twisted.values.tolist() == [0.0, 0.0]
    assert twisted.cluster_invariant.tolist() == [2]


def test_invariant_vectors_are_invariant(z2_chart, z2_modes):
    P = centralizer_projector(z2_chart, 0)
    sector = z2_modes[0]
    V = sector.vectors[:, sector.invariant]
    assert np.allclose(P.dot(V), V, atol=1e-10)


def test_sign_convention(klein_modes):
    for sector in klein_modes:
        for j in range(sector.dimension):
            column = sector.vectors[:, j]
            big = np.abs(column)
            first = np.flatnonzero(big > 1e-12 * big.max())[0]
            assert column[first] > 0


def test_deterministic_rebuild(klein_chart, klein_modes):
    again = build_mode_basis(klein_chart)
    assert again.digest() == klein_modes.digest()
    for a, b in zip(again, klein_modes):
        assert np.array_equal(a.values, b.values)


def test_workers_give_same_modes(klein_chart, klein_modes):
    threaded = build_mode_basis(klein_chart, workers=3)
    assert threaded.digest() == klein_modes.digest()


def test_digest_distinguishes_orbifolds(z2_modes, trivial_modes):
    assert z2_modes.digest() != trivial_modes.digest()


def test_eigendecompose_weighted():
    rng = np.random.RandomState(7)
    A = rng.normal(size=(6, 6))
    L = A.dot(A.T)
    w = rng.uniform(0.5, 2.0, 6)
    sector = eigendecompose(L, w)
    assert sector.residual(L) <= RESIDUAL_TOL
    assert (np.diff(sector.values) >= 0).all()
    assert sector.invariant.all()


def test_eigendecompose_rejects_bad_input():
    with pytest.raises(DomainError):
        eigendecompose([[0.0, 1.0], [0.0, 0.0]], [1.0, 1.0])
    with pytest.raises(DomainError):
        eigendecompose(np.eye(2), [1.0, 0.0])
    with pytest.raises(DomainError):
        eigendecompose(np.eye(3), [1.0, 1.0])


def test_eigendecompose_empty_locus():
    sector = eigendecompose(np.zeros((0, 0)), [])
    assert sector.dimension == 0
    assert sector.cluster_values.size == 0


def test_cluster_eigenvalues():
    cluster_of, values, sizes = cluster_eigenvalues([0, 1e-12, 1, 1 + 1e-10, 3])
    assert cluster_of.tolist() == [0, 0, 1, 1, 2]
    assert sizes.tolist() == [2, 2, 1]
    assert np.allclose(values, [5e-13, 1 + 5e-11, 3])


def test_cluster_tolerance_is_relative():
    # a gap of 1e-8 at λ = 100 is within tolerance, at λ = 1 it is not
    assert cluster_eigenvalues([100, 100 + 1e-8])[2].tolist() == [2]
    assert cluster_eigenvalues([1, 1 + 1e-8])[2].tolist() == [1, 1]


def test_recluster(trivial_modes):
    coarse = cluster_modes(trivial_modes[0], 1.0)
    assert coarse.cluster_sizes.tolist() == [3, 5]


def test_scale_split(trivial_modes):
    sector = trivial_modes[0]
    # λ = Λ is IR
    split = scale_split(trivial_modes, sector.cluster_values[2])
    assert split.first_uv == (5,)
    assert scale_split(trivial_modes, 0.0).first_uv == (1,)
    assert scale_split(trivial_modes, 100.0).first_uv == (8,)
    with pytest.raises(DomainError):
        scale_split(trivial_modes, -1.0)


def test_cutoff_projector(z2_modes, z2_chart):
    ops = generalized_laplacian(z2_chart)
    P = cutoff_projector(z2_modes, 0, 2.5)
    assert np.allclose(P.dot(P), P, atol=1e-10)
    delta = ops[0].stiffness / ops[0].weights[:, None]
    assert np.allclose(P.dot(delta), delta.dot(P), atol=1e-10)
    with pytest.raises(UnknownSectorError):
        cutoff_projector(z2_modes, 3, 1.0)


def test_laplacian_is_self_adjoint(klein_chart, rng):
    ops = generalized_laplacian(klein_chart)
    w = klein_chart.weights()
    a = random_element(klein_chart, rng)
    b = random_element(klein_chart, rng)
    lhs = frobenius_pairing(apply_laplacian(ops, a), b, w)
    rhs = frobenius_pairing(a, apply_laplacian(ops, b), w)
    assert abs(lhs - rhs) <= 1e-10


def test_guard(z2_chart):
    with pytest.raises(GuardExceededError) as e:
        build_mode_basis(z2_chart, max_dimension=4)
    assert e.value.bound == 4


def test_mode_basis_bounds(trivial_modes):
    assert trivial_modes.max_eigenvalue() == pytest.approx(4.0)
    assert trivial_modes.min_positive_eigenvalue() == pytest.approx(2 - np.sqrt(2))
    assert not trivial_modes.is_continuum()


def test_rows(z2_modes):
    rows = list(z2_modes.rows())
    assert len(rows) == 10
    assert len(rows[0]) == len(SPECTRA_HEADERS)
    assert sum(1 for r in rows if r[-1]) == 7


def test_continuum_basis():
    group = preset_group("trivial")
    space = sphere(4)
    modes = build_mode_basis(sector_chart(space, identity_action(space, group), group))
    assert modes.is_continuum()
    sector = modes[0]
    assert sector.cluster_sizes.tolist() == [1, 3, 5, 7, 9]
    assert sector.first_uv(6) == 3
    assert modes.weights() == ()
    assert modes.max_eigenvalue() == 20
