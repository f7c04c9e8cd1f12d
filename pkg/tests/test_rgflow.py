import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbicli.errors import ChartMismatchError, DomainError
from orbicli.packages.algebra import (
    from_components,
    fusion_unit,
    idempotent,
    pairing_norm,
    random_element,
    sector_project,
    unit,
)
from orbicli.packages.group import preset_group
from orbicli.packages.rgflow import (
    RGState,
    beta_estimate,
    default_scale_grid,
    flow_sweep,
    fusion_commutation_defect,
    idempotent_defect,
    is_rg_fixed,
    module_defect,
    multiplicativity_defect,
    rg_compress,
    rg_filter,
)
from orbicli.packages.space import identity_action, sector_chart, sphere
from orbicli.packages.spectral import build_mode_basis
from orbicli.scenario import load_scenario
from utils import graph_scenarios

TOL = 1e-10

scales = st.floats(min_value=0.05, max_value=20.0)
seeds = st.integers(0, 2 ** 31 - 1)


def norm(modes, a):
    return pairing_norm(a, modes.weights())


@settings(max_examples=30, deadline=None)
@given(seed=seeds, scale=scales)
def test_filter_is_idempotent(klein_chart, klein_modes, seed, scale):
    a = random_element(klein_chart, np.random.RandomState(seed), complex_values=True)
    state = RGState(klein_modes, scale)
    once = rg_filter(state, a)
    assert norm(klein_modes, rg_filter(state, once) - once) <= TOL


@settings(max_examples=30, deadline=None)
@given(seed=seeds, fine=scales, coarse=scales)
def test_coarser_scale_absorbs_finer(z2_chart, z2_modes, seed, fine, coarse):
    fine, coarse = sorted((fine, coarse))
    a = random_element(z2_chart, np.random.RandomState(seed))
    first = RGState(z2_modes, fine)
    second = RGState(z2_modes, coarse)
    twice = rg_filter(second, rg_filter(first, a))
    assert norm(z2_modes, twice - rg_filter(second, a)) <= TOL
    assert all(
        x >= y for x, y in zip(first.retained_counts(), second.retained_counts())
    )


@pytest.mark.parametrize("c", [0, 1])
def test_filter_commutes_with_sector_projection(z2_chart, z2_modes, rng, c):
    a = random_element(z2_chart, rng)
    state = RGState(z2_modes, 0.7)
    lhs = rg_filter(state, sector_project(a, c, z2_chart))
    rhs = sector_project(rg_filter(state, a), c, z2_chart)
    assert norm(z2_modes, lhs - rhs) <= TOL


@pytest.mark.parametrize("scale", [0.05, 0.5, 1.0, 5.0, 50.0])
def test_idempotents_are_fixed(klein_chart, klein_modes, scale):
    state = RGState(klein_modes, scale)
    assert idempotent_defect(state, klein_chart) <= TOL


def test_full_retention_is_multiplicative(trivial_chart, trivial_modes, rng):
    # Λ = 5 exceeds λ_max = 4
    state = RGState(trivial_modes, 0.2)
    assert state.retained_counts() == (8,)
    a = random_element(trivial_chart, rng)
    b = random_element(trivial_chart, rng)
    assert multiplicativity_defect(state, a, b) <= TOL
    assert module_defect(state, a, b) <= TOL


def test_truncation_breaks_multiplicativity(trivial_chart, trivial_modes, rng):
    state = RGState(trivial_modes, 1.0)
    assert state.retained_counts() == (3,)
    a = random_element(trivial_chart, rng)
    b = random_element(trivial_chart, rng)
    assert multiplicativity_defect(state, a, b) > 1e-6


@pytest.mark.parametrize("scale", [0.2, 1.0, 10.0])
def test_unit_compresses_to_identity(z2_chart, z2_modes, scale):
    state = RGState(z2_modes, scale)
    compressed = rg_compress(state, unit(z2_chart))
    size = sum(state.retained_counts())
    assert compressed.shape == (size, size)
    assert np.allclose(compressed, np.eye(size), atol=TOL)


def test_compress_is_block_diagonal(z2_chart, z2_modes, rng):
    state = RGState(z2_modes, 0.2)
    compressed = rg_compress(state, random_element(z2_chart, rng))
    n0, n1 = state.retained_counts()
    assert not compressed[:n0, n0:].any()
    assert not compressed[n0:, :n0].any()
    assert n0 + n1 == 10


def test_fusion_commutation_at_full_retention(z2_chart, z2_modes, rng):
    state = RGState(z2_modes, 0.2)
    a = random_element(z2_chart, rng)
    b = random_element(z2_chart, rng)
    assert fusion_commutation_defect(state, a, b, z2_chart) <= TOL
    e = fusion_unit(z2_chart)
    assert fusion_commutation_defect(RGState(z2_modes, 3.0), e, e, z2_chart) <= TOL


def test_rg_state_rejects_bad_input(z2_modes, trivial_modes, z2_chart):
    with pytest.raises(DomainError):
        RGState(z2_modes, 0.0)
    with pytest.raises(DomainError):
        RGState(z2_modes, -1.0)
    with pytest.raises(ChartMismatchError):
        rg_filter(RGState(trivial_modes, 1.0), unit(z2_chart))


def test_rg_state_rejects_continuum():
    group = preset_group("trivial")
    space = sphere(3)
    modes = build_mode_basis(sector_chart(space, identity_action(space, group), group))
    with pytest.raises(DomainError):
        RGState(modes, 1.0)


def test_cutoff_is_inverse_scale(z2_modes):
    state = RGState(z2_modes, 4.0)
    assert state.cutoff == 0.25
    # the twisted locus has two disconnected points, both zero modes
    assert state.retained_counts() == (1, 2)


def test_beta_estimate(z2_chart, z2_modes, rng):
    assert beta_estimate(z2_modes, unit(z2_chart), 1.0, 0.1).max_abs() <= 1e-9
    a = random_element(z2_chart, rng)
    # both scales keep every mode
    assert beta_estimate(z2_modes, a, 0.1, 0.01).max_abs() <= 1e-9
    with pytest.raises(DomainError):
        beta_estimate(z2_modes, a, 1.0, 0.0)


def test_is_rg_fixed(z2_chart, z2_modes, rng):
    verdict = is_rg_fixed(z2_modes, unit(z2_chart), [0.1, 1.0, 10.0])
    assert verdict.fixed
    assert verdict.witness is None

    a = random_element(z2_chart, rng)
    verdict = is_rg_fixed(z2_modes, a, [0.1, 10.0])
    assert not verdict.fixed
    assert verdict.witness == 10.0
    assert verdict.deviation > 1e-9

    with pytest.raises(DomainError):
        is_rg_fixed(z2_modes, a, [])


def test_default_scale_grid(trivial_modes):
    grid = default_scale_grid(trivial_modes)
    assert len(grid) == 33
    assert grid[0] == pytest.approx(0.125)
    assert grid[-1] == pytest.approx(2.0 / (2.0 - np.sqrt(2.0)))
    assert (np.diff(grid) > 0).all()


def test_flow_sweep(z2_chart, z2_modes, rng):
    a = random_element(z2_chart, rng)
    b = random_element(z2_chart, rng)
    report = flow_sweep(z2_modes, z2_chart, [10.0, 0.2, 1.0], a, b, workers=2)
    assert report.scales == [0.2, 1.0, 10.0]
    assert list(report.fixed) == ["e[0]", "e[1]", "unit", "sample"]
    assert report.fixed["e[1]"].fixed
    assert not report.fixed["sample"].fixed
    for row in report.rows:
        assert row.idempotent <= TOL
    assert report.rows[0].multiplicativity <= TOL
    assert len(report.headers()) == 2 + 2 + 4
    table = list(report.table())
    assert len(table) == 3
    assert table[0][2:4] == (8, 2)


def test_flow_sweep_serializable(z2_chart, z2_modes):
    e = idempotent(z2_chart, 1)
    report = flow_sweep(z2_modes, z2_chart, [1.0], e, e)
    data = report.to_serializable()
    assert data["labels"] == ["[0]", "[1]"]
    assert data["rows"][0]["retained"] == [3, 2]
    assert data["fixed"]["sample"]["fixed"] is True


def cycle_laplacian(n):
    eye = np.eye(n)
    return 2 * eye - np.roll(eye, 1, axis=0) - np.roll(eye, -1, axis=0)


def fourier_window(n, k):
    """Unit-norm cos and sin of frequency k on the n-cycle."""
    x = 2 * np.pi * k * np.arange(n) / n
    return [np.cos(x) / np.sqrt(n / 2.0), np.sin(x) / np.sqrt(n / 2.0)]


def test_filter_delta_matches_eigenexpansion(trivial_chart, trivial_modes):
    delta = np.zeros(8)
    delta[0] = 1.0
    state = RGState(trivial_modes, 1.0)
    filtered = rg_filter(state, from_components(trivial_chart, [delta]))

    values, vectors = np.linalg.eigh(cycle_laplacian(8))
    kept = vectors[:, values <= 1.0]
    assert kept.shape[1] == 3
    expected = kept.dot(kept.T).dot(delta)
    assert np.abs(filtered[0] - expected).max() <= TOL
    # 1/8 + cos(πp/4)/4
    closed_form = 0.125 + 0.25 * np.cos(np.pi * np.arange(8) / 4)
    assert np.abs(filtered[0] - closed_form).max() <= TOL


def test_compress_trace_sums_retained_modes(z2_chart, z2_modes, rng):
    a = random_element(z2_chart, rng)
    for scale in (0.2, 1.0, 4.0):
        state = RGState(z2_modes, scale)
        expected = 0.0
        for c, comp in enumerate(a.components):
            sector = z2_modes[c]
            for i in range(state.retained_counts()[c]):
                v = sector.vectors[:, i]
                expected += v.dot(sector.weights * comp * v)
        assert abs(np.trace(rg_compress(state, a)) - expected) <= TOL


def test_compress_trace_closed_form(trivial_chart, trivial_modes, rng):
    # modes 1, cos(πp/4), sin(πp/4) give a weight of 1/8 + 1/4 at every point
    a = random_element(trivial_chart, rng)
    state = RGState(trivial_modes, 1.0)
    assert abs(np.trace(rg_compress(state, a)) - 0.375 * a[0].sum()) <= TOL


def test_beta_estimate_removes_the_crossed_cluster(trivial_chart, trivial_modes, rng):
    # Λ moves from 1 to 1/2, dropping the cluster at 2 − √2
    a = random_element(trivial_chart, rng)
    estimate = beta_estimate(trivial_modes, a, 1.0, 1.0)
    window = sum(u * u.dot(a[0]) for u in fourier_window(8, 1))
    assert np.abs(estimate[0] + window).max() <= TOL

    # Λ = 5/2 down to 1/2 drops the clusters at 2 − √2 and 2; ℓ/δℓ = 1/4
    estimate = beta_estimate(trivial_modes, a, 0.4, 1.6)
    wider = window + sum(u * u.dot(a[0]) for u in fourier_window(8, 2))
    assert np.abs(estimate[0] + 0.25 * wider).max() <= TOL


@pytest.mark.parametrize("name", graph_scenarios())
def test_multiplicativity_defect_vanishes_above_spectrum(name):
    chart = load_scenario(name).chart()
    modes = build_mode_basis(chart)
    rng = np.random.RandomState(7)
    a = random_element(chart, rng, complex_values=True)
    b = random_element(chart, rng, complex_values=True)
    state = RGState(modes, 0.5 / max(modes.max_eigenvalue(), 1.0))
    assert state.retained_counts() == chart.sizes
    assert multiplicativity_defect(state, a, b) <= TOL


def test_multiplicativity_defect_not_monotone(trivial_chart, trivial_modes):
    # a·b = 0 pointwise, but the three-mode compressions do not multiply to 0
    a = from_components(trivial_chart, [np.array([1, 0, -1, 0, 1, 0, -1, 0], dtype=float)])
    b = from_components(trivial_chart, [np.array([0, 1, 0, -1, 0, 1, 0, -1], dtype=float)])
    defects = []
    for cutoff, retained in [(0.3, (1,)), (1.0, (3,)), (5.0, (8,))]:
        state = RGState(trivial_modes, 1.0 / cutoff)
        assert state.retained_counts() == retained
        defects.append(multiplicativity_defect(state, a, b))
    assert defects[0] <= TOL
    assert defects[1] == pytest.approx(0.25, abs=TOL)
    assert defects[2] <= TOL
