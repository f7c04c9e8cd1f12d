import numpy as np

from orbicli.packages.group import preset_group
from orbicli.packages.space import (
    circle,
    preset_action,
    sector_chart,
    torus,
)
from orbicli.scenario import bundled_names, load_scenario

# (group, space builder, size, action) for every preset pairing
ORBIFOLDS = [
    ("trivial", circle, 8, "identity"),
    ("Z2", circle, 8, "reflection"),
    ("Z2", circle, 8, "rotation"),
    ("Z3", circle, 6, "rotation"),
    ("Z4", circle, 8, "rotation"),
    ("Z2", torus, 4, "negation"),
    ("Z4", torus, 4, "quarter_turn"),
    ("Z2xZ2", torus, 4, "negate_swap"),
    ("S3", circle, 3, "permutation"),
]

ABELIAN_ORBIFOLDS = [o for o in ORBIFOLDS if o[0] != "S3"]


def make_chart(group_name, builder, n, action_name):
    group = preset_group(group_name)
    space = builder(n)
    return sector_chart(space, preset_action(action_name, space, group), group)


def orbifold_id(orbifold):
    group_name, builder, n, action_name = orbifold
    return "%s-%s%d-%s" % (group_name, builder.__name__, n, action_name)


def graph_scenarios():
    """Bundled scenarios with locus vectors (no continuum spectra)."""
    out = []
    for name in bundled_names():
        scenario = load_scenario(name)
        if not scenario.space.is_continuum():
            out.append(name)
    return out


def assert_close(actual, expected, tol):
    assert np.abs(np.asarray(actual) - np.asarray(expected)).max() <= tol
