"""Scenario files: loading, validation and bundled presets.

A scenario is a JSON document naming a group, a space, an action and the
numerical options of a run. Loading collects every problem it finds and
raises them together in one ScenarioError.
"""

import hashlib
import json
import logging
import os
from collections import OrderedDict

import numpy as np

from .errors import DomainError, ScenarioError
from .packages.group import FiniteGroupTable, preset_group, validate_group
from .packages.space import (
    GroupAction,
    analytic_space,
    explicit_space,
    identity_action,
    preset_action,
    sector_chart,
    validate_action,
)

_logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

root = os.path.join(os.path.dirname(__file__), "packages", "scenarios")

TOP_LEVEL_KEYS = ("schema", "name", "description", "group", "space", "action", "options")
REQUIRED_KEYS = ("schema", "name", "group", "space")
ANALYTIC_PARAMS = {
    "circle": "n",
    "torus": "n",
    "sphere": "l_max",
    "flat_torus": "k_max",
}
OPTION_KEYS = (
    "cluster_tolerance",
    "fixed_tolerance",
    "scale_grid",
    "beta_grid",
    "heat_window",
    "heat_dimension",
    "toy_truncation",
    "cohomology_modulus",
)


class Scenario(object):
    def __init__(self, name, group, space, action, options, data, source=None):
        self.name = name
        self.group = group
        self.space = space
        self.action = action
        self.options = options
        self.data = data
        self.source = source

    @property
    def description(self):
        return self.data.get("description", "")

    @property
    def hash(self):
        return scenario_hash(self.data)

    def chart(self):
        return sector_chart(self.space, self.action, self.group)

    def settings(self, numerics):
        """The [numerics] config values with this scenario's options on top."""
        merged = dict(numerics)
        merged.update(self.options)
        return merged

    def __repr__(self):
        return "Scenario(%r)" % self.name


def canonical_json(data):
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def scenario_hash(data):
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def bundled_names():
    return sorted(
        os.path.splitext(f)[0] for f in os.listdir(root) if f.endswith(".json")
    )


def bundled_path(name):
    return os.path.join(root, name + ".json")


def resolve_path(path_or_name):
    """A file path, or the name of a bundled scenario."""
    if os.path.exists(path_or_name):
        return path_or_name
    if path_or_name in bundled_names():
        return bundled_path(path_or_name)
    raise IOError("No such scenario file or bundled scenario: %r" % path_or_name)


def load_scenario(path_or_name):
    path = resolve_path(path_or_name)
    _logger.debug("Loading scenario %r.", path)
    with open(path) as f:
        try:
            data = json.load(f, object_pairs_hook=OrderedDict)
        except ValueError as e:
            raise ScenarioError(["parse error: %s" % e], source=path)
    return parse_scenario(data, source=path)


def parse_scenario(data, source=None):
    violations = []
    if not isinstance(data, dict):
        raise ScenarioError(["top level must be a JSON object"], source)

    for key in data:
        if key not in TOP_LEVEL_KEYS:
            violations.append("unknown key %r" % key)
    for key in REQUIRED_KEYS:
        if key not in data:
            violations.append("missing required key %r" % key)
    if "schema" in data and data["schema"] != SCHEMA_VERSION:
        violations.append(
            "schema must be %d, got %r" % (SCHEMA_VERSION, data["schema"])
        )
    name = data.get("name")
    if "name" in data and not (isinstance(name, str) and name):
        violations.append("name must be a non-empty string")

    group = _parse_group(data["group"], violations) if "group" in data else None
    space = _parse_space(data["space"], violations) if "space" in data else None
    options = _parse_options(data.get("options", {}), violations)

    action = None
    if group is not None and space is not None:
        if space.is_continuum() and group.order != 1:
            violations.append(
                "space %r only supports the trivial group, got order %d"
                % (space.tag, group.order)
            )
        else:
            action = _parse_action(data.get("action"), space, group, violations)

    if violations:
        raise ScenarioError(violations, source)
    return Scenario(name, group, space, action, options, data, source)


def _parse_group(node, violations):
    if isinstance(node, str):
        try:
            return preset_group(node)
        except DomainError as e:
            violations.append("group: %s" % e)
            return None
    if not isinstance(node, dict):
        violations.append("group must be a preset name or {order, table}")
        return None
    for key in node:
        if key not in ("name", "order", "table"):
            violations.append("group: unknown key %r" % key)
    if "table" not in node:
        violations.append("group: missing 'table'")
        return None
    try:
        group = FiniteGroupTable(node["table"], name=node.get("name"))
    except (TypeError, ValueError) as e:
        violations.append("group: table is not an integer array (%s)" % e)
        return None
    if "order" in node and node["order"] != group.order:
        violations.append(
            "group: order is %r but the table has %d rows" % (node["order"], group.order)
        )
    report = validate_group(group)
    if not report.passed:
        violations.append("group: %s" % report.message)
        return None
    return group


def _parse_space(node, violations):
    if not isinstance(node, dict):
        violations.append("space must be an object")
        return None
    if "analytic" in node:
        tag = node["analytic"]
        if tag not in ANALYTIC_PARAMS:
            violations.append(
                "space: unknown analytic tag %r (known: %s)"
                % (tag, ", ".join(ANALYTIC_PARAMS))
            )
            return None
        param = ANALYTIC_PARAMS[tag]
        for key in node:
            if key not in ("analytic", param):
                violations.append("space: unknown key %r for tag %r" % (key, tag))
        value = node.get(param)
        if not isinstance(value, int) or isinstance(value, bool):
            violations.append("space: %s must be an integer" % param)
            return None
        try:
            return analytic_space(tag, **{param: value})
        except DomainError as e:
            violations.append("space: %s" % e)
            return None
    for key in node:
        if key not in ("points", "edges"):
            violations.append("space: unknown key %r" % key)
    if "points" not in node:
        violations.append("space: needs either 'analytic' or 'points'")
        return None
    try:
        return explicit_space(node["points"], node.get("edges", []))
    except DomainError as e:
        violations.append("space: %s" % e)
    except (TypeError, ValueError, IndexError) as e:
        violations.append("space: malformed points or edges (%s)" % e)
    return None


def _parse_action(node, space, group, violations):
    if node is None:
        if group.order == 1 or space.is_continuum():
            return identity_action(space, group)
        violations.append("action is required for a group of order %d" % group.order)
        return None
    if isinstance(node, str):
        try:
            action = preset_action(node, space, group)
        except DomainError as e:
            violations.append("action: %s" % e)
            return None
    elif isinstance(node, dict):
        for key in node:
            if key != "perms":
                violations.append("action: unknown key %r" % key)
        try:
            action = GroupAction(node["perms"])
        except KeyError:
            violations.append("action: missing 'perms'")
            return None
        except (TypeError, ValueError) as e:
            violations.append("action: perms are not an integer array (%s)" % e)
            return None
    else:
        violations.append("action must be a preset name or {perms}")
        return None
    report = validate_action(space, action, group)
    if not report.passed:
        violations.append("action: %s" % report.message)
        return None
    return action


def _positive_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool) and value > 0


def _nonnegative_int(value):
    return isinstance(value, int) and not isinstance(value, bool) and value >= 0


def _parse_grid(name, node, allowed, violations):
    if isinstance(node, list):
        if not node or not all(_positive_number(v) for v in node):
            violations.append("options: %s must be a non-empty list of positive numbers" % name)
            return None
        return [float(v) for v in node]
    if isinstance(node, dict):
        bad = [k for k in node if k not in allowed]
        for key in bad:
            violations.append("options: %s has unknown key %r" % (name, key))
        if "points" in node and not (
            _nonnegative_int(node["points"]) and node["points"] >= 2
        ):
            violations.append("options: %s.points must be an integer >= 2" % name)
            return None
        for key in ("start", "stop"):
            if key in node and not _positive_number(node[key]):
                violations.append("options: %s.%s must be positive" % (name, key))
                return None
        if ("start" in node) != ("stop" in node):
            violations.append("options: %s needs both start and stop" % name)
            return None
        if bad:
            return None
        if "start" in node:
            return np.geomspace(
                node["start"], node["stop"], node.get("points", 33)
            ).tolist()
        return OrderedDict(node)
    violations.append("options: %s must be a list or an object" % name)
    return None


def _parse_options(node, violations):
    if not isinstance(node, dict):
        violations.append("options must be an object")
        return {}
    options = {}
    for key, value in node.items():
        if key not in OPTION_KEYS:
            violations.append("options: unknown key %r" % key)
        elif key in ("cluster_tolerance", "fixed_tolerance"):
            if _positive_number(value):
                options[key] = float(value)
            else:
                violations.append("options: %s must be a positive number" % key)
        elif key == "scale_grid":
            grid = _parse_grid(key, value, ("points",), violations)
            if isinstance(grid, dict):
                options["scale_grid_points"] = grid.get("points", 33)
            elif grid is not None:
                options[key] = grid
        elif key == "beta_grid":
            grid = _parse_grid(key, value, ("start", "stop", "points"), violations)
            if isinstance(grid, dict):
                options["beta_grid_points"] = grid.get("points", 33)
            elif grid is not None:
                options[key] = grid
        elif key == "heat_window":
            if (
                isinstance(value, list)
                and len(value) == 2
                and all(_positive_number(v) for v in value)
                and value[0] < value[1]
            ):
                options[key] = (float(value[0]), float(value[1]))
            else:
                violations.append("options: heat_window must be [lo, hi] with 0 < lo < hi")
        elif key == "heat_dimension":
            if _nonnegative_int(value) and value > 0:
                options[key] = value
            else:
                violations.append("options: heat_dimension must be a positive integer")
        elif key == "toy_truncation":
            if _nonnegative_int(value):
                options[key] = value
            else:
                violations.append("options: toy_truncation must be a nonnegative integer")
        elif key == "cohomology_modulus":
            if _nonnegative_int(value) and value > 0:
                options[key] = value
            else:
                violations.append("options: cohomology_modulus must be a positive integer")
    return options
