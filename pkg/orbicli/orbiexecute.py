import logging
import time
from collections import OrderedDict, namedtuple

import numpy as np

from . import __version__
from .errors import DomainError, HeatFitError
from .packages.algebra import random_element
from .packages.group import h2_brute_force
from .packages.observables import heat_fit, partition_table, smooth_limit_compare
from .packages.rgflow import default_scale_grid, flow_sweep
from .packages.spectral import build_mode_basis
from .packages.toymodel import toy_cross_check

_logger = logging.getLogger(__name__)

Stage = namedtuple("Stage", "name depends function")

DEFAULT_BETA_RANGE = (1e-2, 1e1)


class StageSkipped(Exception):
    """Raised by a stage that has nothing to do for this scenario."""


class RunReport(object):
    """Stage payloads in execution order, plus the objects CSV emission needs."""

    def __init__(self, scenario):
        self.scenario = scenario
        self.stages = OrderedDict()
        self.notices = []
        self.modes = None
        self.flow = None
        self.partition = None

    def to_serializable(self):
        return OrderedDict(
            [
                ("tool", OrderedDict([("name", "orbicli"), ("version", __version__)])),
                (
                    "scenario",
                    OrderedDict(
                        [("name", self.scenario.name), ("hash", self.scenario.hash)]
                    ),
                ),
                ("stages", self.stages),
            ]
        )


class OrbiExecute(object):
    """Runs the requested stages of a scenario in dependency order."""

    stages = OrderedDict()

    def __init__(self, scenario, numerics, workers=1, seed=0):
        self.scenario = scenario
        self.settings = scenario.settings(numerics)
        self.workers = workers
        self.seed = seed
        self.chart = None
        self.modes = None

    @classmethod
    def resolve(cls, requested=None):
        """Requested stage names plus their dependencies, in registry order."""
        if requested is None:
            requested = list(cls.stages)
        wanted = set()

        def visit(name):
            if name not in cls.stages:
                raise DomainError(
                    "Unknown stage %r. Known stages: %s" % (name, ", ".join(cls.stages))
                )
            if name in wanted:
                return
            wanted.add(name)
            for dep in cls.stages[name].depends:
                visit(dep)

        for name in requested:
            visit(name)
        return [name for name in cls.stages if name in wanted]

    def run(self, requested=None, callback=None):
        """Execute stages; *callback(name, seconds, notice)* follows each one."""
        report = RunReport(self.scenario)
        for name in self.resolve(requested):
            stage = self.stages[name]
            _logger.debug("Entering stage %s.", name)
            start = time.time()
            notice = None
            try:
                payload = stage.function(self, report)
            except StageSkipped as e:
                notice = "Stage %s skipped: %s" % (name, e)
                _logger.debug(notice)
                report.notices.append(notice)
                payload = OrderedDict([("skipped", str(e))])
            elapsed = time.time() - start
            payload["provenance"] = OrderedDict(
                [
                    ("stage", name),
                    ("depends_on", list(stage.depends)),
                    ("options", self._options_for(name)),
                ]
            )
            report.stages[name] = payload
            _logger.debug("Leaving stage %s after %.3fs.", name, elapsed)
            if callback:
                callback(name, elapsed, notice)
        return report

    _stage_options = {
        "sectors": (),
        "spectra": ("cluster_tolerance", "symmetry_tolerance", "max_sector_dimension"),
        "flow": ("fixed_tolerance", "scale_grid", "scale_grid_points"),
        "observables": ("beta_grid", "beta_grid_points", "heat_window", "heat_dimension"),
        "toy": ("toy_truncation",),
        "cohomology": ("cohomology_modulus", "h2_candidate_limit"),
    }

    def _options_for(self, name):
        keys = self._stage_options.get(name, ())
        return OrderedDict(
            (key, _plain_option(self.settings[key]))
            for key in keys
            if key in self.settings
        )


def _plain_option(value):
    if isinstance(value, tuple):
        return list(value)
    return value


def stage(name, depends=(), stages=OrbiExecute.stages):
    """Decorator to register a pipeline stage under *name*."""

    def wrapper(wrapped):
        stages[name] = Stage(name, tuple(depends), wrapped)
        return wrapped

    return wrapper


@stage("sectors")
def run_sectors(executor, report):
    scenario = executor.scenario
    chart = scenario.chart()
    executor.chart = chart
    return OrderedDict(
        [
            ("group", scenario.group.name or "explicit"),
            ("order", scenario.group.order),
            ("abelian", scenario.group.is_abelian()),
            ("space", repr(scenario.space)),
            ("classes", chart.summary()),
            ("warnings", list(chart.warnings)),
        ]
    )


@stage("spectra", depends=("sectors",))
def run_spectra(executor, report):
    settings = executor.settings
    modes = build_mode_basis(
        executor.chart,
        rel_tol=settings["cluster_tolerance"],
        sym_tol=settings["symmetry_tolerance"],
        max_dimension=settings["max_sector_dimension"],
        workers=executor.workers,
    )
    executor.modes = report.modes = modes
    sectors = []
    for s in modes:
        sectors.append(
            OrderedDict(
                [
                    ("class", s.label),
                    ("modes", s.dimension),
                    ("invariant_modes", s.invariant_count()),
                    ("clusters", len(s.cluster_values)),
                    ("lowest", float(s.cluster_values[0]) if len(s.cluster_values) else None),
                    ("highest", float(s.cluster_values[-1]) if len(s.cluster_values) else None),
                ]
            )
        )
    return OrderedDict(
        [
            ("digest", modes.digest()),
            ("continuum", modes.is_continuum()),
            ("sectors", sectors),
        ]
    )


@stage("flow", depends=("spectra",))
def run_flow(executor, report):
    modes = executor.modes
    if modes.is_continuum():
        raise StageSkipped("continuum spectra carry no locus vectors to filter")
    settings = executor.settings
    grid = settings.get("scale_grid")
    if grid is None:
        grid = default_scale_grid(modes, settings["scale_grid_points"])
    rng = np.random.RandomState(executor.seed)
    a = random_element(executor.chart, rng)
    b = random_element(executor.chart, rng)
    flow = flow_sweep(
        modes,
        executor.chart,
        grid,
        a,
        b,
        tol=settings["fixed_tolerance"],
        workers=executor.workers,
    )
    report.flow = flow
    payload = flow.to_serializable()
    payload["seed"] = executor.seed
    return payload


def beta_grid(settings):
    if "beta_grid" in settings:
        return settings["beta_grid"]
    lo, hi = settings.get("heat_window", DEFAULT_BETA_RANGE)
    return np.geomspace(lo, hi, settings["beta_grid_points"]).tolist()


@stage("observables", depends=("spectra",))
def run_observables(executor, report):
    settings = executor.settings
    scenario = executor.scenario
    betas = beta_grid(settings)
    table = partition_table(executor.modes, betas, workers=executor.workers)
    report.partition = table
    payload = OrderedDict([("partition", table.to_serializable())])

    limit = smooth_limit_compare(
        scenario.space,
        scenario.action,
        scenario.group,
        betas,
        rel_tol=settings["cluster_tolerance"],
    )
    payload["smooth_limit"] = OrderedDict(
        [
            ("untwisted", limit.untwisted),
            ("plain", limit.plain),
            ("max_difference", limit.max_difference),
            ("agree", limit.agree),
        ]
    )

    if "heat_window" in settings:
        try:
            fit = heat_fit(
                table, settings.get("heat_dimension", 2), settings["heat_window"]
            )
        except HeatFitError as e:
            report.notices.append("Heat fit rejected: %s" % e)
            payload["heat_fit"] = OrderedDict([("rejected", str(e))])
        else:
            payload["heat_fit"] = OrderedDict(zip(fit._fields, fit))
    return payload


@stage("toy")
def run_toy(executor, report):
    N = executor.settings.get("toy_truncation")
    if N is None:
        raise StageSkipped("scenario sets no toy_truncation")
    check = toy_cross_check(N, seed=executor.seed)
    return OrderedDict([("toymodel", check.to_serializable())])


@stage("cohomology")
def run_cohomology(executor, report):
    m = executor.settings.get("cohomology_modulus")
    if m is None:
        raise StageSkipped("scenario sets no cohomology_modulus")
    summary = h2_brute_force(
        executor.scenario.group, m, candidate_limit=executor.settings["h2_candidate_limit"]
    )
    return OrderedDict(
        [
            ("m", summary.m),
            ("cocycles", summary.cocycle_count),
            ("coboundaries", summary.coboundary_count),
            ("classes", summary.class_count),
            ("representatives", [r.values.tolist() for r in summary.representatives]),
        ]
    )
