import logging
import os
import sys

import click
import humanize
from cli_helpers.tabular_output import TabularOutputFormatter

from . import __version__
from .config import ensure_dir_exists, get_config, get_log_file, numeric_settings
from .errors import OrbiError
from .orbiexecute import OrbiExecute
from .packages.group import preset_group, preset_names
from .packages.space import action_fits, action_names
from .report import emit
from .scenario import bundled_names, load_scenario


class OrbiCli(object):
    def __init__(self, orbiclirc_file=None, log_level=None):
        self.config = get_config(orbiclirc_file)
        c = self.config
        if log_level:
            c["main"]["log_level"] = log_level
        self.table_format = c["main"]["table_format"]
        self.output_dir = c["main"]["output_dir"]
        self.workers = max(1, c["main"].as_int("workers"))
        self.seed = c["main"].as_int("seed")
        self.numerics = numeric_settings(c)

        self.logger = logging.getLogger(__name__)
        self.initialize_logging()

    def initialize_logging(self):

        log_file = get_log_file(self.config)
        ensure_dir_exists(log_file)
        log_level = self.config["main"]["log_level"]

        # Disable logging if value is NONE by switching to a no-op handler.
        # Set log level to a high value so it doesn't even waste cycles getting called.
        if log_level.upper() == "NONE":
            handler = logging.NullHandler()
        else:
            handler = logging.FileHandler(os.path.expanduser(log_file))

        level_map = {
            "CRITICAL": logging.CRITICAL,
            "ERROR": logging.ERROR,
            "WARNING": logging.WARNING,
            "INFO": logging.INFO,
            "DEBUG": logging.DEBUG,
            "NONE": logging.CRITICAL,
        }

        log_level = level_map[log_level.upper()]

        formatter = logging.Formatter(
            "%(asctime)s (%(process)d/%(threadName)s) "
            "%(name)s %(levelname)s - %(message)s"
        )

        handler.setFormatter(formatter)

        root_logger = logging.getLogger("orbicli")
        root_logger.addHandler(handler)
        root_logger.setLevel(log_level)

        root_logger.debug("Initializing orbicli logging.")
        root_logger.debug("Log file %r.", log_file)

    def validate(self, scenario_file):
        scenario = load_scenario(scenario_file)
        chart = scenario.chart()
        self.logger.info("Scenario %s is valid.", scenario.name)
        return scenario, chart

    def run(self, scenario_file, stages=None, out=None, fmt="json"):
        scenario = load_scenario(scenario_file)
        executor = OrbiExecute(
            scenario, self.numerics, workers=self.workers, seed=self.seed
        )

        def report_stage(name, elapsed, notice):
            if notice:
                click.secho(notice, fg="yellow")
            elif elapsed > 1:
                click.echo(
                    "Stage %s done in %s." % (name, humanize.naturaldelta(elapsed))
                )
            else:
                click.echo("Stage %s done." % name)

        report = executor.run(stages, callback=report_stage)
        for notice in report.notices:
            self.logger.info(notice)
        return emit(report, out or self.output_dir, fmt)

    def preset_rows(self):
        rows = []
        for name in preset_names():
            group = preset_group(name)
            rows.append(("group", name, "order %d" % group.order))
        for name in action_names():
            spaces, groups = action_fits(name)
            rows.append(
                (
                    "action",
                    name,
                    "%s on %s"
                    % (
                        ", ".join(groups) if groups else "any group",
                        ", ".join(spaces) if spaces else "any space",
                    ),
                )
            )
        for name in bundled_names():
            scenario = load_scenario(name)
            rows.append(("scenario", name, scenario.description))
        return rows

    def format_presets(self):
        formatter = TabularOutputFormatter(format_name=self.table_format)
        formatted = formatter.format_output(
            self.preset_rows(), ["kind", "name", "details"]
        )
        if isinstance(formatted, str):
            formatted = iter(formatted.splitlines())
        return list(formatted)


def _fail(error):
    click.secho(str(error), err=True, fg="red")
    sys.exit(error.exit_code)


def _guarded(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except OrbiError as e:
        _fail(e)
    except (IOError, OSError) as e:
        click.secho(str(e), err=True, fg="red")
        sys.exit(4)


def _split_stages(ctx, param, value):
    if not value:
        return None
    names = [s.strip() for part in value for s in part.split(",") if s.strip()]
    unknown = [n for n in names if n not in OrbiExecute.stages]
    if unknown:
        raise click.BadParameter(
            "unknown stage(s) %s; choose from %s"
            % (", ".join(unknown), ", ".join(OrbiExecute.stages))
        )
    return names


@click.group()
@click.option(
    "--orbiclirc",
    default=None,
    envvar="ORBICLIRC",
    help="Location of orbiclirc file.",
    type=click.Path(dir_okay=False),
)
@click.option(
    "--log-level",
    default=None,
    type=click.Choice(["CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG", "NONE"]),
    help="Override the log level from the config file.",
)
@click.version_option(__version__, "-v", "--version", prog_name="orbicli")
@click.pass_context
def cli(ctx, orbiclirc, log_level):
    """Numerical lab for orbifold algebras on discretized spaces."""
    ctx.obj = _guarded(OrbiCli, orbiclirc_file=orbiclirc, log_level=log_level)


@cli.command()
@click.argument("scenario")
@click.pass_obj
def validate(orbicli, scenario):
    """Load and check SCENARIO (a path or a bundled name)."""
    loaded, chart = _guarded(orbicli.validate, scenario)
    click.echo(
        "%s: valid, %d sectors (%s)."
        % (
            loaded.name,
            len(chart),
            ", ".join("%s:%d" % pair for pair in chart.key),
        )
    )


@cli.command()
@click.argument("scenario")
@click.option(
    "--stages",
    multiple=True,
    callback=_split_stages,
    help="Comma separated stages to run (dependencies are added). Default: all.",
)
@click.option(
    "--out",
    default=None,
    envvar="ORBICLI_OUTDIR",
    type=click.Path(file_okay=False),
    help="Output directory. Default: output_dir from the config.",
)
@click.option(
    "--format",
    "fmt",
    default="json",
    type=click.Choice(["json", "csv"]),
    help="json writes one report file, csv a bundle with a manifest.",
)
@click.pass_obj
def run(orbicli, scenario, stages, out, fmt):
    """Run the pipeline on SCENARIO and write the report."""
    written = _guarded(orbicli.run, scenario, stages=stages, out=out, fmt=fmt)
    for path in written:
        click.echo("Wrote %s" % path)


@cli.group()
def presets():
    """Inspect built-in groups, actions and scenarios."""


@presets.command("list")
@click.pass_obj
def list_presets(orbicli):
    """List preset groups, actions and bundled scenarios."""
    click.echo("\n".join(orbicli.format_presets()))


if __name__ == "__main__":
    cli()
