import os
import platform
import shutil
from os.path import dirname, exists, expanduser

from configobj import ConfigObj

from .errors import DomainError


def config_location():
    if "XDG_CONFIG_HOME" in os.environ:
        return "%s/orbicli/" % expanduser(os.environ["XDG_CONFIG_HOME"])
    elif platform.system() == "Windows":
        return os.getenv("USERPROFILE") + "\\AppData\\Local\\orbicli\\"
    else:
        return expanduser("~/.config/orbicli/")


def load_config(usr_cfg, def_cfg=None):
    cfg = ConfigObj()
    cfg.merge(ConfigObj(def_cfg, interpolation=False))
    cfg.merge(ConfigObj(expanduser(usr_cfg), interpolation=False, encoding="utf-8"))
    cfg.filename = expanduser(usr_cfg)

    return cfg


def ensure_dir_exists(path):
    parent_dir = expanduser(dirname(path))
    os.makedirs(parent_dir, exist_ok=True)


def write_default_config(source, destination, overwrite=False):
    destination = expanduser(destination)
    if not overwrite and exists(destination):
        return

    ensure_dir_exists(destination)

    shutil.copyfile(source, destination)


def get_config(orbiclirc_file=None):
    from orbicli import __file__ as package_root

    package_root = os.path.dirname(package_root)

    orbiclirc_file = orbiclirc_file or "%sconfig" % config_location()

    default_config = os.path.join(package_root, "orbiclirc")
    write_default_config(default_config, orbiclirc_file)

    return load_config(orbiclirc_file, default_config)


def get_log_file(config):
    log_file = config["main"]["log_file"]
    if log_file == "default":
        log_file = config_location() + "log"
    return log_file


# [numerics] keys and the configobj converter for each; scenario options use
# the same names.
NUMERIC_SETTINGS = (
    ("cluster_tolerance", "as_float"),
    ("fixed_tolerance", "as_float"),
    ("symmetry_tolerance", "as_float"),
    ("max_sector_dimension", "as_int"),
    ("h2_candidate_limit", "as_int"),
    ("scale_grid_points", "as_int"),
    ("beta_grid_points", "as_int"),
)


def numeric_settings(config):
    """The [numerics] section converted to Python numbers."""
    section = config["numerics"]
    settings = {}
    for name, converter in NUMERIC_SETTINGS:
        try:
            settings[name] = getattr(section, converter)(name)
        except ValueError:
            raise DomainError(
                "[numerics] %s is not a number: %r" % (name, section[name])
            )
    return settings
