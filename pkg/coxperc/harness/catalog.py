import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from importlib import resources
from pathlib import Path
from typing import Union

from coxperc.harness.config import ExperimentConfig, load_config
from coxperc.harness.exceptions import UnknownPreset

__all__ = ("list_presets", "preset_path", "resolve", "PRESET_SUFFIX")

_logger = logging.getLogger("coxperc.harness")

PRESET_SUFFIX = ".toml"


def _catalog():
    return resources.files("coxperc.harness").joinpath("presets")


def list_presets() -> dict[str, str]:
    """Bundled preset names mapped to their one-line descriptions."""
    presets = {}
    for entry in sorted(_catalog().iterdir(), key=lambda e: e.name):
        if not entry.name.endswith(PRESET_SUFFIX):
            continue
        data = tomllib.loads(entry.read_text(encoding="utf-8"))
        presets[entry.name[: -len(PRESET_SUFFIX)]] = data.get(
            "description", ""
        )
    return presets


def preset_path(name: str) -> Path:
    entry = _catalog().joinpath(name + PRESET_SUFFIX)
    if not entry.is_file():
        raise UnknownPreset(name)
    return Path(str(entry))


def resolve(name_or_path: Union[str, Path]) -> tuple[ExperimentConfig, str]:
    """Load a config file, or a bundled preset by name.

    Returns the config and the default output stem (the file name
    without its suffix).
    """
    path = Path(name_or_path)
    if not path.is_file():
        name = str(name_or_path)
        if name.endswith(PRESET_SUFFIX):
            name = name[: -len(PRESET_SUFFIX)]
        path = preset_path(name)
        _logger.debug("resolved preset %s to %s", name, path)
    return load_config(path), path.stem
