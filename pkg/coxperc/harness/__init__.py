from .catalog import list_presets, preset_path, resolve
from .config import (
    EstimatorBlock,
    ExperimentConfig,
    OutputBlock,
    WindowBlock,
    load_config,
    parse_config,
)
from .exceptions import ConfigError, HarnessError, UnknownPreset
from .experiments import EXPERIMENTS, alpha_grid, run_experiment
from .output import SCHEMA_VERSION, RunOutputs, write_outputs
