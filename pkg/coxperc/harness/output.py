import logging
from pathlib import Path
from typing import Optional

import nanoid
import orjson

from coxperc.common.report import EstimateReport
from coxperc.common.tables import write_rows
from coxperc.core.seeds import Seed
from coxperc.harness.config import ExperimentConfig
from coxperc.version import VERSION

__all__ = ("SCHEMA_VERSION", "RunOutputs", "write_outputs", "dump_json")

_logger = logging.getLogger("coxperc.harness")

SCHEMA_VERSION = 1
SEED_RULE = "replicate i uses blake2b(seed || 'child:i'), 64-bit"


def dump_json(path: Path, data: dict) -> None:
    with open(path, "wb") as fp:
        fp.write(
            orjson.dumps(
                data,
                option=orjson.OPT_INDENT_2
                | orjson.OPT_SORT_KEYS
                | orjson.OPT_SERIALIZE_NUMPY,
            )
        )


class RunOutputs:
    """Paths of the three files a run produces."""

    def __init__(self, directory: Path, stem: str):
        self.directory = directory
        self.stem = stem

    @property
    def csv(self) -> Path:
        return self.directory / f"{self.stem}.csv"

    @property
    def report(self) -> Path:
        return self.directory / f"{self.stem}.json"

    @property
    def manifest(self) -> Path:
        return self.directory / f"{self.stem}.manifest.json"

    def names(self) -> list[str]:
        return [self.csv.name, self.report.name, self.manifest.name]


def replicate_seeds(config: ExperimentConfig) -> dict:
    seed = Seed.of(config.seed)
    return {
        "first": int(seed.child(0)),
        "last": int(seed.child(max(config.replicates - 1, 0))),
        "count": config.replicates,
        "rule": SEED_RULE,
    }


def write_outputs(
    report: EstimateReport,
    config: ExperimentConfig,
    directory: Path,
    stem: str,
    wall_time: float,
    threads: int,
    run_id: Optional[str] = None,
) -> RunOutputs:
    """Write ``<stem>.csv``, ``<stem>.json`` and ``<stem>.manifest.json``.

    The CSV and the report JSON depend only on (config, seed); wall time
    and the run id live in the manifest alone.
    """
    outputs = RunOutputs(Path(directory), stem)
    outputs.directory.mkdir(parents=True, exist_ok=True)
    echo = config.echo()

    write_rows(outputs.csv, report.column_names(), report.rows())
    dump_json(
        outputs.report,
        {
            "schema_version": SCHEMA_VERSION,
            "report": orjson.loads(report.json()),
            "config": echo,
        },
    )
    dump_json(
        outputs.manifest,
        {
            "run_id": run_id or nanoid.generate(size=12),
            "version": VERSION,
            "kind": config.kind,
            "config": echo,
            "seed": config.seed,
            "replicate_seeds": replicate_seeds(config),
            "wall_time_s": round(wall_time, 3),
            "threads": threads,
            "outputs": outputs.names(),
        },
    )
    _logger.info("wrote %s to %s", ", ".join(outputs.names()), directory)
    return outputs
