from typing import Iterable

from coxperc.exceptions import CoxpercError


class HarnessError(CoxpercError):
    pass


class ConfigError(HarnessError):
    def __init__(self, problems: Iterable[str]):
        problems = list(problems)
        super(ConfigError, self).__init__(
            "harness.invalid_config", "; ".join(problems)
        )
        self.problems = problems


class UnknownPreset(HarnessError):
    def __init__(self, name: str):
        super(UnknownPreset, self).__init__(
            "harness.unknown_preset",
            f"'{name}' is neither a bundled preset nor a config file",
        )
