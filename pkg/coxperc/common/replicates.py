import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, TypeVar

from coxperc.core.exceptions import InvalidParameter
from coxperc.core.seeds import Seed
from coxperc.settings import get_settings

__all__ = ("ReplicatePool",)

_logger = logging.getLogger("coxperc.estimators")

T = TypeVar("T")


class ReplicatePool:
    """Maps a replicate function over indices, in index order.

    The replicate ``i`` always receives ``seed.child(i)``, so the result
    does not depend on the number of threads.
    """

    def __init__(self, threads: int = 1):
        self.threads = max(1, int(threads))

    @classmethod
    def default(cls) -> "ReplicatePool":
        return cls(get_settings().threads)

    @classmethod
    def resolve(cls, pool: Optional["ReplicatePool"]) -> "ReplicatePool":
        return pool if pool is not None else cls.default()

    def map(
        self, fn: Callable[[int, Seed], T], seed: Seed, replicates: int
    ) -> list[T]:
        if replicates < 1:
            raise InvalidParameter("replicates", "need at least one")
        seeds = [seed.child(i) for i in range(replicates)]
        _logger.debug(
            "running %d replicates on %d thread(s)", replicates, self.threads
        )
        if self.threads == 1 or replicates <= 1:
            return [fn(i, s) for i, s in enumerate(seeds)]
        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            return list(executor.map(fn, range(replicates), seeds))
