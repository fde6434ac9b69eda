import hashlib

import numpy as np
from pydantic import conint

from coxperc.common.models import AppBaseModel

__all__ = ("Seed",)

_MASK = 2**64 - 1


def _derive(value: int, salt: bytes) -> int:
    digest = hashlib.blake2b(
        value.to_bytes(8, "little") + salt, digest_size=8
    ).digest()
    return int.from_bytes(digest, "little")


class Seed(AppBaseModel):
    """A 64-bit seed with counter-based stream splitting.

    ``child(i)`` gives the seed of replicate ``i`` and ``branch(name)`` a
    named sub-stream; both are pure functions of the parent value, so
    replicates can be evaluated in any order.
    """

    value: conint(ge=0, le=_MASK)

    @classmethod
    def of(cls, value: int) -> "Seed":
        return cls(value=int(value) & _MASK)

    def child(self, index: int) -> "Seed":
        return Seed(value=_derive(self.value, b"child:%d" % index))

    def branch(self, name: str) -> "Seed":
        return Seed(value=_derive(self.value, b"branch:" + name.encode()))

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.value))

    def __int__(self):
        return self.value
