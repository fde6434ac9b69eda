from typing import Callable, Generic, TypeVar

from coxperc.exceptions import CoxpercError

TBound = TypeVar("TBound")


class UnregisteredKind(CoxpercError):
    def __init__(self, registry: str, kind: str):
        super(UnregisteredKind, self).__init__(
            "registry.unregistered_kind",
            f"no {registry} is registered for '{kind}'",
        )


class TypeRegistry(Generic[TBound], dict[str, TBound]):
    """Kind name to implementation, filled by decorating at import time."""

    def __init__(self, name: str = "entry"):
        super(TypeRegistry, self).__init__()
        self.name = name

    def register(self, kind: str) -> Callable[[TBound], TBound]:
        if kind in self:
            raise ValueError(f"{self.name} '{kind}' is registered twice")

        def decorator(value: TBound) -> TBound:
            self[kind] = value
            return value

        return decorator

    def require(self, kind: str) -> TBound:
        try:
            return self[kind]
        except KeyError:
            raise UnregisteredKind(self.name, kind) from None
