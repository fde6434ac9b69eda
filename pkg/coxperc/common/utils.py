from typing import Optional, Type, TypeVar

from coxperc.exceptions import CoxpercError

T = TypeVar("T")


class Errors:
    @staticmethod
    def raise_if_none(
        value: Optional[T], error: Type[CoxpercError], *args
    ) -> T:
        if value is None:
            raise error(*args)
        return value

    @staticmethod
    def raise_if_false(value: bool, error: Type[CoxpercError], *args):
        if not value:
            raise error(*args)
