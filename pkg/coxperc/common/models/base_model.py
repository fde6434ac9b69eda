import numpy as np
import orjson
from pydantic import BaseModel as _BaseModel

__all__ = ("AppBaseModel", "orjson_dumps", "orjson_default")


def orjson_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError


def orjson_dumps(v, *, default):
    # orjson.dumps returns bytes, json.dumps returns str
    def _default(o):
        try:
            return orjson_default(o)
        except TypeError:
            return default(o)

    return orjson.dumps(
        v, default=_default, option=orjson.OPT_SERIALIZE_NUMPY
    ).decode()


class AppBaseModel(_BaseModel):
    class Config:
        allow_mutation = False
        frozen = True
        extra = "forbid"
        json_loads = orjson.loads
        json_dumps = orjson_dumps
