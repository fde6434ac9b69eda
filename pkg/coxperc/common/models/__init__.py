from coxperc.common.models.base_model import (  # noqa: F401
    AppBaseModel,
    orjson_default,
    orjson_dumps,
)
