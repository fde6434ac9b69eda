from typing import Optional


class CoxpercError(Exception):
    def __init__(self, error_code: str, description: Optional[str] = None):
        super(CoxpercError, self).__init__(description or error_code)
        self.error_code = error_code
        self.description = description

    def to_dict(self) -> dict:
        return {
            "error": {
                "code": self.error_code,
                "description": self.description,
                "type": type(self).__name__,
            }
        }
