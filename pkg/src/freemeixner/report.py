from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np


def jsonable(obj: Any) -> Any:
    """Recursively convert verification payloads to JSON-safe values.

    Rationals become "p/q" strings so nothing is rounded on the way out.
    """
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, type(None), str, int)):
        return obj
    if isinstance(obj, float):
        return obj if np.isfinite(obj) else str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return jsonable(float(obj))
    if isinstance(obj, np.ndarray):
        return [jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [jsonable(x) for x in obj]
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return repr(obj)


@dataclass
class Report:
    """Outcome of one verification routine."""

    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    first_failure: Any = None

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "details": jsonable(self.details),
            "first_failure": jsonable(self.first_failure),
        }
