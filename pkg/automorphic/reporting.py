"""
Verification reports
Check records, per-suite reports and the JSON/CSV writers used by the command line
"""

import os
import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """Plain JSON types for numpy scalars/arrays, complex numbers and nested containers"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        return value.real if value.imag == 0 else [value.real, value.imag]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else str(value)
    if isinstance(value, pd.DataFrame):
        return value.to_dict(orient="records")
    return value


@dataclass
class CheckRecord:
    """One identity checked numerically; ref names the source identity it instantiates"""
    id: str
    identity: str
    computed: Any
    expected: Any = None
    tolerance: Optional[float] = None
    passed: bool = False
    ref: str = ""

    @classmethod
    def compare(cls, id: str, identity: str, computed, expected, tolerance: float,
                relative: bool = False, ref: str = "") -> "CheckRecord":
        error = abs(complex(computed) - complex(expected))
        if relative:
            error /= max(abs(complex(expected)), 1e-300)
        return cls(id=id, identity=identity, computed=computed, expected=expected,
                   tolerance=tolerance, passed=bool(error <= tolerance), ref=ref)

    @classmethod
    def flag(cls, id: str, identity: str, row: dict, ref: str = "") -> "CheckRecord":
        """Record built from a checker's dict that carries its own "ok" verdict"""
        details = {k: v for k, v in row.items() if k != "ok"}
        return cls(id=id, identity=identity, computed=details, passed=bool(row.get("ok", False)), ref=ref)

    def to_dict(self) -> dict:
        return to_jsonable(asdict(self))


@dataclass
class Report:
    """Records of one suite; a suite that raised carries the error instead

    notes hold values reported for comparison only; they never affect passed.
    """
    suite: str
    records: List[CheckRecord] = field(default_factory=list)
    wall_time: float = 0.0
    error: Optional[str] = None
    notes: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.error is None and all(r.passed for r in self.records)

    def add(self, record: CheckRecord):
        if not record.ref:
            raise ValueError(f"record {record.id} carries no ref")
        self.records.append(record)
        if not record.passed:
            logger.warning(f"[{self.suite}] {record.id} failed: computed {record.computed}")

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "error": self.error,
            "wall_time": round(self.wall_time, 3),
            "records": [r.to_dict() for r in self.records],
            "notes": to_jsonable(self.notes),
        }


def write_report(reports: List[Report], path: str, seed: Optional[int] = None) -> dict:
    """Write all suites to one JSON file and return the payload"""
    payload = {
        "seed": seed,
        "passed": all(r.passed for r in reports),
        "suites": [r.to_dict() for r in reports],
    }
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    try:
        with open(path, "w") as f:
            json.dump(payload, f, indent=2)
        logger.info(f"Report written to {path}")
    except OSError as e:
        logger.error(f"Error writing report {path}: {e}")
        raise
    return payload


def write_table(table: pd.DataFrame, path: str):
    """CSV side table (slopes, lattice sums)"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    table.to_csv(path, index=False)
    logger.info(f"Table written to {path} ({len(table)} rows)")
