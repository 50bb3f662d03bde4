import csv
import json
import logging
import math
import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import scipy

from utils.config import config
from utils.errors import ReportError

logger = logging.getLogger(__name__)

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


@dataclass
class ReportTable:
    name: str
    columns: List[str]
    rows: List[Sequence[Any]] = field(default_factory=list)


@dataclass
class TaskResult:
    task: str
    label: str
    status: str = "ok"
    tables: List[ReportTable] = field(default_factory=list)
    passed: int = 0
    failed: int = 0
    check_failures: int = 0
    error: Optional[str] = None
    error_kind: Optional[str] = None

    def flag(self, ok: bool) -> str:
        if ok:
            self.passed += 1
            return PASS
        self.failed += 1
        return FAIL

    def check(self, ok: bool) -> str:
        """Flag for an internal consistency check rather than a bound"""
        if not ok:
            self.check_failures += 1
        return PASS if ok else FAIL

    def to_dict(self) -> Dict[str, Any]:
        out = {"task": self.task, "label": self.label, "status": self.status,
               "files": [f"{t.name}.csv" for t in self.tables],
               "pass": self.passed, "fail": self.failed, "check_failures": self.check_failures}
        if self.error is not None:
            out["error"] = self.error
            out["error_kind"] = self.error_kind
        return out


def format_cell(value: Any) -> str:
    """Shortest round-trip decimal for floats, empty for missing values"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def versions() -> Dict[str, str]:
    return {
        config.app_name: config.version,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def build_summary(scenario: str, results: List[TaskResult], tolerances: Dict[str, float],
                  exit_code: int) -> Dict[str, Any]:
    return {
        "scenario": scenario,
        "versions": versions(),
        "tolerances": dict(sorted(tolerances.items())),
        "counts": {
            "pass": sum(r.passed for r in results),
            "fail": sum(r.failed for r in results),
            "check_failures": sum(r.check_failures for r in results),
            "errors": sum(1 for r in results if r.status == "error"),
        },
        "exit_code": exit_code,
        "tasks": [r.to_dict() for r in results],
    }


def write_table(table: ReportTable, path: Path):
    """One CSV file, header first"""
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(table.columns)
        for row in table.rows:
            if len(row) != len(table.columns):
                raise ReportError(f"{table.name}: row of width {len(row)} under {len(table.columns)} columns")
            writer.writerow([format_cell(v) for v in row])


def emit_report(scenario: str, results: List[TaskResult], out_dir: Path,
                tolerances: Dict[str, float], exit_code: int) -> List[Path]:
    """Write one CSV per table plus summary.json; returns the written paths"""
    out_dir = Path(out_dir)
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for result in results:
            for table in result.tables:
                path = out_dir / f"{table.name}.csv"
                write_table(table, path)
                written.append(path)
        summary = build_summary(scenario, results, tolerances, exit_code)
        summary_path = out_dir / "summary.json"
        with open(summary_path, 'w') as f:
            json.dump(summary, f, indent=2, sort_keys=True)
            f.write("\n")
        written.append(summary_path)
    except OSError as e:
        raise ReportError(f"cannot write reports to {out_dir}: {e}")
    logger.info(f"wrote {len(written)} report file(s) to {out_dir}")
    return written
