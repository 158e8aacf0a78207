"""
Result records and table writers for the command line.

RunResult is what `run` prints and what `compare` reads back. Non-finite
numbers are written as JSON null and read back as NaN, so the output is
strict JSON.
"""

import csv
from dataclasses import asdict, dataclass, field, fields
import io
import json
import math
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ModelError, UsageError


def _clean(value):
    """Replace non-finite floats by None, recursively."""
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _float(value) -> float:
    return float("nan") if value is None else float(value)


@dataclass
class RunResult:
    """
    Output of one algorithm run.

    Attributes:
        algorithm: Algorithm tag
        ids: Sorted node ids
        means: Marginal means (NaN where unavailable)
        variances: Marginal variances (NaN where unavailable)
        covariance: Optional covariance matrix (NaN entries are not computed)
        report: Iterations, residual, converged, skipped, wall_time and extras
    """

    algorithm: str
    ids: Tuple[int, ...]
    means: np.ndarray
    variances: np.ndarray
    covariance: Optional[np.ndarray] = None
    report: Dict[str, Any] = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return bool(self.report.get("converged", False))

    def to_dict(self) -> dict:
        data = {
            "algorithm": self.algorithm,
            "marginals": [
                {"id": int(i), "mean": float(m), "variance": float(v)}
                for i, m, v in zip(self.ids, self.means, self.variances)
            ],
            "report": dict(self.report),
        }
        if self.covariance is not None:
            data["covariance"] = {
                "ids": [int(i) for i in self.ids],
                "matrix": [[float(x) for x in row] for row in self.covariance],
            }
        return _clean(data)

    @classmethod
    def from_dict(cls, data: dict) -> "RunResult":
        try:
            records = sorted(data["marginals"], key=lambda r: r["id"])
            ids = tuple(int(r["id"]) for r in records)
            means = np.array([_float(r["mean"]) for r in records])
            variances = np.array([_float(r["variance"]) for r in records])
            covariance = None
            if data.get("covariance") is not None:
                if tuple(data["covariance"]["ids"]) != ids:
                    raise ModelError("covariance ids do not match the marginal ids")
                covariance = np.array([[_float(x) for x in row] for row in data["covariance"]["matrix"]])
            return cls(str(data["algorithm"]), ids, means, variances, covariance,
                       dict(data.get("report", {})))
        except (KeyError, TypeError, ValueError) as e:
            raise ModelError(f"malformed result record: {e}") from e

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def loads(cls, text: str) -> "RunResult":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ModelError(f"invalid result JSON: {e}") from e
        if not isinstance(data, dict):
            raise ModelError("result file must be a JSON object")
        return cls.from_dict(data)


def covariance_csv(ids: Sequence[int], matrix: np.ndarray) -> str:
    """Covariance as CSV: header `id,<ids>`, one row per node, empty cells for NaN."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["id"] + [str(i) for i in ids])
    for i, row in zip(ids, matrix):
        writer.writerow([str(i)] + [repr(float(x)) if math.isfinite(x) else "" for x in row])
    return buffer.getvalue()


# --- comparison with the oracle -------------------------------------------

@dataclass
class ComparisonRow:
    algorithm: str
    quantity: str
    count: int
    max_abs: float
    mean_abs: float
    max_rel: float
    mean_rel: float
    verdict: str


def _errors(estimate: np.ndarray, exact: np.ndarray, ignore_nan: bool) -> Tuple[np.ndarray, np.ndarray]:
    estimate = np.asarray(estimate, dtype=float).ravel()
    exact = np.asarray(exact, dtype=float).ravel()
    if ignore_nan:
        keep = np.isfinite(estimate)
        estimate, exact = estimate[keep], exact[keep]
    with np.errstate(invalid="ignore"):
        err = np.abs(estimate - exact)
    err = np.where(np.isfinite(err), err, np.inf)
    scale = np.maximum(np.abs(exact), np.finfo(float).tiny)
    return err, err / scale


def compare_result(result: RunResult, oracle, tol: float) -> List[ComparisonRow]:
    """
    Absolute and relative errors of a result against an oracle solution.

    Missing means or variances count as infinite errors; NaN covariance
    entries are entries the algorithm does not compute and are ignored.
    """
    if tuple(result.ids) != tuple(oracle.ids):
        raise UsageError(f"result for {result.algorithm} does not cover the model nodes")
    quantities = [("mean", result.means, oracle.means, False),
                  ("variance", result.variances, oracle.variances, False)]
    if result.covariance is not None:
        quantities.append(("covariance", result.covariance, oracle.covariance, True))

    rows = []
    for name, estimate, exact, ignore_nan in quantities:
        err, rel = _errors(estimate, exact, ignore_nan)
        if err.size == 0:
            continue
        max_abs = float(err.max())
        rows.append(ComparisonRow(
            algorithm=result.algorithm,
            quantity=name,
            count=int(err.size),
            max_abs=max_abs,
            mean_abs=float(err.mean()),
            max_rel=float(rel.max()),
            mean_rel=float(rel.mean()),
            verdict="pass" if max_abs <= tol else "fail",
        ))
    return rows


# --- tables -----------------------------------------------------------------

@dataclass
class BenchRow:
    family: str
    n: int
    algorithm: str
    repetitions: int
    wall_ms_mean: float
    wall_ms_std: float
    max_err: Optional[float]
    rss_mb: float


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else str(value)
    return str(value)


def rows_csv(rows: Iterable, row_type) -> str:
    """Dataclass rows as CSV with the dataclass field names as header."""
    names = [f.name for f in fields(row_type)]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(names)
    for row in rows:
        writer.writerow([_cell(getattr(row, name)) for name in names])
    return buffer.getvalue()


def rows_json(rows: Iterable) -> str:
    return json.dumps([_clean(asdict(row)) for row in rows], indent=2, allow_nan=False) + "\n"
