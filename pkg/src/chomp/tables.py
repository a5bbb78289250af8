"""Result tables: the delimited output of a simulation run.

One row per (estimator, metric) cell holding its mean and standard
deviation, mirroring the layout of the performance tables. Serialization
uses shortest round-trip float formatting so identical runs produce
byte-identical files on any platform.
"""

import csv
import hashlib
from dataclasses import dataclass

COLUMNS = ("model", "p", "estimator", "metric", "mean", "sd", "reps", "seed")


def _format_float(value):
    value = float(value)
    if value == 0.0:
        return "0.0"  # folds -0.0 into 0.0
    return repr(value)


def _row_key(row):
    return (str(row["model"]), int(row["p"]), str(row["estimator"]),
            str(row["metric"]), _format_float(row["mean"]),
            _format_float(row["sd"]), int(row["reps"]), int(row["seed"]))


@dataclass(frozen=True)
class ResultTable:
    """Aggregated simulation results plus run provenance.

    Equality looks at the rows only, so a table read back from disk
    compares equal to the one that wrote it even though the provenance
    fields are not serialized.
    """

    rows: tuple
    scenario_hash: str = ""
    seed: int | None = None
    version: str = ""

    def __eq__(self, other):
        if not isinstance(other, ResultTable):
            return NotImplemented
        return [_row_key(r) for r in self.rows] == [_row_key(r) for r in other.rows]

    @classmethod
    def from_result(cls, result):
        """Build the table for one finished (or partial) simulation run."""
        from importlib.metadata import PackageNotFoundError, version
        try:
            ver = version("artifact")
        except PackageNotFoundError:
            ver = "unknown"
        digest = hashlib.sha256(repr(result.scenario).encode()).hexdigest()[:12]
        return cls(rows=tuple(result.aggregate()), scenario_hash=digest,
                   seed=result.scenario.base_seed, version=ver)

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(COLUMNS)
            for row in self.rows:
                writer.writerow([row["model"], row["p"], row["estimator"],
                                 row["metric"], _format_float(row["mean"]),
                                 _format_float(row["sd"]), row["reps"], row["seed"]])

    @classmethod
    def read_csv(cls, path):
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header) != COLUMNS:
                raise ValueError(f"unexpected header {header}; want {list(COLUMNS)}")
            rows = []
            for record in reader:
                rows.append({
                    "model": record[0],
                    "p": int(record[1]),
                    "estimator": record[2],
                    "metric": record[3],
                    "mean": float(record[4]),
                    "sd": float(record[5]),
                    "reps": int(record[6]),
                    "seed": int(record[7]),
                })
        return cls(rows=tuple(rows))

    def cell(self, estimator, metric):
        """Mean of one (estimator, metric) cell; KeyError when absent."""
        for row in self.rows:
            if row["estimator"] == estimator and row["metric"] == metric:
                return row["mean"]
        raise KeyError(f"no cell for estimator={estimator!r}, metric={metric!r}")
