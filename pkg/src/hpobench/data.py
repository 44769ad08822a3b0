"""Load, clean, scale and summarize hourly national-demand CSV files."""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

DATETIME_COLUMN = "datetime"
TARGET_COLUMN = "nat_demand"
STATIONS = ("toc", "san", "dav")
WEATHER_VARS = ("T2M", "QV2M", "TQL", "W2M")
FLAG_COLUMNS = ("holiday", "school")
PANAMA_COLUMNS = (
    (DATETIME_COLUMN, TARGET_COLUMN)
    + tuple(f"{var}_{st}" for st in STATIONS for var in WEATHER_VARS)
    + FLAG_COLUMNS
)

_FALLBACK_FORMATS = ("%d-%m-%Y %H:%M", "%d-%m-%Y %H:%M:%S")


class SchemaError(ValueError):
    """A required column is missing from the CSV header."""


class ParseError(ValueError):
    """A datetime or numeric cell could not be parsed."""

    def __init__(self, line: int, column: str, value: str):
        super().__init__(f"line {line}: cannot parse {column}={value!r}")
        self.line = line
        self.column = column
        self.value = value


class BoundsError(IndexError):
    pass


@dataclass(frozen=True)
class ScalingParams:
    columns: Tuple[str, ...]
    mins: np.ndarray
    maxs: np.ndarray

    @property
    def constant(self) -> np.ndarray:
        return self.maxs == self.mins

    def _span(self) -> np.ndarray:
        span = self.maxs - self.mins
        return np.where(span == 0, 1.0, span)

    def transform(self, values: np.ndarray) -> np.ndarray:
        """Min-max scale an (n, len(columns)) array; constant columns map to 0."""
        out = (np.asarray(values, dtype=float) - self.mins) / self._span()
        return np.where(self.constant, 0.0, out)

    def inverse(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=float) * self._span() + self.mins

    def inverse_target(self, y) -> np.ndarray:
        """Map scaled target values back to original units (column 0)."""
        span = self.maxs[0] - self.mins[0]
        return np.asarray(y, dtype=float) * span + self.mins[0]


@dataclass(frozen=True)
class TimeSeriesFrame:
    timestamps: np.ndarray  # datetime64[s]
    target: np.ndarray
    features: np.ndarray  # (n, D)
    feature_names: Tuple[str, ...] = ()
    target_name: str = TARGET_COLUMN
    scaling: Optional[ScalingParams] = None

    def __post_init__(self):
        n = len(self.timestamps)
        if len(self.target) != n or self.features.shape[0] != n:
            raise ValueError("timestamps, target and feature rows must have equal length")
        if self.features.shape[1] != len(self.feature_names):
            raise ValueError("feature_names does not match feature column count")

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def columns(self) -> Tuple[str, ...]:
        return (self.target_name,) + tuple(self.feature_names)

    def values(self) -> np.ndarray:
        """Target and features stacked as one (n, 1 + D) matrix."""
        return np.column_stack([self.target, self.features]) if len(self) else np.empty((0, 1 + len(self.feature_names)))

    def select(self, rows) -> "TimeSeriesFrame":
        return replace(
            self,
            timestamps=self.timestamps[rows],
            target=self.target[rows],
            features=self.features[rows],
        )


@dataclass(frozen=True)
class DescriptiveStats:
    columns: Tuple[str, ...]
    min: np.ndarray
    max: np.ndarray
    mean: np.ndarray
    sd: np.ndarray

    def row(self, column: str) -> Dict[str, float]:
        i = self.columns.index(column)
        return {
            "min": float(self.min[i]),
            "max": float(self.max[i]),
            "mean": float(self.mean[i]),
            "sd": float(self.sd[i]),
        }

    def to_text(self) -> str:
        width = max([len("Variable")] + [len(c) for c in self.columns])
        lines = [f"{'Variable':<{width}}  {'Min':>10}  {'Max':>10}  {'Mean':>10}  {'SD':>10}"]
        for i, c in enumerate(self.columns):
            lines.append(
                f"{c:<{width}}  {self.min[i]:>10.4g}  {self.max[i]:>10.4g}  "
                f"{self.mean[i]:>10.4g}  {self.sd[i]:>10.4g}"
            )
        return "\n".join(lines) + "\n"


def _parse_datetime(text: str) -> datetime:
    text = text.strip()
    try:
        return datetime.fromisoformat(text)
    except ValueError:
        pass
    for fmt in _FALLBACK_FORMATS:
        try:
            return datetime.strptime(text, fmt)
        except ValueError:
            continue
    raise ValueError(text)


def load_csv(
    path,
    schema: Sequence[str] = (DATETIME_COLUMN, TARGET_COLUMN),
    datetime_column: str = DATETIME_COLUMN,
    target_column: str = TARGET_COLUMN,
) -> TimeSeriesFrame:
    """Read a demand CSV into a frame, rows in file order, unscaled.

    Every column other than the datetime and target columns is treated as a
    numeric exogenous feature.  ``schema`` lists columns that must be present.
    Parse failures raise :class:`ParseError` carrying the 1-based file line.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty file, no header") from None
        required = list(dict.fromkeys(list(schema) + [datetime_column, target_column]))
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing required column(s) {missing}")
        i_dt = header.index(datetime_column)
        i_y = header.index(target_column)
        feat_idx = [i for i, h in enumerate(header) if i not in (i_dt, i_y)]

        stamps: List[datetime] = []
        rows: List[List[float]] = []
        for line_no, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise ParseError(line_no, "<row>", ",".join(rec))
            try:
                stamps.append(_parse_datetime(rec[i_dt]))
            except ValueError:
                raise ParseError(line_no, datetime_column, rec[i_dt]) from None
            vals = []
            for i in [i_y] + feat_idx:
                try:
                    vals.append(float(rec[i]))
                except ValueError:
                    raise ParseError(line_no, header[i], rec[i]) from None
            rows.append(vals)

    names = tuple(header[i] for i in feat_idx)
    if rows:
        arr = np.asarray(rows, dtype=float)
    else:
        arr = np.empty((0, 1 + len(names)))
    return TimeSeriesFrame(
        timestamps=np.array(stamps, dtype="datetime64[s]"),
        target=arr[:, 0].copy(),
        features=arr[:, 1:].copy(),
        feature_names=names,
        target_name=target_column,
    )


def write_csv(frame: TimeSeriesFrame, path) -> None:
    """Write a frame in the same layout :func:`load_csv` reads (original units)."""
    values = frame.values()
    if frame.scaling is not None:
        values = frame.scaling.inverse(values)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow((DATETIME_COLUMN,) + frame.columns)
        for ts, row in zip(frame.timestamps, values):
            stamp = str(ts).replace("T", " ")
            w.writerow([stamp] + [repr(float(v)) for v in row])


def dedup_by_index(frame: TimeSeriesFrame) -> TimeSeriesFrame:
    """Drop rows whose timestamp was already seen, keeping the first one.

    The result is ordered by timestamp.
    """
    if len(frame) == 0:
        return frame
    _, first = np.unique(frame.timestamps, return_index=True)
    return frame.select(first)


def fit_apply_minmax(frame: TimeSeriesFrame) -> Tuple[TimeSeriesFrame, ScalingParams]:
    if len(frame) == 0:
        raise ValueError("cannot scale an empty frame")
    values = frame.values()
    params = ScalingParams(frame.columns, values.min(axis=0), values.max(axis=0))
    scaled = params.transform(values)
    out = replace(
        frame,
        target=scaled[:, 0].copy(),
        features=scaled[:, 1:].copy(),
        scaling=params,
    )
    return out, params


def describe(frame: TimeSeriesFrame) -> DescriptiveStats:
    """Per-column min, max, mean and sample standard deviation in original units."""
    if len(frame) == 0:
        raise ValueError("cannot describe an empty frame")
    values = frame.values()
    if frame.scaling is not None:
        values = frame.scaling.inverse(values)
    n = values.shape[0]
    sd = values.std(axis=0, ddof=1) if n > 1 else np.zeros(values.shape[1])
    return DescriptiveStats(
        frame.columns, values.min(axis=0), values.max(axis=0), values.mean(axis=0), sd
    )


def take_sample(frame: TimeSeriesFrame, size: int) -> TimeSeriesFrame:
    """First ``size`` rows in chronological order."""
    if size < 1 or size > len(frame):
        raise BoundsError(f"sample size {size} outside [1, {len(frame)}]")
    return frame.select(slice(0, size))


def _ar1(rng: np.random.Generator, n: int, phi: float, sd: float) -> np.ndarray:
    """Stationary AR(1) path with marginal standard deviation ``sd``."""
    eps = rng.standard_normal(n) * sd * np.sqrt(1 - phi * phi)
    out = np.empty(n)
    out[0] = rng.standard_normal() * sd
    for t in range(1, n):
        out[t] = phi * out[t - 1] + eps[t]
    return out


def synth_demand(n: int, seed: int = 0, start: str = "2015-01-03T01:00") -> TimeSeriesFrame:
    """Synthetic hourly demand with the Panama column layout.

    Demand is a daily load profile scaled by a weekly factor and reduced on
    holidays, plus a response to the previous hour's temperature and white
    noise.  Station weather
    shares one regional temperature anomaly; humidity, precipitation and wind
    are weakly informative.  Output is unscaled and deterministic in ``seed``.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    stamps = np.datetime64(start, "h") + np.arange(n).astype("timedelta64[h]")
    hours = np.arange(n)
    hod = (hours + int(str(stamps[0])[11:13])) % 24
    day = (stamps.astype("datetime64[D]") - stamps[0].astype("datetime64[D]")).astype(int)
    dow = (stamps.astype("datetime64[D]").view("int64") + 3) % 7  # 0 = Monday
    month = stamps.astype("datetime64[M]").astype(int) % 12 + 1

    n_days = int(day[-1]) + 1
    holiday_day = rng.random(n_days) < 0.063
    holiday = holiday_day[day].astype(float)
    vacation = (month <= 2) | (month == 12)
    school = ((dow < 5) & ~holiday_day[day] & ~vacation).astype(float)

    anomaly = _ar1(rng, n, 0.7, 1.4)
    diurnal_t = np.cos(2 * np.pi * (hod - 14) / 24)
    cols: Dict[str, np.ndarray] = {}
    base_t = {"toc": 27.4, "san": 26.9, "dav": 24.7}
    amp_t = {"toc": 1.8, "san": 3.2, "dav": 2.6}
    for st in STATIONS:
        local = anomaly + _ar1(rng, n, 0.8, 0.3)
        t2m = base_t[st] + amp_t[st] * diurnal_t + local
        cols[f"T2M_{st}"] = t2m
        cols[f"QV2M_{st}"] = 0.0155 - 0.0004 * local + _ar1(rng, n, 0.95, 0.0006)
        cols[f"TQL_{st}"] = np.abs(_ar1(rng, n, 0.9, 0.08))
        cols[f"W2M_{st}"] = np.abs(10 + _ar1(rng, n, 0.97, 5.0))
    mean_t = np.mean([cols[f"T2M_{st}"] for st in STATIONS], axis=0)
    # cooling load follows the previous hour's temperature
    lagged_t = np.concatenate([mean_t[:1], mean_t[:-1]])

    profile = (
        1.0
        + 0.12 * np.cos(2 * np.pi * (hod - 14) / 24)
        + 0.05 * np.cos(4 * np.pi * (hod - 20) / 24)
    )
    weekly = np.where(dow == 6, 0.88, np.where(dow == 5, 0.94, 1.0))
    demand = (
        1180.0 * profile * weekly * (1 - 0.10 * holiday)
        + 20.0 * school
        + 45.0 * (lagged_t - mean_t.mean())
        + rng.standard_normal(n) * 18.0
    )

    names = tuple(c for c in PANAMA_COLUMNS[2:] if c not in FLAG_COLUMNS) + FLAG_COLUMNS
    cols["holiday"] = holiday
    cols["school"] = school
    features = np.column_stack([cols[c] for c in names])
    return TimeSeriesFrame(
        timestamps=stamps.astype("datetime64[s]"),
        target=demand,
        features=features,
        feature_names=names,
    )


def load_frame(path=None, synthetic_rows: int = 0, seed: int = 0) -> Tuple[TimeSeriesFrame, ScalingParams]:
    """Load (or synthesize), deduplicate and min-max scale a frame."""
    if path is not None:
        frame = load_csv(path)
    else:
        frame = synth_demand(synthetic_rows, seed)
    frame = dedup_by_index(frame)
    return fit_apply_minmax(frame)
