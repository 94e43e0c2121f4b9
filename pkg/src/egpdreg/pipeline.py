"""Ingestion and preparation of station precipitation records.

Raw files hold sub-hourly (typically 6-minute) gauge readings.  The
pipeline validates and counts malformed rows, sums complete clock hours,
keeps positive values at or above the censoring threshold (0.5 mm by
default), thins to every third clock hour so retained records are
approximately independent, attaches the fractional day-of-year covariate,
and splits stations (not rows) into training and validation sets.

The canonical table has columns station_id, lon, lat, timestamp,
day_of_year, precip_mm; it round-trips through CSV and a compact
binary cache with a versioned header.
"""

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import DataError, IngestError

CANONICAL_COLUMNS = ["station_id", "lon", "lat", "timestamp", "day_of_year", "precip_mm"]
CACHE_SCHEMA = "egpdreg-cache/1"
DEFAULT_CENSOR_MM = 0.5
DEFAULT_STRIDE_HOURS = 3
DEFAULT_TRAIN_FRACTION = 0.6


@dataclass
class ColumnMap:
    """How raw CSV columns map onto the canonical fields.

    Fields may be column names or 0-based integer positions (all-positional
    files are read without a header row).
    """

    station: object = "station_id"
    lon: object = "lon"
    lat: object = "lat"
    timestamp: object = "timestamp"
    precip: object = "precip_mm"
    delimiter: str = ","
    timestamp_format: str | None = None  # None: ISO-8601

    def fields(self):
        return {
            "station_id": self.station,
            "lon": self.lon,
            "lat": self.lat,
            "timestamp": self.timestamp,
            "precip_mm": self.precip,
        }

    @property
    def positional(self):
        return all(isinstance(v, int) for v in self.fields().values())


@dataclass
class IngestReport:
    files: list = field(default_factory=list)
    rows_read: int = 0
    rows_valid: int = 0
    rows_malformed: int = 0
    examples: list = field(default_factory=list)

    def as_dict(self):
        return {
            "files": list(self.files),
            "rows_read": self.rows_read,
            "rows_valid": self.rows_valid,
            "rows_malformed": self.rows_malformed,
            "examples": list(self.examples),
        }


def _read_raw(path, colmap: ColumnMap) -> pd.DataFrame:
    kwargs = {"sep": colmap.delimiter, "dtype": str, "skipinitialspace": True}
    if colmap.positional:
        kwargs["header"] = None
    try:
        raw = pd.read_csv(path, **kwargs)
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=list(colmap.fields()))
    out = pd.DataFrame(index=raw.index)
    for canon, src in colmap.fields().items():
        if colmap.positional:
            if src >= raw.shape[1]:
                raise IngestError(f"{path}: no column at position {src}")
            out[canon] = raw.iloc[:, src]
        else:
            if src not in raw.columns:
                raise IngestError(f"{path}: missing column {src!r}")
            out[canon] = raw[src]
    return out


def ingest(paths, colmap: ColumnMap | None = None, bad_row_tolerance: float = 0.001):
    """Read and validate raw files; returns (records, IngestReport).

    A row is malformed when a field is missing, a coordinate or the
    precipitation fails to parse, the precipitation is negative, or the
    timestamp is unreadable.  Malformed rows are counted and reported;
    exceeding the tolerance (fraction of rows read) raises IngestError
    with sample offending rows.
    """
    colmap = colmap or ColumnMap()
    if isinstance(paths, (str, bytes)) or hasattr(paths, "__fspath__"):
        paths = [paths]
    report = IngestReport(files=[str(p) for p in paths])
    frames = []
    for path in paths:
        chunk = _read_raw(path, colmap)
        report.rows_read += len(chunk)
        if len(chunk) == 0:
            continue
        ts = pd.to_datetime(chunk["timestamp"], format=colmap.timestamp_format, errors="coerce")
        lon = pd.to_numeric(chunk["lon"], errors="coerce")
        lat = pd.to_numeric(chunk["lat"], errors="coerce")
        precip = pd.to_numeric(chunk["precip_mm"], errors="coerce")
        station = chunk["station_id"]
        bad = (
            ts.isna()
            | lon.isna()
            | lat.isna()
            | precip.isna()
            | (precip < 0)
            | station.isna()
            | (station.astype(str).str.len() == 0)
        )
        if bad.any():
            report.rows_malformed += int(bad.sum())
            for i in chunk.index[bad][: max(0, 5 - len(report.examples))]:
                report.examples.append(f"{path}:{i}: " + ",".join(map(str, chunk.loc[i])))
        good = pd.DataFrame(
            {
                "station_id": station[~bad].astype(str),
                "lon": lon[~bad],
                "lat": lat[~bad],
                "timestamp": ts[~bad],
                "precip_mm": precip[~bad],
            }
        )
        frames.append(good)
    records = (
        pd.concat(frames, ignore_index=True)
        if frames
        else pd.DataFrame(columns=["station_id", "lon", "lat", "timestamp", "precip_mm"])
    )
    report.rows_valid = len(records)
    if report.rows_read > 0 and report.rows_malformed / report.rows_read > bad_row_tolerance:
        raise IngestError(
            f"{report.rows_malformed} of {report.rows_read} rows malformed "
            f"(tolerance {bad_row_tolerance:.2%}); examples: " + " | ".join(report.examples)
        )
    return records, report


def aggregate_hourly(records: pd.DataFrame, records_per_hour: int = 10) -> pd.DataFrame:
    """Sum sub-hourly readings over clock hours, dropping incomplete hours.

    An hour missing any of its sub-intervals would bias the sum low, so it
    is dropped rather than scaled up.  Duplicate (station, timestamp)
    readings are an upstream defect and raise.
    """
    if len(records) == 0:
        return pd.DataFrame(columns=["station_id", "lon", "lat", "timestamp", "precip_mm"])
    df = records.sort_values(["station_id", "timestamp"], kind="stable")
    if df.duplicated(subset=["station_id", "timestamp"]).any():
        dup = df[df.duplicated(subset=["station_id", "timestamp"])].iloc[0]
        raise DataError(
            f"duplicate reading for station {dup['station_id']} at {dup['timestamp']}"
        )
    hour = df["timestamp"].dt.floor("h")
    grouped = (
        df.assign(hour=hour)
        .groupby(["station_id", "hour"], sort=True)
        .agg(
            lon=("lon", "first"),
            lat=("lat", "first"),
            precip_mm=("precip_mm", "sum"),
            n_sub=("precip_mm", "size"),
        )
        .reset_index()
    )
    complete = grouped[grouped["n_sub"] == records_per_hour]
    out = complete.rename(columns={"hour": "timestamp"})[
        ["station_id", "lon", "lat", "timestamp", "precip_mm"]
    ]
    return out.reset_index(drop=True)


def day_of_year_fraction(timestamps) -> np.ndarray:
    """Fractional day-of-year in [0, 366): Jan 1 00:00 is 0.0."""
    ts = pd.to_datetime(pd.Series(timestamps)).dt
    frac = (ts.hour + ts.minute / 60.0 + ts.second / 3600.0) / 24.0
    return (ts.dayofyear - 1 + frac).to_numpy(dtype=float)


def prepare(
    hourly: pd.DataFrame,
    censor: float = DEFAULT_CENSOR_MM,
    stride: int = DEFAULT_STRIDE_HOURS,
) -> pd.DataFrame:
    """Censor, thin and index hourly records into the canonical table.

    Keeps strictly positive values at or above the censoring threshold,
    then keeps clock hours whose epoch hour index is divisible by the
    stride (a property of the clock, not of the surviving rows, so the
    retained records are always >= stride hours apart per station).
    """
    if stride < 1:
        raise DataError("stride must be a positive number of hours")
    df = hourly.copy()
    precip = np.asarray(df["precip_mm"], dtype=float)
    df = df[(precip > 0) & (precip >= censor)]
    ts = pd.to_datetime(df["timestamp"])
    epoch_hours = ts.astype("int64") // (3600 * 10**9)
    df = df[(epoch_hours % stride) == 0]
    df = df.assign(day_of_year=day_of_year_fraction(df["timestamp"]))
    df = df.sort_values(["station_id", "timestamp"], kind="stable").reset_index(drop=True)
    return df[CANONICAL_COLUMNS]


def split_stations(
    table: pd.DataFrame,
    train_fraction: float = DEFAULT_TRAIN_FRACTION,
    seed: int = 0,
):
    """Random station-level split; every station lands on exactly one side."""
    stations = np.asarray(sorted(table["station_id"].astype(str).unique()))
    if len(stations) < 2:
        raise DataError("station split needs at least 2 stations")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(stations))
    n_train = int(np.clip(round(train_fraction * len(stations)), 1, len(stations) - 1))
    train_set = set(stations[order[:n_train]])
    mask = table["station_id"].astype(str).isin(train_set)
    return table[mask].reset_index(drop=True), table[~mask].reset_index(drop=True)


def write_canonical_csv(table: pd.DataFrame, path) -> None:
    out = table.copy()
    out["timestamp"] = pd.to_datetime(out["timestamp"]).dt.strftime("%Y-%m-%dT%H:%M:%S")
    out.to_csv(path, index=False)


def read_canonical_csv(path) -> pd.DataFrame:
    df = pd.read_csv(path)
    if "timestamp" in df.columns:
        df["timestamp"] = pd.to_datetime(df["timestamp"])
    return df


def write_cache(table: pd.DataFrame, path) -> None:
    """Compact binary cache of a canonical table (versioned npz)."""
    np.savez_compressed(
        path,
        schema=np.array([CACHE_SCHEMA]),
        station_id=np.array(table["station_id"].astype(str).tolist()),
        lon=table["lon"].to_numpy(dtype=float),
        lat=table["lat"].to_numpy(dtype=float),
        timestamp=pd.to_datetime(table["timestamp"]).astype("int64").to_numpy(),
        day_of_year=table["day_of_year"].to_numpy(dtype=float),
        precip_mm=table["precip_mm"].to_numpy(dtype=float),
    )


def read_cache(path) -> pd.DataFrame:
    with np.load(path, allow_pickle=False) as npz:
        schema = str(npz["schema"][0])
        if schema != CACHE_SCHEMA:
            raise DataError(f"unsupported cache schema {schema!r}")
        return pd.DataFrame(
            {
                "station_id": npz["station_id"].astype(str),
                "lon": npz["lon"],
                "lat": npz["lat"],
                "timestamp": pd.to_datetime(npz["timestamp"]),
                "day_of_year": npz["day_of_year"],
                "precip_mm": npz["precip_mm"],
            }
        )
