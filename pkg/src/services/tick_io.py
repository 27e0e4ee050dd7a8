"""Tick CSV ingestion, flat config files and output serialization.

Floats are written with 17 significant digits so every double survives a
write/read cycle unchanged.
"""

import json
import logging
import re
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from dotenv import dotenv_values
from pydantic import ValidationError

from ..models import FinePath, SpotCurve, TickSeries
from ..models.schemas import ExperimentReport, PairEstimate, ReplicationRecord, RunConfig
from .errors import ConfigError, EmptySeries, ParseError, ReportMismatch, SchemaError
from .report_stats import summaries_match, summarize

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
TICK_COLUMNS = ["asset_id", "timestamp", "log_price"]
SPOT_COLUMNS = ["t_rescaled", "t_raw", "value", "variant", "N"]

PathLike = Union[str, Path]


def _fmt(x: float) -> str:
    return FLOAT_FORMAT % x


# ---------------------------------------------------------------------------
# ticks
# ---------------------------------------------------------------------------


def ingest_csv(path: PathLike) -> List[TickSeries]:
    """Read ``asset_id,timestamp,log_price`` rows into one TickSeries per asset.

    Assets keep their order of first appearance; rows of an asset are sorted by
    timestamp with a stable sort. Line numbers in errors count the header as 1.
    """
    try:
        frame = pd.read_csv(
            path, dtype=str, keep_default_na=False, skip_blank_lines=False, encoding="utf-8-sig"
        )
    except pd.errors.EmptyDataError as e:
        raise EmptySeries(f"{path}: file is empty") from e
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        line = int(match.group(1)) if match else None
        raise SchemaError(f"{path}: wrong number of fields{f' on line {line}' if line else ''}", line=line) from e

    columns = [str(c).strip() for c in frame.columns]
    if columns != TICK_COLUMNS:
        raise SchemaError(f"{path}: header must be '{','.join(TICK_COLUMNS)}', got '{','.join(columns)}'", line=1)

    # blank lines stay in the frame as empty rows, so row r sits on line r + 2
    lines = np.arange(len(frame)) + 2
    empty = np.column_stack(
        [frame[col].fillna("").astype(str).str.strip().eq("").to_numpy(dtype=bool) for col in TICK_COLUMNS]
    )
    blank = empty.all(axis=1)
    short = empty.any(axis=1) & ~blank
    if short.any():
        line = int(lines[np.argmax(short)])
        raise SchemaError(f"{path}: missing fields on line {line}", line=line)
    frame = frame.loc[~blank].reset_index(drop=True)
    lines = lines[~blank]
    if frame.empty:
        raise EmptySeries(f"{path}: no observations after the header")

    parsed = {}
    for col in ("timestamp", "log_price"):
        text = frame[col].str.strip()
        values = pd.to_numeric(text, errors="coerce")
        bad = values.isna().to_numpy() | ~np.isfinite(values.to_numpy(dtype=np.float64, na_value=np.nan))
        if bad.any():
            row = int(np.argmax(bad))
            line = int(lines[row])
            raise ParseError(f"{path}: line {line}: cannot parse {col} '{frame[col].iloc[row]}'", line=line)
        # float() parsing is correctly rounded, so %.17g output reads back bit for bit
        parsed[col] = text.astype(np.float64).to_numpy()

    ids = frame["asset_id"].str.strip().to_numpy()
    out = []
    for asset in pd.unique(ids):
        mask = ids == asset
        times = parsed["timestamp"][mask]
        order = np.argsort(times, kind="stable")
        out.append(TickSeries(asset_id=str(asset), times=times[order], log_prices=parsed["log_price"][mask][order]))
    logger.info(f"ingested {len(frame)} rows for {len(out)} asset(s) from {path}")
    return out


def write_ticks_csv(series: Sequence[TickSeries], path: PathLike) -> None:
    frames = [
        pd.DataFrame({"asset_id": s.asset_id, "timestamp": s.times, "log_price": s.log_prices})
        for s in series
    ]
    frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=TICK_COLUMNS)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_truth_csv(path: FinePath, out: PathLike, raw_times=None) -> None:
    """Fine-grid true spot covariance plus a footer row of integrated values."""
    d = path.n_assets
    pairs = [(i, j) for i in range(d) for j in range(i, d)]
    frame = pd.DataFrame({"t": path.times if raw_times is None else raw_times})
    for i, j in pairs:
        frame[f"sigma{i + 1}{j + 1}"] = path.spot_cov[i, j]
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    footer = ",".join(["integrated"] + [_fmt(path.integrated(i, j)) for i, j in pairs])
    Path(out).write_text(text + footer + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# estimates
# ---------------------------------------------------------------------------


def format_integrated(estimates: Sequence[PairEstimate], variant: str, fmt: str = "csv") -> str:
    if fmt == "json":
        body = {"variant": variant, "estimates": [e.model_dump() for e in estimates]}
        return json.dumps(body, indent=2) + "\n"
    lines = ["asset_i,asset_j,value,N,variant"]
    lines += [f"{e.asset_i},{e.asset_j},{_fmt(e.value)},{e.n_freq},{variant}" for e in estimates]
    return "\n".join(lines) + "\n"


def spot_frame(curve: SpotCurve, t_raw: np.ndarray) -> pd.DataFrame:
    return pd.DataFrame({
        "t_rescaled": curve.grid,
        "t_raw": t_raw,
        "value": curve.values,
        "variant": curve.variant,
        "N": curve.n_freq,
    })[SPOT_COLUMNS]


def spot_output_path(out: PathLike, asset_i: str, asset_j: str, fmt: str = "csv") -> Path:
    base = Path(out)
    suffix = base.suffix or f".{fmt}"
    return base.with_name(f"{base.stem}_{asset_i}_{asset_j}{suffix}")


def write_spot(curve: SpotCurve, t_raw: np.ndarray, out: PathLike, fmt: str = "csv") -> None:
    if fmt == "json":
        rows = [
            {"t_rescaled": float(t), "t_raw": float(r), "value": float(v), "variant": curve.variant, "N": curve.n_freq}
            for t, r, v in zip(curve.grid, t_raw, curve.values)
        ]
        Path(out).write_text(json.dumps(rows) + "\n", encoding="utf-8")
    else:
        spot_frame(curve, t_raw).to_csv(out, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def records_path(path: PathLike) -> Path:
    p = Path(path)
    return p.with_name(f"{p.stem}.records.jsonl")


def write_report(report: ExperimentReport, path: PathLike) -> Tuple[Path, Path]:
    """Summary document at ``path``, one record per line in ``<stem>.records.jsonl``."""
    summary_path, rec_path = Path(path), records_path(path)
    doc = report.model_dump(mode="json", exclude={"records"})
    doc["records_file"] = rec_path.name
    summary_path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    with rec_path.open("w", encoding="utf-8", newline="\n") as fh:
        for record in report.records:
            fh.write(record.model_dump_json() + "\n")
    logger.info(f"wrote report to {summary_path} ({len(report.records)} records)")
    return summary_path, rec_path


def load_report(path: PathLike) -> ExperimentReport:
    """Load a report and verify its summary against the records."""
    summary_path = Path(path)
    doc = json.loads(summary_path.read_text(encoding="utf-8"))
    rec_path = summary_path.with_name(doc.pop("records_file", records_path(path).name))
    with rec_path.open(encoding="utf-8") as fh:
        records = [ReplicationRecord.model_validate_json(line) for line in fh if line.strip()]
    doc["records"] = records
    report = ExperimentReport.model_validate(doc)

    expected = int(report.config.get("replications", 0)) * len(report.summary)
    if len(records) != expected:
        raise ReportMismatch(f"{len(records)} records, expected {expected} (replications × cells)")
    if not summaries_match(summarize(records), report.summary):
        raise ReportMismatch(f"summary in {summary_path} does not match its records")
    return report


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

_SECTIONS = ("model", "asset1", "asset2", "sampling", "noise", "simulate", "study")
_LIST_KEYS = {
    ("sampling", "n"), ("sampling", "intensity"), ("simulate", "window"),
    ("study", "ladder"), ("study", "n_ladder"), ("study", "n_freqs"), ("study", "noise_ladder"),
    ("study", "deltas"), ("study", "pair"), ("study", "slope_range"),
}


def _split(section: str, key: str, raw: str) -> Any:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) > 1 or (section, key) in _LIST_KEYS:
        return parts
    return parts[0]


def group_config(values: Dict[str, Any]) -> Dict[str, Any]:
    """Group flat ``section.key`` entries into nested sections."""
    grouped: Dict[str, Dict[str, Any]] = {}
    top: Dict[str, Any] = {}
    for key, raw in values.items():
        if raw is None:
            raise ConfigError(f"config key '{key}' has no value")
        if "." not in key:
            top[key] = raw.strip()
            continue
        section, _, name = key.partition(".")
        if section not in _SECTIONS or not name or "." in name:
            raise ConfigError(f"unknown config key '{key}'")
        grouped.setdefault(section, {})[name] = _split(section, name, raw)

    out: Dict[str, Any] = dict(top)
    if "model" in grouped or "asset1" in grouped:
        model = dict(grouped.get("model", {}))
        model["assets"] = [grouped[a] for a in ("asset1", "asset2") if a in grouped]
        out["model"] = model
    for section in ("sampling", "noise", "simulate", "study"):
        if section in grouped:
            out[section] = grouped[section]
    return out


def parse_config_file(path: PathLike) -> RunConfig:
    """Parse a flat ``section.key=value`` file (dotenv syntax) into a RunConfig."""
    if not Path(path).is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    grouped = group_config(dotenv_values(path))
    try:
        return RunConfig.model_validate(grouped)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ()))
        raise ConfigError(f"{path}: invalid value at '{where}': {first['msg']}") from e


def iter_pairs(series: Sequence[Any]) -> Iterable[Tuple[int, int]]:
    """Upper-triangular pairs (i, j), diagonals included."""
    for i in range(len(series)):
        for j in range(i, len(series)):
            yield i, j
