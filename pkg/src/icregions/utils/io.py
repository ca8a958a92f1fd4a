# utils/io.py
"""
JSON input, atomic output and report rendering for the CLI and the assets.
"""

from pathlib import Path
from typing import Any, Dict, Union
import json
import os
import tempfile

import numpy as np
import pandas as pd

from icregions.exceptions import ParseError, ValidationFailed

OUTPUT_FORMATS = ("table", "csv", "json")

Report = Union[pd.DataFrame, Dict[str, Any]]


def load_json(path: Union[str, Path]) -> Dict:
    """Read a JSON object; every failure is a ParseError naming the file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected a JSON object, got {type(data).__name__}")
    return data


def atomic_write(path: Union[str, Path], text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, pd.DataFrame):
        return value.to_dict(orient="records")
    return str(value)


def to_json_text(data: Any) -> str:
    if isinstance(data, pd.DataFrame):
        data = data.to_dict(orient="records")
    return json.dumps(data, indent=2, sort_keys=True, default=_default) + "\n"


def render(report: Report, fmt: str = "table") -> str:
    """
    Render a report.

    DataFrames render as aligned text, CSV or a JSON record list; dicts
    render as key: value lines (table), one key,value row each (csv) or JSON.
    """
    if fmt not in OUTPUT_FORMATS:
        raise ValidationFailed(f"unknown format {fmt!r}; expected one of {OUTPUT_FORMATS}")
    if fmt == "json":
        return to_json_text(report)
    if isinstance(report, pd.DataFrame):
        if fmt == "csv":
            return report.to_csv(index=False)
        return report.to_string(index=False) + "\n"

    flat = {k: v for k, v in report.items() if not isinstance(v, (pd.DataFrame, list, dict))}
    if fmt == "csv":
        return pd.DataFrame([flat]).to_csv(index=False)
    width = max((len(k) for k in flat), default=0)
    return "".join(f"{k:<{width}}  {v}\n" for k, v in flat.items())
