"""Atomic artifact writing: JSON, CSV and plain text."""

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import pandas as pd

CSV_FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


def _jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and paths into JSON-native values."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return None
    if isinstance(value, Path):
        return str(value)
    return value


def write_text_atomic(path: PathLike, text: str) -> Path:
    """Write text to a temp file next to the target and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path


def dumps_json(payload: Dict[str, Any]) -> str:
    """Deterministic JSON text (sorted keys, fixed indentation)."""
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json_atomic(path: PathLike, payload: Dict[str, Any]) -> Path:
    """Write a JSON document atomically."""
    return write_text_atomic(path, dumps_json(payload))


def dumps_csv(frame: pd.DataFrame) -> str:
    """Full-precision CSV text without the index column."""
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def write_csv_atomic(path: PathLike, frame: pd.DataFrame) -> Path:
    """Write a DataFrame as CSV atomically with 17 significant digits."""
    return write_text_atomic(path, dumps_csv(frame))
