"""Versioned JSON documents and CSV tables.

Output is byte-stable for identical inputs: JSON keys are sorted and CSV
columns follow a fixed order.
"""

import json
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel

from .config import SCHEMA_VERSION

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def document(kind: str, payload: BaseModel | dict) -> dict:
    """Wrap ``payload`` with ``schema_version`` and ``kind``."""
    body = _plain(payload)
    return {"schema_version": SCHEMA_VERSION, "kind": kind, **body}


def dumps_json(doc: dict) -> str:
    return json.dumps(_plain(doc), indent=2, sort_keys=True) + "\n"


def records_to_csv(records: Iterable[dict], columns: Sequence[str] | None = None) -> str:
    frame = pd.DataFrame(list(records), columns=list(columns) if columns else None)
    return frame.to_csv(index=False, lineterminator="\n")


def write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    logger.info("wrote %s", path)
