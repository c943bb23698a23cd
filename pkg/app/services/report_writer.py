"""
CSV and JSON artifact emission.
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

# The delta table keeps 17 significant digits; every other artifact uses
# Python's shortest round-trip float formatting.
DELTA_FLOAT_FORMAT = '%.17g'


def _plain(value: Any) -> Any:
    """json.dumps fallback for numpy scalars and arrays."""
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


class ReportWriter:
    """Service class writing artifacts into one output directory."""

    def __init__(self, output_dir: str, version: str):
        self.output_dir = output_dir
        self.version = version

    def __repr__(self) -> str:
        return f"<ReportWriter(output_dir={self.output_dir})>"

    def _path(self, name: str) -> str:
        os.makedirs(self.output_dir, exist_ok = True)
        return os.path.join(self.output_dir, name)

    def write_csv(self, name: str, frame: pd.DataFrame, columns: Optional[List[str]] = None,
                  float_format: Optional[str] = None) -> str:
        """
        Write a DataFrame as UTF-8 CSV with a header row and LF line endings.

        Args:
            name: File name inside the output directory
            frame: Table to write
            columns: Column order (defaults to the frame's)
            float_format: printf-style float format, None for round-trip repr

        Returns:
            Path of the written file
        """
        path = self._path(name)
        frame.to_csv(path, index = False, columns = columns, float_format = float_format,
                     lineterminator = '\n', encoding = 'utf-8')
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return path

    def write_delta_csv(self, name: str, frame: pd.DataFrame, columns: List[str]) -> str:
        """Error-term table with 17 significant digits."""
        return self.write_csv(name, frame, columns = columns, float_format = DELTA_FLOAT_FORMAT)

    def write_rows(self, name: str, rows: List[Dict[str, Any]], columns: List[str]) -> str:
        """Write a list of row dictionaries."""
        return self.write_csv(name, pd.DataFrame(rows, columns = columns), columns = columns)

    def write_json(self, name: str, payload: Dict[str, Any], run_config: Dict[str, Any]) -> str:
        """
        Write a JSON report echoing the resolved configuration and the version stamp.

        Returns:
            Path of the written file
        """
        path = self._path(name)
        document = {'version': self.version, 'config': run_config, 'report': payload}
        text = json.dumps(document, indent = 2, sort_keys = True, default = _plain, allow_nan = True)
        with open(path, 'w', encoding = 'utf-8', newline = '\n') as handle:
            handle.write(text + '\n')
        logger.info(f"Wrote report {path}")
        return path
