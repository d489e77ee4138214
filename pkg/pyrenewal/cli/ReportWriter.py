import json
import logging
import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pandas as pd
from prometheus_client import write_to_textfile

from metrics.Metrics import Metrics


class ReportWriter:
    """ Save run results to the output dir: csv tables, json summaries and the metrics textfile """

    # Fixed 17 significant digits, so equal runs give equal files
    float_format = "%.17g"

    def __init__(self, out_dir: str):
        self._logger = logging.getLogger(self.__class__.__name__)
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def write_frame(self, name: str, frame: pd.DataFrame) -> Path:
        file_path = Path(self.out_dir, f"{name}.csv")
        self._logger.info(f"Saving {len(frame)} rows to {file_path}")
        frame.to_csv(str(file_path), index=False, float_format=ReportWriter.float_format)
        return file_path

    def write_json(self, name: str, data: dict) -> Path:
        file_path = Path(self.out_dir, f"{name}.json")
        self._logger.info(f"Saving {file_path}")
        with open(file_path, "w", encoding="utf-8") as file:
            json.dump(ReportWriter.jsonable(data), file, indent=2, sort_keys=True)
            file.write("\n")
        return file_path

    def write_error(self, error: Exception, raw_config=None) -> Path:
        report = {"error": error.__class__.__name__,
                  "message": str(error),
                  "fields": getattr(error, "fields", []),
                  "config": raw_config}
        return self.write_json("error", report)

    def write_metrics(self, metrics: Metrics) -> Path:
        file_path = Path(self.out_dir, "metrics.prom")
        write_to_textfile(str(file_path), metrics.registry)
        return file_path

    @staticmethod
    def jsonable(value):
        """ Plain json types: rationals as strings, non-finite floats as "inf", "-inf", "nan" """
        if isinstance(value, dict):
            return {str(key): ReportWriter.jsonable(val) for key, val in value.items()}
        if isinstance(value, (list, tuple)):
            return [ReportWriter.jsonable(val) for val in value]
        if isinstance(value, np.ndarray):
            return [ReportWriter.jsonable(val) for val in value.tolist()]
        if isinstance(value, Fraction):
            return str(value)
        if isinstance(value, (bool, np.bool_)):
            return bool(value)
        if isinstance(value, (int, np.integer)):
            return int(value)
        if isinstance(value, (float, np.floating)):
            value = float(value)
            return value if math.isfinite(value) else str(value)
        if value is None or isinstance(value, str):
            return value
        return str(value)
