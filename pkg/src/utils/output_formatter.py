import json
from typing import Any, Dict, List
from pathlib import Path
from datetime import datetime

import numpy as np
import pandas as pd

CSV_COLUMNS = ['config_hash', 'metric', 'estimate', 'half_width', 'bound', 'pass']


def _to_builtin(value: Any) -> Any:
    """Convert numpy scalars and arrays for JSON."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


class OutputFormatter:
    """Utility class for formatting and saving experiment reports."""

    @staticmethod
    def save_json(data: Dict[str, Any], output_path: str, pretty: bool = True):
        """
        Save data as JSON file.

        Args:
            data: Data to save
            output_path: Path to output file
            pretty: Whether to pretty-print JSON
        """
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)

        with open(path, 'w', encoding='utf-8') as f:
            if pretty:
                json.dump(data, f, indent=2, sort_keys=True, ensure_ascii=False, default=_to_builtin)
            else:
                json.dump(data, f, sort_keys=True, ensure_ascii=False, default=_to_builtin)

    @staticmethod
    def load_json(input_path: str) -> Dict[str, Any]:
        """
        Load data from JSON file.

        Args:
            input_path: Path to input file

        Returns:
            Loaded data
        """
        with open(input_path, 'r', encoding='utf-8') as f:
            return json.load(f)

    @staticmethod
    def save_csv(rows: List[Dict[str, Any]], output_path: str):
        """
        Save metric rows as CSV with the fixed column set.

        Args:
            rows: Row dictionaries; missing columns become empty cells
            output_path: Path to output file
        """
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame(rows, columns=CSV_COLUMNS)
        frame.to_csv(path, index=False, encoding='utf-8', lineterminator='\r\n')

    @staticmethod
    def load_csv(input_path: str) -> pd.DataFrame:
        return pd.read_csv(input_path, encoding='utf-8')

    @staticmethod
    def create_summary_report(command: str, report: Dict[str, Any], rows: List[Dict[str, Any]]) -> str:
        """
        Create a plain-text summary of one command's report.

        Args:
            command: Subcommand name
            report: Full report dictionary
            rows: Metric rows written to CSV

        Returns:
            Formatted summary report
        """
        output = []
        output.append("=" * 80)
        output.append(f"ALGREALISM REPORT: {command.upper()}")
        output.append("=" * 80)
        output.append(f"Generated: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
        output.append(f"Version: {report.get('version', 'unknown')}")
        output.append(f"Config hash: {report.get('config_hash', 'unknown')}")
        output.append(f"Seed: {report.get('seed', 'unknown')}")
        output.append(f"Status: {'PASS' if report.get('passed', True) else 'FAIL'}")
        output.append("")

        output.append("METRICS")
        output.append("-" * 80)
        for row in rows:
            line = f"{row['metric']}: {row['estimate']:.6g}"
            if row.get('half_width') is not None:
                line += f" +/- {row['half_width']:.3g}"
            if row.get('bound') is not None:
                line += f" (bound {row['bound']:.6g})"
            if row.get('pass') is not None:
                line += " PASS" if row['pass'] else " FAIL"
            output.append(line)

        return "\n".join(output)
