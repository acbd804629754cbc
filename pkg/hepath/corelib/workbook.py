"""
Spreadsheet export of benchmark reports using openpyxl.
"""

from typing import Any, Dict, List, Sequence, Tuple
import logging
import os as std_os

logger = logging.getLogger(__name__)

try:
    from openpyxl import Workbook, load_workbook
    from openpyxl.styles import Alignment, Font, PatternFill
    from openpyxl.utils import get_column_letter
except ImportError as e:
    logger.error("openpyxl not installed. Install with: pip install openpyxl")
    raise ImportError("openpyxl library is required for spreadsheet export") from e

HEADER_FILL = "D3D3D3"

Table = Tuple[Sequence[str], Sequence[Sequence[Any]]]


def _format_header(ws, width: int) -> None:
    for col in range(1, width + 1):
        cell = ws.cell(row=1, column=col)
        cell.font = Font(bold=True)
        cell.fill = PatternFill(start_color=HEADER_FILL, end_color=HEADER_FILL, fill_type="solid")
        cell.alignment = Alignment(horizontal="center")


def _auto_fit(ws) -> None:
    for column_cells in ws.columns:
        longest = max((len(str(c.value)) for c in column_cells if c.value is not None), default=0)
        ws.column_dimensions[get_column_letter(column_cells[0].column)].width = min(longest + 2, 50)


def write_tables(file_path: str, tables: Dict[str, Table]) -> bool:
    """
    Write one worksheet per table, header row formatted and columns auto-fit.

    Args:
        file_path: Target .xlsx file; overwritten if it exists.
        tables: Sheet name -> (headers, rows).

    Returns:
        True if the workbook was saved, False otherwise.

    Examples:
        >>> write_tables("bench.xlsx", {"Trials": (["trial", "bytes"], [[0, 10650]])})
        True
    """
    try:
        wb = Workbook()
        wb.remove(wb.active)
        for name, (headers, rows) in tables.items():
            ws = wb.create_sheet(name)
            ws.append(list(headers))
            for row in rows:
                ws.append(list(row))
            _format_header(ws, len(headers))
            _auto_fit(ws)
        std_os.makedirs(std_os.path.dirname(std_os.path.abspath(file_path)), exist_ok=True)
        wb.save(file_path)
        logger.info(f"Saved workbook to: {file_path}")
        return True
    except Exception as e:
        logger.error(f"Failed to save workbook '{file_path}': {e}")
        return False


def read_table(file_path: str, sheet_name: str) -> Dict[str, List[Any]]:
    """Read a sheet back as {'headers': [...], 'data': [[...], ...]}; empty dict on failure."""
    try:
        wb = load_workbook(file_path, read_only=True)
        if sheet_name not in wb.sheetnames:
            logger.error(f"Worksheet '{sheet_name}' not found")
            return {}
        rows = [list(r) for r in wb[sheet_name].iter_rows(values_only=True)]
        wb.close()
        if not rows:
            return {"headers": [], "data": []}
        return {"headers": rows[0], "data": rows[1:]}
    except Exception as e:
        logger.error(f"Failed to read table from '{file_path}': {e}")
        return {}
