"""Figure rendering for the ring-agent simulator's CSV/JSON artifacts."""

from .io import SchemaError, Table, k_row_from_limit, read_limit_json, read_table
from .render import KINDS, FigureSpec, render, wrap_with_breaks

__version__ = "0.1.0"
