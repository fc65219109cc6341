"""Figure rendering for quenchlab CSV/manifest bundles."""

__version__ = "0.1.0"

from .figures import FIGURE_IDS, DataFile, FigureSpec, SchemaError, read_csv
from .render import render
