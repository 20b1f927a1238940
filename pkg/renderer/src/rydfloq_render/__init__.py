"""Figure rendering for rydfloq sweep and trajectory CSV files.

A thin, physics-free view layer: it reads the documented CSV + JSON sidecar
formats, validates the schema against the requested figure id, and draws the
corresponding publication-style panel.  All numbers come from the files.
"""

__version__ = "0.1.0"

from .render import PlotSpec, RenderError, SchemaError, render
from .schema import FIGURE_SCHEMAS, required_columns

__all__ = [
    "FIGURE_SCHEMAS",
    "PlotSpec",
    "RenderError",
    "SchemaError",
    "render",
    "required_columns",
]
