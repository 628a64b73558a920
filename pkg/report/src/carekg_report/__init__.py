from .errors import ReportError, ReportDataError
from .flows import read_flows
from .sankey import render_sankey
from .barchart import render_metrics, read_summary, Y_SCALE

__version__ = "0.1.0"

__all__ = [
    "ReportError", "ReportDataError",
    "read_flows", "render_sankey",
    "read_summary", "render_metrics", "Y_SCALE",
    "__version__",
]
