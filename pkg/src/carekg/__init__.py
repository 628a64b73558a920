"""Care-pathway knowledge graphs and outcome prediction pipeline."""

__version__ = "0.1.0"
