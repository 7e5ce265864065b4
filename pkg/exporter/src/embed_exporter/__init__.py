"""Embedding export jobs for the text2gloss toolkit's file formats."""

__version__ = "0.1.0"

from .contextual import ContextualExportSummary, export_contextual
from .errors import AlignmentError, CorpusError, ExporterError, ModelError
from .static import StaticExportSummary, export_static

__all__ = [
    "AlignmentError",
    "ContextualExportSummary",
    "CorpusError",
    "ExporterError",
    "ModelError",
    "StaticExportSummary",
    "export_contextual",
    "export_static",
    "__version__",
]
