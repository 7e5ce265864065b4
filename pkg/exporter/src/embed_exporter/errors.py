"""Exporter error types.

Everything user-facing derives from ExporterError so the CLI can map the
whole family to one exit code.
"""


class ExporterError(Exception):
    """Base class for anything the exporter can reject."""


class CorpusError(ExporterError):
    """The corpus file is missing, unreadable, or malformed."""


class ModelError(ExporterError):
    """The model or tokenizer cannot be loaded or cannot serve the request."""


class AlignmentError(ExporterError):
    """Sub-word pieces cannot be grouped back onto the corpus tokens."""

    def __init__(self, message: str, example_id: str):
        self.example_id = example_id
        super().__init__(message)
