"""Exception hierarchy shared across the toolkit.

Everything raised on bad user input derives from DataError; InvariantError
marks internal contract violations (a bug, never bad input).
"""


class Text2GlossError(Exception):
    pass


class DataError(Text2GlossError):
    """Malformed or inconsistent input data."""


class ParseError(DataError):
    """Unreadable record in a corpus file (carries the line number)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class SchemaError(DataError):
    """Record parsed but violates the declared schema."""


class FormatError(DataError):
    """Embedding or model file does not match its file format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DomainError(DataError):
    """Operation called with values outside its domain."""


class EmbeddingLookupError(DataError):
    """A required contextual embedding record is missing."""

    def __init__(self, example_id: str, side: str):
        self.example_id = example_id
        self.side = side
        super().__init__(f"no contextual embeddings for ({example_id!r}, {side!r})")


class TrainingError(DataError):
    """Training input incomplete (e.g. an example without an alignment)."""


class FeatureError(DataError):
    """A token is missing an annotation required by the feature templates."""


class InvariantError(Text2GlossError):
    """An internal invariant was violated; indicates a bug, not bad input."""
