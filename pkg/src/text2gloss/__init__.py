"""Text-to-gloss translation: select glosses per source word, then reorder into sign order."""

__version__ = "0.1.0"
