"""Two-phase podcast summarization toolkit.

Phase 1 selects the transcript sentences worth keeping (sliding-window
ROUGE, a novelty-enhanced variant, or topic-weighted picks); phase 2 caps
the selection at a token budget and hands it to a pluggable abstractive
backend. Corpus filtering and a ROUGE-L evaluation harness round out the
batch workflow.
"""

from .errors import (BackendError, ConfigError, EmptyDocumentError,
                     InsufficientContentError, MissingReferenceError,
                     PodselectError, ProtocolError, RecordParseError)

__version__ = "0.1.0"

__all__ = [
    "BackendError",
    "ConfigError",
    "EmptyDocumentError",
    "InsufficientContentError",
    "MissingReferenceError",
    "PodselectError",
    "ProtocolError",
    "RecordParseError",
    "__version__",
]
