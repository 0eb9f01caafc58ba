"""Exception types shared across the engine.

The CLI maps these onto its documented exit codes, so raising the right
class is part of the public contract, not just diagnostics.
"""


class SwdeError(Exception):
    """Base class for all engine errors."""


class DimensionError(SwdeError):
    """Operand shapes are incompatible. The message names both shapes."""


class DegenerateInputError(SwdeError):
    """Input is structurally too small or empty for the requested operation."""


class NumericError(SwdeError):
    """A non-finite value appeared. The message names the op or tensor."""


class CorpusError(SwdeError):
    """Corpus file missing, unreadable, or contains no valid records."""


class ConfigError(SwdeError):
    """A configuration field is missing, unknown, or out of range."""


class UnlabeledPostsError(SwdeError):
    """Evaluation was asked to score posts that carry no ground truth."""

    def __init__(self, ids):
        self.ids = list(ids)
        shown = ", ".join(self.ids[:10])
        more = "" if len(self.ids) <= 10 else f" (+{len(self.ids) - 10} more)"
        super().__init__(f"{len(self.ids)} unlabeled post(s): {shown}{more}")


class ContainerError(SwdeError):
    """Model container is corrupt or has an unsupported format."""
