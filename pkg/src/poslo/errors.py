class PosloError(Exception):
    """Base class for all library errors."""


class LengthError(PosloError, ValueError):
    pass


class FormatError(PosloError, ValueError):
    """Malformed wire data or a signature lacking a required field."""


class UnsupportedInput(PosloError, ValueError):
    """Input outside what the selected primitive suite can hash."""


class ExhaustedError(PosloError):
    """The signer has used every epoch (or entry) its key allows."""


class SeedNotDisclosed(PosloError):
    """A queried epoch is not covered by the disclosed-seed stack."""

    def __init__(self, epoch: int):
        super().__init__(f"seed for epoch {epoch} has not been disclosed")
        self.epoch = epoch


class StateError(PosloError):
    """Operation inconsistent with key or cold-data state."""


class SequenceError(PosloError):
    """Epochs or entries arrived out of order."""
