"""Exception types shared across the pipeline."""


class InputError(ValueError):
    """A caller-supplied value violates an operation's precondition."""


class FormatError(InputError):
    """A file or record does not match its expected format."""


class ModelLoadError(RuntimeError):
    """A model file is missing, unreadable, or structurally invalid."""


class TrainingError(RuntimeError):
    """Training cannot proceed or produced non-finite results."""


class NoFacesError(RuntimeError):
    """No faces were detected, so analytics cannot be produced."""
