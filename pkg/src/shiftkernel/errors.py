"""Exception hierarchy shared by all shiftkernel modules."""


class ShiftKernelError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(ShiftKernelError):
    """Malformed or unreadable on-disk artifact (descriptor file, model file, ...)."""


class VersionError(FormatError):
    """File written by a newer format version than this code understands."""


class DimensionError(ShiftKernelError):
    """Vector/matrix dimensions are incompatible."""


class DataValueError(ShiftKernelError):
    """Non-finite or otherwise out-of-domain numeric value."""


class SizeError(ShiftKernelError):
    """A requested count exceeds (or underruns) what the data can supply."""


class CapacityError(ShiftKernelError):
    """Simulator or embedding capacity exceeded (qubit count, rotation slots)."""


class UnresolvedReferenceError(ShiftKernelError):
    """Target rows referencing (molecule_id, atom_index) pairs with no descriptor."""

    def __init__(self, offenders):
        self.offenders = list(offenders)
        preview = ", ".join(f"({m}, {a})" for m, a in self.offenders[:5])
        more = "" if len(self.offenders) <= 5 else f" and {len(self.offenders) - 5} more"
        super().__init__(f"{len(self.offenders)} target row(s) reference unknown atoms: {preview}{more}")


class ConditioningError(ShiftKernelError):
    """Linear solve failed even after diagonal jitter escalation."""

    def __init__(self, message, final_jitter):
        self.final_jitter = final_jitter
        super().__init__(f"{message} (final jitter tried: {final_jitter:g})")


class SearchError(ShiftKernelError):
    """Every hyperparameter trial failed."""


class ConfigError(ShiftKernelError):
    """Invalid configuration (kernel settings, CLI options, search spaces)."""
