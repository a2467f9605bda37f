"""Exception types shared across the toolkit."""


class PowerGANError(Exception):
    """Base class for all toolkit errors."""


class SeriesTooShort(PowerGANError):
    """Series has fewer samples than one window."""


class EmptyClass(PowerGANError):
    """An appliance label has no accepted windows."""


class InvalidLabel(PowerGANError):
    """Label index or name outside the known class set."""


class InvalidStage(PowerGANError):
    """Stage index outside the progressive schedule."""


class InvalidShape(PowerGANError):
    """Array shape incompatible with the operation."""


class EmptyBatch(PowerGANError):
    """A score batch is empty."""


class InvalidPairing(PowerGANError):
    """Real/fake batches differ in size or labels."""


class EmptyDataset(PowerGANError):
    """No training windows available."""


class NonFiniteLoss(PowerGANError):
    """Training produced a NaN or infinite loss."""


class IncompatibleCheckpoint(PowerGANError):
    """Checkpoint config snapshot does not match the dataset or request."""


class GenerationStarved(PowerGANError):
    """Rejection sampling exhausted its budget."""

    def __init__(self, message, acceptance_rate=None):
        super().__init__(message)
        self.acceptance_rate = acceptance_rate


class InsufficientClasses(PowerGANError):
    """Classifier training needs at least two classes."""


class InvalidDistribution(PowerGANError):
    """Rows are not probability vectors."""


class EmptyCorpus(PowerGANError):
    """A feature set or corpus directory is empty."""


class IoError(PowerGANError):
    """File could not be read or written."""
