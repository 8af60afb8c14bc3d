"""Exception hierarchy shared across the package."""


class WinfError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(WinfError):
    """An argument violates a documented precondition."""


class ModelSpecError(WinfError):
    """A density specification is structurally malformed."""


class ModelAssumptionError(WinfError):
    """A density model fails validation and was not force-accepted."""


class ConfigError(WinfError):
    """An experiment configuration is invalid or unreadable."""


class RecordSchemaError(WinfError):
    """A record file does not match the expected schema version."""


class DegenerateBlockError(WinfError):
    """A partition block carries zero mass under the model."""


class DepthError(DomainError):
    """A dyadic refinement depth exceeds the layer's allowed depth."""


class CertificationError(WinfError):
    """A transport certificate could not be assembled feasibly."""
