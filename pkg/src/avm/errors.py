"""Exception types shared across the engine."""


class AvmError(Exception):
    """Base class for engine errors."""


class ConfigError(AvmError):
    """A parameter or configuration value is invalid for the given data."""


class EmptyDataError(AvmError):
    """An operation received an empty dataset."""


class InsufficientDataError(AvmError):
    """Too few rows for the requested fit or split."""


class DomainError(AvmError):
    """An input value is outside the mathematical domain of the operation."""


class ContractViolation(AvmError):
    """A caller broke a documented precondition."""


class ConflictError(AvmError):
    """A write conflicts with already-persisted state."""


class GeocodeNotFound(AvmError):
    """Address unknown to every configured geocoding source."""


class GeocodeUnavailable(AvmError):
    """External geocoder failed; the caller may retry."""


class OsmXmlError(AvmError):
    """Malformed OSM XML input."""
