class GeometryError(ValueError):
    """Positions that the far-field LoS model cannot represent."""


class PartitionError(ValueError):
    """Sub-array count that does not divide the array axis."""


class ConfigError(ValueError):
    """Malformed or inconsistent simulation configuration."""


class CodebookFormatError(ValueError):
    """Codebook file that cannot be decoded into sensing matrices."""


class NumericalGuardError(ArithmeticError):
    """A numerical guard or oracle check tripped."""
