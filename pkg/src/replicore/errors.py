"""Exception types raised by replicore."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class StructureError(ValueError):
    """Input data does not have the required layout (e.g. an unbalanced table)."""
