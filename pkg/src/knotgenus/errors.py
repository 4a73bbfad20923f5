"""Exception types shared across the package."""


class DomainError(ValueError):
    """A point was applied to a pairing outside its domain and range."""


class MergeConditionError(ValueError):
    """Two pairings do not satisfy the periodic-merge overlap condition."""


class TransmissionError(ValueError):
    """The mover's range is not contained in the transmitter's range."""


class EmptySystemError(ValueError):
    """An operation that needs at least one pairing was given none."""


class OracleCapacityError(ValueError):
    """A brute-force oracle was asked to materialize too many points."""


class InternalInvariantError(RuntimeError):
    """An internal invariant of the orbit counting algorithm failed."""


class InputError(ValueError):
    """Malformed or inconsistent user input."""


class StructureError(ValueError):
    """A gluing table is not structurally well-formed (broken involution)."""


class NoBoundaryError(ValueError):
    """A boundary operation was applied to a closed triangulation."""


class UnsupportedCaseError(ValueError):
    """The requested computation is outside the supported case split."""


class WitnessError(ValueError):
    """An assignment does not satisfy the exactly-one-true condition."""
