class WalkCountError(Exception):
    pass


class DimensionMismatchError(WalkCountError, ValueError):
    pass


class NotUnitaryError(WalkCountError, ValueError):
    pass


class DomainError(WalkCountError, ValueError):
    """An argument lies outside the domain of the operation"""
    pass


class DegenerateMarkingError(WalkCountError, ValueError):
    """
    A marking leaves a vertex class empty (k in {0, n}) where the operation
    needs every class to be populated
    """
    pass


class ScopeError(WalkCountError, ValueError):
    """The bipartite counting algorithm only covers n1 = n2 and k1 = k2"""
    pass


class ColoringError(WalkCountError, ValueError):
    pass


class ConfigError(WalkCountError, ValueError):
    pass


class SubspaceLeakError(WalkCountError):
    """The search operator maps a reduced-basis vector outside the reduced subspace"""
    pass
