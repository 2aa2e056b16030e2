"""Exception types shared by every module."""


class ContractError(ValueError):
    """An argument violates a documented precondition."""


class ResourceError(MemoryError):
    """The requested size exceeds a configured memory or cost cap."""
