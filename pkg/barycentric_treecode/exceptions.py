class ImproperlyConfigured(Exception):
    """
    Custom exception raised for invalid settings or treecode parameters.
    """

    pass


class TreecodeError(Exception):
    """
    Base exception for runtime failures inside the package.
    """

    pass


class ChebyshevGridError(TreecodeError):
    """
    Custom exception raised when a Chebyshev grid would be degenerate.
    """

    pass


class KernelError(TreecodeError):
    """
    Custom exception raised for invalid kernel evaluations.
    """

    pass


class TreeError(TreecodeError):
    """
    Custom exception raised for particle systems a cluster tree cannot be built from.
    """

    pass


class ExperimentError(TreecodeError):
    """
    Custom exception raised when an experiment, particle file, or error computation fails.
    """

    pass
