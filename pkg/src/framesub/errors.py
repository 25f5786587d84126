"""Exception hierarchy shared by all framesub modules."""


class FramesubError(Exception):
    """Base class. ``code`` is the machine-readable tag used by the CLI."""

    code = "error"

    def __init__(self, message, **context):
        super().__init__(message)
        self.message = message
        self.context = {k: v for k, v in context.items() if v is not None}


class InvalidInputError(FramesubError, ValueError):
    code = "invalid-input"


class InvalidConfigError(FramesubError, ValueError):
    code = "invalid-config"


class InvalidModelError(FramesubError, ValueError):
    code = "invalid-model"


class BarrierViolationError(FramesubError, ValueError):
    code = "barrier-violation"


class SelectionFailureError(FramesubError, RuntimeError):
    """No candidate passed the BSS selection test in some iteration."""

    code = "selection-failure"

    def __init__(self, message, iteration=None, **context):
        super().__init__(message, iteration=iteration, **context)
        self.iteration = iteration


class InternalInvariantError(FramesubError, RuntimeError):
    code = "internal-invariant"


class RankError(FramesubError, ArithmeticError):
    """Design matrix without full column rank."""

    code = "rank-error"

    def __init__(self, message, sigma_min=None, **context):
        super().__init__(message, sigma_min=sigma_min, **context)
        self.sigma_min = sigma_min


class CapabilityError(FramesubError, RuntimeError):
    code = "capability"
