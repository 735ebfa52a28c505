"""Exception types. Validation failures on user-supplied shapes and words derive from ``InputError``."""


class InputError(ValueError):
    """A shape, word or file failed validation."""


class WordError(InputError):
    pass


class NotAlternatingError(WordError):
    def __init__(self, pair: tuple[int, int], message: str | None = None):
        self.pair = pair
        super().__init__(message or f"word is not alternating: letters {pair[0]} and {pair[1]} do not alternate")


class ShapeError(InputError):
    pass


class UnsupportedShapeError(ShapeError):
    """Raised when an operation needs an order-convex shape and gets something else."""
