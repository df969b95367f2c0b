class ValidationError(ValueError):
    """Bad input: malformed key, image or file."""


class KeyValidationError(ValidationError):
    pass


class NonSquareImageError(ValidationError):
    pass


class ImageFormatError(ValidationError):
    pass


class MalformedHeaderError(ImageFormatError):
    pass


class UnsupportedMaxvalError(ImageFormatError):
    pass


class TruncatedPayloadError(ImageFormatError):
    pass


class PixelRangeError(ValidationError):
    pass


class InvalidParameterError(ValidationError):
    pass


class UndefinedCorrelationError(ValueError):
    pass


class AttackFailure(RuntimeError):
    """The attack could not complete; ``stage`` names the step that failed."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
