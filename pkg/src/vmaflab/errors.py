"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class LabError(Exception):
    exit_code = 1


class ConfigError(LabError):
    exit_code = 2


class SchemaError(ConfigError):
    """Model file does not match the documented schema."""


class MediaError(LabError):
    exit_code = 3


class ParseError(MediaError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class SizeError(MediaError):
    def __init__(self, message: str, expected: int, actual: int):
        super().__init__(f"{message}: expected {expected}, got {actual}")
        self.expected = expected
        self.actual = actual


class UnsupportedFormat(MediaError):
    pass


class WriteError(MediaError):
    pass


class ShapeError(LabError, ValueError):
    exit_code = 3


class EncoderError(LabError):
    exit_code = 4

    def __init__(self, message: str, returncode: int | None = None, stderr: str = ""):
        super().__init__(message)
        self.returncode = returncode
        self.stderr = stderr
