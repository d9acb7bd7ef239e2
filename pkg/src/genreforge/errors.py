"""Exception hierarchy shared by all genreforge modules."""


class GenreForgeError(Exception):
    """Base class for every error raised by the package."""


# audio decoding
class WavError(GenreForgeError, ValueError):
    pass


class MalformedContainer(WavError):
    pass


class UnsupportedFormat(WavError):
    pass


class EmptyAudio(WavError):
    pass


class NoAudioFound(GenreForgeError):
    pass


# features
class TooShort(GenreForgeError, ValueError):
    pass


class DegenerateFilter(GenreForgeError, ValueError):
    pass


# data handling
class DimensionMismatch(GenreForgeError, ValueError):
    pass


class ClassTooSmall(GenreForgeError, ValueError):
    pass


class SchemaMismatch(GenreForgeError, ValueError):
    pass


# models
class KTooLarge(GenreForgeError, ValueError):
    pass


class SingleClass(GenreForgeError, ValueError):
    pass


class EmptyNode(GenreForgeError, ValueError):
    pass


class NonFiniteLoss(GenreForgeError, ArithmeticError):
    """Training diverged; usually the learning rate is too high."""


class CorruptModelFile(GenreForgeError):
    pass


class UnsupportedVersion(GenreForgeError):
    pass


# evaluation
class LengthMismatch(GenreForgeError, ValueError):
    pass


class EmptyInput(GenreForgeError, ValueError):
    pass


class IndexOutOfRange(GenreForgeError, IndexError):
    pass
