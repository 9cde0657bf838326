"""Exception hierarchy shared by all voicemorph modules."""


class VoiceMorphError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(VoiceMorphError):
    pass


class UnsupportedRate(VoiceMorphError):
    pass


class InvalidParams(VoiceMorphError):
    pass


class OutOfRange(VoiceMorphError):
    pass


class InvalidAnchors(VoiceMorphError):
    pass


class GridMismatch(VoiceMorphError):
    pass


class DomainError(VoiceMorphError):
    pass


class InvalidWeights(VoiceMorphError):
    pass


class AnchorTopologyMismatch(VoiceMorphError):
    pass


class DegenerateTriangle(VoiceMorphError):
    pass


class NotAVocpFile(VoiceMorphError):
    pass


class CorruptFile(VoiceMorphError):
    pass


class UnsupportedVersion(VoiceMorphError):
    pass


class InvalidObjectFile(VoiceMorphError):
    pass


class RateMismatch(VoiceMorphError):
    pass
