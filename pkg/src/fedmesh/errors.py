"""Exception taxonomy shared across the package."""


class FedmeshError(Exception):
    """Base class for every error raised by this package."""


# --- topology ---------------------------------------------------------------

class InvalidSize(FedmeshError):
    pass


class InvalidIndex(FedmeshError):
    pass


class NotSymmetric(FedmeshError):
    pass


class SelfLoop(FedmeshError):
    pass


class Disconnected(FedmeshError):
    pass


class GenerationFailed(FedmeshError):
    pass


# --- data -------------------------------------------------------------------

class InvalidFraction(FedmeshError):
    pass


# --- learning ---------------------------------------------------------------

class UnknownTrainer(FedmeshError):
    pass


class EmptyData(FedmeshError):
    pass


class Diverged(FedmeshError):
    pass


class InsufficientData(FedmeshError):
    pass


# --- aggregation ------------------------------------------------------------

class ShapeMismatch(FedmeshError):
    pass


class TooFewVectors(FedmeshError):
    pass


# --- comms ------------------------------------------------------------------

class CodecError(FedmeshError):
    pass


class PayloadTooLarge(CodecError):
    pass


class UnknownType(CodecError):
    pass


class Truncated(CodecError):
    pass


class VersionMismatch(CodecError):
    pass


class ConnectFailed(FedmeshError):
    pass


class AlreadyConnected(FedmeshError):
    pass


# --- controller / scenario ----------------------------------------------------

class UnknownField(FedmeshError):
    pass


class InvalidScenario(FedmeshError):
    pass


class DeployFailed(FedmeshError):
    pass


class StartFailed(FedmeshError):
    pass


class RoundAborted(FedmeshError):
    pass


class IoError(FedmeshError):
    pass
