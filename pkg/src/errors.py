"""
Error types shared by every AxFi module

Each error carries a short ``kind`` string and the process exit code the
command line maps it to.
"""


class AxFiError(Exception):
    """Base class for all expected failures"""

    kind = 'error'
    exit_code = 10

    def to_dict(self):
        return {'error': self.kind, 'message': str(self)}


class VerificationError(AxFiError):
    """An invariant check of the verification suite failed"""
    kind = 'verification'
    exit_code = 1


class SchemaError(AxFiError):
    """Input file does not match the expected JSON layout"""
    kind = 'schema'
    exit_code = 3


class ResourceError(AxFiError):
    """An enumeration would exceed the configured cap"""
    kind = 'resource'
    exit_code = 4


class MethodError(AxFiError):
    """The requested algorithm does not apply to the given model"""
    kind = 'method'
    exit_code = 5


class DomainError(AxFiError):
    """A point lies outside the feature space"""
    kind = 'domain'
    exit_code = 6


class ArgumentError(AxFiError):
    """Arguments violate an operation's precondition"""
    kind = 'argument'
    exit_code = 7


class ConstructionError(AxFiError):
    """A generated fixture failed its own self-check"""
    kind = 'construction'
    exit_code = 8
