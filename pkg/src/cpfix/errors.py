"""Exception types shared across the toolkit."""


class CpfixError(Exception):
    """Base class for all cpfix errors."""


class ShapeMismatch(CpfixError):
    """Operands have incompatible shapes or block structures."""


class NotHermitian(CpfixError):
    """A matrix required to be Hermitian is not, within tolerance."""


class NoConvergence(CpfixError):
    """An iterative or spectral routine failed to stabilize."""


class NotPSD(CpfixError):
    """A matrix required to be positive semidefinite has a negative eigenvalue."""


class NotProjection(CpfixError):
    """An element is not a self-adjoint idempotent, even after spectral rounding."""


class NotUnitary(CpfixError):
    """A matrix required to be unitary is not, within tolerance."""


class InvalidFamily(CpfixError):
    """Generators do not form a commuting contractive CP family."""


class NotContractive(CpfixError):
    """A map required to be contractive has phi(1) > 1."""


class CoInvarianceViolated(CpfixError):
    """alpha(1-p) <= 1-p fails for some generator."""


class SemigroupLawViolated(CpfixError):
    """Compressed generators do not satisfy the semigroup law."""


class Divergent(CpfixError):
    """An orbit failed the Cauchy stopping rule before the iteration cap."""


class NotInCStar(CpfixError):
    """Input lies outside the algebra generated by the fixed-point space."""


class NotFixed(CpfixError):
    """Input is not a fixed point of the semigroup."""


class Inconsistent(CpfixError):
    """Two independent computation routes disagree; numerical alarm."""


class UnknownFamily(CpfixError):
    """Demo family name not recognized."""


class ParseError(CpfixError):
    """Malformed problem file (bad JSON, schema, or dimensions)."""


class ValidationFailed(CpfixError):
    """A problem file parsed but its contents fail validation."""
