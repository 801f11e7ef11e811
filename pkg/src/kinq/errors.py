"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: ConfigError -> 1, numerical
non-convergence -> 2, model errors -> 3.
"""


class KinqError(Exception):
    """Base class for all package errors."""


class ConfigError(KinqError):
    """Invalid configuration, file schema, or argument combination."""


# --- numerical non-convergence (exit code 2) ---

class NumericalError(KinqError):
    """Base for errors where an algorithm failed to reach tolerance."""


class QuadratureNotConverged(NumericalError):
    """Adaptive quadrature could not meet tolerance within its budget."""


class NoSignChange(NumericalError):
    """Root bracket endpoints do not straddle a sign change."""


class NoConvergence(NumericalError):
    """Iterative solve (eigensolver, junction fit, ...) did not converge."""


class DimensionOverflow(NumericalError):
    """Requested Fock-space dimension exceeds the configured cap."""


# --- model errors (exit code 3) ---

class ModelError(KinqError):
    """Base for errors indicating an unphysical or ill-posed model."""


class InvalidRegime(ModelError):
    """Inputs outside the validity domain of a formula (e.g. sigma2 <= 0)."""


class DomainError(ModelError):
    """Argument outside a mathematical domain (e.g. elliptic modulus >= 1)."""


class NotHermitian(ModelError):
    """Matrix handed to the Hermitian eigensolver is not Hermitian."""


class SingularNetwork(ModelError):
    """Netlist admittance matrix is singular (floating subgraph, ...)."""


class PoleNotBracketed(ModelError):
    """Impedance sampling too coarse to bracket a mode pole."""


class NegativeEffectiveImpedance(ModelError):
    """Pole slope gave a non-positive effective impedance."""


class DegenerateModes(ModelError):
    """Eigenmode spacing below the resolution threshold."""


class TruncationTooSmall(ModelError):
    """Fock truncation cannot represent the requested expansion order."""


class LabelingAmbiguous(ModelError):
    """Eigenstate-to-Fock-label assignment fell below the overlap threshold."""
