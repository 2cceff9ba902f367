"""Exception classes shared across the toolkit.

Every class carries an ``exit_code`` used by the command line front end
to map error categories to process exit statuses.
"""


class ElastArmError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ConfigError(ElastArmError):
    """Malformed or inconsistent configuration file.

    Carries the section/key (and line number when known) so messages
    point at the offending location.
    """

    exit_code = 2

    def __init__(self, message, section=None, key=None, line=None):
        self.section = section
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if section is not None:
            where.append(f"[{section}]")
        if key is not None:
            where.append(key)
        prefix = " ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class InvalidModelError(ElastArmError):
    """Robot model is malformed or dimensions do not match."""

    exit_code = 3


class InvalidConfigurationError(ElastArmError):
    """Inconsistent compensator/joint assignment (e.g. duplicate joints)."""

    exit_code = 3


class UnderActuatedError(ElastArmError):
    """Full 6x6 Cartesian stiffness requested for a chain with n < 6."""

    exit_code = 3


class UnreachableTargetError(ElastArmError):
    """Inverse kinematics did not converge; carries the final residual."""

    exit_code = 4

    def __init__(self, message, position_residual=None, orientation_residual=None):
        self.position_residual = position_residual
        self.orientation_residual = orientation_residual
        super().__init__(message)


class SingularGeometryError(ElastArmError):
    """Compensator geometry folded to zero spring length."""

    exit_code = 5


class SingularConfigurationError(ElastArmError):
    """Jacobian condition number above the configured threshold."""

    exit_code = 5

    def __init__(self, message, condition=None):
        self.condition = condition
        super().__init__(message)


class UnidentifiableSetError(ElastArmError):
    """Normal equations rank deficient; lists null-space combinations."""

    exit_code = 6

    def __init__(self, message, combinations=()):
        self.combinations = tuple(combinations)
        if self.combinations:
            message += "; undetermined direction(s): " \
                + "; ".join(self.combinations)
        super().__init__(message)


class NonConvergenceError(ElastArmError):
    """Iterative estimator exhausted its iteration budget."""

    exit_code = 6


class CompensationFailureError(ElastArmError):
    """Pose compensation fixed point did not converge."""

    exit_code = 7

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)
