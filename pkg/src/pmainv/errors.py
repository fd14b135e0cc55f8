"""Exception hierarchy.

Every error carries a machine-readable ``code`` that the command line
front end copies into its JSON output. ``UserError`` subclasses map to exit
status 2, ``IdentityViolation`` to exit status 3.
"""

from __future__ import annotations


class PmaError(Exception):
    code = "error"


class UserError(PmaError):
    code = "user_error"


class ExprSyntaxError(UserError):
    code = "syntax_error"

    def __init__(self, message: str, text: str = "", position: int = 0, line: int | None = None):
        self.message = message
        self.text = text
        self.position = position
        self.line = line
        where = f"line {line}, column {position + 1}" if line is not None else f"column {position + 1}"
        super().__init__(f"{message} at {where}")


class UnknownVariable(ExprSyntaxError):
    code = "unknown_variable"


class ZeroDenominator(UserError):
    code = "zero_denominator"


class PoleAtPoint(UserError):
    code = "pole_at_point"


class NotInvertible(UserError):
    code = "not_invertible"


class NotContact(UserError):
    code = "not_contact"


class NotParabolic(UserError):
    code = "not_parabolic"


class DegenerateEquation(UserError):
    code = "degenerate_equation"


class NotLagrangian(UserError):
    code = "not_lagrangian"


class NotInContactPlane(UserError):
    code = "not_in_contact_plane"


class RankDeficient(UserError):
    code = "rank_deficient"


class ZNotInContactPlane(UserError):
    code = "z_not_in_contact_plane"


class NotGeneric(UserError):
    code = "not_generic"


class SingularFrame(UserError):
    code = "singular_frame"


class VanishingSemiInvariant(UserError):
    code = "vanishing_semi_invariant"

    def __init__(self, which: str):
        self.which = which
        super().__init__(f"{which} vanishes identically; the invariants built on it are undefined")


class NoWitnessFound(UserError):
    """Budget exhausted without a full-rank witness. Inconclusive, not a proof of dependence."""

    code = "no_witness_found"

    def __init__(self, message: str, certificate=None):
        self.certificate = certificate
        super().__init__(message)


class SizeCeilingExceeded(PmaError):
    """Internal signal: a symbolic intermediate grew past the configured term ceiling."""

    code = "size_ceiling_exceeded"

    def __init__(self, stage: str, size: int, ceiling: int):
        self.stage = stage
        self.size = size
        self.ceiling = ceiling
        super().__init__(f"{stage}: {size} terms exceeds ceiling {ceiling}")


class IdentityViolation(PmaError):
    """An identity that must hold exactly failed. Indicates a bug, not bad input."""

    code = "identity_violation"
