"""Exception types shared across the package."""


class SlipchanError(Exception):
    """Base class for all package-specific errors."""


class NoRootInBracket(SlipchanError):
    """A transcendental branch equation changed sign in neither branch.

    This signals an internal bracketing bug: the analysis guarantees exactly
    one root per bracket, so user input can never trigger it.
    """


class InvalidIndex(SlipchanError):
    """Mode index violates a structural precondition (e.g. p=0 Dirichlet)."""


class InvalidCase(SlipchanError):
    """Index/friction/family combination does not correspond to a mode family."""


class ZeroMode(SlipchanError):
    """The planar coefficients annihilate the eigenfunction."""


class InvalidCount(SlipchanError):
    """A requested enumeration length is not positive."""


class StabilityViolation(SlipchanError):
    """Explicit time step too large for the stiffest retained mode."""


class BlowupDetected(SlipchanError):
    """Galerkin coefficient norm exceeded the blow-up guard."""


class HypothesisViolated(SlipchanError):
    """Closed-form solution requested outside its coefficient hypotheses."""


class ResonanceImpossible(SlipchanError):
    """A Neumann profile denominator vanished; unreachable for valid input."""


class NonConvergence(SlipchanError):
    """The finite-difference oracle's eigensolve failed to converge."""
