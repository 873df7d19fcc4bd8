"""Exception hierarchy.

Every error raised deliberately by this package derives from :class:`BklError`,
so callers (and the command line driver) can distinguish domain failures from
plain bugs.  The leaf classes are deliberately fine grained: numerical code
fails in many distinct ways and the caller usually wants to know which one it
was without parsing a message string.
"""


class BklError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(BklError):
    """A JSON document does not conform to one of the documented formats."""


# ---------------------------------------------------------------------------
# Lie algebra core


class InvalidStructure(BklError):
    """Structure constants fail antisymmetry or the Jacobi identity."""


class UnsupportedFamily(BklError):
    """Requested catalog family/parameter outside the supported range."""


class NonPositiveScale(BklError):
    """Metric scale factors must be strictly positive."""


class NotCompact(BklError):
    """The Killing form is not negative semi-definite."""


class UnrecognizedIdeal(BklError):
    """A simple ideal does not match any (dimension, rank) table row."""


class EmptyList(BklError):
    """A direct sum of zero summands was requested."""


# ---------------------------------------------------------------------------
# Root systems


class NotMaximalTorus(BklError):
    """The provided abelian subalgebra is not self-centralizing."""


class IrregularPositivity(BklError):
    """The positivity functional vanishes on some root."""


class DegenerateRootSpace(BklError):
    """Joint eigenspaces of the torus action fail to split into 2-planes."""


# ---------------------------------------------------------------------------
# Hermitian calculus


class IncompatibleStructure(BklError):
    """J fails J^2 = -I or metric compatibility beyond tolerance."""


class NonIntegrable(BklError):
    """The Nijenhuis tensor of J is not zero within tolerance."""


class DegreeOverflow(BklError):
    """A dense alternating tensor of degree > dimension was requested."""


# ---------------------------------------------------------------------------
# Standard model builder


class UnsupportedModel(BklError):
    """Unknown Sasaki block model name."""


class NonPositiveC(BklError):
    """Sasaki transverse curvature constant c must be > 0."""


class SpecInvariantViolated(BklError):
    """A build specification breaks a dimension/parity/rank constraint."""


class NonUnitaryA(BklError):
    """The torus complex-structure matrix is not an orthogonal complex
    structure commuting with the reference pairing."""


# ---------------------------------------------------------------------------
# Decomposition


class NotBKL(BklError):
    """Input fails the pluriclosed + parallel torsion verdict."""


class NoSamelsonTorus(BklError):
    """No J-invariant maximal torus with J-commuting adjoint action found."""


class OddBlock(BklError):
    """Transverse splitting produced a block of odd dimension."""


class PlaneNotInvariant(BklError):
    """A claimed root plane is not preserved by the Bismut connection."""


class PostCheckFailed(BklError):
    """A structural consequence of the decomposition failed numerically."""


# ---------------------------------------------------------------------------
# Enumeration


class DimensionTooLarge(BklError):
    """Enumeration requested beyond the guarded dimension range."""


class InconsistentBookkeeping(BklError):
    """Numerical invariants of a type entry contradict each other."""
