"""Exception types shared across the toolkit."""


class OscillabError(Exception):
    """Base class for every toolkit error."""


class BadParams(OscillabError):
    """Malformed or out-of-contract argument values."""


class ZeroMass(OscillabError):
    """An average was requested over a set of zero measure."""


class ZeroMassBaseSet(OscillabError):
    """A kind-mandated base set has zero measure and cannot be dropped."""


class EmptyBase(OscillabError):
    """No base set survives construction."""


class ExponentOutOfRange(OscillabError):
    """An exponent violates its admissible range (e.g. p <= 1 for A_p)."""


class OverflowGuard(OscillabError):
    """An intermediate power left the representable range; rescale the input."""


class IncompatibleBase(OscillabError):
    """The maximal-operator mode cannot run on this base kind."""


class NonConvergence(OscillabError):
    """The iterated-maximal series failed to meet its stopping rule."""


class ZeroInput(OscillabError):
    """The seed function is zero (or invisible) almost everywhere."""


class IncompatibleSpec(OscillabError):
    """The oscillation functional does not fit the supplied data or measure."""


class NotDyadic(OscillabError):
    """A dyadic-only routine received a non-dyadic base or box."""


class DegenerateInput(OscillabError):
    """The input is constant where a nonzero oscillation is required."""


class EmptySequence(OscillabError):
    """A coefficient sequence has no nonzero entries."""


class MissingInput(OscillabError):
    """A certificate is missing a required input field."""


class EmptyCorpus(OscillabError):
    """A constant estimator received an empty corpus."""


class AllDegenerate(OscillabError):
    """Every corpus instance was degenerate for the requested ratio."""
