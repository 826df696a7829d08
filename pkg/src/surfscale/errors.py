'''Exception types shared across the library.'''

from __future__ import annotations


class SurfscaleError(Exception):
    '''Base class for all library-specific errors.'''


class NonUniqueProjection(SurfscaleError):
    '''Two surface candidates are within tolerance of equal distance.

    Raised only when the caller asks for strict uniqueness; the default
    projection path returns the lexicographically smaller candidate and
    sets a degeneracy flag instead.
    '''


class NoConvergence(SurfscaleError):
    '''Iterative projection failed to converge within max_iter steps.'''


class NotOnSurface(SurfscaleError):
    '''A point claimed to lie on a surface is farther than tolerance from it.'''


class UnsupportedSurface(SurfscaleError):
    '''Operation not available for this surface kind (e.g. measure of an implicit surface).'''


class InvalidDensity(SurfscaleError):
    '''A density oracle returned a negative value or exceeded its declared sup bound.'''


class RejectionBudgetExceeded(SurfscaleError):
    '''Rejection sampling used up its proposal budget; sup_bound is probably a gross overestimate.'''


class DegenerateInput(SurfscaleError):
    '''Geometric input too degenerate for the requested construction.'''


class NotAdjacent(SurfscaleError):
    '''The two sites do not share a Voronoi face.'''


class CurveEscapes(SurfscaleError):
    '''A navigation curve leaves the unit square.'''


class TruncationTooTight(SurfscaleError):
    '''Fitted integrand tail beyond the truncation point exceeds the allowed mass.'''


class HypothesisViolation(SurfscaleError):
    '''Scene parameters violate the hypotheses a formula requires (e.g. a partial derivative >= 0).'''


class DegenerateVariance(SurfscaleError):
    '''A variance estimate needed for a log-log fit is not strictly positive.'''


class DegenerateSample(SurfscaleError):
    '''A replicate sample cannot be standardized (zero spread).'''


class UnknownName(SurfscaleError):
    '''Lookup in a named catalog failed; carries the available names.'''

    def __init__(self, kind: str, name: str, options):
        self.kind = kind
        self.name = name
        self.options = sorted(options)
        super().__init__('unknown %s %r; available: %s'
                         % (kind, name, ', '.join(self.options)))
