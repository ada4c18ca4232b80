"""Tolerance configuration shared by all numerical predicates."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Relative tolerances used throughout the package.

    Every threshold is applied relative to the scale of its input (a norm,
    clamped below by 1 where an absolute floor makes sense), so the defaults
    behave uniformly for inputs of norm around one.

    Attributes
    ----------
    spec : float
        Spectral decomposition accuracy: Hermiticity checks and
        reconstruction residuals of eigendecompositions.
    rank : float
        Rank decisions when orthonormalizing spanning sets; singular values
        or residual norms at or below ``rank * scale`` count as zero.
    member : float
        Subspace membership: largest acceptable residual of a vector
        against an orthonormal basis.
    gap : float
        Spectral clustering: eigenvalues closer than ``gap * norm`` are
        treated as a single cluster, and spectral cuts must stay at least
        this far from every eigenvalue.
    """

    spec: float = 1e-10
    rank: float = 1e-9
    member: float = 1e-8
    gap: float = 1e-7

    def with_member(self, member):
        return replace(self, member=member)

    def with_spec(self, spec):
        return replace(self, spec=spec)


DEFAULT_TOL = Tolerances()
