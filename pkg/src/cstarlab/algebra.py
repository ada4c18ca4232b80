"""Concrete finite-dimensional *-algebras of complex matrices.

A :class:`StarAlgebra` is a subspace of ``N x N`` matrices closed under
products and adjoints, held as an orthonormal basis.  Closedness is what
separates an algebra from a mere subspace, so constructors either verify
it (:meth:`StarAlgebra.from_span`) or enforce it by iterating products
(:func:`generate_algebra`).

Every such algebra is semisimple and has a unit ``u`` (usually not the
ambient identity): the sum of squares of any spanning family has range
projection acting as the identity on the whole span.  ``unit_of`` computes
it that way and verifies the result.
"""

import numpy as np
from dataclasses import dataclass, field

import numpy.linalg as npl

from .config import DEFAULT_TOL
from .errors import (
    ClosureViolation,
    NotInAlgebra,
    NumericalFailure,
    ParamError,
    ShapeMismatch,
)
from .linalg import (
    Subspace,
    as_matrix,
    grow_span,
    hs_norm,
    orthonormalize,
    support_projection_of_psd,
)

__all__ = [
    "StarAlgebra",
    "generate_algebra",
    "unit_of",
    "unitize",
    "center",
    "random_self_adjoint",
]


def _pairwise_products(stack, shape):
    """All products b_a b_b of the stacked basis, flattened, plus adjoints."""
    n = shape[0]
    mats = stack.reshape(-1, n, n)
    prods = np.einsum("aij,bjk->abik", mats, mats).reshape(-1, n * n)
    adjs = mats.conj().transpose(0, 2, 1).reshape(-1, n * n)
    return np.vstack([prods, adjs])


def _max_membership_residual(space, candidates):
    """Largest relative distance from the rows of ``candidates`` to the span."""
    if candidates.shape[0] == 0:
        return 0.0
    coeff = candidates @ space.stack.conj().T
    resid = candidates - coeff @ space.stack
    norms = np.linalg.norm(resid, axis=1)
    scales = np.maximum(1.0, np.linalg.norm(candidates, axis=1))
    return float(np.max(norms / scales))


@dataclass(eq=False)
class StarAlgebra:
    """A *-closed algebra of ``N x N`` complex matrices.

    Attributes
    ----------
    basis : Subspace
        Orthonormal basis of the underlying subspace.
    unit : ndarray or None
        The multiplicative identity of the algebra (a projection in the
        ambient matrices), or None for the zero algebra.
    is_unitized : bool
        Whether this algebra was produced by adjoining the ambient
        identity to a smaller one.
    """

    basis: Subspace
    unit: np.ndarray | None = None
    is_unitized: bool = False

    @property
    def ambient_dim(self):
        return self.basis.rows

    @property
    def dim(self):
        return self.basis.dim

    def contains(self, x, tol=None):
        return self.basis.contains(x, tol=tol)

    def require_member(self, x, tol=None, what="element"):
        x = as_matrix(x, shape=self.basis.shape)
        if not self.contains(x, tol=tol):
            raise NotInAlgebra(
                f"{what} is not in the algebra "
                f"(residual {self.basis.residual(x):.3e})"
            )
        return x

    def closure_defect(self):
        """Largest residual of basis products/adjoints against the span."""
        cands = _pairwise_products(self.basis.stack, self.basis.shape)
        return _max_membership_residual(self.basis, cands)

    @classmethod
    def from_span(cls, mats, ambient_dim=None, tol=None, validate=True):
        """Build an algebra from a family already spanning one.

        The span must be closed under products and adjoints; when
        ``validate`` is set (the default) this is checked and a
        :class:`ClosureViolation` raised otherwise.  The unit is detected
        afterwards.
        """
        tol = DEFAULT_TOL if tol is None else tol
        shape = None if ambient_dim is None else (ambient_dim, ambient_dim)
        space = orthonormalize(mats, tol_rank=tol.rank, shape=shape)
        if space.rows != space.cols:
            raise ShapeMismatch("algebra elements must be square")
        alg = cls(basis=space)
        if validate and space.dim:
            defect = alg.closure_defect()
            if defect > tol.member:
                raise ClosureViolation(
                    f"span is not a *-closed algebra (residual {defect:.3e})"
                )
        alg.unit = unit_of(alg, tol=tol)
        return alg


def generate_algebra(ambient_dim, generators, include_identity=False, tol=None):
    """Smallest *-closed algebra of ``ambient_dim`` square matrices
    containing the generators.

    Iterates adjoints and pairwise products until the span stabilizes;
    with ``include_identity`` the ambient identity is adjoined first.
    The dimension can only grow, so at most ``ambient_dim ** 2`` rounds
    occur; exceeding that bound means the arithmetic went bad and raises
    :class:`NumericalFailure`.
    """
    tol = DEFAULT_TOL if tol is None else tol
    n = int(ambient_dim)
    if n < 1:
        raise ParamError(f"ambient dimension must be >= 1, got {ambient_dim}")
    seed = [as_matrix(g, shape=(n, n)) for g in generators]
    if include_identity:
        seed.append(np.eye(n, dtype=np.complex128))
    stack = np.zeros((0, n * n), dtype=np.complex128)
    if seed:
        stack, _ = grow_span(stack, np.array([g.ravel() for g in seed]), tol_rank=tol.rank)
    for _ in range(n * n + 1):
        if stack.shape[0] == 0:
            break
        cands = _pairwise_products(stack, (n, n))
        stack, grew = grow_span(stack, cands, tol_rank=tol.rank)
        if not grew:
            break
    else:  # pragma: no cover - closure must stabilize within n^2 rounds
        raise NumericalFailure("algebra closure failed to stabilize")
    alg = StarAlgebra(basis=Subspace(n, n, stack))
    alg.unit = unit_of(alg, tol=tol)
    return alg


def unit_of(algebra, tol=None):
    """The multiplicative identity of the algebra, or None if there is none.

    The candidate is the range projection of ``sum_i b_i* b_i`` over the
    orthonormal basis: its kernel is exactly the common kernel of the
    basis acting on the right, so for a *-closed algebra it acts as the
    identity on the span.  The candidate is verified (projection, member,
    two-sided identity on the basis) before being returned.
    """
    tol = DEFAULT_TOL if tol is None else tol
    space = algebra.basis
    if space.dim == 0:
        return None
    mats = space.matrices
    s = np.einsum("aij,aik->jk", mats.conj(), mats)
    u = support_projection_of_psd(s, tol=tol)
    checks = [
        hs_norm(u @ u - u),
        hs_norm(u - u.conj().T),
        space.residual(u),
        float(np.max(np.linalg.norm(np.einsum("ij,ajk->aik", u, mats) - mats, axis=(1, 2)))),
        float(np.max(np.linalg.norm(np.einsum("aij,jk->aik", mats, u) - mats, axis=(1, 2)))),
    ]
    if max(checks) > tol.member * max(1.0, hs_norm(u)):
        return None
    return u


def unitize(algebra, tol=None):
    """Adjoin the ambient identity, returning a unital algebra.

    If the algebra already contains the ambient identity it is returned
    unchanged; otherwise the span is extended by the identity (which keeps
    it closed: products of members with the identity are members).
    """
    tol = DEFAULT_TOL if tol is None else tol
    n = algebra.ambient_dim
    eye = np.eye(n, dtype=np.complex128)
    if algebra.basis.contains(eye, tol=tol.member):
        return algebra
    stack, _ = grow_span(algebra.basis.stack, eye.ravel()[None, :], tol_rank=tol.rank)
    return StarAlgebra(basis=Subspace(n, n, stack), unit=eye, is_unitized=True)


# Fixed probe coefficients keep center() deterministic without a seed
# parameter: the commutant of two generic elements of the algebra is
# already the center, and the cheap result is verified against the full
# basis (with a fall back to the full commutant solve if the probes were
# unlucky).
_PROBE_SEED = 0x0C57A


def _center_coords(space, probe_mats):
    """Coordinate-space solutions of [x, p] = 0 for all probes p."""
    d = space.dim
    mats = space.matrices
    rows = []
    for p in probe_mats:
        comm = np.einsum("aij,jk->aik", mats, p) - np.einsum("ij,ajk->aik", p, mats)
        rows.append(comm.reshape(d, -1))
    m = np.hstack(rows).T  # (constraints, d)
    if m.shape[0] == 0:
        return np.eye(d, dtype=np.complex128)
    u, s, vh = npl.svd(m, full_matrices=True)
    del u
    # The rank cutoff is floored at the scale of the probes themselves
    # (the basis rows have unit norm): when every commutator is roundoff
    # noise the constraint matrix must count as zero, not full rank.
    scale = max((hs_norm(p) for p in probe_mats), default=1.0)
    top = s[0] if s.size else 0.0
    tol_rank = DEFAULT_TOL.rank * max(top, scale)
    rank = int(np.sum(s > tol_rank))
    return vh[rank:].conj().T  # columns span the nullspace


def center(algebra, tol=None):
    """The center of the algebra, as a (commutative) StarAlgebra.

    Solves the commutation equations against two pseudo-random probe
    elements, verifies the candidate commutes with the whole basis, and
    falls back to the full commutant system when it does not.  The probe
    coefficients are fixed, so the result is deterministic.
    """
    tol = DEFAULT_TOL if tol is None else tol
    space = algebra.basis
    if space.dim == 0:
        return algebra
    mats = space.matrices
    rng = np.random.default_rng(_PROBE_SEED)
    probes = []
    for _ in range(2):
        coeff = rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
        probes.append(np.einsum("a,aij->ij", coeff, mats))
    for attempt in range(2):
        coords = _center_coords(space, probes if attempt == 0 else list(mats))
        cand = coords.T @ space.stack  # rows: center elements, flattened
        elements = list(cand.reshape(-1, *space.shape))
        elements += [m.conj().T for m in elements]
        result = StarAlgebra.from_span(
            elements, ambient_dim=space.rows, tol=tol, validate=False
        )
        # verify: every candidate commutes with every basis element
        cm = result.basis.matrices
        comm = np.einsum("aij,bjk->abik", cm, mats) - np.einsum(
            "bij,ajk->abik", mats, cm
        )
        worst = float(np.max(np.abs(comm), initial=0.0))
        if worst <= tol.member:
            result.unit = algebra.unit if algebra.unit is not None else unit_of(result, tol=tol)
            return result
    raise NumericalFailure("center computation failed verification")  # pragma: no cover


def random_self_adjoint(algebra, seed, tol=None):
    """A reproducible random self-adjoint element of the algebra.

    Real standard-normal coefficients against the Hermitian parts of the
    orthonormal basis; the same seed always gives the same element.
    """
    del tol
    rng = np.random.default_rng(seed)
    return sample_self_adjoint(algebra, rng)


def sample_self_adjoint(algebra, rng):
    """Like :func:`random_self_adjoint` but drawing from a live generator."""
    if algebra.dim == 0:
        raise ParamError("cannot sample from the zero algebra")
    mats = algebra.basis.matrices
    herm = 0.5 * (mats + mats.conj().transpose(0, 2, 1))
    coeff = rng.standard_normal(algebra.dim)
    return np.einsum("a,aij->ij", coeff, herm)


def sample_element(algebra, rng):
    """A random (generally non-self-adjoint) element of the algebra."""
    if algebra.dim == 0:
        raise ParamError("cannot sample from the zero algebra")
    coeff = rng.standard_normal(algebra.dim) + 1j * rng.standard_normal(algebra.dim)
    return np.einsum("a,aij->ij", coeff, algebra.basis.matrices)
