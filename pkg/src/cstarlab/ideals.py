"""Finitely generated right ideals and their projection generators.

Any finitely generated right ideal ``J`` of a finite-dimensional *-closed
matrix algebra is singly generated by a projection ``p`` of the algebra:
``J = pA``.  The constructive route implemented here goes through the
positive element ``b = sum_j g_j g_j*`` built from the generators.
Factoring the fourth root ``b^(1/4) = sum_j g_j c_j`` through the
generators (coefficients in the unitization) gives the operator bound
``b^(1/2) <= n K b`` with ``K = max_j ||c_j||^2``, which pins the nonzero
spectrum of ``b`` away from zero: ``spec(b) \\ {0} >= (nK)^(-2)``.  A
spectral cut in the resulting gap produces ``p``, and all claimed
identities are verified numerically before the certificate is returned.
"""

import numpy as np
from dataclasses import dataclass, field

from .config import DEFAULT_TOL
from .errors import (
    CoefficientSolveFailed,
    NotAProjection,
    NotProper,
    NotMaximal,
    NotUnital,
    VerificationFailure,
)
from .algebra import StarAlgebra, unitize
from .linalg import (
    Subspace,
    hermitian_eig,
    hs_norm,
    op_norm,
    place_cut_in_gap,
    span_rows,
    split_spectrum_at_zero,
    support_projection_of_psd,
)

__all__ = [
    "RightIdeal",
    "ProjectionCertificate",
    "generate_right_ideal",
    "projection_generator",
    "support_projection",
    "is_minimal_projection",
    "is_maximal_right_ideal",
    "maximal_ideal_minimality_certificate",
]


@dataclass(eq=False)
class ProjectionCertificate:
    """Witness data for ``J = pA`` produced by :func:`projection_generator`.

    Attributes
    ----------
    projection : ndarray
        The projection ``p`` with ``J = pA``; zero for the zero ideal.
    gram : ndarray
        ``b = sum_j g_j g_j*`` over the nonzero generators.
    coefficients : list of ndarray
        The ``c_j`` in the unitization with ``b^(1/4) = sum_j g_j c_j``.
    coefficient_bound : float
        ``K = max_j ||c_j||_op^2``.
    generator_count : int
        Number of (nonzero) generators ``n`` entering the bound.
    threshold : float
        ``(n K)^(-2)``: proven lower bound for the nonzero spectrum of
        ``b``.  Zero for the zero ideal, where the bound is vacuous.
    min_positive_eigenvalue : float
        Smallest eigenvalue of ``b`` above its zero cluster (0.0 when
        there is none).
    spectrum : ndarray
        All eigenvalues of ``b``, ascending.
    cut : float
        The spectral cut used to extract ``p`` from ``b``.
    solve_residual : float
        Residual of the least-squares factorization of ``b^(1/4)``.
    residuals : dict
        Named residuals of the verified identities (idempotency,
        self-adjointness, ``pb = b``, membership of ``p`` in ``J``,
        ``J = pA``).
    """

    projection: np.ndarray
    gram: np.ndarray
    coefficients: list
    coefficient_bound: float
    generator_count: int
    threshold: float
    min_positive_eigenvalue: float
    spectrum: np.ndarray
    cut: float
    solve_residual: float
    residuals: dict = field(default_factory=dict)

    @property
    def is_trivial(self):
        return self.generator_count == 0


@dataclass(eq=False)
class RightIdeal:
    """A right ideal ``J`` of a :class:`StarAlgebra`, with its generators.

    ``basis`` spans ``sum_j g_j A^1`` (unitization coefficients, so the
    generators themselves belong to ``J``).  ``certificate`` is filled in
    by :func:`projection_generator`.
    """

    parent: StarAlgebra
    generators: list
    basis: Subspace
    certificate: ProjectionCertificate | None = None

    @property
    def dim(self):
        return self.basis.dim

    def contains(self, x, tol=None):
        return self.basis.contains(x, tol=tol)


def _right_module_defect(parent, space):
    """Largest residual of ``x a`` against ``space`` for basis ``x``, ``a``."""
    if space.dim == 0 or parent.dim == 0:
        return 0.0
    xs = space.matrices
    bs = parent.basis.matrices
    prods = np.einsum("aij,bjk->abik", xs, bs).reshape(-1, space.rows * space.cols)
    coeff = prods @ space.stack.conj().T
    resid = prods - coeff @ space.stack
    norms = np.linalg.norm(resid, axis=1)
    scales = np.maximum(1.0, np.linalg.norm(prods, axis=1))
    return float(np.max(norms / scales))


def generate_right_ideal(parent, generators, tol=None):
    """The right ideal of ``parent`` generated by the given elements.

    Each generator must belong to the algebra.  The span is
    ``sum_j g_j A^1`` with coefficients in the unitization, so the
    generators lie in the ideal even when the algebra has no unit of its
    own; right-module closure of the result is verified.
    """
    tol = DEFAULT_TOL if tol is None else tol
    n = parent.ambient_dim
    gens = [parent.require_member(g, tol=tol.member, what="ideal generator")
            for g in generators]
    unital = unitize(parent, tol=tol)
    if gens and unital.dim:
        amats = unital.basis.matrices
        gmats = np.array(gens)
        prods = np.einsum("gij,ajk->gaik", gmats, amats).reshape(-1, n * n)
        space = span_rows(prods, (n, n), tol_rank=tol.rank)
    else:
        space = Subspace.empty(n, n)
    ideal = RightIdeal(parent=parent, generators=gens, basis=space)
    defect = _right_module_defect(parent, space)
    if defect > tol.member:
        raise VerificationFailure(
            f"generated span is not right-module closed (residual {defect:.3e})"
        )
    return ideal


def _trivial_certificate(ambient_dim):
    zero = np.zeros((ambient_dim, ambient_dim), dtype=np.complex128)
    return ProjectionCertificate(
        projection=zero,
        gram=zero,
        coefficients=[],
        coefficient_bound=0.0,
        generator_count=0,
        threshold=0.0,
        min_positive_eigenvalue=0.0,
        spectrum=np.zeros(ambient_dim),
        cut=0.0,
        solve_residual=0.0,
        residuals={},
    )


def projection_generator(parent, ideal, tol=None):
    """Projection ``p`` in ``J`` with ``J = pA``, plus its certificate.

    Implements the constructive factorization described in the module
    docstring.  The degenerate case — every generator numerically zero —
    yields the zero ideal's trivial certificate (zero projection, zero
    threshold) rather than an error.

    Raises
    ------
    CoefficientSolveFailed
        If ``b^(1/4)`` does not factor through the generators (which
        means ``ideal``'s span was not generated by its generator list).
    GapNotFound
        If the spectrum of ``b`` has no usable gap above zero — cannot
        happen for a genuine ideal unless tolerances are misconfigured.
    VerificationFailure
        If any of the certified identities fails its tolerance.
    """
    tol = DEFAULT_TOL if tol is None else tol
    n = parent.ambient_dim
    # drop generators that are zero relative to the largest one (the span
    # construction is scale-invariant, so the filter must be too)
    gen_scale = max((hs_norm(g) for g in ideal.generators), default=0.0)
    gens = [g for g in ideal.generators if hs_norm(g) > tol.rank * gen_scale]
    if not gens or ideal.basis.dim == 0:
        cert = _trivial_certificate(n)
        ideal.certificate = cert
        return cert

    gmats = np.array(gens)
    b = np.einsum("gij,gkj->ik", gmats, gmats.conj())
    b = 0.5 * (b + b.conj().T)

    dec = hermitian_eig(b, tol=tol.spec)
    top = float(np.max(np.abs(dec.eigenvalues), initial=0.0))
    zero_hi, pos_lo = split_spectrum_at_zero(dec.eigenvalues, tol_gap=tol.gap)
    cut = place_cut_in_gap(zero_hi, pos_lo, top, tol_gap=tol.gap, tol_floor=tol.spec)
    # the quartic root must flush the zero cluster: raw t**0.25 would blow
    # roundoff-sized eigenvalues up to the fourth root of machine epsilon
    quarter = dec.apply(lambda t: t ** 0.25 if t > cut else 0.0)

    # factor b^(1/4) = sum_j g_j c_j with c_j in the unitization
    unital = unitize(parent, tol=tol)
    amats = unital.basis.matrices
    d1 = unital.dim
    cols = np.einsum("gij,ajk->gaik", gmats, amats).reshape(len(gens) * d1, n * n)
    coeff, _, _, _ = np.linalg.lstsq(cols.T, quarter.ravel(), rcond=None)
    solve_residual = float(np.linalg.norm(cols.T @ coeff - quarter.ravel()))
    if solve_residual > tol.member * max(1.0, hs_norm(quarter)):
        raise CoefficientSolveFailed(
            f"b^(1/4) is at distance {solve_residual:.3e} from the generated span"
        )
    coeff = coeff.reshape(len(gens), d1)
    cs = np.einsum("ga,aij->gij", coeff, amats)
    bound = float(max(op_norm(c) ** 2 for c in cs))

    count = len(gens)
    threshold = (count * bound) ** -2 if bound > 0 else 0.0

    p = dec.apply(lambda t: 1.0 if t > cut else 0.0)

    if pos_lo < threshold - tol.member * max(1.0, threshold):
        raise VerificationFailure(
            f"spectral bound violated: min positive eigenvalue {pos_lo:.6e} "
            f"below proven threshold {threshold:.6e}"
        )

    jb = ideal.basis.matrices
    residuals = {
        "idempotent": hs_norm(p @ p - p),
        "self_adjoint": hs_norm(p - p.conj().T),
        "pb_minus_b": hs_norm(p @ b - b) / max(1.0, hs_norm(b)),
        "p_in_ideal": ideal.basis.residual(p),
        "ideal_equals_pA": float(
            np.max(
                np.linalg.norm(np.einsum("ij,ajk->aik", p, jb) - jb, axis=(1, 2)),
                initial=0.0,
            )
        ),
    }
    worst = max(residuals.values())
    if worst > tol.member:
        name = max(residuals, key=residuals.get)
        raise VerificationFailure(f"certificate identity '{name}' off by {worst:.3e}")

    cert = ProjectionCertificate(
        projection=p,
        gram=b,
        coefficients=list(cs),
        coefficient_bound=bound,
        generator_count=count,
        threshold=threshold,
        min_positive_eigenvalue=float(pos_lo),
        spectrum=dec.eigenvalues.copy(),
        cut=cut,
        solve_residual=solve_residual,
        residuals=residuals,
    )
    ideal.certificate = cert
    return cert


def support_projection(parent, ideal, tol=None):
    """Range projection of ``sum_x x x*`` over an orthonormal basis of
    the ideal: the smallest projection acting as identity on it from the
    left.  Independent of :func:`projection_generator` (no generators, no
    coefficient factorization), which makes the two a cross-check pair.
    """
    tol = DEFAULT_TOL if tol is None else tol
    n = parent.ambient_dim
    if ideal.basis.dim == 0:
        return np.zeros((n, n), dtype=np.complex128)
    xs = ideal.basis.matrices
    s = np.einsum("aij,akj->ik", xs, xs.conj())
    s = 0.5 * (s + s.conj().T)
    return support_projection_of_psd(s, tol=tol)


def _corner_space(parent, e, f, tol):
    """Span of ``e a f`` over the algebra basis.

    Products are flushed at the scale set by the inputs (``e`` and ``f``
    have unit operator norm, the basis rows unit HS norm) before the rank
    decision: when ``e`` and ``f`` sit in orthogonal blocks every product
    is roundoff noise, which must yield the zero corner rather than a
    renormalized noise span.
    """
    mats = parent.basis.matrices
    prods = np.einsum("ij,ajk,kl->ail", e, mats, f)
    flat = prods.reshape(-1, parent.ambient_dim ** 2)
    scale = max(1.0, hs_norm(e)) * max(1.0, hs_norm(f))
    keep = np.linalg.norm(flat, axis=1) > tol.rank * scale
    return span_rows(
        flat[keep],
        (parent.ambient_dim, parent.ambient_dim),
        tol_rank=tol.rank,
    )


def _require_projection(parent, e, tol, what="element"):
    e = parent.require_member(e, tol=tol.member, what=what)
    scale = max(1.0, hs_norm(e))
    if hs_norm(e @ e - e) > tol.member * scale or hs_norm(e - e.conj().T) > tol.member * scale:
        raise NotAProjection(f"{what} is not a self-adjoint idempotent")
    return e


def is_minimal_projection(parent, e, tol=None):
    """Whether the corner ``e A e`` is one-dimensional.

    Minimality of a projection is equivalent to its corner being the
    scalars ``C e``; rank of ``e`` in the ambient matrices is irrelevant
    (a block with multiplicity has minimal projections of higher rank).
    """
    tol = DEFAULT_TOL if tol is None else tol
    e = _require_projection(parent, e, tol, what="projection")
    if hs_norm(e) <= tol.member:
        raise NotAProjection("the zero projection is not minimal")
    return _corner_space(parent, e, e, tol).dim == 1


def is_maximal_right_ideal(parent, ideal, tol=None):
    """Whether ``J`` is maximal among proper right ideals.

    For a unital algebra this is equivalent to ``J = pA`` with ``u - p``
    minimal, which is what gets checked: the support projection must
    single-generate ``J``, and its complement in the unit must have a
    one-dimensional corner.
    """
    tol = DEFAULT_TOL if tol is None else tol
    u = parent.unit
    if u is None:
        raise NotUnital("maximality needs an algebra with a unit")
    if ideal.basis.contains(u, tol=tol.member):
        raise NotProper("the ideal contains the unit, so it is not proper")
    p = support_projection(parent, ideal, tol=tol)
    if not parent.contains(p, tol=tol.member):
        return False
    jb = ideal.basis.matrices
    if jb.shape[0]:
        fix = float(
            np.max(np.linalg.norm(np.einsum("ij,ajk->aik", p, jb) - jb, axis=(1, 2)))
        )
        if fix > tol.member or ideal.basis.residual(p) > tol.member:
            return False
    e = u - p
    if hs_norm(e) <= tol.member:  # pragma: no cover - excluded by properness
        return False
    return is_minimal_projection(parent, e, tol=tol)


def maximal_ideal_minimality_certificate(parent, ideal, tol=None):
    """For a maximal ``J = pA``, the complement ``q = u - p`` and the
    one-dimensional corner ``q A q = C q`` witnessing minimality.

    Returns ``(q, corner)`` with ``corner`` the (dimension-one) subspace
    ``q A q``.  Raises :class:`NotMaximal` when ``J`` is not maximal.
    """
    tol = DEFAULT_TOL if tol is None else tol
    if not is_maximal_right_ideal(parent, ideal, tol=tol):
        raise NotMaximal("ideal is not a maximal right ideal")
    u = parent.unit
    p = support_projection(parent, ideal, tol=tol)
    q = u - p
    corner = _corner_space(parent, q, q, tol)
    if corner.dim != 1 or corner.residual(q) > tol.member * max(1.0, hs_norm(q)):
        raise VerificationFailure("corner of the complement is not the scalars")
    if ideal.basis.residual(p) > tol.member:
        raise VerificationFailure("unit does not split as (ideal element) + q")
    return q, corner
