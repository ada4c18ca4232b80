"""Dense complex-matrix substrate: Hermitian spectral calculus and
Hilbert-Schmidt subspace arithmetic.

Every matrix in this package is a ``numpy`` array of ``complex128``.  The
ambient inner product is the Hilbert-Schmidt pairing ``<X, Y> = tr(Y* X)``,
under which the norm of a matrix equals the Frobenius norm of its entries;
flattening therefore turns subspaces of matrices into ordinary row spaces,
and that is how :class:`Subspace` stores them.

The spectral side (``hermitian_eig``, ``functional_calculus``,
``spectral_projection_above``) deliberately keeps a single code path: a
spectral projection *is* the functional calculus of an indicator function
evaluated on the same eigendecomposition, so the two agree exactly.
"""

import numpy as np
from dataclasses import dataclass

from .config import DEFAULT_TOL
from .errors import (
    GapNotFound,
    NotSelfAdjoint,
    NumericalFailure,
    ShapeMismatch,
    ThresholdInsideSpectrum,
)

__all__ = [
    "as_matrix",
    "adjoint",
    "hs_inner",
    "hs_norm",
    "op_norm",
    "SpectralDecomposition",
    "hermitian_eig",
    "functional_calculus",
    "spectral_projection_above",
    "Subspace",
    "orthonormalize",
    "solve_membership",
    "split_spectrum_at_zero",
    "support_projection_of_psd",
]


def as_matrix(x, shape=None):
    """Coerce ``x`` to a finite complex128 2-d array, validating its shape."""
    m = np.asarray(x, dtype=np.complex128)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a 2-d array, got ndim={m.ndim}")
    if shape is not None and m.shape != tuple(shape):
        raise ShapeMismatch(f"expected shape {tuple(shape)}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericalFailure("matrix has non-finite entries")
    return m


def adjoint(m):
    """Conjugate transpose."""
    return m.conj().T


def hs_inner(x, y):
    """Hilbert-Schmidt inner product tr(y* x)."""
    return np.vdot(y, x)


def hs_norm(x):
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(x))


def op_norm(m):
    """Operator (spectral) norm: the largest singular value."""
    if min(m.shape) == 0 or not np.any(m):
        return 0.0
    return float(np.linalg.norm(m, ord=2))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    ``eigenvalues`` is real and ascending; the columns of the unitary
    ``basis`` are the matching eigenvectors.
    """

    eigenvalues: np.ndarray
    basis: np.ndarray

    def apply(self, f):
        """Evaluate ``f`` on the eigenvalues and reassemble the matrix."""
        vals = np.array([float(f(t)) for t in self.eigenvalues])
        return (self.basis * vals) @ self.basis.conj().T

    def reconstruct(self):
        return (self.basis * self.eigenvalues) @ self.basis.conj().T


def hermitian_eig(m, tol=None):
    """Eigendecomposition of a Hermitian matrix.

    Raises :class:`NotSelfAdjoint` when ``||m - m*||`` exceeds
    ``tol * max(1, ||m||)`` (``tol`` defaults to the spectral tolerance),
    and :class:`NumericalFailure` should the underlying solver not converge.
    """
    tol = DEFAULT_TOL.spec if tol is None else tol
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got {m.shape}")
    dev = hs_norm(m - m.conj().T)
    if dev > tol * max(1.0, hs_norm(m)):
        raise NotSelfAdjoint(f"||m - m*|| = {dev:.3e} exceeds tolerance")
    h = 0.5 * (m + m.conj().T)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    return SpectralDecomposition(eigenvalues=w, basis=v)


def functional_calculus(m, f, tol=None):
    """Apply a real scalar function to a Hermitian matrix spectrally.

    Returns ``U diag(f(lambda)) U*`` for the eigendecomposition
    ``m = U diag(lambda) U*``.
    """
    return hermitian_eig(m, tol=tol).apply(f)


def spectral_projection_above(m, threshold, tol_gap=None, tol=None):
    """Orthogonal projection onto the span of eigenvectors with
    eigenvalue strictly above ``threshold``.

    The cut must fall in a genuine gap: if any eigenvalue lies within
    ``tol_gap * max(1, |lambda|_max)`` of ``threshold`` the result would be
    ill-conditioned and :class:`ThresholdInsideSpectrum` is raised.

    Equals ``functional_calculus(m, indicator(> threshold))`` exactly, as
    both evaluate the same indicator on the same eigendecomposition.
    """
    tol_gap = DEFAULT_TOL.gap if tol_gap is None else tol_gap
    dec = hermitian_eig(m, tol=tol)
    scale = max(1.0, float(np.max(np.abs(dec.eigenvalues), initial=0.0)))
    closest = float(np.min(np.abs(dec.eigenvalues - threshold)))
    if closest <= tol_gap * scale:
        raise ThresholdInsideSpectrum(
            f"eigenvalue at distance {closest:.3e} from cut {threshold:.6g}"
        )
    return dec.apply(lambda t: 1.0 if t > threshold else 0.0)


# --------------------------------------------------------------------------
# subspaces of matrices


class Subspace:
    """A linear subspace of ``rows x cols`` complex matrices.

    Stores an orthonormal basis (w.r.t. the Hilbert-Schmidt inner product)
    as the rows of ``stack``, each row a flattened matrix.  Instances are
    treated as immutable once built.
    """

    __slots__ = ("rows", "cols", "stack")

    def __init__(self, rows, cols, stack):
        self.rows = int(rows)
        self.cols = int(cols)
        stack = np.asarray(stack, dtype=np.complex128)
        if stack.ndim != 2 or stack.shape[1] != self.rows * self.cols:
            raise ShapeMismatch(
                f"basis stack must be (dim, {self.rows * self.cols}), got {stack.shape}"
            )
        self.stack = stack

    @classmethod
    def empty(cls, rows, cols):
        return cls(rows, cols, np.zeros((0, rows * cols), dtype=np.complex128))

    @property
    def dim(self):
        return self.stack.shape[0]

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def matrices(self):
        """Basis as a (dim, rows, cols) array."""
        return self.stack.reshape(-1, self.rows, self.cols)

    def basis_list(self):
        return [self.matrices[i].copy() for i in range(self.dim)]

    def coords(self, x):
        """Coefficients of the orthogonal projection of ``x`` onto the span,
        together with the residual norm of ``x`` minus that projection."""
        x = as_matrix(x, shape=self.shape)
        flat = x.ravel()
        c = self.stack.conj() @ flat
        resid = flat - c @ self.stack
        return c, float(np.linalg.norm(resid))

    def project(self, x):
        c, _ = self.coords(x)
        return (c @ self.stack).reshape(self.shape)

    def residual(self, x):
        return self.coords(x)[1]

    def contains(self, x, tol=None):
        tol = DEFAULT_TOL.member if tol is None else tol
        x = as_matrix(x, shape=self.shape)
        return self.residual(x) <= tol * max(1.0, hs_norm(x))

    def equals(self, other, tol=None):
        """Same span: equal dimensions and mutual containment of bases."""
        tol = DEFAULT_TOL.member if tol is None else tol
        if self.shape != other.shape or self.dim != other.dim:
            return False
        for i in range(self.dim):
            if other.residual(self.matrices[i]) > tol:
                return False
        for i in range(other.dim):
            if self.residual(other.matrices[i]) > tol:
                return False
        return True


def _stack_inputs(mats, shape=None):
    """Validate a family of equally-shaped matrices; return (n, r*c) stack."""
    mats = list(mats)
    if not mats:
        if shape is None:
            raise ShapeMismatch("empty input needs an explicit shape")
        r, c = shape
        return (int(r), int(c)), np.zeros((0, int(r) * int(c)), dtype=np.complex128)
    first = as_matrix(mats[0], shape=shape)
    r, c = first.shape
    rows = [first.ravel()]
    for m in mats[1:]:
        rows.append(as_matrix(m, shape=(r, c)).ravel())
    return (r, c), np.array(rows)


def orthonormalize(mats, tol_rank=None, shape=None):
    """Modified Gram-Schmidt orthonormalization of a family of matrices.

    Runs one full reorthogonalization pass per vector, so the output basis
    is orthonormal to machine precision.  Vectors whose residual after
    projection is at most ``tol_rank * max ||input||`` are discarded as
    dependent.  Deterministic: the basis depends only on the input order.
    Feeding the output back in reproduces it (up to roundoff), because each
    basis vector projects to itself.

    ``shape`` is only needed when ``mats`` is empty.
    """
    tol_rank = DEFAULT_TOL.rank if tol_rank is None else tol_rank
    (r, c), flat = _stack_inputs(mats, shape=shape)
    if flat.shape[0] == 0:
        return Subspace.empty(r, c)
    scale = float(np.max(np.linalg.norm(flat, axis=1)))
    if scale == 0.0:
        return Subspace.empty(r, c)
    kept = []
    for v in flat:
        w = v.copy()
        for _ in range(2):  # MGS + one reorthogonalization pass
            for b in kept:
                w -= np.vdot(b, w) * b
        norm = np.linalg.norm(w)
        if norm > tol_rank * scale:
            kept.append(w / norm)
    if not kept:
        return Subspace.empty(r, c)
    return Subspace(r, c, np.array(kept))


def solve_membership(x, space, tol=None):
    """Least-squares coefficients of ``x`` against the basis of ``space``.

    Returns ``(coefficients, residual)``; the residual is the distance from
    ``x`` to the span.  ``x`` belongs to the span when the residual is at
    most ``tol * max(1, ||x||)``.
    """
    del tol  # the caller applies the membership test; kept for signature symmetry
    return space.coords(x)


def grow_span(stack, candidates, tol_rank=None):
    """Extend an orthonormal row ``stack`` by the directions of
    ``candidates`` not already in its span.

    SVD-based: candidates are projected off the current span (twice, to
    kill roundoff leakage), and right singular vectors of the residual
    block with singular value above ``tol_rank * scale`` are appended.
    Used for the inner loops of algebraic closure, where per-vector
    Gram-Schmidt would dominate the runtime.
    """
    tol_rank = DEFAULT_TOL.rank if tol_rank is None else tol_rank
    candidates = np.asarray(candidates, dtype=np.complex128)
    if candidates.ndim != 2 or candidates.shape[0] == 0:
        return stack, False
    norms = np.linalg.norm(candidates, axis=1)
    scale = float(np.max(norms))
    if scale == 0.0:
        return stack, False
    resid = candidates
    if stack.shape[0]:
        for _ in range(2):
            resid = resid - (resid @ stack.conj().T) @ stack
    try:
        _, svals, vh = np.linalg.svd(resid, full_matrices=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise NumericalFailure(f"svd failed while growing span: {exc}") from exc
    keep = int(np.sum(svals > tol_rank * scale))
    if keep == 0:
        return stack, False
    return np.vstack([stack, vh[:keep]]), True


def span_rows(candidates, shape, tol_rank=None):
    """Orthonormal basis (as a Subspace) of the row space of ``candidates``."""
    r, c = shape
    empty = np.zeros((0, r * c), dtype=np.complex128)
    stack, _ = grow_span(empty, candidates, tol_rank=tol_rank)
    return Subspace(r, c, stack)


# --------------------------------------------------------------------------
# spectral gap utilities


def split_spectrum_at_zero(eigenvalues, tol_gap=None):
    """Partition a real spectrum into its zero cluster and the rest.

    The zero cluster is grown by chaining: starting from 0, an eigenvalue
    joins when it lies within ``gap = tol_gap * max|lambda|`` of the cluster
    built so far (on either side).  Returns ``(zero_hi, pos_lo)`` where
    ``zero_hi`` is the largest magnitude inside the cluster and ``pos_lo``
    the smallest eigenvalue above it, or ``None`` when the chain swallows
    the whole spectrum.
    """
    tol_gap = DEFAULT_TOL.gap if tol_gap is None else tol_gap
    w = np.sort(np.asarray(eigenvalues, dtype=float))
    top = float(np.max(np.abs(w), initial=0.0))
    if top == 0.0:
        return 0.0, None
    gap = tol_gap * top
    upper = 0.0
    for t in w[w > 0]:
        if t - upper <= gap:
            upper = float(t)
        else:
            break
    lower = 0.0
    for t in w[w < 0][::-1]:
        if lower - t <= gap:
            lower = float(t)
        else:
            break
    zero_hi = max(upper, -lower)
    above = w[w > upper + gap]
    pos_lo = float(above[0]) if above.size else None
    return zero_hi, pos_lo


def place_cut_in_gap(zero_hi, pos_lo, scale, tol_gap=None, tol_floor=None):
    """Pick a spectral cut between a zero cluster and the positive part.

    The cut is the geometric mean of the cluster edge (clamped below by the
    spectral tolerance relative to ``scale``) and the first positive
    eigenvalue, then clipped so it keeps a safe margin from both sides.
    """
    tol_gap = DEFAULT_TOL.gap if tol_gap is None else tol_gap
    tol_floor = DEFAULT_TOL.spec if tol_floor is None else tol_floor
    if pos_lo is None:
        raise GapNotFound("spectrum has no positive part separated from zero")
    g = tol_gap * scale  # relative, consistent with the cluster chaining
    if pos_lo - zero_hi <= 2.5 * g:
        raise GapNotFound(
            f"gap [{zero_hi:.3e}, {pos_lo:.3e}] too narrow for tolerance {g:.3e}"
        )
    lo_edge = max(zero_hi, tol_floor * scale)
    cut = float(np.sqrt(lo_edge * pos_lo))
    return float(np.clip(cut, zero_hi + 1.25 * g, pos_lo - 1.25 * g))


def support_projection_of_psd(s, tol=None):
    """Range projection of a positive semidefinite matrix.

    Splits the spectrum into its zero cluster and the positive part, places
    a cut in the gap and projects above it.  Returns the zero matrix when
    the spectrum is all zero cluster; raises :class:`GapNotFound` when no
    gap separates the two.
    """
    tol = DEFAULT_TOL if tol is None else tol
    dec = hermitian_eig(s, tol=tol.spec)
    top = float(np.max(np.abs(dec.eigenvalues), initial=0.0))
    zero_hi, pos_lo = split_spectrum_at_zero(dec.eigenvalues, tol_gap=tol.gap)
    if pos_lo is None:
        if zero_hi > tol.member * max(1.0, top):
            raise GapNotFound("spectrum is one cluster not separated from zero")
        return np.zeros_like(np.asarray(s, dtype=np.complex128))
    cut = place_cut_in_gap(zero_hi, pos_lo, top, tol_gap=tol.gap, tol_floor=tol.spec)
    return dec.apply(lambda t: 1.0 if t > cut else 0.0)


def pseudo_inverse_sqrt(s, tol=None):
    """``f(s)`` for ``f(t) = t^(-1/2)`` on the positive part, 0 on the kernel.

    The split between kernel and positive part uses the same zero-cluster
    chaining as :func:`support_projection_of_psd`, so
    ``pseudo_inverse_sqrt(s) @ s @ pseudo_inverse_sqrt(s)`` is the support
    projection of ``s``.
    """
    tol = DEFAULT_TOL if tol is None else tol
    dec = hermitian_eig(s, tol=tol.spec)
    top = float(np.max(np.abs(dec.eigenvalues), initial=0.0))
    zero_hi, pos_lo = split_spectrum_at_zero(dec.eigenvalues, tol_gap=tol.gap)
    if pos_lo is None:
        if zero_hi > tol.member * max(1.0, top):
            raise GapNotFound("spectrum is one cluster not separated from zero")
        return np.zeros_like(np.asarray(s, dtype=np.complex128))
    cut = place_cut_in_gap(zero_hi, pos_lo, top, tol_gap=tol.gap, tol_floor=tol.spec)
    return dec.apply(lambda t: t ** -0.5 if t > cut else 0.0)
