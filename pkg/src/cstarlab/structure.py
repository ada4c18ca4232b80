"""Block structure of finite-dimensional *-closed matrix algebras.

Such an algebra is a direct sum of full matrix blocks, each appearing
with a multiplicity: conjugating by a suitable unitary turns every
element into ``blockdiag_k (I_{m_k} (x) alpha_k)`` with ``alpha_k`` an
arbitrary ``n_k x n_k`` matrix.  :func:`wedderburn_decompose` finds that
unitary constructively:

1. central projections from the spectral clusters of a random
   self-adjoint central element (the cluster at zero belongs to the
   ambient kernel and is discarded);
2. inside each block, a maximal family of orthogonal minimal projections
   by repeated spectral splitting of random corner elements;
3. matrix units by polar-normalizing corner transporters between the
   minimal projections;
4. the basis change from eigenvectors of the first minimal projection,
   moved around by the matrix units.

Everything downstream (socle, unit partition, the identity
``dim A = sum n_k^2``, the Dales-Zelazko style maximal-ideal check) reads
off this decomposition and re-verifies what it claims.
"""

import numpy as np
from dataclasses import dataclass, field

from .config import DEFAULT_TOL
from .errors import (
    DegenerateRandomness,
    NotUnital,
    VerificationFailure,
)
from .algebra import center, sample_self_adjoint
from .ideals import (
    _corner_space,
    _require_projection,
    generate_right_ideal,
    is_maximal_right_ideal,
    is_minimal_projection,
    projection_generator,
)
from .linalg import hermitian_eig, hs_norm, pseudo_inverse_sqrt

__all__ = [
    "BlockDecomposition",
    "UnitPartition",
    "DalesZelazkoReport",
    "wedderburn_decompose",
    "socle",
    "unit_partition_certificate",
    "corner_dimension",
    "verify_dales_zelazko",
    "minimal_projection_below",
]

_MAX_DRAWS = 3


def cluster_partition(eigenvalues, tol_gap=None):
    """Partition a real spectrum into clusters separated by more than
    ``tol_gap * max|lambda|``.  Returns a list of index arrays into the
    ascending sort, each one cluster."""
    tol_gap = DEFAULT_TOL.gap if tol_gap is None else tol_gap
    w = np.asarray(eigenvalues, dtype=float)
    order = np.argsort(w)
    ws = w[order]
    top = float(np.max(np.abs(ws), initial=0.0))
    if ws.size == 0:
        return []
    gap = tol_gap * top
    groups = [[order[0]]]
    for prev, idx in zip(ws[:-1], order[1:]):
        if w[idx] - prev <= gap:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return [np.array(g) for g in groups]


@dataclass(eq=False)
class BlockDecomposition:
    """Complete structure data for one algebra.

    ``matrix_units[k]`` has shape ``(n_k, n_k, N, N)``; its ``[i, j]``
    entry maps the ``j``-th copy of the block's column space onto the
    ``i``-th.  ``basis_change`` is the ambient unitary bringing every
    element to the form ``blockdiag_k (I_{m_k} (x) alpha_k)`` followed by
    zeros on the kernel of the algebra unit.
    """

    central_projections: list
    block_sizes: list
    multiplicities: list
    matrix_units: list
    basis_change: np.ndarray
    residuals: dict = field(default_factory=dict)

    @property
    def num_blocks(self):
        return len(self.block_sizes)

    def block_signature(self):
        """Sorted (size, multiplicity) pairs, the isomorphism invariant."""
        return sorted(zip(self.block_sizes, self.multiplicities), reverse=True)

    def block_form(self, a):
        """``U* a U`` for the stored basis change."""
        u = self.basis_change
        return u.conj().T @ a @ u


@dataclass(eq=False)
class UnitPartition:
    """Minimal projections ``e_i`` and coefficients ``a_i`` with
    ``sum_i e_i a_i`` equal to the algebra unit."""

    projections: list
    coefficients: list
    residual: float


def _extreme_cluster_projection(parent, e, corner, rng, tol):
    """One descent step: a strictly smaller subprojection of ``e`` in the
    algebra, obtained from an extreme spectral cluster of a random
    self-adjoint corner element.  Returns None when the draw was unlucky."""
    mats = corner.matrices
    herm = 0.5 * (mats + mats.conj().transpose(0, 2, 1))
    coeff = rng.standard_normal(corner.dim)
    x = np.einsum("a,aij->ij", coeff, herm)
    dec = hermitian_eig(x, tol=tol.spec)
    top = float(np.max(np.abs(dec.eigenvalues), initial=0.0))
    if top == 0.0:
        return None
    gap = tol.gap * top
    clusters = cluster_partition(dec.eigenvalues, tol_gap=tol.gap)
    if len(clusters) < 2:
        return None
    lo, hi = clusters[0], clusters[-1]
    prefer = [hi, lo] if abs(dec.eigenvalues[hi[-1]]) >= abs(dec.eigenvalues[lo[0]]) else [lo, hi]
    for cl in prefer:
        vals = dec.eigenvalues[cl]
        if np.min(np.abs(vals)) <= gap:  # cluster touches the ambient kernel
            continue
        cols = dec.basis[:, cl]
        cand = cols @ cols.conj().T
        if not parent.contains(cand, tol=tol.member):
            continue
        if np.real(np.trace(cand)) > np.real(np.trace(e)) - 0.5:
            continue
        if hs_norm(cand @ e - cand) > tol.member * max(1.0, hs_norm(cand)):
            continue
        return cand
    return None


def _minimal_below_rng(parent, start, rng, tol):
    e = start
    for _ in range(parent.ambient_dim + 1):
        corner = _corner_space(parent, e, e, tol)
        if corner.dim == 1:
            return e
        for attempt in range(_MAX_DRAWS):
            nxt = _extreme_cluster_projection(parent, e, corner, rng, tol)
            if nxt is not None:
                e = nxt
                break
        else:
            raise DegenerateRandomness(
                "spectral splitting failed to find a smaller subprojection"
            )
    raise DegenerateRandomness("projection descent did not terminate")  # pragma: no cover


def minimal_projection_below(parent, start, seed=0, tol=None):
    """A minimal projection of the algebra dominated by ``start``.

    ``start`` must be a nonzero projection in the algebra.  The search is
    randomized but reproducible through ``seed``.
    """
    tol = DEFAULT_TOL if tol is None else tol
    start = _require_projection(parent, start, tol, what="starting projection")
    rng = np.random.default_rng(seed)
    return _minimal_below_rng(parent, start, rng, tol)


def _central_projections(parent, centre, rng, tol):
    """Spectral-cluster extraction of the minimal central projections."""
    u = parent.unit
    want = centre.dim
    if want == 1:
        return [u.copy()]
    for attempt in range(_MAX_DRAWS):
        z = sample_self_adjoint(centre, rng)
        dec = hermitian_eig(z, tol=tol.spec)
        top = float(np.max(np.abs(dec.eigenvalues), initial=0.0))
        if top == 0.0:
            continue
        gap = tol.gap * top
        found = []
        ok = True
        for cl in cluster_partition(dec.eigenvalues, tol_gap=tol.gap):
            vals = dec.eigenvalues[cl]
            if np.min(np.abs(vals)) <= gap:
                continue  # ambient kernel (or a block the draw failed to separate)
            cols = dec.basis[:, cl]
            cand = cols @ cols.conj().T
            if not parent.contains(cand, tol=tol.member):
                ok = False
                break
            found.append(cand)
        if not ok or len(found) != want:
            continue
        total = sum(found)
        if hs_norm(total - u) <= tol.member * max(1.0, hs_norm(u)):
            return found
    raise DegenerateRandomness(
        f"{_MAX_DRAWS} random central elements failed to separate the blocks"
    )


def _block_data(parent, central, rng, tol):
    """Minimal projections, matrix units and (size, multiplicity) of the
    block cut out by one minimal central projection."""
    n_amb = parent.ambient_dim
    minimals = []
    remainder = central.copy()
    for _ in range(n_amb + 1):
        if hs_norm(remainder) <= tol.member:
            break
        e = _minimal_below_rng(parent, remainder, rng, tol)
        minimals.append(e)
        remainder = remainder - e
        remainder = 0.5 * (remainder + remainder.conj().T)
    else:  # pragma: no cover - bounded by ambient rank
        raise DegenerateRandomness("minimal projection extraction did not terminate")
    size = len(minimals)

    # transporters e_i -> e_1 via polar decomposition of the 1-dim corners
    vs = []
    for e in minimals:
        corner = _corner_space(parent, e, minimals[0], tol)
        if corner.dim != 1:
            raise VerificationFailure(
                f"corner between minimal projections has dimension {corner.dim}"
            )
        w = corner.matrices[0]
        s = w.conj().T @ w
        s = 0.5 * (s + s.conj().T)
        v = w @ pseudo_inverse_sqrt(s, tol=tol)
        vs.append(v)
    varr = np.array(vs)
    units = np.einsum("iab,jcb->ijac", varr, varr.conj())

    mult_f = float(np.real(np.trace(minimals[0])))
    mult = int(round(mult_f))
    if abs(mult_f - mult) > 1e-6 * max(1.0, mult_f) or mult < 1:
        raise VerificationFailure(
            f"multiplicity is not a positive integer: trace {mult_f!r}"
        )
    rank_f = float(np.real(np.trace(central)))
    if abs(rank_f - size * mult) > 1e-6 * max(1.0, rank_f):
        raise VerificationFailure(
            f"block rank {rank_f!r} is not size*multiplicity = {size * mult}"
        )
    return {
        "central": central,
        "size": size,
        "multiplicity": mult,
        "units": units,
        "transporters": varr,
    }


def _basis_change(parent, blocks, tol):
    """Assemble the block-diagonalizing unitary from the sorted blocks."""
    n_amb = parent.ambient_dim
    cols = []
    for blk in blocks:
        e11 = blk["units"][0, 0]
        dec = hermitian_eig(e11, tol=tol.spec)
        sel = dec.eigenvalues > 0.5
        if int(np.sum(sel)) != blk["multiplicity"]:
            raise VerificationFailure("rank of a diagonal unit disagrees with multiplicity")
        u_cols = dec.basis[:, sel]
        for j in range(blk["multiplicity"]):
            uj = u_cols[:, j]
            for v in blk["transporters"]:
                cols.append(v @ uj)
    unit = parent.unit
    if unit is None:
        return np.eye(n_amb, dtype=np.complex128)
    dec = hermitian_eig(unit, tol=tol.spec)
    kernel = dec.basis[:, dec.eigenvalues < 0.5]
    for j in range(kernel.shape[1]):
        cols.append(kernel[:, j])
    u = np.array(cols).T
    if u.shape != (n_amb, n_amb):
        raise VerificationFailure(
            f"basis change is not square: {u.shape}; block data inconsistent"
        )
    defect = hs_norm(u.conj().T @ u - np.eye(n_amb))
    if defect > DEFAULT_TOL.member * n_amb:
        raise VerificationFailure(f"basis change is not unitary (defect {defect:.3e})")
    return u


def _block_form_residual(parent, blocks, u):
    """Largest deviation of any basis element from blockdiag(I_m (x) alpha)."""
    n_amb = parent.ambient_dim
    worst = 0.0
    for a in parent.basis.matrices:
        t = u.conj().T @ a @ u
        recon = np.zeros_like(t)
        off = 0
        for blk in blocks:
            n_k, m_k = blk["size"], blk["multiplicity"]
            span = n_k * m_k
            alpha = t[off : off + n_k, off : off + n_k]
            recon[off : off + span, off : off + span] = np.kron(
                np.eye(m_k), alpha
            )
            off += span
        worst = max(worst, hs_norm(t - recon))
    return worst


def wedderburn_decompose(parent, seed=0, tol=None):
    """Block decomposition of a *-closed matrix algebra.

    Deterministic given ``(parent, seed)``.  Blocks are ordered by
    descending size, then descending multiplicity, then a fingerprint of
    the central projection, so equal inputs give equal outputs.

    Raises :class:`DegenerateRandomness` when three successive random
    draws fail to separate spectral clusters, and
    :class:`VerificationFailure` when a structural identity (integrality
    of multiplicities, ``dim A = sum n_k^2``, unitarity of the basis
    change) fails numerically.
    """
    tol = DEFAULT_TOL if tol is None else tol
    n_amb = parent.ambient_dim
    if parent.dim == 0:
        return BlockDecomposition(
            central_projections=[],
            block_sizes=[],
            multiplicities=[],
            matrix_units=[],
            basis_change=np.eye(n_amb, dtype=np.complex128),
            residuals={"block_form": 0.0},
        )
    if parent.unit is None:
        raise NotUnital("algebra has no detected unit; cannot decompose")
    rng = np.random.default_rng(seed)
    centre = center(parent, tol=tol)
    centrals = _central_projections(parent, centre, rng, tol)
    blocks = [_block_data(parent, c, rng, tol) for c in centrals]

    def fingerprint(blk):
        return tuple(np.round(np.real(np.diag(blk["central"])), 6))

    blocks.sort(key=lambda blk: (-blk["size"], -blk["multiplicity"], fingerprint(blk)))

    total = sum(blk["size"] ** 2 for blk in blocks)
    if total != parent.dim:
        raise VerificationFailure(
            f"dimension identity failed: sum n_k^2 = {total} != dim A = {parent.dim}"
        )

    u = _basis_change(parent, blocks, tol)
    worst = _block_form_residual(parent, blocks, u)
    if worst > tol.member * 10:
        raise VerificationFailure(f"block form residual {worst:.3e} too large")

    return BlockDecomposition(
        central_projections=[blk["central"] for blk in blocks],
        block_sizes=[blk["size"] for blk in blocks],
        multiplicities=[blk["multiplicity"] for blk in blocks],
        matrix_units=[blk["units"] for blk in blocks],
        basis_change=u,
        residuals={"block_form": worst},
    )


def socle(parent, decomposition=None, seed=0, tol=None):
    """The right ideal generated by all minimal projections.

    For these (semisimple) algebras the socle is everything, so the
    returned ideal must coincide with the algebra; that is asserted.
    """
    tol = DEFAULT_TOL if tol is None else tol
    dec = decomposition or wedderburn_decompose(parent, seed=seed, tol=tol)
    gens = [dec.matrix_units[k][i, i] for k in range(dec.num_blocks)
            for i in range(dec.block_sizes[k])]
    ideal = generate_right_ideal(parent, gens, tol=tol)
    if ideal.basis.dim != parent.dim:
        raise VerificationFailure(
            f"socle has dimension {ideal.basis.dim} != dim A = {parent.dim}"
        )
    return ideal


def unit_partition_certificate(parent, decomposition=None, seed=0, tol=None):
    """Write the unit as ``sum_i e_i a_i`` with every ``e_i`` minimal.

    The diagonal matrix units do it with ``a_i = e_i``; each factor is
    re-verified minimal and the sum checked against the unit.
    """
    tol = DEFAULT_TOL if tol is None else tol
    if parent.unit is None:
        raise NotUnital("algebra has no unit to partition")
    dec = decomposition or wedderburn_decompose(parent, seed=seed, tol=tol)
    projections = [dec.matrix_units[k][i, i] for k in range(dec.num_blocks)
                   for i in range(dec.block_sizes[k])]
    for e in projections:
        if not is_minimal_projection(parent, e, tol=tol):
            raise VerificationFailure("a diagonal matrix unit is not minimal")
    coefficients = [e.copy() for e in projections]
    total = sum(e @ a for e, a in zip(projections, coefficients))
    residual = hs_norm(total - parent.unit)
    if residual > tol.member * max(1.0, hs_norm(parent.unit)):
        raise VerificationFailure(
            f"partition of unity misses the unit by {residual:.3e}"
        )
    return UnitPartition(
        projections=projections, coefficients=coefficients, residual=residual
    )


def corner_dimension(parent, e, f, tol=None):
    """Dimension of ``e A f`` for projections ``e``, ``f`` in the algebra.

    When both projections are minimal the dimension is 0 or 1 (0 exactly
    when they live in different blocks); that bound is asserted.
    """
    tol = DEFAULT_TOL if tol is None else tol
    e = _require_projection(parent, e, tol, what="left projection")
    f = _require_projection(parent, f, tol, what="right projection")
    dim = _corner_space(parent, e, f, tol).dim
    nonzero = hs_norm(e) > tol.member and hs_norm(f) > tol.member
    if nonzero and dim > 1:
        if is_minimal_projection(parent, e, tol=tol) and is_minimal_projection(
            parent, f, tol=tol
        ):
            raise VerificationFailure(
                f"corner between minimal projections has dimension {dim}"
            )
    return dim


@dataclass(eq=False)
class DalesZelazkoTrial:
    block_index: int
    certificate: object
    support_agreement: float
    is_maximal: bool
    single_generation: bool

    @property
    def ok(self):
        return (
            self.is_maximal
            and self.single_generation
            and self.support_agreement <= DEFAULT_TOL.member
        )


@dataclass(eq=False)
class DalesZelazkoReport:
    block_sizes: list
    multiplicities: list
    dimension_identity_ok: bool
    trials: list

    @property
    def all_ok(self):
        return self.dimension_identity_ok and all(t.ok for t in self.trials)


def verify_dales_zelazko(parent, trials=10, seed=0, tol=None):
    """Check that every sampled maximal right ideal is singly generated
    by a projection (and re-derive it via the certificate machinery).

    Samples ``trials`` maximal ideals by conjugating a diagonal matrix
    unit inside a cycling choice of block with a random block unitary,
    forming ``J = (u - e) A``, and running the full projection-generator
    pipeline on it.  Also records the dimension identity
    ``dim A = sum n_k^2``.
    """
    tol = DEFAULT_TOL if tol is None else tol
    if parent.unit is None:
        raise NotUnital("maximal ideal analysis needs a unital algebra")
    dec = wedderburn_decompose(parent, seed=seed, tol=tol)
    rng = np.random.default_rng([seed, 0xDA1E5])
    u = parent.unit
    out = []
    for t in range(trials):
        k = t % dec.num_blocks
        n_k = dec.block_sizes[k]
        units = dec.matrix_units[k]
        g = rng.standard_normal((n_k, n_k)) + 1j * rng.standard_normal((n_k, n_k))
        q, _ = np.linalg.qr(g)
        w = q[:, 0]
        e = np.einsum("i,j,ijab->ab", w, w.conj(), units)
        e = 0.5 * (e + e.conj().T)
        g = u - e
        # e = u means the zero ideal; flush the roundoff left in u - e
        gens = [] if hs_norm(g) <= tol.member * max(1.0, hs_norm(u)) else [g]
        ideal = generate_right_ideal(parent, gens, tol=tol)
        cert = projection_generator(parent, ideal, tol=tol)
        agreement = hs_norm(cert.projection - (u - e))
        maximal = is_maximal_right_ideal(parent, ideal, tol=tol)
        regen = generate_right_ideal(parent, [cert.projection], tol=tol)
        single = regen.basis.equals(ideal.basis, tol=tol.member)
        out.append(
            DalesZelazkoTrial(
                block_index=k,
                certificate=cert,
                support_agreement=agreement,
                is_maximal=maximal,
                single_generation=single,
            )
        )
    dim_ok = sum(n * n for n in dec.block_sizes) == parent.dim
    return DalesZelazkoReport(
        block_sizes=list(dec.block_sizes),
        multiplicities=list(dec.multiplicities),
        dimension_identity_ok=dim_ok,
        trials=out,
    )
