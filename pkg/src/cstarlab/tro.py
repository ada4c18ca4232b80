"""Ternary rings of operators (TROs) and their submodules.

A TRO is a subspace ``Z`` of ``m x n`` complex matrices closed under the
triple product ``x y* z``.  Multiplying out pairs gives two *-closed
algebras: the left algebra ``span(Z Z*)`` acting on rows and the right
algebra ``span(Z* Z)`` acting on columns; ``Z`` is a bimodule between the
two, and a right Hilbert module over its right algebra via the pairing
``<x, y> = x* y``.

Structurally ``Z`` is a direct sum of rectangular blocks
``B(C^{n_k}, C^{m_k})``, discovered here through the left algebra's block
decomposition: a minimal central projection ``c_k`` cuts out
``Z_k = c_k Z``, whose column dimension ``n_k`` is read off from
``dim Z_k / m_k``.  Explicit isometries mapping each block onto plain
rectangular matrices come from transporting one column of ``Z_k`` around
by the left algebra's matrix units.

Submodules (right-ideal analogues) correspond bijectively to right
ideals of the left algebra via ``W -> W Z*`` and ``J -> J Z``; that
correspondence carries maximality back and forth and turns the projection
generator of an ideal into a finite generation certificate for the
matching submodule.
"""

import numpy as np
from dataclasses import dataclass, field

from .config import DEFAULT_TOL
from .errors import (
    ClosureViolation,
    MembershipViolation,
    NotProper,
    NumericalFailure,
    ParamError,
    VerificationFailure,
    ZeroSubmodule,
)
from .algebra import StarAlgebra, unitize
from .ideals import (
    RightIdeal,
    generate_right_ideal,
    is_maximal_right_ideal,
)
from .linalg import (
    Subspace,
    as_matrix,
    grow_span,
    hermitian_eig,
    hs_norm,
    orthonormalize,
    pseudo_inverse_sqrt,
    span_rows,
    support_projection_of_psd,
)
from .structure import wedderburn_decompose

__all__ = [
    "TRO",
    "Submodule",
    "TROClassification",
    "ModuleGenerationCertificate",
    "generate_tro",
    "classify_tro",
    "generate_submodule",
    "submodule_ideal_roundtrip",
    "is_maximal_submodule",
    "finite_generation_certificate",
    "linking_algebra",
]


def _triple_products(stack, shape):
    """All products x y* z over the stacked basis, flattened."""
    m, n = shape
    mats = stack.reshape(-1, m, n)
    d = mats.shape[0]
    # x y* gives (d, d, m, m); contracting with z in chunks bounds memory
    left = np.einsum("aij,bkj->abik", mats, mats.conj()).reshape(d * d, m, m)
    out = np.einsum("pik,ckl->pcil", left, mats)
    return out.reshape(d * d * d, m * n)


def _ternary_defect(space):
    """Largest residual of basis triple products against the span."""
    if space.dim == 0:
        return 0.0
    prods = _triple_products(space.stack, space.shape)
    coeff = prods @ space.stack.conj().T
    resid = prods - coeff @ space.stack
    norms = np.linalg.norm(resid, axis=1)
    scales = np.maximum(1.0, np.linalg.norm(prods, axis=1))
    return float(np.max(norms / scales))


def _left_products(stack, shape):
    m, n = shape
    mats = stack.reshape(-1, m, n)
    return np.einsum("aij,bkj->abik", mats, mats.conj()).reshape(-1, m * m)


def _right_products(stack, shape):
    m, n = shape
    mats = stack.reshape(-1, m, n)
    return np.einsum("aji,bjk->abik", mats.conj(), mats).reshape(-1, n * n)


@dataclass(eq=False)
class TRO:
    """A ternary ring of ``rows x cols`` operators with its two algebras."""

    basis: Subspace
    left_algebra: StarAlgebra
    right_algebra: StarAlgebra

    @property
    def rows(self):
        return self.basis.rows

    @property
    def cols(self):
        return self.basis.cols

    @property
    def dim(self):
        return self.basis.dim

    def contains(self, x, tol=None):
        return self.basis.contains(x, tol=tol)


def _build_tro(space, tol, check_closure=True):
    if check_closure and space.dim:
        defect = _ternary_defect(space)
        if defect > tol.member:
            raise ClosureViolation(
                f"span is not closed under x y* z (residual {defect:.3e})"
            )
    m, n = space.shape
    if space.dim:
        left = StarAlgebra.from_span(
            list(_left_products(space.stack, space.shape).reshape(-1, m, m)),
            tol=tol,
            validate=False,
        )
        right = StarAlgebra.from_span(
            list(_right_products(space.stack, space.shape).reshape(-1, n, n)),
            tol=tol,
            validate=False,
        )
    else:
        left = StarAlgebra(basis=Subspace.empty(m, m))
        right = StarAlgebra(basis=Subspace.empty(n, n))
    tro = TRO(basis=space, left_algebra=left, right_algebra=right)
    if space.dim:
        _check_nondegenerate(tro, tol)
    return tro


def _check_nondegenerate(tro, tol):
    """The two algebras must act without annihilator: left_alg Z spans Z
    and Z right_alg spans Z.  Automatic for spans closed under x y* z,
    but a cheap guard against inconsistent hand-built inputs."""
    zs = tro.basis.matrices
    u_l = tro.left_algebra.unit
    u_r = tro.right_algebra.unit
    if u_l is None or u_r is None:
        raise VerificationFailure("a TRO algebra came out without a unit")
    worst = max(
        float(np.max(np.linalg.norm(np.einsum("ij,ajk->aik", u_l, zs) - zs, axis=(1, 2)))),
        float(np.max(np.linalg.norm(np.einsum("aij,jk->aik", zs, u_r) - zs, axis=(1, 2)))),
    )
    if worst > tol.member:
        raise VerificationFailure(
            f"TRO is degenerate over its algebras (residual {worst:.3e})"
        )


def generate_tro(rows, cols, generators, tol=None):
    """Smallest TRO of ``rows x cols`` matrices containing the generators.

    Iterates the triple product ``x y* z`` over the current span until it
    stabilizes (at most ``rows * cols`` rounds, since the dimension grows
    each round), then assembles the left and right algebras and verifies
    nondegeneracy.
    """
    tol = DEFAULT_TOL if tol is None else tol
    m, n = int(rows), int(cols)
    if m < 1 or n < 1:
        raise ParamError("TRO ambient dimensions must be positive")
    gens = [as_matrix(g, shape=(m, n)) for g in generators]
    stack = np.zeros((0, m * n), dtype=np.complex128)
    if gens:
        stack, _ = grow_span(stack, np.array([g.ravel() for g in gens]), tol_rank=tol.rank)
    for _ in range(m * n + 1):
        if stack.shape[0] == 0:
            break
        cands = _triple_products(stack, (m, n))
        stack, grew = grow_span(stack, cands, tol_rank=tol.rank)
        if not grew:
            break
    else:  # pragma: no cover - dimension is bounded by rows*cols
        raise NumericalFailure("ternary closure failed to stabilize")
    return _build_tro(Subspace(m, n, stack), tol, check_closure=False)


def tro_from_span(mats, shape=None, tol=None, check_closure=True):
    """Build a TRO from a family already spanning one (verified)."""
    tol = DEFAULT_TOL if tol is None else tol
    space = orthonormalize(mats, tol_rank=tol.rank, shape=shape)
    return _build_tro(space, tol, check_closure=check_closure)


@dataclass(eq=False)
class TROClassification:
    """Block structure of a TRO: for each block an (m_k, n_k) shape and a
    pair of isometries (U_k, V_k) such that ``z -> U_k* z V_k`` restricts
    to a ternary isomorphism of the block onto full ``m_k x n_k``
    matrices.  ``central_projections[k]`` is the left-algebra central
    support of the block."""

    blocks: list
    isometries: list
    central_projections: list
    residuals: dict = field(default_factory=dict)

    @property
    def num_blocks(self):
        return len(self.blocks)

    def apply(self, z):
        """Per-block images ``U_k* z V_k`` of an element."""
        return [u.conj().T @ z @ v for u, v in self.isometries]

    def total_dim(self):
        return sum(m * n for m, n in self.blocks)


def classify_tro(tro, seed=0, tol=None):
    """Identify the rectangular blocks of a TRO and build the isometries
    realizing them.

    Works through the left algebra: its block decomposition provides
    minimal central projections ``c_k`` (block shapes ``m_k``) and matrix
    units; ``n_k = dim(c_k Z) / m_k`` must come out an integer, and the
    total ``sum m_k n_k`` must equal ``dim Z`` — both are asserted.  The
    ternary-morphism property of the assembled maps is verified on all
    basis triples and the worst residual recorded.
    """
    tol = DEFAULT_TOL if tol is None else tol
    if tro.dim == 0:
        return TROClassification(blocks=[], isometries=[], central_projections=[])
    dec = wedderburn_decompose(tro.left_algebra, seed=seed, tol=tol)
    zs = tro.basis.matrices
    m_amb, n_amb = tro.basis.shape
    entries = []
    for k in range(dec.num_blocks):
        c = dec.central_projections[k]
        m_k = dec.block_sizes[k]
        prods = np.einsum("ij,ajk->aik", c, zs).reshape(-1, m_amb * n_amb)
        zk = span_rows(prods, (m_amb, n_amb), tol_rank=tol.rank)
        if zk.dim % m_k:
            raise VerificationFailure(
                f"dim(c_k Z) = {zk.dim} is not a multiple of the block size {m_k}"
            )
        n_k = zk.dim // m_k
        if n_k == 0:
            raise VerificationFailure("a left-algebra block does not meet the TRO")

        units = dec.matrix_units[k]
        e11 = units[0, 0]
        edec = hermitian_eig(e11, tol=tol.spec)
        u_vec = edec.basis[:, -1]  # unit vector in the range of e11
        transporters = [units[i, 0] for i in range(m_k)]
        u_iso = np.column_stack([v @ u_vec for v in transporters])

        rows = np.einsum("i,ij,ajk->ak", u_vec.conj(), e11, zk.matrices)
        row_space = span_rows(rows, (1, n_amb), tol_rank=tol.rank)
        if row_space.dim != n_k:
            raise VerificationFailure(
                f"row space of a block column has dimension {row_space.dim}, "
                f"expected {n_k}"
            )
        v_iso = row_space.stack.conj().T  # (n_amb, n_k), orthonormal columns
        entries.append(
            {"shape": (m_k, n_k), "U": u_iso, "V": v_iso, "central": c}
        )

    entries.sort(
        key=lambda blk: (
            -blk["shape"][0],
            -blk["shape"][1],
            tuple(np.round(np.real(np.diag(blk["central"])), 6)),
        )
    )
    total = sum(e["shape"][0] * e["shape"][1] for e in entries)
    if total != tro.dim:
        raise VerificationFailure(
            f"sum of block dimensions {total} != dim Z = {tro.dim}"
        )
    cls = TROClassification(
        blocks=[e["shape"] for e in entries],
        isometries=[(e["U"], e["V"]) for e in entries],
        central_projections=[e["central"] for e in entries],
    )
    for u_iso, v_iso in cls.isometries:
        for g, lbl in ((u_iso, "U"), (v_iso, "V")):
            defect = hs_norm(g.conj().T @ g - np.eye(g.shape[1]))
            if defect > tol.member * max(1.0, g.shape[1]):
                raise VerificationFailure(f"{lbl} is not an isometry ({defect:.3e})")
    cls.residuals["ternary_morphism"] = _morphism_defect(tro, cls)
    if cls.residuals["ternary_morphism"] > tol.member * 10:
        raise VerificationFailure(
            "classification maps fail the ternary morphism identity "
            f"({cls.residuals['ternary_morphism']:.3e})"
        )
    return cls


def _morphism_defect(tro, cls, limit=4096):
    """Worst ``T(x y* z) - T(x) T(y)* T(z)`` over basis triples (all of
    them up to ``limit``, then a deterministic subsample)."""
    zs = tro.basis.matrices
    d = zs.shape[0]
    triples = [
        (i, j, k) for i in range(d) for j in range(d) for k in range(d)
    ]
    if len(triples) > limit:
        step = len(triples) // limit + 1
        triples = triples[::step]
    worst = 0.0
    images = [cls.apply(z) for z in zs]
    for i, j, k in triples:
        lhs = cls.apply(zs[i] @ zs[j].conj().T @ zs[k])
        for b in range(cls.num_blocks):
            rhs = images[i][b] @ images[j][b].conj().T @ images[k][b]
            worst = max(worst, hs_norm(lhs[b] - rhs))
    return worst


@dataclass(eq=False)
class ModuleGenerationCertificate:
    """Generators ``z_1 .. z_r`` of a submodule together with the
    reproducing projection ``e = sum_i z_i z_i*`` (in the span of W W*)
    satisfying ``e w = w`` for every ``w`` in the submodule."""

    generators: list
    projection: np.ndarray
    residuals: dict = field(default_factory=dict)


@dataclass(eq=False)
class Submodule:
    """A right submodule ``W`` of a TRO over its right algebra."""

    parent: TRO
    generators: list
    basis: Subspace
    certificate: ModuleGenerationCertificate | None = None

    @property
    def dim(self):
        return self.basis.dim

    def contains(self, x, tol=None):
        return self.basis.contains(x, tol=tol)


def generate_submodule(tro, generators, tol=None):
    """Right submodule of the TRO generated by the given elements:
    the span of ``g (unitized right algebra)``, verified to be
    module-closed (stable under right multiplication by Z* Z)."""
    tol = DEFAULT_TOL if tol is None else tol
    m, n = tro.basis.shape
    gens = []
    for g in generators:
        g = as_matrix(g, shape=(m, n))
        if not tro.contains(g, tol=tol.member):
            raise MembershipViolation(
                f"submodule generator is not in the TRO "
                f"(residual {tro.basis.residual(g):.3e})"
            )
        gens.append(g)
    unital_right = unitize(tro.right_algebra, tol=tol)
    if gens and unital_right.dim:
        amats = unital_right.basis.matrices
        gmats = np.array(gens)
        prods = np.einsum("gij,ajk->gaik", gmats, amats).reshape(-1, m * n)
        space = span_rows(prods, (m, n), tol_rank=tol.rank)
    else:
        space = Subspace.empty(m, n)
    sub = Submodule(parent=tro, generators=gens, basis=space)
    defect = _module_defect(tro, space)
    if defect > tol.member:
        raise VerificationFailure(
            f"generated span is not module-closed (residual {defect:.3e})"
        )
    return sub


def _module_defect(tro, space):
    """Largest residual of ``w r`` against the span, for ``w`` in the
    submodule basis and ``r`` in the right algebra basis."""
    if space.dim == 0 or tro.right_algebra.dim == 0:
        return 0.0
    ws = space.matrices
    rs = tro.right_algebra.basis.matrices
    prods = np.einsum("aij,bjk->abik", ws, rs).reshape(-1, space.rows * space.cols)
    coeff = prods @ space.stack.conj().T
    resid = prods - coeff @ space.stack
    norms = np.linalg.norm(resid, axis=1)
    scales = np.maximum(1.0, np.linalg.norm(prods, axis=1))
    return float(np.max(norms / scales))


def submodule_ideal_roundtrip(tro, submodule, tol=None):
    """The right ideal ``J = span(W Z*)`` of the left algebra, with both
    directions of the correspondence verified: ``J Z`` must recover ``W``
    and ``(J Z) Z*`` must recover ``J``.

    Returns ``(ideal, report)`` where the report carries the two span
    comparisons.
    """
    tol = DEFAULT_TOL if tol is None else tol
    m, n = tro.basis.shape
    left = tro.left_algebra
    ws = submodule.basis.matrices
    zs = tro.basis.matrices
    if submodule.dim == 0:
        ideal = RightIdeal(
            parent=left, generators=[], basis=Subspace.empty(m, m)
        )
        return ideal, {"module_roundtrip": 0.0, "ideal_roundtrip": 0.0, "ok": True}
    j_prods = np.einsum("aij,bkj->abik", ws, zs.conj()).reshape(-1, m * m)
    j_space = span_rows(j_prods, (m, m), tol_rank=tol.rank)
    ideal = generate_right_ideal(left, list(j_space.matrices), tol=tol)

    jz = np.einsum("aij,bjk->abik", ideal.basis.matrices, zs).reshape(-1, m * n)
    w_back = span_rows(jz, (m, n), tol_rank=tol.rank)
    back_prods = np.einsum("aij,bkj->abik", w_back.matrices, zs.conj()).reshape(-1, m * m)
    j_back = span_rows(back_prods, (m, m), tol_rank=tol.rank)

    report = {
        "module_roundtrip": _span_distance(w_back, submodule.basis),
        "ideal_roundtrip": _span_distance(j_back, ideal.basis),
    }
    report["ok"] = (
        w_back.dim == submodule.dim
        and j_back.dim == ideal.dim
        and max(report["module_roundtrip"], report["ideal_roundtrip"]) <= tol.member
    )
    if not report["ok"]:
        raise VerificationFailure(
            "submodule/ideal correspondence failed to close: "
            f"{report['module_roundtrip']:.3e} / {report['ideal_roundtrip']:.3e}"
        )
    return ideal, report


def _span_distance(a, b):
    """Worst mutual basis residual between two subspaces (inf if the
    dimensions differ)."""
    if a.dim != b.dim:
        return float("inf")
    worst = 0.0
    for i in range(a.dim):
        worst = max(worst, b.residual(a.matrices[i]))
    for i in range(b.dim):
        worst = max(worst, a.residual(b.matrices[i]))
    return worst


def is_maximal_submodule(tro, submodule, tol=None):
    """Whether ``W`` is maximal among proper submodules: pushed through
    the correspondence, its ideal ``W Z*`` must be a maximal right ideal
    of the left algebra, and ``(W Z*) Z`` must recover ``W``."""
    tol = DEFAULT_TOL if tol is None else tol
    if submodule.dim == tro.dim:
        raise NotProper("the submodule is the whole TRO")
    if submodule.dim == 0:
        # the zero submodule is maximal only when the TRO has no proper
        # nonzero submodule, i.e. the zero ideal is maximal in the left algebra
        ideal = RightIdeal(
            parent=tro.left_algebra,
            generators=[],
            basis=Subspace.empty(tro.rows, tro.rows),
        )
        return is_maximal_right_ideal(tro.left_algebra, ideal, tol=tol)
    ideal, report = submodule_ideal_roundtrip(tro, submodule, tol=tol)
    if report["module_roundtrip"] > tol.member:
        return False
    return is_maximal_right_ideal(tro.left_algebra, ideal, tol=tol)


def finite_generation_certificate(submodule, tol=None):
    """Algebraic generators with a reproducing projection for a nonzero
    submodule.

    From an orthonormal basis ``w_1 .. w_r`` of ``W``, the positive
    element ``s = sum w_i w_i*`` has support projection ``e`` acting as
    identity on ``W``; pushing the basis through ``s^(-1/2)`` (on the
    support) gives new elements ``z_i = s^(-1/2) w_i`` of ``W`` with
    ``sum z_i z_i* = e`` exactly.  The returned certificate carries the
    ``z_i`` and ``e`` plus the verified residuals.

    Raises :class:`ZeroSubmodule` for the zero submodule, which has no
    spanning family to normalize (its certificate is vacuous).
    """
    tol = DEFAULT_TOL if tol is None else tol
    if submodule.dim == 0:
        raise ZeroSubmodule("the zero submodule has no generation certificate")
    ws = submodule.basis.matrices
    s = np.einsum("aij,akj->ik", ws, ws.conj())
    s = 0.5 * (s + s.conj().T)
    g = pseudo_inverse_sqrt(s, tol=tol)
    zs = np.einsum("ij,ajk->aik", g, ws)
    e = np.einsum("aij,akj->ik", zs, zs.conj())
    e = 0.5 * (e + e.conj().T)
    support = support_projection_of_psd(s, tol=tol)

    fix = float(np.max(np.linalg.norm(np.einsum("ij,ajk->aik", e, ws) - ws, axis=(1, 2))))
    members = float(np.max([submodule.basis.residual(z) for z in zs]))
    left_prods = np.einsum("aij,bkj->abik", ws, ws.conj()).reshape(-1, e.shape[0] ** 2)
    left_span = span_rows(left_prods, e.shape, tol_rank=tol.rank)
    residuals = {
        "projection": hs_norm(e @ e - e),
        "support_agreement": hs_norm(e - support),
        "reproduces_basis": fix,
        "generators_in_module": members,
        "projection_in_WWstar": left_span.residual(e),
    }
    worst = max(residuals.values())
    if worst > tol.member * 10:
        name = max(residuals, key=residuals.get)
        raise VerificationFailure(
            f"generation certificate identity '{name}' off by {worst:.3e}"
        )
    cert = ModuleGenerationCertificate(
        generators=list(zs), projection=e, residuals=residuals
    )
    submodule.certificate = cert
    return cert


def linking_algebra(tro, tol=None):
    """The *-algebra of ``(rows+cols)^2`` matrices spanned by the corner
    embeddings of Z, Z*, the left algebra and the right algebra.  Useful
    as a cross-check: it is closed because the four corners multiply into
    each other exactly as the TRO identities dictate."""
    tol = DEFAULT_TOL if tol is None else tol
    m, n = tro.basis.shape
    big = m + n
    mats = []
    for z in tro.basis.matrices:
        blk = np.zeros((big, big), dtype=np.complex128)
        blk[:m, m:] = z
        mats.append(blk)
        blk2 = np.zeros((big, big), dtype=np.complex128)
        blk2[m:, :m] = z.conj().T
        mats.append(blk2)
    for a in tro.left_algebra.basis.matrices:
        blk = np.zeros((big, big), dtype=np.complex128)
        blk[:m, :m] = a
        mats.append(blk)
    for b in tro.right_algebra.basis.matrices:
        blk = np.zeros((big, big), dtype=np.complex128)
        blk[m:, m:] = b
        mats.append(blk)
    return StarAlgebra.from_span(mats, ambient_dim=big, tol=tol, validate=True)
