"""Bimodule connections, twisted Dirac operators, product triples and index pairings.

A module over the right-acting coefficient algebra B is presented through
one big projector Q on H^n whose blocks lie in the span of the represented
right action; Q plays the role of the matrix projector acting through the
right action.  Connection potentials are n x n tables of operators on H
constrained to the represented one-form span; the table entry P[i][j]
contributes to output slot k as sum_j P[j][k] v_j.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraBasis
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    adjoint,
    as_complex_matrix,
    herm_eig,
    operator_norm,
    rel_residual,
    span_basis,
    span_residual,
)
from .report import CheckReport
from .triples import SpectralTripleData
from .modules import parseval_frame

__all__ = [
    "ModuleOverAlgebra",
    "BimoduleConnection",
    "grassmann_connection",
    "one_form_basis",
    "twisted_operator",
    "product_triple",
    "connection_condition_check",
    "connection_frame",
    "connection_decomposition",
    "gauge_transform",
    "index_pairing",
    "compress_to_range",
]


@dataclass
class ModuleOverAlgebra:
    """Presentation B^n q of a module through the right action of B on H."""

    size: int
    projector: np.ndarray      # (n*N, n*N)
    right_alg: AlgebraBasis    # operators on H representing B through its right action
    graded: bool = False

    @property
    def fiber_dim(self) -> int:
        return self.right_alg.hilbert_dim

    def blocks(self, big):
        n, d = self.size, self.fiber_dim
        return [[big[i * d:(i + 1) * d, j * d:(j + 1) * d] for j in range(n)] for i in range(n)]


@dataclass
class BimoduleConnection:
    module: ModuleOverAlgebra
    potential: list | None = None  # n x n table of operators on H, or None for Grassmann


def grassmann_connection(module: ModuleOverAlgebra) -> BimoduleConnection:
    return BimoduleConnection(module, None)


def one_form_basis(t: SpectralTripleData, module: ModuleOverAlgebra,
                   tol: Tolerance = DEFAULT_TOL):
    """Orthonormal basis of the represented one-form span of the right action."""
    d = t.dirac
    eps = t.grading if (module.graded and t.grading is not None) else np.eye(t.hilbert_dim)
    ed = eps @ d
    mats = []
    for b in module.right_alg.basis:
        c = ed @ b - b @ ed
        for b2 in module.right_alg.basis:
            mats.append(c @ b2)
    return span_basis(mats, tol)


def _validate_module(t: SpectralTripleData, module: ModuleOverAlgebra, tol: Tolerance):
    n, d = module.size, module.fiber_dim
    q = module.projector
    if q.shape != (n * d, n * d):
        raise ValueError("module projector shape mismatch")
    nq = operator_norm(q)
    if rel_residual(q @ q - q, nq, nq) > max(tol.rel, 1e-8) or \
       rel_residual(q - adjoint(q), nq) > max(tol.rel, 1e-8):
        raise ValueError("module projector is not a self-adjoint idempotent")
    worst = 0.0
    for row in module.blocks(q):
        for blk in row:
            worst = max(worst, module.right_alg.membership_residual(blk))
    if worst > max(tol.rel, 1e-6):
        raise ValueError(
            f"projector blocks leave the represented coefficient algebra (residual {worst:.3e})")


def _validate_potential(t: SpectralTripleData, conn: BimoduleConnection, tol: Tolerance):
    if conn.potential is None:
        return
    module = conn.module
    n = module.size
    basis = one_form_basis(t, module, tol)
    worst_mem = 0.0
    worst_herm = 0.0
    for i in range(n):
        for j in range(n):
            p = as_complex_matrix(conn.potential[i][j])
            worst_mem = max(worst_mem, span_residual(p, basis))
            worst_herm = max(worst_herm, rel_residual(
                adjoint(p) - conn.potential[j][i], operator_norm(p)))
    if worst_mem > max(tol.rel, 1e-6):
        raise ValueError(f"potential entries leave the one-form span (residual {worst_mem:.3e})")
    if worst_herm > max(tol.rel, 1e-7):
        raise ValueError(f"potential violates hermiticity (residual {worst_herm:.3e})")


def _block_diag(op, n):
    return np.kron(np.eye(n, dtype=complex), op)


def _potential_big(conn: BimoduleConnection, hilbert_dim: int) -> np.ndarray:
    n = conn.module.size
    big = np.zeros((n * hilbert_dim, n * hilbert_dim), dtype=complex)
    if conn.potential is None:
        return big
    for k in range(n):
        for j in range(n):
            big[k * hilbert_dim:(k + 1) * hilbert_dim, j * hilbert_dim:(j + 1) * hilbert_dim] = \
                conn.potential[j][k]
    return big


def first_order_residual(t: SpectralTripleData, right_alg: AlgebraBasis) -> float:
    worst = 0.0
    d = t.dirac
    for a in t.algebra_gens:
        da = d @ a - a @ d
        for b in right_alg.basis:
            worst = max(worst, rel_residual(da @ b - b @ da, operator_norm(da), operator_norm(b)))
            worst = max(worst, rel_residual(a @ b - b @ a, operator_norm(a), operator_norm(b)))
    return worst


def twisted_operator(t: SpectralTripleData, conn: BimoduleConnection,
                     tol: Tolerance = DEFAULT_TOL):
    """Compressed block Dirac operator of a connection: Q diag(D) Q plus the potential.

    Returns (dhat, ahat) as operators on H^n (supported on the range of the
    module projector).  Hard errors on a bad projector or potential.
    """
    module = conn.module
    _validate_module(t, module, tol)
    _validate_potential(t, conn, tol)
    fo = first_order_residual(t, module.right_alg)
    if fo > max(tol.rel, 1e-7):
        raise ValueError(f"first-order condition fails for the twisting data ({fo:.3e})")
    n = module.size
    q = module.projector
    d_n = _block_diag(t.dirac, n)
    ahat = q @ _potential_big(conn, t.hilbert_dim) @ q
    dhat = q @ d_n @ q + ahat
    herm = rel_residual(dhat - adjoint(dhat), operator_norm(dhat))
    if herm > max(tol.rel, 1e-8):
        raise ValueError(f"twisted operator is not Hermitian (residual {herm:.3e})")
    return dhat, ahat


def compress_to_range(projector: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal column basis of the range of a Hermitian projector."""
    vals, vecs = herm_eig((projector + adjoint(projector)) / 2.0, Tolerance(rel=1.0, rank_cut=tol.rank_cut))
    keep = vals > 0.5
    return vecs[:, keep]


def product_triple(t: SpectralTripleData, conn: BimoduleConnection,
                   tol: Tolerance = DEFAULT_TOL, right_ops: list | None = None):
    """Spectral triple carried by the twisted operator on the compressed module space.

    The left action is the diagonal action compressed to the projector
    range; optional `right_ops` (operators on H^n commuting with the
    projector) are compressed into the new right action.  Returns
    (triple, basis, report) where `basis` maps the compressed space back
    into H^n.
    """
    rep = CheckReport()
    dhat, ahat = twisted_operator(t, conn, tol)
    module = conn.module
    n = module.size
    q = module.projector
    u = compress_to_range(q, tol)
    nh = t.hilbert_dim

    def comp(x):
        return adjoint(u) @ x @ u

    worst = 0.0
    for a in t.algebra_gens:
        a_n = _block_diag(a, n)
        da = t.dirac @ a - a @ t.dirac
        lhs = dhat @ a_n - a_n @ dhat
        rhs = q @ _block_diag(da, n) @ q
        worst = max(worst, rel_residual(lhs - rhs, operator_norm(t.dirac), operator_norm(a)))
    rep.add("product:commutators_descend", worst, max(tol.rel, 1e-9))

    new_right = None
    if right_ops is not None:
        worst_q = max(rel_residual(q @ c - c @ q, operator_norm(c)) for c in right_ops)
        rep.add("product:right_action_respects_module", worst_q, max(tol.rel, 1e-8))
        worst = 0.0
        for c in right_ops:
            dc = dhat @ comp_big(c, q) - comp_big(c, q) @ dhat
            for a in t.algebra_gens:
                a_n = _block_diag(a, n)
                worst = max(worst, rel_residual(dc @ a_n - a_n @ dc,
                                                operator_norm(dc), operator_norm(a)))
        rep.add("product:first_order_for_right_action", worst, max(tol.rel, 1e-8))
        new_right = [comp(comp_big(c, q)) for c in right_ops]

    grading = None
    if t.grading is not None:
        g_n = _block_diag(t.grading, n)
        if rel_residual(g_n @ q - q @ g_n, operator_norm(q)) <= max(tol.rel, 1e-8):
            grading = comp(g_n)
        else:
            rep.add("product:grading_dropped", 0.0, np.inf,
                    "module projector is not even; grading not transported")

    rep.add("product:summability_bookkeeping", 0.0, np.inf,
            "finite-dimensional class preserved by compression and bounded perturbation")

    out = SpectralTripleData(
        hilbert_dim=u.shape[1],
        algebra_gens=[comp(_block_diag(a, n)) for a in t.algebra_gens],
        dirac=comp(dhat),
        grading=grading,
        declared_p=t.declared_p,
        right_action_gens=new_right,
        state=None,
    )
    return out, u, rep


def comp_big(c, q):
    return q @ c @ q


def connection_frame(conn: BimoduleConnection):
    """Spanning module frame: projector-compressed basis columns in each slot."""
    module = conn.module
    n, nh = module.size, module.fiber_dim
    frames = []
    for j in range(n):
        for b in module.right_alg.basis:
            col = np.zeros((n * nh, nh), dtype=complex)
            col[j * nh:(j + 1) * nh, :] = b
            frames.append(module.projector @ col)
    return frames


def connection_condition_check(t: SpectralTripleData, conn: BimoduleConnection,
                               dhat: np.ndarray | None = None,
                               frame: list | None = None,
                               tol: Tolerance = DEFAULT_TOL,
                               sign_flip: bool = False) -> CheckReport:
    """Graded-commutator identity for the creation maps of each frame element.

    For each e the graded commutator of diag(dhat, D) with the off-diagonal
    creation pair must reproduce the bounded pair assembled from the slot
    commutators and the potential; `sign_flip` deliberately breaks the
    adjoint block (used to demonstrate detection).
    """
    rep = CheckReport()
    module = conn.module
    if dhat is None:
        dhat, _ = twisted_operator(t, conn, tol)
    ahat = conn_potential_compressed(t, conn)
    n, nh = module.size, module.fiber_dim
    q = module.projector
    if frame is None:
        frame = connection_frame(conn)
    d = t.dirac
    worst = 0.0
    for idx, t_e in enumerate(frame):
        blocks = [t_e[i * nh:(i + 1) * nh, :] for i in range(n)]
        par = _frame_parity(blocks, t.grading, tol) if module.graded else 1
        s = -1.0 if par == -1 else 1.0
        t_e_adj = adjoint(t_e) * (-1.0 if sign_flip else 1.0)

        top = dhat @ t_e - s * (t_e @ d)
        bottom = d @ t_e_adj - s * (t_e_adj @ dhat)

        r_pred = q @ np.vstack([d @ y - s * (y @ d) for y in blocks]) + ahat @ t_e
        s_pred = np.hstack([d @ adjoint(y) - s * (adjoint(y) @ d) for y in blocks]) \
            - s * (adjoint(t_e) @ ahat)
        # the lower row acts on the module space, so compare there
        res = max(
            rel_residual(top - r_pred, operator_norm(d), operator_norm(t_e)),
            rel_residual((bottom - s_pred) @ q, operator_norm(d), operator_norm(t_e)),
        )
        worst = max(worst, res)
    rep.add("connection_condition:bounded_pair", worst, max(tol.rel, 1e-9),
            f"{len(frame)} frame elements")
    return rep


def conn_potential_compressed(t: SpectralTripleData, conn: BimoduleConnection) -> np.ndarray:
    q = conn.module.projector
    return q @ _potential_big(conn, t.hilbert_dim) @ q


def _frame_parity(blocks, grading, tol):
    if grading is None:
        return 1
    sign = None
    for y in blocks:
        if operator_norm(y) <= 1e-12:
            continue
        conj = grading @ y @ grading
        if rel_residual(conj - y, operator_norm(y)) <= max(tol.rel, 1e-8):
            s = 1
        elif rel_residual(conj + y, operator_norm(y)) <= max(tol.rel, 1e-8):
            s = -1
        else:
            raise ValueError("frame element is not parity homogeneous")
        if sign is None:
            sign = s
        elif sign != s:
            raise ValueError("frame element mixes parities")
    return sign if sign is not None else 1


def connection_decomposition(t: SpectralTripleData, tol: Tolerance = DEFAULT_TOL):
    """Splits the Dirac operator into a connection part plus a coefficient-linear remainder.

    Uses the canonical tight frame of the right action; returns
    (gamma_table, t_op, report) where gamma_table maps each right generator
    b to the represented form [eps D, b].
    """
    right = t.right_algebra(tol)
    if right is None:
        raise ValueError("connection decomposition needs a right action")
    fo = first_order_residual(t, right)
    if fo > max(tol.rel, 1e-7):
        raise ValueError(f"first-order condition fails ({fo:.3e})")
    n = t.hilbert_dim
    eps = t.grading if t.grading is not None else np.eye(n, dtype=complex)
    ed = eps @ t.dirac
    frame = parseval_frame(right, tol)

    basis = np.eye(n, dtype=complex)
    d_gamma = np.zeros((n, n), dtype=complex)
    for k in range(n):
        acc = np.zeros(n, dtype=complex)
        for x in frame:
            coeff = right.expectation(np.outer(basis[k], np.conj(x)))
            acc = acc + (ed @ coeff - coeff @ ed) @ x
        d_gamma[:, k] = acc
    t_op = ed - d_gamma

    rep = CheckReport()
    worst = 0.0
    for b in right.generator_matrices():
        worst = max(worst, rel_residual(t_op @ b - b @ t_op, operator_norm(t_op), operator_norm(b)))
    rep.add("decomposition:remainder_coefficient_linear", worst, max(tol.rel, 1e-9))
    gamma_table = [(b, ed @ b - b @ ed) for b in right.generator_matrices()]
    return gamma_table, t_op, rep


def gauge_transform(t: SpectralTripleData, conn: BimoduleConnection, u_big: np.ndarray,
                    tol: Tolerance = DEFAULT_TOL):
    """Transport of (projector, potential) along a unitary over the coefficient algebra.

    Returns a new connection whose twisted operator is exactly the unitary
    conjugate of the original one.
    """
    module = conn.module
    n, nh = module.size, module.fiber_dim
    q = module.projector
    d_n = _block_diag(t.dirac, n)
    q_new = u_big @ q @ adjoint(u_big)
    a_big = conn_potential_compressed(t, conn)
    a_new = q_new @ (u_big @ (d_n @ adjoint(u_big) - adjoint(u_big) @ d_n)) @ q_new \
        + u_big @ a_big @ adjoint(u_big)
    table = [[a_new[j * nh:(j + 1) * nh, i * nh:(i + 1) * nh] for j in range(n)] for i in range(n)]
    new_module = ModuleOverAlgebra(n, q_new, module.right_alg, module.graded)
    return BimoduleConnection(new_module, table)


def index_pairing(t: SpectralTripleData, p_proj: np.ndarray,
                  tol: Tolerance = DEFAULT_TOL) -> int:
    """Signed kernel dimension of the graded, projector-compressed Dirac operator."""
    if t.grading is None:
        raise ValueError("index pairing needs a grading")
    p = as_complex_matrix(p_proj)
    np_ = operator_norm(p)
    if rel_residual(p @ p - p, np_, np_) > max(tol.rel, 1e-8) or \
       rel_residual(p - adjoint(p), np_) > max(tol.rel, 1e-8):
        raise ValueError("compression by a non-projector")
    if rel_residual(p @ t.grading - t.grading @ p, np_) > max(tol.rel, 1e-8):
        raise ValueError("projector does not commute with the grading")
    u = compress_to_range(p, tol)
    if u.shape[1] == 0:
        return 0
    g_c = adjoint(u) @ t.grading @ u
    d_c = adjoint(u) @ t.dirac @ u
    vals, vecs = herm_eig(g_c, Tolerance(rel=1e-6, rank_cut=tol.rank_cut))
    plus = vecs[:, vals > 0]
    minus = vecs[:, vals < 0]
    block = adjoint(minus) @ d_c @ plus
    if block.size == 0:
        return plus.shape[1] - minus.shape[1]
    svals = np.linalg.svd(block, compute_uv=False)
    smax = float(svals[0]) if svals.size else 0.0
    rank = int(np.sum(svals > tol.rank_cut * max(smax, 1e-300)))
    ker_plus = plus.shape[1] - rank
    ker_minus = minus.shape[1] - rank
    return int(ker_plus - ker_minus)
