"""Finitely generated projective hermitian modules, pairings, frames and Morita data.

Concrete conventions
--------------------
* A right module q A^m over an algebra A of d x d matrices stores its
  elements as block columns of shape (m*d, d); the right action is matrix
  multiplication from the right, e -> e @ a.
* The conjugate (left) module stores block rows of shape (d, m*d); the
  left action is a @ e.  Conjugation of a right element is the adjoint of
  its block column; projector and metric are reused unchanged.
* Bimodule pairings are stored as tables over the standard basis of the
  carrier space and extended sesquilinearly.  Left pairings are linear in
  the first slot, right pairings in the second.
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
    herm_apply,
    herm_eig,
    operator_norm,
    rel_residual,
    span_basis,
    trace_inner,
)
from .report import CheckReport

__all__ = [
    "ProjectiveModule",
    "EquivBimodule",
    "validate_module",
    "pairing_eval",
    "random_module_element",
    "frame_presentation",
    "morita_check",
    "bimodule_from_actions",
    "l2_space",
    "conjugate_module",
    "linear_operator_bound",
    "weight_from_pairing",
    "inverse_weight_pairing",
    "pre_morita_decompose",
    "parseval_frame",
]


@dataclass
class ProjectiveModule:
    base: AlgebraBasis
    size: int
    projector: np.ndarray  # (m*d, m*d), blocks over the base algebra
    metric: np.ndarray     # (m*d, m*d), positive, q r = r q = r
    side: str = "right"

    @property
    def block_dim(self) -> int:
        return self.base.hilbert_dim

    def blocks(self, big: np.ndarray):
        d = self.block_dim
        m = self.size
        return [[big[i * d:(i + 1) * d, j * d:(j + 1) * d] for j in range(m)] for i in range(m)]


def validate_module(mod: ProjectiveModule, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    rep = CheckReport()
    q, r = mod.projector, mod.metric
    nq = operator_norm(q)
    rep.add("module:idempotent", rel_residual(q @ q - q, nq, nq), tol.rel)
    rep.add("module:projector_hermitian", rel_residual(q - adjoint(q), nq), tol.rel)
    worst = 0.0
    for row in mod.blocks(q):
        for blk in row:
            worst = max(worst, mod.base.membership_residual(blk))
    for row in mod.blocks(r):
        for blk in row:
            worst = max(worst, mod.base.membership_residual(blk))
    rep.add("module:blocks_in_base", worst, max(tol.rel, 1e3 * tol.rank_cut))
    nr = operator_norm(r)
    rep.add("module:metric_compressed", rel_residual(q @ r - r, nq, nr) + rel_residual(r @ q - r, nq, nr), tol.rel)
    aug = r + (np.eye(q.shape[0]) - q)
    vals, _ = herm_eig((aug + adjoint(aug)) / 2.0, tol)
    rep.add(
        "module:metric_invertible",
        0.0 if vals[0] > tol.rank_cut * max(1.0, vals[-1]) else 1.0,
        0.5,
        f"min eigenvalue {vals[0]:.3e}",
    )
    return rep


def random_module_element(mod: ProjectiveModule, rng: np.random.Generator) -> np.ndarray:
    d, m = mod.block_dim, mod.size
    blocks = []
    for _ in range(m):
        x = np.zeros((d, d), dtype=complex)
        for b in mod.base.basis:
            x = x + (rng.standard_normal() + 1j * rng.standard_normal()) * b
        blocks.append(x)
    if mod.side == "right":
        return mod.projector @ np.vstack(blocks)
    return np.hstack([adjoint(b) for b in blocks]) @ mod.projector


def pairing_eval(mod: ProjectiveModule, e: np.ndarray, f: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Metric pairing of two module elements; result is a base-algebra element."""
    e = as_complex_matrix(e)
    f = as_complex_matrix(f)
    q = mod.projector
    if mod.side == "right":
        for x in (e, f):
            if rel_residual(q @ x - x, operator_norm(x)) > tol.rel:
                raise ValueError("element is not in the range of the module projector")
        return adjoint(e) @ mod.metric @ f
    for x in (e, f):
        if rel_residual(x @ q - x, operator_norm(x)) > tol.rel:
            raise ValueError("element is not in the range of the module projector")
    return e @ mod.metric @ adjoint(f)


def frame_presentation(xs, ys, pair, rmul, probes, tol: Tolerance = DEFAULT_TOL):
    """Projector presentation of a right module from a finite frame.

    `pair(e, f)` is the algebra-valued inner product, `rmul(e, a)` the right
    action.  The frame condition sum_i x_i (y_i | g) = g is verified on the
    probe elements; returns (q, to_coords, from_coords).
    """
    m = len(xs)
    if len(ys) != m:
        raise ValueError("frame needs equally many x and y vectors")
    worst = 0.0
    for g in probes:
        rec = None
        for x, y in zip(xs, ys):
            t = rmul(x, pair(y, g))
            rec = t if rec is None else rec + t
        worst = max(worst, rel_residual(rec - g, operator_norm(g)))
    if worst > max(tol.rel, 1e-7):
        raise ValueError(f"frame condition violated, residual {worst:.3e}")

    d = pair(xs[0], xs[0]).shape[0]
    q = np.zeros((m * d, m * d), dtype=complex)
    for i in range(m):
        for j in range(m):
            q[i * d:(i + 1) * d, j * d:(j + 1) * d] = pair(ys[i], xs[j])

    def to_coords(e):
        return np.vstack([pair(ys[i], e) for i in range(m)])

    def from_coords(col):
        out = None
        for i, x in enumerate(xs):
            t = rmul(x, col[i * d:(i + 1) * d, :])
            out = t if out is None else out + t
        return out

    return q, to_coords, from_coords


# ---------------------------------------------------------------------------
# two-sided bimodules


@dataclass
class EquivBimodule:
    """Two-sided hermitian bimodule on a concrete carrier C^d.

    Both algebras act on the carrier; `left_pair[i][j]` is the left-algebra
    value of (c_i | c_j) (linear in the first slot), `right_pair[i][j]` the
    operator by which (c_i | c_j) of the right algebra acts (linear in the
    second slot).
    """

    left_alg: AlgebraBasis
    right_alg: AlgebraBasis
    carrier_dim: int
    left_pair: list
    right_pair: list

    def left_pairing(self, u, v) -> np.ndarray:
        u = np.asarray(u, dtype=complex).ravel()
        v = np.asarray(v, dtype=complex).ravel()
        out = np.zeros((self.carrier_dim, self.carrier_dim), dtype=complex)
        for i in range(self.carrier_dim):
            if u[i] == 0:
                continue
            for j in range(self.carrier_dim):
                if v[j] == 0:
                    continue
                out = out + u[i] * np.conj(v[j]) * self.left_pair[i][j]
        return out

    def right_pairing(self, u, v) -> np.ndarray:
        u = np.asarray(u, dtype=complex).ravel()
        v = np.asarray(v, dtype=complex).ravel()
        out = np.zeros((self.carrier_dim, self.carrier_dim), dtype=complex)
        for i in range(self.carrier_dim):
            if u[i] == 0:
                continue
            for j in range(self.carrier_dim):
                if v[j] == 0:
                    continue
                out = out + np.conj(u[i]) * v[j] * self.right_pair[i][j]
        return out


def bimodule_from_actions(left_alg: AlgebraBasis, right_alg: AlgebraBasis,
                          tol: Tolerance = DEFAULT_TOL):
    """Canonical bimodule structure on the carrier from two commuting actions.

    Left pairing: conditional expectation of the rank-one |u><v| onto the
    left algebra.  Right pairing: expectation onto the right algebra, scaled
    by the least-squares factor that enforces the compatibility relation
    (u|v)_left . w = u . (v|w)_right.  Returns (bimodule, scale).
    """
    d = left_alg.hilbert_dim
    if right_alg.hilbert_dim != d:
        raise ValueError("actions must share the carrier")
    basis = np.eye(d, dtype=complex)
    lp = [[left_alg.expectation(np.outer(basis[i], basis[j].conj())) for j in range(d)]
          for i in range(d)]
    rp_raw = [[right_alg.expectation(np.outer(basis[j], basis[i].conj())) for j in range(d)]
              for i in range(d)]

    # least-squares scale from compatibility sampled on basis triples
    num = 0.0
    den = 0.0
    for i in range(d):
        for j in range(d):
            for k in range(d):
                lhs = lp[i][j] @ basis[k]          # (c_i|c_j)_left applied to c_k
                rhs = rp_raw[j][k] @ basis[i]      # (c_j|c_k)_right acting on c_i
                num += float(np.real(np.vdot(rhs, lhs)))
                den += float(np.real(np.vdot(rhs, rhs)))
    lam = num / den if den > 0 else 1.0
    rp = [[lam * rp_raw[i][j] for j in range(d)] for i in range(d)]
    bi = EquivBimodule(left_alg, right_alg, d, lp, rp)
    return bi, lam


def morita_check(bi: EquivBimodule, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Compatibility, fullness and positivity checks for a two-sided bimodule."""
    rep = CheckReport()
    d = bi.carrier_dim
    basis = np.eye(d, dtype=complex)

    worst = 0.0
    for b in bi.left_alg.basis:
        for a in bi.right_alg.basis:
            worst = max(worst, rel_residual(b @ a - a @ b, operator_norm(a), operator_norm(b)))
    rep.add("morita:actions_commute", worst, tol.rel)

    worst = 0.0
    for a in bi.right_alg.basis:
        na = operator_norm(a)
        for i in range(d):
            for j in range(d):
                lhs = bi.left_pairing(a @ basis[i], basis[j])
                rhs = bi.left_pairing(basis[i], adjoint(a) @ basis[j])
                worst = max(worst, rel_residual(lhs - rhs, na))
    rep.add("morita:left_pairing_right_action", worst, tol.rel)

    worst = 0.0
    for b in bi.left_alg.basis:
        nb = operator_norm(b)
        for i in range(d):
            for j in range(d):
                lhs = bi.right_pairing(b @ basis[i], basis[j])
                rhs = bi.right_pairing(basis[i], adjoint(b) @ basis[j])
                worst = max(worst, rel_residual(lhs - rhs, nb))
    rep.add("morita:right_pairing_left_action", worst, tol.rel)

    worst = 0.0
    for i in range(d):
        for j in range(d):
            for k in range(d):
                lhs = bi.left_pair[i][j] @ basis[k]
                rhs = bi.right_pair[j][k] @ basis[i]
                worst = max(worst, rel_residual(lhs - rhs, 1.0))
    rep.add("morita:compatibility", worst, tol.rel)

    flat_left = [bi.left_pair[i][j] for i in range(d) for j in range(d)]
    flat_right = [bi.right_pair[i][j] for i in range(d) for j in range(d)]
    ldim = len(span_basis(flat_left, tol))
    rdim = len(span_basis(flat_right, tol))
    rep.add("morita:left_full", 0.0 if ldim == bi.left_alg.dim else 1.0, 0.5,
            f"pairing span {ldim} vs algebra {bi.left_alg.dim}")
    rep.add("morita:right_full", 0.0 if rdim == bi.right_alg.dim else 1.0, 0.5,
            f"pairing span {rdim} vs algebra {bi.right_alg.dim}")

    # left values act through a representation, right values through an
    # antirepresentation, so the positive arrangement of the right Gram is
    # the transposed one
    gram_left = np.block([[bi.left_pair[i][j] for j in range(d)] for i in range(d)])
    gram_right = np.block([[bi.right_pair[j][i] for j in range(d)] for i in range(d)])
    for name, gram in (("left", gram_left), ("right", gram_right)):
        h = (gram + adjoint(gram)) / 2.0
        sym = rel_residual(gram - adjoint(gram), operator_norm(gram))
        vals, _ = herm_eig(h, Tolerance(rel=1.0, rank_cut=tol.rank_cut))
        neg = max(0.0, -float(vals[0]))
        rep.add(f"morita:{name}_gram_positive", sym + neg / max(1.0, float(vals[-1])), tol.rel)
    return rep


# ---------------------------------------------------------------------------
# L^2 spaces, conjugates, bounds


def l2_space(mod: ProjectiveModule, density: np.ndarray, tol: Tolerance = DEFAULT_TOL):
    """Gram matrix of the module generators under the state Tr(density . ) and
    the orthonormalization map (pseudo-inverse square root of the Gram)."""
    rho = as_complex_matrix(density)
    d = mod.block_dim
    if rho.shape != (d, d):
        raise ValueError("state must act on the base algebra carrier")
    vals, _ = herm_eig((rho + adjoint(rho)) / 2.0, tol)
    if vals[0] <= tol.rank_cut * max(1.0, vals[-1]):
        raise ValueError("state is not faithful (density matrix has a kernel)")
    m = mod.size
    r = mod.metric
    gram = np.zeros((m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            gram[i, j] = np.trace(rho @ r[i * d:(i + 1) * d, j * d:(j + 1) * d])
    gvals, _ = herm_eig((gram + adjoint(gram)) / 2.0, tol)
    if gvals[0] < -tol.rel * max(1.0, gvals[-1]):
        raise ValueError("Gram matrix is not positive semidefinite")

    scale = max(1.0, float(gvals[-1]))
    gram_kernel = int(np.sum(gvals <= tol.rank_cut * scale))
    # kernel of the module presentation on scalar coordinate vectors
    act = np.zeros((m * d * d, m), dtype=complex)
    for j in range(m):
        col = np.zeros((m * d, d), dtype=complex)
        col[j * d:(j + 1) * d, :] = np.eye(d)
        act[:, j] = (mod.projector @ col).ravel()
    svals = np.linalg.svd(act, compute_uv=False)
    act_kernel = int(np.sum(svals <= tol.rank_cut * max(svals[0], 1e-300))) if svals.size else m
    if gram_kernel != act_kernel:
        raise ValueError(
            f"state not faithful on the module: Gram kernel {gram_kernel} vs projector kernel {act_kernel}")

    def inv_sqrt(x):
        return 0.0 if x <= tol.rank_cut * scale else x ** -0.5

    ortho = herm_apply(inv_sqrt, (gram + adjoint(gram)) / 2.0, Tolerance(rel=1.0, rank_cut=tol.rank_cut))
    return gram, ortho


def conjugate_module(mod: ProjectiveModule) -> ProjectiveModule:
    """Conjugate module: sides flip, elements conjugate, projector and metric persist."""
    side = "left" if mod.side == "right" else "right"
    return ProjectiveModule(mod.base, mod.size, mod.projector.copy(), mod.metric.copy(), side)


def conjugate_element(e: np.ndarray) -> np.ndarray:
    return adjoint(e)


def linear_operator_bound(t_op: np.ndarray, mod: ProjectiveModule, tol: Tolerance = DEFAULT_TOL) -> float:
    """Upper bound for the operator norm of a module endomorphism.

    The bound is B with B^2 = sum_{r,s} ||(x_s|x_r)(T x_r|T x_s)|| over the
    projector-column generators x_j; it dominates the L^2 operator norm for
    every state on the base algebra.
    """
    if mod.side != "right":
        raise ValueError("operator bound implemented for right modules")
    t_op = as_complex_matrix(t_op)
    d, m = mod.block_dim, mod.size
    q = mod.projector
    nt = operator_norm(t_op)
    worst = 0.0
    for row in mod.blocks(t_op):
        for blk in row:
            worst = max(worst, mod.base.membership_residual(blk))
    comp = rel_residual(q @ t_op @ q - t_op, nt)
    if max(worst, comp) > max(tol.rel, 1e-7):
        raise ValueError("operator is not a module endomorphism over the base algebra")

    xs = [q[:, j * d:(j + 1) * d] for j in range(m)]
    txs = [t_op @ x for x in xs]
    total = 0.0
    for r in range(m):
        for s in range(m):
            a = adjoint(xs[s]) @ mod.metric @ xs[r]
            b = adjoint(txs[r]) @ mod.metric @ txs[s]
            total += operator_norm(a @ b)
    return float(np.sqrt(total))


# ---------------------------------------------------------------------------
# operator-valued weights


def weight_from_pairing(c_alg: AlgebraBasis, a_alg: AlgebraBasis, pairing,
                        tol: Tolerance = DEFAULT_TOL):
    """Operator-valued weight w -> (w | 1) from a left algebra-valued pairing.

    Verifies the bimodule property Psi(a w b) = a Psi(w) b on basis triples
    and faithfulness of the sesquilinear form Psi(u^* w).  Returns
    (psi_callable, report).
    """
    rep = CheckReport()
    one = c_alg.identity()

    def psi(w):
        return pairing(w, one)

    worst = 0.0
    witness = ""
    for a in a_alg.basis:
        for b in a_alg.basis:
            for w in c_alg.basis:
                lhs = psi(a @ w @ b)
                rhs = a @ psi(w) @ b
                r = rel_residual(lhs - rhs, operator_norm(a), operator_norm(w), operator_norm(b))
                if r > worst:
                    worst = r
                    witness = f"witness triple (a={operator_norm(a):.2f}, w={operator_norm(w):.2f}, b={operator_norm(b):.2f})"
    rep.add("weight:bimodule_property", worst, tol.rel, witness)
    if worst > max(tol.rel, 1e-7):
        raise ValueError(f"pairing is not an operator-valued weight: {witness}, residual {worst:.3e}")

    dim = c_alg.dim
    gram = np.zeros((dim, dim), dtype=complex)
    for i, u in enumerate(c_alg.basis):
        for j, w in enumerate(c_alg.basis):
            gram[i, j] = np.trace(psi(adjoint(u) @ w))
    vals, _ = herm_eig((gram + adjoint(gram)) / 2.0, Tolerance(rel=1.0, rank_cut=tol.rank_cut))
    faithful = vals[0] > tol.rank_cut * max(1.0, vals[-1])
    rep.add("weight:faithful", 0.0 if faithful else 1.0, 0.5, f"min Gram eigenvalue {vals[0]:.3e}")
    return psi, rep


def inverse_weight_pairing(psi):
    """Left pairing (u|v) = Psi(u v^*) recovered from an operator-valued weight."""
    def pairing(u, v):
        return psi(u @ adjoint(v))
    return pairing


# ---------------------------------------------------------------------------
# frames from conditional expectations


def parseval_frame(alg: AlgebraBasis, tol: Tolerance = DEFAULT_TOL):
    """Vectors x_i with sum_i E(|g><x_i|) x_i = g for the expectation onto `alg`.

    Works for any unital *-algebra acting on C^n: the frame operator of the
    standard basis is central in the algebra, positive and invertible, and
    x_i = S^(-1/2) e_i tightens the frame.
    """
    n = alg.hilbert_dim
    s = np.zeros((n, n), dtype=complex)
    for b in alg.basis:
        s = s + b @ adjoint(b)
    vals, _ = herm_eig((s + adjoint(s)) / 2.0, tol)
    if vals[0] <= tol.rank_cut * max(1.0, vals[-1]):
        raise ValueError("frame operator is singular; algebra action is degenerate")
    s_inv_half = herm_apply(lambda x: x ** -0.5, (s + adjoint(s)) / 2.0, tol)
    return [s_inv_half[:, i] for i in range(n)]


def expectation_pairing(alg: AlgebraBasis):
    """Left algebra-valued pairing (u|v) = E(|u><v|) for the expectation onto `alg`."""
    def pair(u, v):
        return alg.expectation(np.outer(np.asarray(u).ravel(), np.asarray(v).conj().ravel()))
    return pair


# ---------------------------------------------------------------------------
# decomposition of an equivalence bimodule


def pre_morita_decompose(bi: EquivBimodule, tol: Tolerance = DEFAULT_TOL):
    """Projector presentations and algebra isomorphisms from a passing bimodule.

    Returns a dict with projectors over both algebras, the carrier frames,
    and matrix representations of each algebra over the other, plus a
    report with the isomorphism residuals.
    """
    base = morita_check(bi, tol)
    if not base.passed:
        raise ValueError("bimodule fails the Morita checks:\n" + base.as_text())
    d = bi.carrier_dim
    basis = np.eye(d, dtype=complex)

    # left-side frame: solve sum_ij c_ij (c_i|c_j)_left = 1
    cols = np.stack([bi.left_pair[i][j].ravel() for i in range(d) for j in range(d)], axis=1)
    target = np.eye(d, dtype=complex).ravel()
    coeff, res, _, _ = np.linalg.lstsq(cols, target, rcond=None)
    resid = rel_residual((cols @ coeff - target).reshape(d, d), 1.0)
    if resid > max(tol.rel, 1e-7):
        raise ValueError("left pairing is not full: cannot represent the identity")
    c = coeff.reshape(d, d)
    xs = [sum(c[i, j] * basis[i] for i in range(d)) for j in range(d)]
    ys = [basis[j] for j in range(d)]

    # right-side frame: sum_kl d_kl (c_k|c_l)_right = identity operator of the right action
    cols_r = np.stack([bi.right_pair[k][l].ravel() for k in range(d) for l in range(d)], axis=1)
    coeff_r, _, _, _ = np.linalg.lstsq(cols_r, target, rcond=None)
    resid_r = rel_residual((cols_r @ coeff_r - target).reshape(d, d), 1.0)
    if resid_r > max(tol.rel, 1e-7):
        raise ValueError("right pairing is not full: cannot represent the identity")
    dd = coeff_r.reshape(d, d)
    ws = [basis[k] for k in range(d)]
    zs = [sum(dd[k, l] * basis[l] for l in range(d)) for k in range(d)]

    rep = CheckReport()
    m = d
    q = np.array([[0j] * 0])
    # q over the right algebra: q_{ij} = (y_i | x_j)_right as acting operators
    q_ops = [[bi.right_pairing(ys[i], xs[j]) for j in range(m)] for i in range(m)]
    # verify idempotency of the operator-matrix (composition reverses: ops act directly)
    worst = 0.0
    for i in range(m):
        for k in range(m):
            acc = np.zeros((d, d), dtype=complex)
            for j in range(m):
                acc = acc + q_ops[j][k] @ q_ops[i][j]
            worst = max(worst, rel_residual(acc - q_ops[i][k], 1.0))
    rep.add("decompose:right_projector_idempotent", worst, max(tol.rel, 1e-7))

    p_ops = [[bi.left_pairing(zs[l], ws[k]) for k in range(m)] for l in range(m)]
    worst = 0.0
    for i in range(m):
        for k in range(m):
            acc = np.zeros((d, d), dtype=complex)
            for j in range(m):
                acc = acc + p_ops[i][j] @ p_ops[j][k]
            worst = max(worst, rel_residual(acc - p_ops[i][k], 1.0))
    rep.add("decompose:left_projector_idempotent", worst, max(tol.rel, 1e-7))

    def rep_left_on_right(b_op):
        # matrix of a left-algebra operator over the right algebra
        return [[bi.right_pairing(ys[i], b_op @ xs[j]) for j in range(m)] for i in range(m)]

    def rep_right_on_left(a_op):
        return [[bi.left_pairing(a_op @ zs[l], ws[k]) for k in range(m)] for l in range(m)]

    def block_mul(xmat, ymat):
        out = [[np.zeros((d, d), dtype=complex) for _ in range(m)] for _ in range(m)]
        for i in range(m):
            for k in range(m):
                acc = np.zeros((d, d), dtype=complex)
                for j in range(m):
                    acc = acc + ymat[j][k] @ xmat[i][j]  # acting operators compose in reverse
                out[i][k] = acc
        return out

    worst = 0.0
    for b1 in bi.left_alg.basis[: min(4, bi.left_alg.dim)]:
        for b2 in bi.left_alg.basis[: min(4, bi.left_alg.dim)]:
            lhs = rep_left_on_right(b1 @ b2)
            prod = block_mul(rep_left_on_right(b1), rep_left_on_right(b2))
            for i in range(m):
                for k in range(m):
                    worst = max(worst, rel_residual(lhs[i][k] - prod[i][k],
                                                    operator_norm(b1), operator_norm(b2)))
    rep.add("decompose:left_into_right_homomorphism", worst, max(tol.rel, 1e-7))

    rank_map = np.stack(
        [np.concatenate([rep_left_on_right(b)[i][j].ravel() for i in range(m) for j in range(m)])
         for b in bi.left_alg.basis], axis=1)
    svals = np.linalg.svd(rank_map, compute_uv=False)
    inj = svals[-1] > tol.rank_cut * max(1.0, svals[0])
    rep.add("decompose:left_into_right_injective", 0.0 if inj else 1.0, 0.5)

    worst = 0.0
    for a1 in bi.right_alg.basis[: min(4, bi.right_alg.dim)]:
        for a2 in bi.right_alg.basis[: min(4, bi.right_alg.dim)]:
            # right-action operators compose reversed, so the product map flips
            lhs = rep_right_on_left(a2 @ a1)
            prod = block_mul_left(rep_right_on_left(a1), rep_right_on_left(a2), d, m)
            for i in range(m):
                for k in range(m):
                    worst = max(worst, rel_residual(lhs[i][k] - prod[i][k],
                                                    operator_norm(a1), operator_norm(a2)))
    rep.add("decompose:right_into_left_homomorphism", worst, max(tol.rel, 1e-7))

    return {
        "frame_left": (xs, ys),
        "frame_right": (ws, zs),
        "q_ops": q_ops,
        "p_ops": p_ops,
        "rep_left_on_right": rep_left_on_right,
        "rep_right_on_left": rep_right_on_left,
        "report": rep,
    }


def block_mul_left(xmat, ymat, d, m):
    out = [[np.zeros((d, d), dtype=complex) for _ in range(m)] for _ in range(m)]
    for i in range(m):
        for k in range(m):
            acc = np.zeros((d, d), dtype=complex)
            for j in range(m):
                acc = acc + xmat[i][j] @ ymat[j][k]
            out[i][k] = acc
    return out
