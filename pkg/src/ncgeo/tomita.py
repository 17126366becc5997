"""Tomita conjugation, opposite actions, gradings from orientation operators,
and the mirror Dirac operator with its fundamental-class checks.

Antiunitary maps are stored through their unitary kernels: the map sends
v to K conj(v).  Conjugating a linear operator M gives K conj(M) K^* once
the kernel is unitary with K conj(K) = 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import commutant
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    adjoint,
    as_complex_matrix,
    herm_abs,
    herm_apply,
    operator_norm,
    rel_residual,
)
from .report import CheckReport
from .triples import SpectralTripleData

__all__ = [
    "AntiunitaryMap",
    "tomita_conjugation",
    "opposite_action",
    "grading_from_cycle",
    "mirror_dirac",
    "check_fundamental_class",
]


@dataclass
class AntiunitaryMap:
    kernel: np.ndarray

    def __post_init__(self):
        self.kernel = as_complex_matrix(self.kernel)

    def __call__(self, v):
        return self.kernel @ np.conj(np.asarray(v, dtype=complex))

    def conjugate(self, m) -> np.ndarray:
        """J M J for a linear operator M (kernel assumed to satisfy K conj(K) = 1)."""
        return self.kernel @ np.conj(as_complex_matrix(m)) @ np.conj(self.kernel)

    def compose_kernel(self, other: "AntiunitaryMap") -> np.ndarray:
        """Linear kernel of the composition J1 J2."""
        return self.kernel @ np.conj(other.kernel)

    def unitarity_residual(self) -> float:
        k = self.kernel
        return rel_residual(adjoint(k) @ k - np.eye(k.shape[0]), 1.0)

    def involution_residual(self) -> float:
        k = self.kernel
        return rel_residual(k @ np.conj(k) - np.eye(k.shape[0]), 1.0)


def tomita_conjugation(t: SpectralTripleData, phi=None, tol: Tolerance = DEFAULT_TOL) -> AntiunitaryMap:
    """Antiunitary map determined by w.phi -> w*.phi on the Dirac-commutator algebra.

    Requires the vector to be cyclic and separating with a tracial vector
    state; otherwise the construction cannot be antiunitary and a hard
    error is raised.
    """
    if phi is None:
        phi = t.riemann_vector
    if phi is None:
        raise ValueError("no cyclic vector available")
    phi = np.asarray(phi, dtype=complex).ravel()
    cda = t.cda(tol)
    n = t.hilbert_dim
    if cda.dim != n:
        raise ValueError(
            f"cyclic/separating failure: algebra dim {cda.dim} vs Hilbert dim {n}")
    x = np.stack([w @ phi for w in cda.basis], axis=1)
    y = np.stack([adjoint(w) @ phi for w in cda.basis], axis=1)
    svals = np.linalg.svd(x, compute_uv=False)
    if svals[-1] <= tol.rank_cut * max(float(svals[0]), 1e-300):
        raise ValueError("vector is not cyclic for the Dirac-commutator algebra")
    kernel = y @ np.linalg.inv(np.conj(x))
    j = AntiunitaryMap(kernel)
    if j.unitarity_residual() > max(tol.rel, 1e-7):
        raise ValueError(
            f"vector state is not tracial: conjugation kernel is not unitary "
            f"(residual {j.unitarity_residual():.3e})")
    if j.involution_residual() > max(tol.rel, 1e-7):
        raise ValueError("conjugation does not square to the identity")
    if float(np.linalg.norm(j(phi) - phi)) > max(tol.rel, 1e-7) * max(1.0, float(np.linalg.norm(phi))):
        raise ValueError("conjugation does not fix the cyclic vector")
    comm = commutant(cda, tol)
    worst = 0.0
    for w in cda.basis:
        worst = max(worst, comm.membership_residual(j.conjugate(adjoint(w))))
    if worst > max(tol.rel, 1e-6):
        raise ValueError("conjugated algebra does not land in the commutant")
    return j


def opposite_action(j: AntiunitaryMap, a) -> np.ndarray:
    """Right-action operator J a* J of an algebra element."""
    return j.conjugate(adjoint(as_complex_matrix(a)))


def grading_from_cycle(t: SpectralTripleData, c_op, j: AntiunitaryMap,
                       tol: Tolerance = DEFAULT_TOL):
    """Grading data induced by an orientation operator through the conjugation.

    Even declared dimension: returns (epsilon, report) with epsilon = C.JCJ.
    Odd: returns ((P_plus, P_minus), report) for the central splitting.
    """
    rep = CheckReport()
    c_op = as_complex_matrix(c_op)
    n = t.hilbert_dim
    eye = np.eye(n, dtype=complex)
    nc = operator_norm(c_op)
    if t.declared_p % 2 == 0:
        eps = c_op @ j.conjugate(c_op)
        neps = operator_norm(eps)
        rep.add("grading:squares_to_one", rel_residual(eps @ eps - eye, neps, neps), tol.rel)
        rep.add("grading:commutes_with_conjugation",
                rel_residual(j.conjugate(eps) - eps, neps), tol.rel)
        rep.add("grading:anticommutes_dirac",
                rel_residual(eps @ t.dirac + t.dirac @ eps, neps, operator_norm(t.dirac)), tol.rel)
        worst = 0.0
        for a in t.algebra_gens:
            worst = max(worst, rel_residual(eps @ a - a @ eps, neps, operator_norm(a)))
            aop = opposite_action(j, a)
            worst = max(worst, rel_residual(eps @ aop - aop @ eps, neps, operator_norm(a)))
        rep.add("grading:commutes_both_actions", worst, tol.rel)
        if not rep.passed:
            raise ValueError("orientation operator does not induce a grading:\n" + rep.as_text())
        return eps, rep
    # odd declared dimension
    rep.add("grading:volume_conjugation_invariant",
            rel_residual(j.conjugate(c_op) - c_op, nc), tol.rel)
    if t.grading is not None:
        rep.add("grading:volume_odd_for_grading",
                rel_residual(t.grading @ c_op + c_op @ t.grading, nc, operator_norm(t.grading)), tol.rel)
    p_plus = (eye + c_op) / 2.0
    p_minus = (eye - c_op) / 2.0
    worst = rel_residual(p_plus @ p_plus - p_plus, 1.0)
    worst = max(worst, rel_residual(p_minus @ p_minus - p_minus, 1.0))
    worst = max(worst, rel_residual(p_plus + p_minus - eye, 1.0))
    rep.add("grading:splitting_projectors", worst, tol.rel)
    worst = 0.0
    for a in t.algebra_gens:
        aop = opposite_action(j, a)
        for pr in (p_plus, p_minus):
            worst = max(worst, rel_residual(pr @ a - a @ pr, operator_norm(a)))
            worst = max(worst, rel_residual(pr @ aop - aop @ pr, operator_norm(a)))
    rep.add("grading:projectors_commute_actions", worst, tol.rel)
    if not rep.passed:
        raise ValueError("odd orientation operator fails the splitting checks:\n" + rep.as_text())
    return (p_plus, p_minus), rep


def mirror_dirac(t: SpectralTripleData, j: AntiunitaryMap, eps,
                 tol: Tolerance = DEFAULT_TOL):
    """Conjugated Dirac operator and its graded rotation.

    Returns (d_conj, d_mirror, report): d_conj = J D J and
    d_mirror = i d_conj eps, with a Hermiticity report on the latter.
    """
    eps = as_complex_matrix(eps)
    d_conj = j.conjugate(t.dirac)
    d_mirror = 1j * d_conj @ eps
    rep = CheckReport()
    rep.add("mirror:hermitian",
            rel_residual(d_mirror - adjoint(d_mirror), operator_norm(d_mirror)), tol.rel)
    return d_conj, d_mirror, rep


def check_fundamental_class(t: SpectralTripleData, j: AntiunitaryMap, eps,
                            tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Anticommutation, module-linearity and representation checks for the
    opposite-action Dirac calculus."""
    rep = CheckReport()
    eps = as_complex_matrix(eps)
    d = t.dirac
    nd = operator_norm(d)
    _, d_mirror, mrep = mirror_dirac(t, j, eps, tol)
    rep.extend(mrep)

    gens = t.algebra_gens
    ops = [opposite_action(j, b) for b in gens]
    d_comms = [d @ a - a @ d for a in gens]
    m_comms = [d_mirror @ bop - bop @ d_mirror for bop in ops]

    worst = 0.0
    for da in d_comms:
        for mb in m_comms:
            worst = max(worst, rel_residual(da @ mb + mb @ da, operator_norm(da), operator_norm(mb)))
    rep.add("fundamental:anticommutation", worst, max(tol.rel, 1e-9))

    worst = 0.0
    for mb in m_comms:
        t_b = d @ mb + mb @ d
        for a in gens:
            worst = max(worst, rel_residual(t_b @ a - a @ t_b, operator_norm(t_b), operator_norm(a)))
    rep.add("fundamental:bounded_part_left_linear", worst, max(tol.rel, 1e-9))

    worst = 0.0
    for b, bop in zip(gens, ops):
        x = j.conjugate(adjoint(d @ b - b @ d))  # [D,b]^op
        alpha_x = x @ (-1j * eps)
        x_star = j.conjugate(adjoint(adjoint(d @ b - b @ d)))
        alpha_x_star = x_star @ (-1j * eps)
        worst = max(worst, rel_residual(adjoint(alpha_x) - alpha_x_star, operator_norm(x)))
        worst = max(worst, rel_residual(adjoint(bop) - opposite_action(j, adjoint(b)), operator_norm(b)))
    rep.add("fundamental:twist_star_preserving", worst, max(tol.rel, 1e-9))

    # smoothness of the conjugation is never required; report the norm only
    abs_d = herm_abs(d, tol)
    smooth = operator_norm(abs_d @ j.kernel - j.kernel @ np.conj(abs_d))
    rep.add("fundamental:conjugation_smoothness", 0.0, np.inf,
            f"|[|D|, J]| = {smooth:.6e}")

    reg_inv = herm_apply(lambda x: (1.0 + x * x) ** -0.5, d, tol)
    f_d = d @ reg_inv
    rep.add("fundamental:phase_anticommutes_grading",
            rel_residual(f_d @ eps + eps @ f_d, operator_norm(f_d)), tol.rel)
    details = []
    for i, a in enumerate(gens):
        details.append(f"|[F,a{i}]|={operator_norm(f_d @ a - a @ f_d):.3e}")
    for i, mb in enumerate(m_comms):
        details.append(f"|[F,db{i}]+|={operator_norm(f_d @ mb + mb @ f_d):.3e}")
    rep.add("fundamental:phase_commutators", 0.0, np.inf, " ".join(details))

    worst = 0.0
    for b in gens:
        x = j.conjugate(adjoint(d @ b - b @ d))  # [D,b]^op
        lhs = -1j * (f_d @ x - x @ f_d) @ eps
        mb = d_mirror @ opposite_action(j, b) - opposite_action(j, b) @ d_mirror
        rhs = f_d @ mb + mb @ f_d
        worst = max(worst, rel_residual(lhs - rhs, operator_norm(f_d), operator_norm(x)))
    rep.add("fundamental:phase_mirror_identity", worst, max(tol.rel, 1e-9))
    return rep
