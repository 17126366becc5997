"""Spectral triple data and the condition checkers.

The state functional defaults to the ordinary (unnormalized) trace; a
density operator can be supplied to weight it.  The declared dimension p
only enters sign rules and the zeta diagnostics.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraBasis, commutant, center, generate_algebra, graded_split
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    adjoint,
    as_complex_matrix,
    herm_abs,
    herm_eig,
    null_space,
    operator_norm,
    project_onto_span,
    rel_residual,
    span_basis,
    span_coords,
    span_residual,
)
from .modules import bimodule_from_actions, expectation_pairing, morita_check, parseval_frame
from .report import CheckReport

__all__ = [
    "SpectralTripleData",
    "HochschildChain",
    "validate_triple",
    "commutator_algebra",
    "represent_chain",
    "hochschild_boundary",
    "chain_mul",
    "chain_coefficient_norm",
    "check_orientability",
    "fit_orientation_cycle",
    "check_first_order",
    "check_finiteness",
    "check_spinc",
    "check_riemannian",
    "check_extras",
    "zeta_diagnostic",
    "run_condition_suite",
]


@dataclass
class HochschildChain:
    degree: int
    terms: list  # list of (degree+1)-tuples of matrices
    generalized: bool = False

    def __post_init__(self):
        self.terms = [tuple(as_complex_matrix(m) for m in t) for t in self.terms]
        for t in self.terms:
            if len(t) != self.degree + 1:
                raise ValueError("chain term arity does not match the degree")


@dataclass
class SpectralTripleData:
    hilbert_dim: int
    algebra_gens: list
    dirac: np.ndarray
    grading: np.ndarray | None = None
    declared_p: int = 0
    right_action_gens: list | None = None
    orientation_cycle: HochschildChain | None = None
    riemann_vector: np.ndarray | None = None
    state: np.ndarray | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.algebra_gens = [as_complex_matrix(g) for g in self.algebra_gens]
        self.dirac = as_complex_matrix(self.dirac)
        if self.grading is not None:
            self.grading = as_complex_matrix(self.grading)
        if self.right_action_gens is not None:
            self.right_action_gens = [as_complex_matrix(g) for g in self.right_action_gens]
        if self.riemann_vector is not None:
            self.riemann_vector = np.asarray(self.riemann_vector, dtype=complex).ravel()
        if self.state is not None:
            self.state = as_complex_matrix(self.state)

    # -- state functional -------------------------------------------------
    def psi(self, x) -> complex:
        x = np.asarray(x, dtype=complex)
        if self.state is None:
            return complex(np.trace(x))
        return complex(np.trace(self.state @ x))

    # -- cached derived algebras ------------------------------------------
    def algebra(self, tol: Tolerance = DEFAULT_TOL) -> AlgebraBasis:
        key = ("algebra", tol.rank_cut)
        if key not in self._cache:
            self._cache[key] = generate_algebra(self.algebra_gens, with_unit=True, tol=tol)
        return self._cache[key]

    def commutators(self):
        d = self.dirac
        return [d @ a - a @ d for a in self.algebra_gens]

    def cda(self, tol: Tolerance = DEFAULT_TOL) -> AlgebraBasis:
        key = ("cda", tol.rank_cut)
        if key not in self._cache:
            self._cache[key] = commutator_algebra(self, tol)
        return self._cache[key]

    def right_algebra(self, tol: Tolerance = DEFAULT_TOL) -> AlgebraBasis | None:
        if self.right_action_gens is None:
            return None
        key = ("right", tol.rank_cut)
        if key not in self._cache:
            self._cache[key] = generate_algebra(self.right_action_gens, with_unit=True, tol=tol)
        return self._cache[key]


def validate_triple(t: SpectralTripleData, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    rep = CheckReport()
    n = t.hilbert_dim
    d = t.dirac
    if d.shape != (n, n):
        raise ValueError("Dirac operator shape does not match the Hilbert dimension")
    for g in t.algebra_gens:
        if g.shape != (n, n):
            raise ValueError("algebra generator shape mismatch")
    nd = operator_norm(d)
    herm = rel_residual(d - adjoint(d), nd)
    rep.add("validate:dirac_hermitian", herm, tol.rel)
    if herm > tol.rel:
        raise ValueError("Dirac operator is not Hermitian")
    alg = t.algebra(tol)
    rep.add("validate:algebra_generated", 0.0, tol.rel, f"dim {alg.dim}")
    if t.grading is not None:
        g = t.grading
        ng = operator_norm(g)
        rep.add("validate:grading_hermitian", rel_residual(g - adjoint(g), ng), tol.rel)
        rep.add("validate:grading_involution", rel_residual(g @ g - np.eye(n), ng, ng), tol.rel)
        rep.add("validate:grading_anticommutes_dirac", rel_residual(g @ d + d @ g, ng, nd), tol.rel)
        worst = max(rel_residual(g @ a - a @ g, ng, operator_norm(a)) for a in t.algebra_gens)
        rep.add("validate:grading_commutes_algebra", worst, tol.rel)
    abs_d = herm_abs(d, tol)
    for i, a in enumerate(t.algebra_gens):
        rep.add(f"validate:commutator_norm[{i}]", 0.0, np.inf,
                f"|[D,a]|={operator_norm(d @ a - a @ d):.6e} |[|D|,a]|={operator_norm(abs_d @ a - a @ abs_d):.6e}")
    return rep


def commutator_algebra(t: SpectralTripleData, tol: Tolerance = DEFAULT_TOL) -> AlgebraBasis:
    """Algebra generated by the left action together with its Dirac commutators.

    When a grading is present the basis is re-spanned into homogeneous
    elements and tagged with parities.
    """
    gens = list(t.algebra_gens) + t.commutators()
    alg = generate_algebra(gens, with_unit=True, tol=tol)
    if t.grading is not None:
        even, odd = graded_split(alg, t.grading, tol)
        basis = even + odd
        parity = [1] * len(even) + [-1] * len(odd)
        out = AlgebraBasis(alg.hilbert_dim, basis, [], True, parity)
        out._generator_mats = gens
        return out
    alg._generator_mats = gens
    return alg


def represent_chain(t: SpectralTripleData, chain: HochschildChain) -> np.ndarray:
    """Operator sum a0 [D,a1] ... [D,ap] over the chain terms."""
    n = t.hilbert_dim
    d = t.dirac
    out = np.zeros((n, n), dtype=complex)
    for term in chain.terms:
        acc = term[0]
        for leg in term[1:]:
            acc = acc @ (d @ leg - leg @ d)
        out = out + acc
    return out


def hochschild_boundary(chain: HochschildChain) -> HochschildChain:
    """Standard boundary: alternating adjacent multiplications with cyclic last term.

    Degree 0 input returns an empty degree-0 chain (flagged degenerate via
    empty terms).
    """
    p = chain.degree
    if p < 1:
        return HochschildChain(0, [], chain.generalized)
    terms = []
    for t in chain.terms:
        for i in range(p):
            merged = t[:i] + (t[i] @ t[i + 1],) + t[i + 2:]
            terms.append(((-1) ** i, merged))
        last = (t[p] @ t[0],) + t[1:p]
        terms.append(((-1) ** p, last))
    # fold the sign into the first leg
    folded = [(s * term[0],) + tuple(term[1:]) for s, term in terms]
    return HochschildChain(p - 1, folded, chain.generalized)


def _pair_mul(x, y, c2: HochschildChain) -> HochschildChain:
    """(x (.) y) . c2 via the derivation rule on the first leg of c2."""
    terms = []
    for t in c2.terms:
        b0, rest = t[0], t[1:]
        terms.append((x, y @ b0) + rest)
        terms.append((-(x @ y), b0) + rest)
    return HochschildChain(c2.degree + 1, terms, c2.generalized)


def chain_mul(c1: HochschildChain, c2: HochschildChain) -> HochschildChain:
    """Product of chains matching the product of the represented forms."""
    out_terms = []
    gen = c1.generalized or c2.generalized
    for t in c1.terms:
        if c1.degree == 0:
            for s in c2.terms:
                out_terms.append((t[0] @ s[0],) + s[1:])
        else:
            acc = c2
            for leg in reversed(t[2:]):
                acc = _pair_mul(np.eye(leg.shape[0], dtype=complex), leg, acc)
            acc = _pair_mul(t[0], t[1], acc)
            out_terms.extend(acc.terms)
    return HochschildChain(c1.degree + c2.degree, out_terms, gen)


def chain_coefficient_norm(chain: HochschildChain, alg: AlgebraBasis,
                           tol: Tolerance = DEFAULT_TOL) -> float:
    """Norm of a chain as an element of (first-leg space) (x) A^(x)degree.

    The first-leg coordinate space is the span of the appearing first legs
    (sufficient to detect cancellation); remaining legs use the algebra
    basis.
    """
    if not chain.terms:
        return 0.0
    first_basis = span_basis([t[0] for t in chain.terms], tol)
    if not first_basis:
        return 0.0
    shape = (len(first_basis),) + (alg.dim,) * chain.degree
    coeff = np.zeros(shape, dtype=complex)
    for t in chain.terms:
        c0 = span_coords(t[0], first_basis)
        legs = [alg.coords(m) for m in t[1:]]
        block = c0
        for l in legs:
            block = np.tensordot(block, l, axes=0)
        coeff = coeff + block
    scale = max(1.0, max(operator_norm(t[0]) for t in chain.terms))
    return float(np.linalg.norm(coeff.ravel())) / scale


def _orientation_sign_residual(c_op, d, p):
    # C D - (-1)^(p-1) D C = 0
    sgn = (-1.0) ** (p - 1)
    return rel_residual(c_op @ d - sgn * d @ c_op, operator_norm(c_op), operator_norm(d))


def check_orientability(t: SpectralTripleData, tol: Tolerance = DEFAULT_TOL,
                        strict: bool = False) -> CheckReport:
    rep = CheckReport()
    chain = t.orientation_cycle
    if chain is None:
        rep.skip("orient:cycle", "no orientation cycle supplied")
        return rep
    alg = t.algebra(tol)
    p = chain.degree

    worst_leg = 0.0
    for term in chain.terms:
        legs = term if strict or not chain.generalized else term[1:]
        for leg in legs:
            worst_leg = max(worst_leg, alg.membership_residual(leg))
    label = "orient:legs_in_algebra" if (strict or not chain.generalized) else "orient:tail_legs_in_algebra"
    rep.add(label, worst_leg, max(tol.rel, 1e3 * tol.rank_cut),
            "strict mode" if strict else "")

    if chain.generalized and not strict:
        worst = 0.0
        for term in chain.terms:
            w = term[0]
            for a in t.algebra_gens:
                worst = max(worst, rel_residual(w @ a - a @ w, operator_norm(w), operator_norm(a)))
            if t.right_action_gens:
                for b in t.right_action_gens:
                    worst = max(worst, rel_residual(w @ b - b @ w, operator_norm(w), operator_norm(b)))
        rep.add("orient:first_leg_commutes", worst, tol.rel)

    if p >= 1:
        boundary = hochschild_boundary(chain)
        rep.add("orient:cycle_closed", chain_coefficient_norm(boundary, alg, tol), max(tol.rel, 1e3 * tol.rank_cut))
    else:
        rep.add("orient:cycle_closed", 0.0, tol.rel, "degree 0: boundary degenerate")

    c_op = represent_chain(t, chain)
    nc = operator_norm(c_op)
    rep.add("orient:volume_selfadjoint", rel_residual(c_op - adjoint(c_op), nc), tol.rel)
    rep.add("orient:volume_involution", rel_residual(c_op @ c_op - np.eye(t.hilbert_dim), nc, nc), tol.rel)
    rep.add("orient:volume_dirac_sign", _orientation_sign_residual(c_op, t.dirac, p), tol.rel)
    worst = max(rel_residual(c_op @ a - a @ c_op, nc, operator_norm(a)) for a in t.algebra_gens)
    rep.add("orient:volume_commutes_algebra", worst, tol.rel)
    return rep


def fit_orientation_cycle(t: SpectralTripleData, p: int, tol: Tolerance = DEFAULT_TOL,
                          target: np.ndarray | None = None, generalized: bool = False,
                          term_budget: int | None = None):
    """Constrained least-squares fit of a degree-p cycle representing a target.

    Minimizes |represent(chain) - target| over chains with legs in the
    algebra, subject to the linear cycle constraint.  Returns
    (chain or None, relative residual).
    """
    if target is None:
        if t.grading is None:
            raise ValueError("no fit target: supply one or set a grading")
        target = t.grading
    target = as_complex_matrix(target)
    alg = t.algebra(tol)
    n = t.hilbert_dim
    d = alg.dim

    if generalized:
        if p != 0:
            raise ValueError("generalized cycle fit only supports degree 0")
        comm = commutant(t.algebra(tol), tol)
        cols = np.stack([b.ravel() for b in comm.basis], axis=1)
        coeff, _, _, _ = np.linalg.lstsq(cols, target.ravel(), rcond=None)
        fit = (cols @ coeff).reshape(n, n)
        resid = rel_residual(fit - target, operator_norm(target))
        chain = HochschildChain(0, [(fit,)], True)
        return chain, resid

    # strict legs: coordinates over the algebra basis tuples
    dirac = t.dirac
    reps = []

    def rep_tuple(idx):
        acc = alg.basis[idx[0]]
        for k in idx[1:]:
            leg = alg.basis[k]
            acc = acc @ (dirac @ leg - leg @ dirac)
        return acc

    import itertools
    tuples = list(itertools.product(range(d), repeat=p + 1))
    cols = np.stack([rep_tuple(ix).ravel() for ix in tuples], axis=1)

    if p >= 1:
        # cycle constraint in coordinates via structure constants
        struct = np.zeros((d, d, d), dtype=complex)
        for i in range(d):
            for j in range(d):
                struct[i, j] = alg.coords(alg.basis[i] @ alg.basis[j])
        rows = []
        for col_idx, ix in enumerate(tuples):
            coeff_tensor = np.zeros((d,) * p, dtype=complex)
            for pos in range(p):
                merged = struct[ix[pos], ix[pos + 1]]
                for g in range(d):
                    if merged[g] == 0:
                        continue
                    out_idx = ix[:pos] + (g,) + ix[pos + 2:]
                    coeff_tensor[out_idx] += ((-1) ** pos) * merged[g]
            merged = struct[ix[p], ix[0]]
            for g in range(d):
                if merged[g] == 0:
                    continue
                out_idx = (g,) + ix[1:p]
                coeff_tensor[out_idx] += ((-1) ** p) * merged[g]
            rows.append(coeff_tensor.ravel())
        bmat = np.stack(rows, axis=1)
        kernel = null_space(bmat, tol)
        if not kernel:
            return None, rel_residual(target, operator_norm(target))
        kmat = np.stack(kernel, axis=1)
        proj_cols = cols @ kmat
        y, _, _, _ = np.linalg.lstsq(proj_cols, target.ravel(), rcond=None)
        x = kmat @ y
    else:
        x, _, _, _ = np.linalg.lstsq(cols, target.ravel(), rcond=None)

    fit = (cols @ x).reshape(n, n)
    resid = rel_residual(fit - target, operator_norm(target))
    order = np.argsort(-np.abs(x))
    keep = [k for k in order if np.abs(x[k]) > tol.rank_cut * (np.abs(x[order[0]]) + 1e-300)]
    if term_budget is not None:
        keep = keep[:term_budget]
    terms = []
    for k in keep:
        ix = tuples[k]
        term = (x[k] * alg.basis[ix[0]],) + tuple(alg.basis[j] for j in ix[1:])
        terms.append(term)
    chain = HochschildChain(p, terms, False)
    return chain, resid


def _parity(op, grading, tol):
    if grading is None:
        return None
    conj = grading @ op @ grading
    if rel_residual(conj - op, operator_norm(op)) <= tol.rel:
        return 1
    if rel_residual(conj + op, operator_norm(op)) <= tol.rel:
        return -1
    return None


def check_first_order(t: SpectralTripleData, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """Commutation of the right action with the algebra and its Dirac commutators.

    Graded commutators are used for odd right generators when a grading is
    present.
    """
    rep = CheckReport()
    if not t.right_action_gens:
        rep.skip("first_order", "no right action supplied")
        return rep
    worst_act = 0.0
    worst_ord = 0.0
    d = t.dirac
    for a in t.algebra_gens:
        da = d @ a - a @ d
        for b in t.right_action_gens:
            worst_act = max(worst_act, rel_residual(a @ b - b @ a, operator_norm(a), operator_norm(b)))
            par = _parity(b, t.grading, tol) if t.grading is not None else 1
            sgn = -1.0 if par == -1 else 1.0  # graded commutator of odd [D,a] with odd b
            comm = da @ b - sgn * b @ da
            worst_ord = max(worst_ord, rel_residual(comm, operator_norm(da), operator_norm(b)))
    rep.add("first_order:actions_commute", worst_act, tol.rel)
    rep.add("first_order:dirac_commutators", worst_ord, tol.rel)
    return rep


def check_finiteness(t: SpectralTripleData, tol: Tolerance = DEFAULT_TOL):
    """Module frame over the Dirac-commutator algebra plus the state identity.

    Returns (report, context) where the context carries the frame and the
    algebra-valued pairing for reuse by other checkers.
    """
    rep = CheckReport()
    cda = t.cda(tol)
    pair = expectation_pairing(cda)
    frame = parseval_frame(cda, tol)
    n = t.hilbert_dim

    worst = 0.0
    for g in np.eye(n, dtype=complex):
        recon = np.zeros(n, dtype=complex)
        for x in frame:
            recon = recon + pair(g, x) @ x
        worst = max(worst, float(np.linalg.norm(recon - g)))
    rep.add("finite:frame_reproduces", worst, max(tol.rel, 1e-7), f"frame size {len(frame)}")

    worst = 0.0
    basis = np.eye(n, dtype=complex)
    for i in range(n):
        for j in range(n):
            lhs = complex(np.vdot(basis[j], basis[i]))
            rhs = t.psi(pair(basis[i], basis[j]))
            worst = max(worst, abs(lhs - rhs))
    rep.add("finite:state_reproduces_scalar_product", worst, max(tol.rel, 1e-8))

    gram = np.zeros((cda.dim, cda.dim), dtype=complex)
    for i, u in enumerate(cda.basis):
        for j, w in enumerate(cda.basis):
            gram[i, j] = t.psi(adjoint(u) @ w)
    vals, _ = herm_eig((gram + adjoint(gram)) / 2.0, Tolerance(rel=1.0, rank_cut=tol.rank_cut))
    faithful = vals[0] > tol.rank_cut * max(1.0, float(vals[-1]))
    rep.add("finite:state_faithful", 0.0 if faithful else 1.0, 0.5,
            f"min Gram eigenvalue {vals[0]:.3e}")
    ctx = {"cda": cda, "pair": pair, "frame": frame}
    return rep, ctx


def check_spinc(t: SpectralTripleData, tol: Tolerance = DEFAULT_TOL):
    """Equivalence-bimodule checks between the Dirac-commutator algebra and the right action."""
    rep = CheckReport()
    if not t.right_action_gens:
        rep.skip("spinc", "no right action supplied")
        return rep, None
    cda = t.cda(tol)
    right = t.right_algebra(tol)
    bi, lam = bimodule_from_actions(cda, right, tol)
    rep.extend(morita_check(bi, tol), prefix="spinc:")
    rep.add("spinc:pairing_scale", 0.0, np.inf, f"right pairing scale {lam:.6f}")

    comm = commutant(cda, tol)
    dim_match = comm.dim == right.dim
    worst = 0.0
    for b in right.basis:
        worst = max(worst, span_residual(b, comm.basis))
    for c in comm.basis:
        worst = max(worst, span_residual(c, right.basis))
    mismatch = worst if dim_match else 1.0
    rep.add("spinc:commutant_matches_right_action", mismatch, max(tol.rel, 1e-7),
            f"commutant dim {comm.dim}, right action dim {right.dim}")
    ctx = {"bimodule": bi, "scale": lam, "cda": cda, "right": right}
    return rep, ctx


def check_riemannian(t: SpectralTripleData, tol: Tolerance = DEFAULT_TOL):
    """Cyclic/separating vector, central-metric solve, grading compatibilities, trace property."""
    rep = CheckReport()
    if t.riemann_vector is None or t.grading is None:
        rep.skip("riemann", "needs both a distinguished vector and a grading")
        return rep, None
    phi = t.riemann_vector
    eps = t.grading
    cda = t.cda(tol)
    n = t.hilbert_dim
    vecs = np.stack([w @ phi for w in cda.basis], axis=1)
    svals = np.linalg.svd(vecs, compute_uv=False)
    smax = float(svals[0]) if svals.size else 0.0
    rank = int(np.sum(svals > tol.rank_cut * max(smax, 1e-300)))
    rep.add("riemann:cyclic", 0.0 if rank == n else 1.0, 0.5,
            f"orbit rank {rank} of Hilbert dim {n}")
    rep.add("riemann:separating", 0.0 if rank == cda.dim else 1.0, 0.5,
            f"orbit rank {rank} of algebra dim {cda.dim}")

    zc = center(cda, tol)
    z = None
    if zc:
        rows = []
        rhs = []
        for w in cda.basis:
            for v in cda.basis:
                rows.append([t.psi(w @ zk @ adjoint(v)) for zk in zc])
                rhs.append(complex(np.vdot(v @ phi, w @ phi)))
        amat = np.array(rows, dtype=complex)
        bvec = np.array(rhs, dtype=complex)
        coeff, _, _, _ = np.linalg.lstsq(amat, bvec, rcond=None)
        resid = float(np.linalg.norm(amat @ coeff - bvec)) / max(1.0, float(np.linalg.norm(bvec)))
        z = sum(c * zk for c, zk in zip(coeff, zc))
        herm = rel_residual(z - adjoint(z), operator_norm(z))
        vals, _ = herm_eig((z + adjoint(z)) / 2.0, Tolerance(rel=1.0, rank_cut=tol.rank_cut))
        pos = max(0.0, -float(vals[0])) / max(1.0, float(vals[-1]))
        sv = np.linalg.svd(amat, compute_uv=False)
        ambiguous = int(np.sum(sv <= tol.rank_cut * max(float(sv[0]), 1e-300)))
        rep.add("riemann:metric_solves_state", resid, max(tol.rel, 1e-8),
                f"center dim {len(zc)}, solution kernel {ambiguous}")
        rep.add("riemann:metric_positive", herm + pos, tol.rel,
                f"min eigenvalue {vals[0]:.3e}")
    else:
        rep.add("riemann:metric_solves_state", 1.0, tol.rel, "center is empty")

    ne = operator_norm(eps)
    rep.add("riemann:grading_fixes_vector", float(np.linalg.norm(eps @ phi - phi)) /
            max(1.0, float(np.linalg.norm(phi))), tol.rel)
    rep.add("riemann:grading_anticommutes_dirac",
            rel_residual(eps @ t.dirac + t.dirac @ eps, ne, operator_norm(t.dirac)), tol.rel)
    worst = max(rel_residual(eps @ a - a @ eps, ne, operator_norm(a)) for a in t.algebra_gens)
    rep.add("riemann:grading_commutes_algebra", worst, tol.rel)
    try:
        graded_split(cda, eps, tol)
        rep.add("riemann:grading_splits_cda", 0.0, tol.rel)
    except ValueError as exc:
        rep.add("riemann:grading_splits_cda", 1.0, tol.rel, str(exc))

    worst = 0.0
    for u in cda.basis:
        for w in cda.basis:
            lhs = complex(np.vdot(phi, u @ w @ phi))
            rhs = complex(np.vdot(phi, w @ u @ phi))
            worst = max(worst, abs(lhs - rhs) / max(1.0, float(np.vdot(phi, phi).real)))
    rep.add("riemann:vector_state_tracial", worst, max(tol.rel, 1e-9))
    ctx = {"cda": cda, "metric": z}
    return rep, ctx


def connectivity_projectors(t: SpectralTripleData, tol: Tolerance = DEFAULT_TOL):
    """Orthogonal projectors spanning the kernel of a -> [D, a] inside the algebra."""
    alg = t.algebra(tol)
    d = t.dirac
    cols = np.stack([(d @ b - b @ d).ravel() for b in alg.basis], axis=1)
    kern = null_space(cols, tol)
    if not kern:
        return None, "kernel of the Dirac commutator inside the algebra is empty"
    mats = []
    for c in kern:
        m = np.zeros((t.hilbert_dim, t.hilbert_dim), dtype=complex)
        for i, b in enumerate(alg.basis):
            m = m + c[i] * b
        mats.append(m)
    # the kernel is a unital *-subalgebra; commutativity makes it a sum of projectors
    for x in mats:
        for y in mats:
            if rel_residual(x @ y - y @ x, operator_norm(x), operator_norm(y)) > max(tol.rel, 1e-8):
                return None, "kernel algebra is noncommutative"
    rng = np.random.default_rng(20230517)
    h = np.zeros((t.hilbert_dim, t.hilbert_dim), dtype=complex)
    for m in mats:
        h = h + rng.standard_normal() * (m + adjoint(m)) / 2.0
    vals, vecs = herm_eig(h, tol)
    projs = []
    i = 0
    scale = max(1.0, float(np.max(np.abs(vals))))
    while i < len(vals):
        j = i
        while j + 1 < len(vals) and abs(vals[j + 1] - vals[i]) <= 1e-8 * scale:
            j += 1
        block = vecs[:, i:j + 1]
        projs.append(block @ adjoint(block))
        i = j + 1
    return projs, ""


def check_extras(t: SpectralTripleData, tol: Tolerance = DEFAULT_TOL,
                 conjugation=None) -> CheckReport:
    """Closedness, connectivity and reality side conditions."""
    rep = CheckReport()
    p = t.declared_p

    if t.grading is None or p < 1:
        rep.skip("extras:closedness", "needs a grading and declared dimension >= 1")
    else:
        reg = herm_abs(np.eye(t.hilbert_dim) + t.dirac @ t.dirac, tol)
        vals, vecs = herm_eig(reg, tol)
        weight = vecs @ np.diag(vals ** (-p / 2.0)) @ adjoint(vecs)
        side = t.right_action_gens or [b for b in commutant(t.algebra(tol), tol).basis]
        worst = 0.0
        import itertools
        for legs in itertools.islice(itertools.product(t.algebra_gens, repeat=p), 16):
            word = np.eye(t.hilbert_dim, dtype=complex)
            for a in legs:
                word = word @ (t.dirac @ a - a @ t.dirac)
            for b in side[:4]:
                val = abs(np.trace(t.grading @ word @ b @ weight))
                worst = max(worst, val / max(1.0, operator_norm(word) * operator_norm(b)))
        rep.add("extras:closedness", worst, max(tol.rel, 1e-8))

    projs, why = connectivity_projectors(t, tol)
    if projs is None:
        rep.add("extras:connectivity", 1.0, 0.5, why)
    else:
        worst = rel_residual(sum(projs) - np.eye(t.hilbert_dim), 1.0)
        for i, pi in enumerate(projs):
            worst = max(worst, rel_residual(pi @ pi - pi, 1.0))
            for j, pj in enumerate(projs):
                if i != j:
                    worst = max(worst, rel_residual(pi @ pj, 1.0))
        rep.add("extras:connectivity", worst, max(tol.rel, 1e-7), f"{len(projs)} projectors")

    if conjugation is None:
        rep.skip("extras:reality", "no conjugation supplied")
    else:
        k = conjugation.kernel if hasattr(conjugation, "kernel") else as_complex_matrix(conjugation)
        worst = 0.0
        if t.right_action_gens and len(t.right_action_gens) == len(t.algebra_gens):
            for a, b in zip(t.algebra_gens, t.right_action_gens):
                # J a* J^{-1} on kernels: J v = K conj(v), so J a* J^{-1} = K conj(a*) K^{-1}
                op = k @ np.conj(adjoint(a)) @ np.linalg.inv(k)
                worst = max(worst, rel_residual(op - b, operator_norm(a)))
            rep.add("extras:reality_exchanges_actions", worst, max(tol.rel, 1e-8))
        else:
            rep.skip("extras:reality_exchanges_actions", "right action not paired with generators")
        k_inv = np.linalg.inv(k)
        jj = k @ np.conj(k)
        s2 = 1 if operator_norm(jj - np.eye(t.hilbert_dim)) <= operator_norm(jj + np.eye(t.hilbert_dim)) else -1
        jd = k @ np.conj(t.dirac) @ k_inv
        sd = 1 if operator_norm(jd - t.dirac) <= operator_norm(jd + t.dirac) else -1
        detail = f"J^2 sign {s2:+d}, JD vs DJ sign {sd:+d}"
        if t.grading is not None:
            jg = k @ np.conj(t.grading) @ k_inv
            sg = 1 if operator_norm(jg - t.grading) <= operator_norm(jg + t.grading) else -1
            detail += f", JGamma vs GammaJ sign {sg:+d}"
        res = min(rel_residual(jj - np.eye(t.hilbert_dim), 1.0), rel_residual(jj + np.eye(t.hilbert_dim), 1.0))
        rep.add("extras:reality_signs", res, max(tol.rel, 1e-8), detail)
    return rep


def zeta_diagnostic(t: SpectralTripleData, s_values) -> list:
    vals, _ = herm_eig(t.dirac)
    out = []
    for s in s_values:
        out.append((float(s), float(np.sum((1.0 + vals ** 2) ** (-float(s) / 2.0)))))
    return out


def run_condition_suite(t: SpectralTripleData, tol: Tolerance = DEFAULT_TOL,
                        strict_orientation: bool = True) -> CheckReport:
    rep = CheckReport()
    rep.extend(validate_triple(t, tol))
    rep.extend(check_orientability(t, tol, strict=strict_orientation))
    rep.extend(check_first_order(t, tol))
    fin, _ = check_finiteness(t, tol)
    rep.extend(fin)
    sp, _ = check_spinc(t, tol)
    rep.extend(sp)
    ri, _ = check_riemannian(t, tol)
    rep.extend(ri)
    rep.extend(check_extras(t, tol))
    return rep
