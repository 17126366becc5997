"""Finite-dimensional *-algebras of operators: generation, commutants, centers, gradings.

An algebra is stored as an orthonormal linear basis (trace inner product)
of operators on a fixed Hilbert space C^n.  Membership tests are
projection-residual tests against that basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    adjoint,
    as_complex_matrix,
    null_space,
    operator_norm,
    project_onto_span,
    rel_residual,
    span_basis,
    span_coords,
    span_residual,
)

__all__ = [
    "AlgebraBasis",
    "generate_algebra",
    "commutant",
    "center",
    "graded_split",
]


@dataclass
class AlgebraBasis:
    hilbert_dim: int
    basis: list = field(default_factory=list)
    generators: list = field(default_factory=list)
    unital: bool = True
    parity: list | None = None  # +1/-1 per basis element when homogeneously graded

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, x) -> np.ndarray:
        return span_coords(x, self.basis)

    def project(self, x) -> np.ndarray:
        return project_onto_span(x, self.basis)

    def membership_residual(self, x) -> float:
        return span_residual(x, self.basis)

    def expectation(self, x) -> np.ndarray:
        """Trace-orthogonal projection onto the algebra.

        For a unital *-subalgebra this is the trace-preserving conditional
        expectation.
        """
        return self.project(x)

    def generator_matrices(self):
        if self.generators:
            return [self.basis[i] for i in self.generators]
        return list(self.basis)

    def identity(self) -> np.ndarray:
        return np.eye(self.hilbert_dim, dtype=complex)


def _closure_round(basis, tol):
    new = list(basis)
    for b in basis:
        new.append(adjoint(b))
    for b1 in basis:
        for b2 in basis:
            new.append(b1 @ b2)
    return span_basis(new, tol)


def generate_algebra(generators, with_unit: bool = True, tol: Tolerance = DEFAULT_TOL) -> AlgebraBasis:
    """Smallest *-closed (optionally unital) algebra containing the generators.

    Iterates product/adjoint closure until the span dimension stabilizes;
    the dimension is bounded by hilbert_dim^2, so the loop terminates.
    """
    gens = [as_complex_matrix(g) for g in generators]
    if gens:
        n = gens[0].shape[0]
        for g in gens:
            if g.shape != (n, n):
                raise ValueError("generators must be square matrices of equal dimension")
    elif with_unit:
        raise ValueError("cannot infer dimension from empty generator list; pass the identity")
    else:
        raise ValueError("no generators given")

    seeds = list(gens)
    if with_unit:
        seeds.append(np.eye(n, dtype=complex))
    basis = span_basis(seeds, tol)
    max_rounds = n * n + 2
    for _ in range(max_rounds):
        nxt = _closure_round(basis, tol)
        if len(nxt) == len(basis):
            basis = nxt
            break
        basis = nxt
    else:
        raise RuntimeError("algebra closure did not stabilize (numerical drift?)")

    gen_idx = []
    for g in gens:
        coords = span_coords(g, basis)
        # remember which basis vector tracks each generator only loosely; store index list
        gen_idx.append(int(np.argmax(np.abs(coords))))
    alg = AlgebraBasis(hilbert_dim=n, basis=basis, generators=[], unital=with_unit)
    alg._generator_mats = gens  # raw generators, kept for commutant shortcuts
    return alg


def _raw_generators(alg: AlgebraBasis):
    mats = getattr(alg, "_generator_mats", None)
    if mats:
        return mats
    return alg.basis


def _commutant_from(mats, n, tol):
    eye = np.eye(n, dtype=complex)
    maps = []
    for g in mats:
        maps.append(np.kron(g, eye) - np.kron(eye, g.T))
        ga = adjoint(g)
        maps.append(np.kron(ga, eye) - np.kron(eye, ga.T))
    stacked = np.vstack(maps) if maps else np.zeros((0, n * n), dtype=complex)
    scale = max([1.0] + [operator_norm(g) for g in mats])
    kernel = null_space(stacked, tol, scale=scale)
    return [v.reshape(n, n) for v in kernel]


def commutant(alg: AlgebraBasis, tol: Tolerance = DEFAULT_TOL) -> AlgebraBasis:
    """All operators commuting with the algebra, as the null space of the stacked commutator map.

    For long generator lists a few generic combinations are probed first;
    the probe kernel always contains the commutant, so it is kept only
    after every basis element verifiably commutes with all generators.
    """
    n = alg.hilbert_dim
    gens = _raw_generators(alg)
    basis = None
    if len(gens) > 4:
        rng = np.random.default_rng(1285)
        probes = []
        for _ in range(3):
            h = sum((rng.standard_normal() + 1j * rng.standard_normal()) * g for g in gens)
            probes.append(h)
        candidate = _commutant_from(probes, n, tol)
        worst = 0.0
        for x in candidate:
            for g in gens:
                worst = max(worst, rel_residual(g @ x - x @ g, operator_norm(g), operator_norm(x)))
        if worst <= max(tol.rel, 1e-8):
            basis = candidate
    if basis is None:
        basis = _commutant_from(gens, n, tol)
    out = AlgebraBasis(hilbert_dim=n, basis=basis, generators=[], unital=True)
    out._generator_mats = basis
    return out


def center(alg: AlgebraBasis, tol: Tolerance = DEFAULT_TOL):
    """Basis of the center: elements of the algebra commuting with all of it."""
    n = alg.hilbert_dim
    d = alg.dim
    if d == 0:
        return []
    gens = _raw_generators(alg)
    rows = []
    for g in gens:
        block = np.zeros((n * n, d), dtype=complex)
        for i, b in enumerate(alg.basis):
            block[:, i] = (g @ b - b @ g).ravel()
        rows.append(block)
    stacked = np.vstack(rows)
    kernel = null_space(stacked, tol)
    out = []
    for c in kernel:
        m = np.zeros((n, n), dtype=complex)
        for i, b in enumerate(alg.basis):
            m = m + c[i] * b
        out.append(m)
    return out


def graded_split(alg: AlgebraBasis, grading, tol: Tolerance = DEFAULT_TOL):
    """Split an algebra into even/odd parts under x -> g x g for an involution g.

    Returns (even basis, odd basis).  Raises if g is not a Hermitian
    involution or conjugation does not preserve the algebra.
    """
    g = as_complex_matrix(grading)
    n = alg.hilbert_dim
    if g.shape != (n, n):
        raise ValueError("grading dimension mismatch")
    if operator_norm(g - adjoint(g)) > tol.rel * max(1.0, operator_norm(g)):
        raise ValueError("grading must be Hermitian")
    if rel_residual(g @ g - np.eye(n), 1.0) > tol.rel:
        raise ValueError("grading must square to the identity")
    even_parts, odd_parts = [], []
    for b in alg.basis:
        conj = g @ b @ g
        if alg.membership_residual(conj) > max(tol.rel, 1e3 * tol.rank_cut):
            raise ValueError("conjugation by the grading does not preserve the algebra")
        even_parts.append((b + conj) / 2.0)
        odd_parts.append((b - conj) / 2.0)
    even = span_basis(even_parts, tol, scale=1.0)
    odd = span_basis(odd_parts, tol, scale=1.0)
    if len(even) + len(odd) != alg.dim:
        raise ValueError("graded split does not reassemble the algebra")
    return even, odd
