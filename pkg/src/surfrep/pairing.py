"""Symplectic pairing on the parabolic tangent space.

Two tangent cocycles u, v are paired by cupping them into a real-valued
2-cochain on the mapping cone of the peripheral inclusions and evaluating
against the relative fundamental class.  Concretely a cone 2-cochain is a
pair (w, q): w a 2-cochain on the surface group, q_j a 1-cochain on the
j-th peripheral subgroup.  The cup product used here is

    w(g1, g2) = B(u(g1), Ad(rho(g1)) v(g2)),     q_j(gamma) = -B(s_j, v(gamma)),

where s_j solves (Ad(rho(c_j)) - 1) s_j = u(c_j); a solution exists
exactly when u is parabolic, and the value is independent of the choice
because v(c_j) lies in range(Ad - 1) which is orthogonal to the ambiguity.

Evaluation against the fundamental class is a staircase sum over the
defining relation x_1 ... x_L (prefix products p_k = x_1 ... x_k):

    Phi(w, q) = ( sum_k w(p_{k-1}, x_k)
                  - sum_i [ w(a_i, a_i^-1) + w(b_i, b_i^-1) ]
                  - 2g w(1, 1)
                  + sum_j q_j(c_j) ) / r.

The handle and identity corrections make Phi vanish on every cone
coboundary (telescoping, no normalization assumption on the cochain), and
the 1/r factor normalizes Phi to send the class dual to the boundary
circles, the tuple (0, q) with q_j(c_j) = 1, to 1.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .cohomology import (
    PARABOLIC_TOL,
    AnalysisReport,
    Subspace,
    peripheral_fixed_space,
    peripheral_value,
    require_smooth_irreducible,
    unflatten_cochain,
)
from .errors import NotParabolicError
from .presentation import Representation, Word, evaluate_word, extend_cocycle, standard_presentation
from .unitary import adjoint_matrix, flatten_algebra, invariant_form, unflatten_algebra


@lru_cache(maxsize=None)
def staircase_terms(genus: int, punctures: int):
    """Signed word pairs of the fundamental cycle (peripheral terms apart).

    Returns a tuple of (sign, left_word, right_word).  Words are over the
    full generator alphabet; the degenerate identity term carries weight
    -2g so that evaluation stays exact on arbitrary (non-normalized)
    cochains.
    """
    pres = standard_presentation(genus, punctures)
    rel = pres.relation
    terms = []
    for k in range(len(rel)):
        terms.append((1.0, rel[:k], (rel[k],)))
    for i in range(genus):
        for idx in (pres.a(i), pres.b(i)):
            terms.append((-1.0, ((idx, 1),), ((idx, -1),)))
    if genus > 0:
        terms.append((-2.0 * genus, (), ()))
    return tuple(terms)


def evaluate_cycle(genus: int, punctures: int, w, q) -> float:
    """Pair an explicit cone 2-cochain with the fundamental class.

    `w` is a callable on pairs of words, `q` a sequence of callables on
    words, all real-valued.  Used directly by the coboundary tests; the
    cocycle pairing below inlines the same sum.
    """
    pres = standard_presentation(genus, punctures)
    total = sum(sign * w(w1, w2) for sign, w1, w2 in staircase_terms(genus, punctures))
    total += sum(q[j](pres.peripheral_word(j)) for j in range(punctures))
    return total / punctures


def lift_to_cone(rho: Representation, values: np.ndarray,
                 tol: float = PARABOLIC_TOL) -> np.ndarray:
    """Peripheral lifts s_j with (Ad(rho(c_j)) - 1) s_j = u(c_j).

    Raises NotParabolicError when some u(c_j) has a component in the fixed
    space of Ad(rho(c_j)), i.e. when the cocycle is not tangent to the
    class-constrained variety.  The minimum-norm solution is returned; any
    other lift gives the same pairing against parabolic cocycles.
    """
    n = rho.rank
    lifts = np.empty((rho.surface.punctures, n, n), dtype=complex)
    for j in range(rho.surface.punctures):
        val = peripheral_value(rho, values, j)
        vec = flatten_algebra(val)
        fixed = peripheral_fixed_space(rho, j)
        stuck = np.linalg.norm(fixed.T @ vec) if fixed.size else 0.0
        if stuck > tol * max(1.0, np.linalg.norm(vec)):
            raise NotParabolicError(
                f"cocycle is not parabolic at puncture {j}: "
                f"fixed-space component {stuck:.3e}"
            )
        a = rho.peripheral_adjoint(j) - np.eye(n * n)
        sol, _ = linalg.min_norm_solve(a, vec)
        lifts[j] = unflatten_algebra(sol, n)
    return lifts


def cup_evaluate(rho: Representation, u: np.ndarray, v: np.ndarray,
                 w1: Word, w2: Word) -> float:
    """The surface-group part of the cup product at one word pair."""
    g1 = evaluate_word(rho, w1)
    return invariant_form(
        extend_cocycle(rho, u, w1),
        g1 @ extend_cocycle(rho, v, w2) @ g1.conj().T,
    )


def pair_with_lifts(rho: Representation, u: np.ndarray, lifts: np.ndarray,
                    v: np.ndarray) -> float:
    """Evaluate the pairing of u (with chosen lifts) against v."""
    pres = rho.presentation
    total = 0.0
    for sign, w1, w2 in staircase_terms(pres.genus, pres.punctures):
        total += sign * cup_evaluate(rho, u, v, w1, w2)
    for j in range(pres.punctures):
        total -= invariant_form(lifts[j], peripheral_value(rho, v, j))
    return total / pres.punctures


def symplectic_form(rho: Representation, u: np.ndarray, v: np.ndarray,
                    report: AnalysisReport | None = None) -> float:
    """Value of the symplectic form on two parabolic tangent cocycles.

    Refuses to evaluate at reducible or non-smooth points, where the
    pairing on the tangent space is not the moduli-space form.
    """
    require_smooth_irreducible(rho, report)
    return pair_with_lifts(rho, u, lift_to_cone(rho, u), v)


@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray
    rank: int
    smallest_singular_value: float | None
    gap: tuple

    @property
    def basis_dim(self) -> int:
        return self.entries.shape[0]

    def to_dict(self) -> dict:
        return {
            "basis_dim": self.basis_dim,
            "entries": [[float(x) for x in row] for row in self.entries],
            "rank": self.rank,
            "smallest_singular_value": self.smallest_singular_value,
            "normalization": "lemma4.1",
        }


def gram_matrix(rho: Representation, basis: Subspace | np.ndarray | None = None,
                report: AnalysisReport | None = None, threads: int = 1) -> GramMatrix:
    """Gram matrix of the symplectic form on a tangent basis.

    With `basis` omitted the orthonormal parabolic tangent basis is used.
    All word evaluations are hoisted out of the pair loop: for each basis
    vector the cocycle is evaluated once per staircase word, then the
    d x d table is two contractions.
    """
    from .cohomology import parabolic_tangent_basis

    report = require_smooth_irreducible(rho, report)
    if basis is None:
        basis = parabolic_tangent_basis(rho)
    cols = basis.basis if isinstance(basis, Subspace) else np.asarray(basis, dtype=float)
    d = cols.shape[1]
    if d == 0:
        return GramMatrix(np.zeros((0, 0)), 0, None, (float("inf"), 0.0))

    pres = rho.presentation
    cocycles = [unflatten_cochain(rho, cols[:, k]) for k in range(d)]
    terms = staircase_terms(pres.genus, pres.punctures)
    n2 = rho.rank ** 2
    r = pres.punctures

    # left values, sign-weighted, and Ad-transported right values
    ls = np.empty((len(terms), d, n2))
    rs = np.empty((len(terms), d, n2))
    for t, (sign, w1, w2) in enumerate(terms):
        ad1 = adjoint_matrix(evaluate_word(rho, w1))
        for k, uk in enumerate(cocycles):
            ls[t, k] = sign * flatten_algebra(extend_cocycle(rho, uk, w1))
            rs[t, k] = ad1 @ flatten_algebra(extend_cocycle(rho, uk, w2))

    # peripheral lifts of each basis vector and peripheral values
    s_flat = np.empty((r, d, n2))
    p_flat = np.empty((r, d, n2))
    for k, uk in enumerate(cocycles):
        lifts = lift_to_cone(rho, uk)
        for j in range(r):
            s_flat[j, k] = flatten_algebra(lifts[j])
            p_flat[j, k] = flatten_algebra(peripheral_value(rho, uk, j))

    if threads > 1 and d >= 2 * threads:
        blocks = np.array_split(np.arange(d), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(
                lambda idx: np.einsum("tik,tjk->ij", ls[:, idx], rs)
                - np.einsum("rik,rjk->ij", s_flat[:, idx], p_flat),
                blocks,
            ))
        entries = np.vstack(parts) / r
    else:
        entries = (np.einsum("tik,tjk->ij", ls, rs)
                   - np.einsum("rik,rjk->ij", s_flat, p_flat)) / r

    info = linalg.checked_rank(entries)
    svals = np.linalg.svd(entries, compute_uv=False)
    return GramMatrix(entries, info.rank, float(svals[-1]), info.gap)
