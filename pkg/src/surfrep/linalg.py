"""Rank decisions and subspace extraction with explicit spectral gaps.

Every dimension reported by the package comes through here, so that a
rank is never an implicit side effect of a solver: the singular value
threshold is relative (1e-9 of the largest singular value) with an
absolute floor, and each decision records the gap between the smallest
kept and the largest dropped singular value.  A second, independent
method (column-pivoted QR) cross-checks every SVD rank; disagreement
raises instead of guessing.

The absolute floor matters: the decided matrices are built from
unitaries and orthonormal cocycle bases, so their meaningful singular
values are order one, but a matrix that vanishes in exact arithmetic
(Ad(1) - 1, a peripheral restriction at an abelian point) comes back as
pure roundoff, and a threshold relative to its own largest singular
value would keep all of it.  Anything below the floor is noise here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalRankError

RANK_RTOL = 1e-9
RANK_ATOL = 1e-12


@dataclass(frozen=True)
class RankInfo:
    rank: int
    smallest_kept: float
    largest_dropped: float

    @property
    def gap(self):
        return (self.smallest_kept, self.largest_dropped)


def _svd_rank_from_singular_values(s: np.ndarray, rtol: float,
                                    atol: float = RANK_ATOL) -> RankInfo:
    if s.size == 0 or s[0] <= atol:
        return RankInfo(0, float("inf"), float(s[0]) if s.size else 0.0)
    keep = s > max(rtol * s[0], atol)
    rank = int(np.count_nonzero(keep))
    smallest_kept = float(s[rank - 1]) if rank > 0 else float("inf")
    largest_dropped = float(s[rank]) if rank < s.size else 0.0
    return RankInfo(rank, smallest_kept, largest_dropped)


def rank_svd(m: np.ndarray, rtol: float = RANK_RTOL) -> RankInfo:
    if m.size == 0:
        return RankInfo(0, float("inf"), 0.0)
    s = np.linalg.svd(m, compute_uv=False)
    return _svd_rank_from_singular_values(s, rtol)


def rank_pivoted_qr(m: np.ndarray, rtol: float = RANK_RTOL) -> int:
    if m.size == 0:
        return 0
    r = scipy.linalg.qr(m, mode="r", pivoting=True)[0]
    d = np.abs(np.diagonal(r))
    if d.size == 0 or d[0] <= RANK_ATOL:
        return 0
    return int(np.count_nonzero(d > max(rtol * d[0], RANK_ATOL)))


def checked_rank(m: np.ndarray, rtol: float = RANK_RTOL) -> RankInfo:
    """Rank by SVD, cross-checked against column-pivoted QR."""
    info = rank_svd(m, rtol)
    qr_rank = rank_pivoted_qr(m, rtol)
    if qr_rank != info.rank:
        raise NumericalRankError(
            f"rank methods disagree: svd={info.rank} qr={qr_rank}, "
            f"gap=({info.smallest_kept:.3e}, {info.largest_dropped:.3e})"
        )
    return info


def nullspace(m: np.ndarray, rtol: float = RANK_RTOL):
    """Orthonormal basis (columns) of the kernel of m, with rank info."""
    rows, cols = m.shape
    if cols == 0:
        return np.zeros((0, 0)), RankInfo(0, float("inf"), 0.0)
    if rows == 0:
        return np.eye(cols), RankInfo(0, float("inf"), 0.0)
    _, s, vt = np.linalg.svd(m, full_matrices=True)
    info = _svd_rank_from_singular_values(s, rtol)
    return vt[info.rank:].T.conj() if np.iscomplexobj(m) else vt[info.rank:].T, info


def range_complement(m: np.ndarray, rtol: float = RANK_RTOL):
    """Orthonormal basis (columns) of the orthogonal complement of range(m)."""
    rows, cols = m.shape
    if rows == 0:
        return np.zeros((0, 0)), RankInfo(0, float("inf"), 0.0)
    if cols == 0:
        return np.eye(rows), RankInfo(0, float("inf"), 0.0)
    u, s, _ = np.linalg.svd(m, full_matrices=True)
    info = _svd_rank_from_singular_values(s, rtol)
    return u[:, info.rank:], info


def min_norm_solve(a: np.ndarray, b: np.ndarray, rcond: float = 1e-12,
                   atol: float = RANK_ATOL):
    """Minimum-norm least-squares solution of a x = b and the residual norm.

    Singular values below max(rcond * s_max, atol) are treated as zero;
    without the absolute floor a matrix that is zero up to roundoff would
    be "solved" along its noise directions with order-one garbage.
    """
    if a.shape[1] == 0:
        return np.zeros(0), float(np.linalg.norm(b))
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] <= atol:
        x = np.zeros(a.shape[1])
    else:
        keep = s > max(rcond * s[0], atol)
        x = vt[keep].T @ ((u[:, keep].T @ b) / s[keep])
    res = float(np.linalg.norm(a @ x - b))
    return x, res
