"""Numerics for the unitary group U(N), its Lie algebra and conjugacy classes.

The Lie algebra u(N) is the real vector space of skew-Hermitian complex
N x N matrices.  Everything downstream uses the invariant inner product

    B(x, y) = -tr(x y),

which is real, symmetric and positive definite on u(N).  The flattening
helpers below identify u(N) with R^(N^2) isometrically via a fixed
orthonormal basis, so that cochain spaces become plain real coordinate
spaces and conjugation becomes an orthogonal matrix.

Matrix-valued results that are skew-Hermitian or unitary by contract are
re-projected onto the constraint set where drift could otherwise
accumulate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import NearSingularError

TWO_PI = 2.0 * math.pi

# Eigenvalue products closer to 1 than this count as degenerate.
ANGLE_TOL = 1e-9

_CAYLEY_COND_LIMIT = 1e12


def wrap_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    w = -((-theta + math.pi) % TWO_PI - math.pi)
    return w


def circle_distance(theta: float, phi: float = 0.0) -> float:
    """Distance between two angles on the unit circle."""
    return abs(wrap_angle(theta - phi))


def skew_project(x: np.ndarray) -> np.ndarray:
    """Orthogonal projection of a complex matrix onto u(N)."""
    return 0.5 * (x - x.conj().T)


def is_skew_hermitian(x: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.linalg.norm(x + x.conj().T) <= tol * max(1.0, np.linalg.norm(x)))


def unitarize(u: np.ndarray) -> np.ndarray:
    """Nearest unitary matrix (polar projection via SVD)."""
    w, _, vh = np.linalg.svd(u)
    return w @ vh


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    n = u.shape[0]
    return bool(np.linalg.norm(u.conj().T @ u - np.eye(n)) <= tol)


def bracket(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Commutator [x, y] = xy - yx."""
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {y.shape}")
    return x @ y - y @ x


def invariant_form(x: np.ndarray, y: np.ndarray) -> float:
    """B(x, y) = -tr(xy).  Real for skew-Hermitian arguments.

    For generic complex arguments the real part is returned, which equals
    B on the skew-Hermitian components.
    """
    return float(np.real(-np.trace(x @ y)))


def algebra_norm(x: np.ndarray) -> float:
    """Norm induced by the invariant form; equals the Frobenius norm on u(N)."""
    return float(np.linalg.norm(x))


def adjoint(g: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Adjoint action Ad(g) x = g x g^-1 on u(N), re-projected to skew."""
    return skew_project(g @ x @ g.conj().T)


def mat_exp(x: np.ndarray) -> np.ndarray:
    """Exponential of a skew-Hermitian matrix via the spectral theorem.

    Writes x = i H with H Hermitian, diagonalizes H and exponentiates the
    spectrum.  The result is unitary to rounding.
    """
    h = -1j * x
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return (v * np.exp(1j * w)) @ v.conj().T


def cayley(x: np.ndarray) -> np.ndarray:
    """Cayley transform of a skew-Hermitian matrix, a unitary near I.

    Computes (I + x)(I - x)^-1, which is the classical operator Cayley
    transform (iI - A)(iI + A)^-1 written in terms of the Hermitian
    counterpart A = -i x.  Satisfies cayley(0) = I and
    d/de cayley(e x)|_0 = 2x, so it retracts tangent directions onto the
    group at second order.

    Raises NearSingularError when I - x is ill conditioned, which cannot
    happen for genuinely skew-Hermitian input (the spectrum of x is
    imaginary, so I - x has singular values >= 1) but guards against
    contract violations.
    """
    n = x.shape[0]
    eye = np.eye(n)
    m = eye - x
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > _CAYLEY_COND_LIMIT:
        raise NearSingularError(f"Cayley denominator condition {cond:.3e}")
    return np.linalg.solve(m.conj().T, (eye + x).conj().T).conj().T


def _nested(*mats: np.ndarray) -> np.ndarray:
    """Right-nested commutator: _nested(a, b, c) = [a, [b, c]]."""
    acc = mats[-1]
    for m in reversed(mats[:-1]):
        acc = bracket(m, acc)
    return acc


def bch(x: np.ndarray, y: np.ndarray, order: int) -> np.ndarray:
    """Truncated Baker-Campbell-Hausdorff series log(exp(x) exp(y)).

    Hardcoded nested-commutator coefficients through order 6.  The
    truncation satisfies
        || exp(bch(sx, sy, k)) - exp(sx) exp(sy) || = O(s^(k+1)),
    which is what the scaling tests assert.
    """
    if not 1 <= order <= 6:
        raise ValueError(f"unsupported BCH truncation order {order}")
    acc = x + y
    if order >= 2:
        acc = acc + 0.5 * bracket(x, y)
    if order >= 3:
        acc = acc + (_nested(x, x, y) + _nested(y, y, x)) / 12.0
    if order >= 4:
        acc = acc - _nested(y, x, x, y) / 24.0
    if order >= 5:
        acc = acc - (_nested(y, y, y, y, x) + _nested(x, x, x, x, y)) / 720.0
        acc = acc + (_nested(x, y, y, y, x) + _nested(y, x, x, x, y)) / 360.0
        acc = acc + (_nested(y, x, y, x, y) + _nested(x, y, x, y, x)) / 120.0
    if order >= 6:
        acc = acc - _nested(y, x, x, x, y, x) / 1440.0
        acc = acc + _nested(y, y, x, x, y, x) / 720.0
        acc = acc - _nested(y, x, y, x, y, x) / 240.0
        acc = acc + _nested(y, y, y, x, y, x) / 1440.0
        acc = acc - _nested(y, x, y, y, y, x) / 720.0
    return acc


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed element of U(n) (QR of a complex Gaussian, phases fixed)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r).copy()
    d[np.abs(d) < 1e-300] = 1.0
    return q * (d / np.abs(d))


# ---------------------------------------------------------------------------
# orthonormal basis of u(N) and coordinates


@lru_cache(maxsize=16)
def algebra_basis(n: int) -> np.ndarray:
    """Orthonormal basis of u(n) for B, shape (n^2, n, n).

    Ordering: the n diagonal elements i e_kk first, then for each pair
    k < l the real rotation (e_kl - e_lk)/sqrt(2) and the imaginary
    symmetric element i (e_kl + e_lk)/sqrt(2).
    """
    mats = []
    for k in range(n):
        m = np.zeros((n, n), dtype=complex)
        m[k, k] = 1j
        mats.append(m)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    for k in range(n):
        for l in range(k + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[k, l] = inv_sqrt2
            m[l, k] = -inv_sqrt2
            mats.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[k, l] = 1j * inv_sqrt2
            m[l, k] = 1j * inv_sqrt2
            mats.append(m)
    out = np.array(mats)
    out.setflags(write=False)
    return out


def flatten_algebra(x: np.ndarray) -> np.ndarray:
    """Coordinates of the skew-Hermitian part of x in the orthonormal basis."""
    basis = algebra_basis(x.shape[0])
    # B(e_a, x) = -tr(e_a x); the Hermitian part of x drops out.
    return -np.real(np.einsum("aij,ji->a", basis, x))


def unflatten_algebra(v: np.ndarray, n: int) -> np.ndarray:
    basis = algebra_basis(n)
    return np.einsum("a,aij->ij", np.asarray(v, dtype=float), basis)


def adjoint_matrix(g: np.ndarray) -> np.ndarray:
    """Matrix of Ad(g) on u(N) in the orthonormal basis; orthogonal, real."""
    basis = algebra_basis(g.shape[0])
    moved = np.einsum("ij,bjk,kl->bil", g, basis, g.conj().T)
    return -np.real(np.einsum("aij,bji->ab", basis, moved))


@lru_cache(maxsize=16)
def center_direction(n: int) -> np.ndarray:
    """Unit coordinate vector of the central direction i I / sqrt(n)."""
    v = flatten_algebra(1j * np.eye(n) / math.sqrt(n))
    v.setflags(write=False)
    return v


@lru_cache(maxsize=16)
def traceless_coordinates(n: int) -> np.ndarray:
    """Orthonormal basis (columns) of the traceless subalgebra su(n) in coordinates."""
    c0 = center_direction(n)
    # nullspace of the 1 x n^2 row c0^T
    _, _, vt = np.linalg.svd(c0[None, :], full_matrices=True)
    out = vt[1:].T.copy()
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# conjugacy classes of U(N)


def _cluster_angles(angles, tol=ANGLE_TOL):
    """Multiplicities of a multiset of angles on the circle."""
    pts = sorted(a % TWO_PI for a in angles)
    if not pts:
        return []
    groups = [[pts[0]]]
    for a in pts[1:]:
        if a - groups[-1][-1] <= tol:
            groups[-1].append(a)
        else:
            groups.append([a])
    if len(groups) > 1 and (pts[0] + TWO_PI) - groups[-1][-1] <= tol:
        groups[0].extend(groups.pop())
    return [len(g) for g in groups]


def property_p_check(angles, tol: float = ANGLE_TOL) -> bool:
    """Check that no proper nonempty subset of eigenvalues multiplies to 1.

    `angles` are the eigenvalue arguments of a unitary conjugacy class.
    The full set is excluded (its product is the determinant, which is
    fixed by the class and carries no information here).  Classes
    containing the angle 0 always fail on the corresponding singleton.
    """
    angles = tuple(angles)
    n = len(angles)
    if n == 0:
        raise ValueError("empty angle list")
    for k in range(1, n):
        for subset in combinations(range(n), k):
            total = sum(angles[i] for i in subset)
            if circle_distance(total) <= tol:
                return False
    return True


@dataclass(frozen=True)
class ConjugacyClass:
    """A conjugacy class of U(N), recorded by its eigenvalue angles.

    Angles are normalized to [0, 2 pi) on construction.  The order is
    kept as given; the class itself only depends on the multiset.
    """

    angles: tuple

    def __post_init__(self):
        norm = tuple(float(a) % TWO_PI for a in self.angles)
        if not norm:
            raise ValueError("a conjugacy class needs at least one angle")
        object.__setattr__(self, "angles", norm)

    @property
    def size(self) -> int:
        return len(self.angles)

    def representative(self) -> np.ndarray:
        """Diagonal unitary with the recorded eigenvalues."""
        return np.diag(np.exp(1j * np.array(self.angles)))

    def multiplicities(self, tol: float = ANGLE_TOL):
        return _cluster_angles(self.angles, tol)

    def dimension(self, tol: float = ANGLE_TOL) -> int:
        """Real dimension of the class, N^2 - sum of squared multiplicities."""
        n = self.size
        return n * n - sum(m * m for m in self.multiplicities(tol))

    def property_p(self, tol: float = ANGLE_TOL) -> bool:
        return property_p_check(self.angles, tol)


def match_class(u: np.ndarray, cls: ConjugacyClass, tol: float = 1e-8) -> float:
    """Largest circular eigenvalue mismatch between u and the class.

    Uses an optimal assignment between the eigenvalue angles of u and the
    recorded class angles, so wrap-around at 0 is handled correctly.
    """
    from scipy.optimize import linear_sum_assignment

    eig = np.angle(np.linalg.eigvals(u))
    target = np.array(cls.angles)
    dist = np.abs(
        np.vectorize(wrap_angle)(eig[:, None] - target[None, :])
    )
    rows, cols = linear_sum_assignment(dist)
    return float(dist[rows, cols].max())
