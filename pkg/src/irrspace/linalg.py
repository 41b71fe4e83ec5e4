"""Dense real matrix kernels: SVD, truncation, projection, norms, canonical angles.

All functions accept anything ``np.asarray`` can turn into a 2-D float64 array
and validate it first.  Results are deterministic for a fixed input: the SVD
sign ambiguity is resolved by making the largest-magnitude coordinate of each
left singular vector positive, and iterative routines use fixed start vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    InvalidBasisError,
    InvalidInputError,
    ParameterError,
)

# Singular values below RANK_CUTOFF * sigma_1 count as zero.
RANK_CUTOFF = 1e-10

# Orthonormality is validated to this tolerance wherever a basis is consumed.
ORTHO_TOL = 1e-8

# Power iteration: relative stagnation tolerance on the Rayleigh quotient.
POWER_TOL = 1e-14
POWER_MAX_ITER = 10000


def as_matrix(z, name: str = "matrix") -> np.ndarray:
    """Return ``z`` as a nonempty 2-D float64 array with finite entries."""
    a = np.asarray(z, dtype=np.float64)
    if a.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {a.shape}")
    if a.shape[0] == 0 or a.shape[1] == 0:
        raise InvalidInputError(f"{name} must have at least one row and column")
    if not np.isfinite(a).all():
        raise InvalidInputError(f"{name} has non-finite entries")
    return a


def require_orthonormal(b: np.ndarray, name: str = "basis", tol: float = ORTHO_TOL) -> None:
    """Raise InvalidBasisError unless the columns of ``b`` are orthonormal."""
    gram = b.T @ b
    dev = float(np.max(np.abs(gram - np.eye(b.shape[1]))))
    if dev > tol:
        raise InvalidBasisError(
            f"{name} columns are not orthonormal (max Gram deviation {dev:.3e})"
        )


@dataclass(frozen=True)
class SvdResult:
    """Economy decomposition Z = u @ diag(s) @ v.T.

    ``s`` is nonincreasing and zero-padded: all min(rows, cols) values are
    kept, so trailing entries of numerically rank-deficient inputs are ~0.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    @property
    def rank(self) -> int:
        if self.s.size == 0 or self.s[0] <= 0.0:
            return 0
        return int(np.count_nonzero(self.s > RANK_CUTOFF * self.s[0]))


def svd(z) -> SvdResult:
    """Full economy SVD with deterministic signs."""
    a = as_matrix(z)
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    v = vt.T.copy()
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0.0] = 1.0
    u = u * signs
    v = v * signs
    return SvdResult(u=u, s=s, v=v)


def truncate_svd(res: SvdResult, ell: int) -> np.ndarray:
    """First ``ell`` left singular vectors as an orthonormal basis matrix."""
    rank = res.rank
    if not isinstance(ell, (int, np.integer)) or isinstance(ell, bool):
        raise ParameterError(f"ell must be an integer, got {ell!r}")
    if not 1 <= ell <= rank:
        raise ParameterError(f"ell must be in [1, rank] = [1, {rank}], got {ell}")
    return res.u[:, :ell].copy()


def project(basis, z) -> np.ndarray:
    """Orthogonal projection of the columns of ``z`` onto span(basis)."""
    b = as_matrix(basis, "basis")
    a = as_matrix(z)
    if b.shape[0] != a.shape[0]:
        raise DimensionError(
            f"basis has {b.shape[0]} rows but matrix has {a.shape[0]}"
        )
    require_orthonormal(b)
    return b @ (b.T @ a)


def frobenius_norm(z) -> float:
    return float(np.linalg.norm(as_matrix(z)))


def _power_iterate(a: np.ndarray, v0: np.ndarray) -> float:
    """Largest eigenvalue of a.T @ a by power iteration from ``v0``."""
    v = v0
    rayleigh = 0.0
    for _ in range(POWER_MAX_ITER):
        w = a.T @ (a @ v)
        r = float(v @ w)
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            return max(r, 0.0)  # v fell in the null space
        v = w / norm_w
        if abs(r - rayleigh) <= POWER_TOL * max(abs(r), 1e-300):
            return max(r, 0.0)
        rayleigh = r
    return max(rayleigh, 0.0)


def spectral_norm(z) -> float:
    """Largest singular value, by power iteration on the Gram operator.

    Runs from the normalized all-ones vector and from e1; the second start
    covers the stagnation case where the first is orthogonal to the dominant
    singular direction.  Returns 0.0 for the zero matrix.
    """
    a = as_matrix(z)
    if not a.any():
        return 0.0
    if a.shape[0] < a.shape[1]:
        a = a.T
    n = a.shape[1]
    ones = np.full(n, 1.0 / math.sqrt(n))
    e1 = np.zeros(n)
    e1[0] = 1.0
    lam = max(_power_iterate(a, ones), _power_iterate(a, e1))
    return math.sqrt(lam)


@dataclass(frozen=True)
class CanonicalAngles:
    """Principal angles between two subspaces, largest first, in [0, pi/2].

    ``tan_norm`` is tan of the largest angle; it is math.inf when that angle
    is pi/2, i.e. when some direction of one subspace is orthogonal to all of
    the other.
    """

    angles: np.ndarray
    tan_norm: float


def canonical_angles(b1, b2) -> CanonicalAngles:
    m1 = as_matrix(b1, "first basis")
    m2 = as_matrix(b2, "second basis")
    if m1.shape[0] != m2.shape[0]:
        raise DimensionError(
            f"bases live in different spaces: {m1.shape[0]} vs {m2.shape[0]} rows"
        )
    require_orthonormal(m1, "first basis")
    require_orthonormal(m2, "second basis")
    sigma = np.linalg.svd(m1.T @ m2, compute_uv=False)
    sigma = np.clip(sigma, 0.0, 1.0)
    angles = np.sort(np.arccos(sigma))[::-1]
    theta_max = float(angles[0])
    half_pi = math.pi / 2.0
    tan_norm = math.inf if theta_max >= half_pi else math.tan(theta_max)
    return CanonicalAngles(angles=angles, tan_norm=tan_norm)
