"""Subspace construction: LSI truncation and iterative residual rescaling.

IRR builds an orthonormal basis one direction at a time.  Before each solve
the current residual columns r_i are rescaled to |r_i|^q r_i; the leading
left singular vector of the rescaled matrix becomes the next basis vector,
and its projection is subtracted from the *unrescaled* residuals.  Amplifying
long residuals (q > 0) pulls the basis toward minority topics that plain
truncated SVD (the q = 0 special case) sacrifices on skewed collections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ParameterError

METHODS = ("vsm", "lsi", "irr")

# Residuals whose Frobenius norm falls below this fraction of the input's are
# treated as exhausted; further directions would be numerical noise.
_EXHAUSTED_RTOL = 1e-12


@dataclass(frozen=True)
class IrrConfig:
    """IRR run parameters.

    ``q`` is the rescaling exponent; None means choose it from the data via
    auto_scale.  Exactly one of ``ell`` (fixed dimensionality) and ``theta``
    (residual-ratio stopping threshold) must be set.
    """

    q: float | None = None
    ell: int | None = None
    theta: float | None = None
    alpha: float = 3.5
    beta: float = 0.0

    def __post_init__(self) -> None:
        if (self.ell is None) == (self.theta is None):
            raise ParameterError("set exactly one of ell and theta")
        if self.ell is not None and self.ell < 1:
            raise ParameterError(f"ell must be >= 1, got {self.ell}")
        if self.theta is not None and not self.theta > 0.0:
            raise ParameterError(f"theta must be positive, got {self.theta}")
        if self.q is not None and not (math.isfinite(self.q) and self.q >= 0.0):
            raise ParameterError(f"q must be a finite value >= 0, got {self.q}")
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ParameterError("alpha and beta must be finite")


@dataclass
class SubspaceBasis:
    """An orthonormal basis plus the bookkeeping of how it was built.

    ``residual_ratios`` holds ||R||_F^2 / n before each extraction and after
    the last one (length ell + 1, nonincreasing).  ``exhausted`` is set when
    the residuals vanished before a requested fixed ell was reached, in which
    case the basis is simply shorter.
    """

    basis: np.ndarray
    method: str
    q: float | None = None
    residual_ratios: tuple[float, ...] = ()
    alpha: float | None = None
    beta: float | None = None
    exhausted: bool = False

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ParameterError(f"method must be one of {METHODS}")
        self.basis = linalg.as_matrix(self.basis, "basis")
        linalg.require_orthonormal(self.basis)
        ratios = tuple(float(r) for r in self.residual_ratios)
        if ratios:
            if len(ratios) != self.ell + 1:
                raise ParameterError("need ell + 1 residual ratios")
            wiggle = 1e-9 * max(1.0, ratios[0])
            if any(b > a + wiggle for a, b in zip(ratios, ratios[1:])):
                raise ParameterError("residual ratios must be nonincreasing")
        self.residual_ratios = ratios

    @property
    def ell(self) -> int:
        return self.basis.shape[1]


def auto_scale(z, alpha: float = 3.5, beta: float = 0.0) -> float:
    """Data-driven rescaling exponent max(0, alpha * f + beta).

    f = (||A^T A||_F / n)^2 estimates topic-dominance non-uniformity from the
    matrix alone; it is invariant under column permutation.
    """
    a = linalg.as_matrix(z)
    n = a.shape[1]
    f = (float(np.linalg.norm(a.T @ a)) / n) ** 2
    return max(0.0, alpha * f + beta)


def rescale(z, q: float) -> np.ndarray:
    """Scale every column r to |r|^q r.  Zero columns stay zero (0^0 = 1)."""
    a = linalg.as_matrix(z)
    if not (math.isfinite(q) and q >= 0.0):
        raise ParameterError(f"q must be a finite value >= 0, got {q}")
    norms = np.linalg.norm(a, axis=0)
    return a * np.power(norms, q)


def _leading_left_vector(r: np.ndarray) -> np.ndarray:
    """First left singular vector of r, solved on the smaller Gram side.

    A dense symmetric eigen-solve gives the direction to machine precision
    regardless of how clustered the spectrum is, which the q = 0 equivalence
    guarantee needs.
    """
    m, n = r.shape
    if m <= n:
        w, vecs = np.linalg.eigh(r @ r.T)
        b = vecs[:, -1]
    else:
        w, vecs = np.linalg.eigh(r.T @ r)
        b = r @ vecs[:, -1]
        b /= np.linalg.norm(b)
    i = int(np.argmax(np.abs(b)))
    if b[i] < 0.0:
        b = -b
    return b


def irr(z, config: IrrConfig) -> SubspaceBasis:
    """Iterative residual rescaling under the given configuration."""
    a = linalg.as_matrix(z)
    n = a.shape[1]
    q = config.q if config.q is not None else auto_scale(a, config.alpha, config.beta)

    if config.theta is not None:
        limit = linalg.svd(a).rank
        if limit == 0:
            raise ParameterError("cannot select a dimensionality for a zero matrix")
    else:
        limit = config.ell

    resid = a.copy()
    initial_fro = float(np.linalg.norm(a))
    vanish = _EXHAUSTED_RTOL * max(initial_fro, 1.0)
    ratios = [initial_fro**2 / n]
    cols: list[np.ndarray] = []
    exhausted = False
    while len(cols) < limit:
        if float(np.linalg.norm(resid)) <= vanish:
            exhausted = True
            break
        scaled = rescale(resid, q)
        # Guard against under/overflow from the exponent: the solve only needs
        # the direction, so normalize by the largest column norm first.
        top = float(np.max(np.linalg.norm(scaled, axis=0)))
        b = _leading_left_vector(scaled / top)
        resid -= np.outer(b, b @ resid)
        cols.append(b)
        ratios.append(float(np.linalg.norm(resid)) ** 2 / n)
        if config.theta is not None and ratios[-1] <= config.theta:
            break
    if not cols:
        raise ParameterError("input matrix is zero; no directions to extract")
    return SubspaceBasis(
        basis=np.column_stack(cols),
        method="irr",
        q=float(q),
        residual_ratios=tuple(ratios),
        alpha=config.alpha if config.q is None else None,
        beta=config.beta if config.q is None else None,
        exhausted=exhausted,
    )


def lsi(z, ell: int) -> SubspaceBasis:
    """Rank-ell truncated SVD basis (identical to IRR at q = 0)."""
    a = linalg.as_matrix(z)
    res = linalg.svd(a)
    basis = linalg.truncate_svd(res, ell)
    n = a.shape[1]
    total = float(np.sum(res.s**2))
    removed = np.concatenate(([0.0], np.cumsum(res.s[:ell] ** 2)))
    ratios = tuple(max(total - r, 0.0) / n for r in removed)
    return SubspaceBasis(
        basis=basis, method="lsi", q=0.0, residual_ratios=ratios
    )


def dimensionality_by_residual_ratio(z, theta: float, q: float | None = None) -> int:
    """Smallest ell whose residual ratio is <= theta (>= 1, capped at rank)."""
    return irr(z, IrrConfig(q=q, theta=theta)).ell


def represent(basis: SubspaceBasis, z) -> np.ndarray:
    """Project the columns of ``z`` into the subspace."""
    return linalg.project(basis.basis, z)
