"""Topic-model diagnostics and numerical verification of the subspace bounds.

The quantities here live on a topic model rho (topics x docs, unit columns)
and a term-document matrix A whose ideal pairwise similarities are
S = rho.T @ rho:

* dominance of a topic: sqrt of its summed squared relevance scores;
* mingling: Frobenius norm of the off-diagonal of rho @ rho.T, zero exactly
  when no document straddles topics;
* deviation of a subspace X: E(X) = S - P_X(A).T P_X(A); its spectral norm
  measures how badly inner products in X misstate the ideal similarities.

optimum_subspace searches for the deviation-minimizing subspace: it
enumerates subsets of left singular vectors of A up to a size cap, then
refines the best subset of each size by plane rotations, accepting any
rotation that lowers the deviation norm until the improvement stalls.  The
verifiers check the dominance/singular-value interval, the tangent bound on
the angle between the truncation subspace and the optimum, the
singular-value perturbation inequality, and the projected-cosine envelope.

Spectral norms inside the verifiers are computed by dense symmetric
eigen-decomposition: the checks certify theorems at tight slacks and must
not inherit iterative-solver residue.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .corpus import SimilarityMatrix, TermDocumentMatrix, TopicModel
from .errors import DimensionError, ParameterError

_EVAL_CHUNK = 4096


@dataclass
class TopicStats:
    dominances: np.ndarray
    mingling: float
    nonuniformity: float
    f_estimate: float


def topic_stats(tm: TopicModel) -> TopicStats:
    rho = tm.relevance
    n = tm.n_docs
    d = np.sqrt((rho**2).sum(axis=1))
    cross = rho @ rho.T
    off = cross - np.diag(np.diag(cross))
    dmin = float(d.min())
    return TopicStats(
        dominances=d,
        mingling=float(np.linalg.norm(off)),
        nonuniformity=float(d.max()) / dmin if dmin > 0.0 else math.inf,
        f_estimate=float((d**4).sum()) / n**2,
    )


def s_prime_matrix(tm: TopicModel) -> np.ndarray:
    """rho @ rho.T zero-padded to docs x docs; shares all singular values
    with the similarity matrix rho.T @ rho."""
    k, n = tm.relevance.shape
    if k > n:
        raise DimensionError(f"{k} topics cannot be padded into {n} docs")
    out = np.zeros((n, n))
    out[:k, :k] = tm.relevance @ tm.relevance.T
    return out


def _sym_spectral_norm(m: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvalsh(m))))


def _check_similarity(s, n: int) -> np.ndarray:
    mat = s.matrix if isinstance(s, SimilarityMatrix) else s
    mat = linalg.as_matrix(mat, "similarity matrix")
    if mat.shape != (n, n):
        raise DimensionError(f"similarity matrix must be {n}x{n}, got {mat.shape}")
    return mat


def deviation_matrix(s, a, basis=None) -> np.ndarray:
    """E(X) = S - (P_X A).T (P_X A); basis None means no projection (VSM)."""
    a = linalg.as_matrix(a)
    smat = _check_similarity(s, a.shape[1])
    if basis is None:
        x = a
    elif getattr(basis, "size", 1) == 0:
        return smat.copy()
    else:
        x = linalg.project(basis, a)
    return smat - x.T @ x


def deviation_error(s, a, basis=None) -> float:
    return _sym_spectral_norm(deviation_matrix(s, a, basis))


def input_error(s, a) -> float:
    """epsilon_0 = ||S - A.T A||_2, the error of the inputs themselves."""
    return deviation_error(s, a, basis=None)


@dataclass
class OptimumSubspaceResult:
    basis: np.ndarray
    eps_opt: float
    h: int
    is_exact: bool


def _eps_of_coords(smat: np.ndarray, m_stack: np.ndarray) -> np.ndarray:
    """Deviation norms for a stack of (h x n) projected-coordinate blocks."""
    out = np.empty(m_stack.shape[0])
    for lo in range(0, m_stack.shape[0], _EVAL_CHUNK):
        part = m_stack[lo : lo + _EVAL_CHUNK]
        gram = np.einsum("khn,khm->knm", part, part)
        eigs = np.linalg.eigvalsh(smat[None, :, :] - gram)
        out[lo : lo + _EVAL_CHUNK] = np.max(np.abs(eigs), axis=1)
    return out


def _best_subset(smat: np.ndarray, c: np.ndarray, r: int, h: int) -> tuple[float, np.ndarray]:
    best_eps = math.inf
    best_combo: tuple[int, ...] | None = None
    combos = itertools.combinations(range(r), h)
    while True:
        chunk = list(itertools.islice(combos, _EVAL_CHUNK))
        if not chunk:
            break
        eps = _eps_of_coords(smat, c[np.array(chunk)])
        k = int(np.argmin(eps))
        if eps[k] < best_eps:
            best_eps = float(eps[k])
            best_combo = chunk[k]
    w = np.zeros((r, h))
    w[list(best_combo), np.arange(h)] = 1.0
    return best_eps, w


def _refine(
    smat: np.ndarray,
    c: np.ndarray,
    w: np.ndarray,
    eps: float,
    angle_grid: tuple[float, ...],
    improve_tol: float,
    max_rounds: int,
) -> tuple[float, np.ndarray]:
    r, h = w.shape
    if r == h:
        return eps, w  # the subspace is the whole range; nothing to rotate into
    pairs = [(i, j) for i in range(r) for j in range(i + 1, r)]
    angles = [s * t for t in angle_grid for s in (1.0, -1.0)]
    pi = np.repeat([p[0] for p in pairs], len(angles))
    pj = np.repeat([p[1] for p in pairs], len(angles))
    ct = np.cos(np.tile(angles, len(pairs)))[:, None]
    st = np.sin(np.tile(angles, len(pairs)))[:, None]
    n_cand = len(pi)
    for _ in range(max_rounds):
        stack = np.broadcast_to(w, (n_cand, r, h)).copy()
        rows_i, rows_j = w[pi], w[pj]
        stack[np.arange(n_cand), pi] = ct * rows_i - st * rows_j
        stack[np.arange(n_cand), pj] = st * rows_i + ct * rows_j
        eps_all = _eps_of_coords(smat, np.einsum("krh,rn->khn", stack, c))
        k = int(np.argmin(eps_all))
        if eps_all[k] >= eps - improve_tol:
            break
        eps = float(eps_all[k])
        w = stack[k].copy()
    return eps, w


def optimum_subspace(
    s,
    a,
    h_max: int,
    *,
    refine: bool = True,
    angle_grid: tuple[float, ...] = (0.3, 0.1, 0.03, 0.01),
    improve_tol: float = 1e-8,
    max_rounds: int = 80,
) -> OptimumSubspaceResult:
    """Search for the subspace minimizing ||E(X)||_2, up to h_max dimensions.

    Exhaustive over subsets of left singular vectors (cost grows
    combinatorially in rank and h_max; intended for verification-scale
    inputs), then locally refined.  Ties prefer the smallest dimensionality.
    The result never worsens as h_max grows.
    """
    a = linalg.as_matrix(a)
    smat = _check_similarity(s, a.shape[1])
    if h_max < 1:
        raise ParameterError(f"h_max must be >= 1, got {h_max}")
    res = linalg.svd(a)
    r = res.rank
    if r == 0:
        raise ParameterError("zero matrix has no subspaces to search")
    u = res.u[:, :r]
    c = u.T @ a
    best: tuple[float, int, np.ndarray] | None = None
    for h in range(1, min(h_max, r) + 1):
        eps_h, w_h = _best_subset(smat, c, r, h)
        if refine:
            eps_h, w_h = _refine(smat, c, w_h, eps_h, angle_grid, improve_tol, max_rounds)
        if best is None or eps_h < best[0]:
            best = (eps_h, h, w_h)
    eps, h, w = best
    return OptimumSubspaceResult(basis=u @ w, eps_opt=eps, h=h, is_exact=False)


@dataclass
class IdealInstance:
    """A term-document matrix built directly from a topic model."""

    tdm: TermDocumentMatrix
    topic_model: TopicModel
    similarity: SimilarityMatrix
    optimum: OptimumSubspaceResult
    noise: float
    seed: int


def construct_ideal_instance(
    tm: TopicModel, m: int, noise: float, seed: int
) -> IdealInstance:
    """Embed a topic model as documents over random orthonormal topic vectors.

    Column d is sum_t rho(t, d) u_t plus a random direction of norm ``noise``,
    renormalized.  At noise 0 the topic span is exactly optimal (zero
    deviation) and the result is flagged exact; otherwise the optimum is
    located by search.
    """
    if m < tm.n_topics:
        raise ParameterError(f"need m >= {tm.n_topics} dimensions, got {m}")
    if noise < 0.0:
        raise ParameterError("noise must be >= 0")
    rho = tm.relevance
    rng = np.random.default_rng(seed)
    qmat, rmat = np.linalg.qr(rng.standard_normal((m, tm.n_topics)))
    signs = np.sign(np.diag(rmat))
    signs[signs == 0.0] = 1.0
    qmat = qmat * signs
    cols = qmat @ rho
    if noise > 0.0:
        nv = rng.standard_normal((m, tm.n_docs))
        nv *= noise / np.linalg.norm(nv, axis=0)
        cols = cols + nv
        norms = np.linalg.norm(cols, axis=0)
        if np.any(norms < 1e-12):
            raise ParameterError("noise cancelled a document column")
        cols = cols / norms
    smat = rho.T @ rho
    tdm = TermDocumentMatrix(
        matrix=cols,
        terms=tuple(f"ax{i:04d}" for i in range(m)),
        doc_ids=tuple(f"d{j:03d}" for j in range(tm.n_docs)),
    )
    if noise == 0.0:
        optimum = OptimumSubspaceResult(
            basis=qmat,
            eps_opt=deviation_error(smat, cols, qmat),
            h=tm.n_topics,
            is_exact=True,
        )
    else:
        optimum = optimum_subspace(smat, cols, h_max=tm.n_topics)
    return IdealInstance(
        tdm=tdm,
        topic_model=tm,
        similarity=SimilarityMatrix(matrix=smat),
        optimum=optimum,
        noise=noise,
        seed=seed,
    )


@dataclass
class TheoremRecord:
    """Outcome of one verification check on one instance."""

    check: str
    quantities: dict[str, float]
    condition_met: bool
    holds: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "check": self.check,
                "quantities": self.quantities,
                "condition_met": self.condition_met,
                "holds": self.holds,
            },
            sort_keys=True,
        )


def _padded_singular_values(a: np.ndarray, count: int) -> np.ndarray:
    s = np.linalg.svd(a, compute_uv=False)
    if len(s) < count:
        s = np.concatenate([s, np.zeros(count - len(s))])
    return s


def verify_dominance_interval(instance: IdealInstance, slack: float = 1e-8) -> TheoremRecord:
    """Squared singular values of the optimally projected matrix stay within
    eps_opt + mingling of the squared topic dominances."""
    a = instance.tdm.matrix
    basis = instance.optimum.basis
    stats = topic_stats(instance.topic_model)
    k = instance.topic_model.n_topics
    sig = _padded_singular_values(basis.T @ a, k)[:k]
    delta = np.sort(stats.dominances)[::-1]
    deviation = float(np.max(np.abs(sig**2 - delta**2)))
    bound = instance.optimum.eps_opt + stats.mingling
    return TheoremRecord(
        check="dominance_interval",
        quantities={
            "max_deviation": deviation,
            "bound": bound,
            "eps_opt": instance.optimum.eps_opt,
            "mingling": stats.mingling,
        },
        condition_met=True,
        holds=deviation <= bound + slack,
    )


def verify_truncation_angle(instance: IdealInstance, slack: float = 1e-6) -> TheoremRecord:
    """Tangent bound between the rank-h truncation subspace and the optimum.

    When the smallest projected singular value exceeds sqrt(eps_tilde), where
    eps_tilde = ||Dbar.T Dbar||_2 and Dbar is the out-of-subspace part of A,
    the largest principal angle theta satisfies
    tan theta <= (dhat_max / dhat_min) (sqrt(eps_tilde) / dhat_min)
                 / (1 - eps_tilde / dhat_min^2).
    Also checks the two intermediate claims: sigma_{h+1}(A) <= sqrt(eps_tilde)
    and |eps_tilde - eps_0| <= eps_opt.
    """
    a = instance.tdm.matrix
    basis = instance.optimum.basis
    h = instance.optimum.h
    smat = instance.similarity.matrix
    dhat = _padded_singular_values(basis.T @ a, h)
    dbar = a - basis @ (basis.T @ a)
    eps_tilde = float(np.linalg.svd(dbar, compute_uv=False)[0]) ** 2
    eps0 = input_error(smat, a)
    eps_opt = instance.optimum.eps_opt
    sqrt_et = math.sqrt(eps_tilde)
    dhat_max, dhat_min = float(dhat[0]), float(dhat[h - 1])
    condition = dhat_min > sqrt_et

    full_s = _padded_singular_values(a, h + 1)
    sigma_next = float(full_s[h])

    lsi_basis = linalg.truncate_svd(linalg.svd(a), h)
    tan_measured = linalg.canonical_angles(lsi_basis, basis).tan_norm
    if condition:
        x = sqrt_et / dhat_min
        tan_bound = (dhat_max / dhat_min) * x / (1.0 - x * x)
    else:
        tan_bound = math.inf
    angle_ok = tan_measured <= tan_bound + slack
    next_sv_ok = sigma_next <= sqrt_et + slack
    agree_ok = abs(eps_tilde - eps0) <= eps_opt + slack
    return TheoremRecord(
        check="truncation_angle",
        quantities={
            "dhat_max": dhat_max,
            "dhat_min": dhat_min,
            "eps_tilde": eps_tilde,
            "eps_0": eps0,
            "eps_opt": eps_opt,
            "sigma_h_plus_1": sigma_next,
            "tan_measured": tan_measured,
            "tan_bound": tan_bound,
        },
        condition_met=condition,
        holds=(not condition) or (angle_ok and next_sv_ok and agree_ok),
    )


def verify_sv_perturbation(x1, x2, slack: float = 1e-10) -> TheoremRecord:
    """|sigma_i(X1) - sigma_i(X2)| <= ||X1 - X2||_2 <= ||X1 - X2||_F."""
    a1 = linalg.as_matrix(x1, "first matrix")
    a2 = linalg.as_matrix(x2, "second matrix")
    if a1.shape != a2.shape:
        raise DimensionError(f"shapes differ: {a1.shape} vs {a2.shape}")
    s1 = np.linalg.svd(a1, compute_uv=False)
    s2 = np.linalg.svd(a2, compute_uv=False)
    diff = a1 - a2
    spec = float(np.linalg.svd(diff, compute_uv=False)[0])
    fro = float(np.linalg.norm(diff))
    max_shift = float(np.max(np.abs(s1 - s2)))
    return TheoremRecord(
        check="sv_perturbation",
        quantities={"max_shift": max_shift, "spectral": spec, "frobenius": fro},
        condition_met=True,
        holds=max_shift <= spec + slack and spec <= fro + slack,
    )


def verify_cosine_bound(
    instance: IdealInstance, slack: float = 1e-9, basis=None
) -> TheoremRecord:
    """Projected cosines stay inside the envelope set by the largest
    deviation entry eps: (sim - eps)/(1 + eps) <= cos <= (sim + eps)/(1 - eps),
    applicable when eps < 1 and no projected column vanishes."""
    a = instance.tdm.matrix
    smat = instance.similarity.matrix
    if basis is None:
        basis = instance.optimum.basis
    x = linalg.project(basis, a)
    gram = x.T @ x
    e = smat - gram
    eps = float(np.max(np.abs(e)))
    norms = np.linalg.norm(x, axis=0)
    applicable = eps < 1.0 and bool(np.all(norms > 0.0))
    if applicable:
        cos = gram / np.outer(norms, norms)
        iu = np.triu_indices(a.shape[1], k=1)
        low = (smat[iu] - eps) / (1.0 + eps)
        high = (smat[iu] + eps) / (1.0 - eps)
        viol_low = float(np.max(low - cos[iu]))
        viol_high = float(np.max(cos[iu] - high))
        holds = viol_low <= slack and viol_high <= slack
    else:
        viol_low = viol_high = math.nan
        holds = True
    return TheoremRecord(
        check="cosine_bound",
        quantities={
            "eps": eps,
            "lower_violation": viol_low,
            "upper_violation": viol_high,
        },
        condition_met=applicable,
        holds=holds,
    )


def _single_topic_model(distribution: tuple[int, ...]) -> TopicModel:
    k = len(distribution)
    n = sum(distribution)
    rho = np.zeros((k, n))
    j = 0
    for t, count in enumerate(distribution):
        rho[t, j : j + count] = 1.0
        j += count
    return TopicModel(relevance=rho, topic_ids=tuple(f"t{t}" for t in range(k)))


_TWO_TOPIC_DISTS = ((10, 6), (12, 4), (8, 8), (11, 5))
_FIVE_TOPIC_DISTS = ((6, 3, 3, 2, 2), (4, 3, 3, 3, 3), (7, 2, 2, 2, 2))
_NOISE_LEVELS = (0.05, 0.1, 0.2)

# Term-space dimension per noise level.  Large enough that projection
# shrinkage (diagonal deviation, ~noise^2) dominates the random cross terms
# (~noise/sqrt(m)); the cosine envelope is only claimed in that regime.
_M_FOR_NOISE = {0.05: 34000, 0.1: 8600, 0.2: 2200}


def _m_for_noise(noise: float) -> int:
    if noise in _M_FOR_NOISE:
        return _M_FOR_NOISE[noise]
    if noise <= 0.0:
        return 200
    return int(max(200, min(34000, round(84.0 / noise**2))))


def standard_instance_suite(
    count: int, seed: int = 0, noise: float | None = None
) -> list[IdealInstance]:
    """Deterministic family of noisy ideal instances with 2 and 5 topics.

    Every fourth instance blends each document across the two topics so that
    mingling is exercised; the rest are single-topic.  ``noise`` overrides the
    default cycle over {0.05, 0.1, 0.2}; at 0 every instance is exact.
    """
    if count < 1:
        raise ParameterError("count must be >= 1")
    out = []
    for t in range(count):
        inst_seed = seed * 1_000_003 + t
        inst_noise = _NOISE_LEVELS[t % 3] if noise is None else noise
        if t % 2 == 0:
            dist = _TWO_TOPIC_DISTS[(t // 2) % len(_TWO_TOPIC_DISTS)]
        else:
            dist = _FIVE_TOPIC_DISTS[(t // 2) % len(_FIVE_TOPIC_DISTS)]
        tm = _single_topic_model(dist)
        if t % 4 == 2:
            rng = np.random.default_rng(inst_seed + 1)
            mix = rng.uniform(0.0, 0.35, tm.n_docs)
            rho = tm.relevance
            blended = np.zeros_like(rho)
            for j in range(tm.n_docs):
                main = int(np.argmax(rho[:, j]))
                other = (main + 1) % tm.n_topics
                blended[main, j] = math.cos(mix[j])
                blended[other, j] = math.sin(mix[j])
            tm = TopicModel(relevance=blended, topic_ids=tm.topic_ids)
        out.append(
            construct_ideal_instance(
                tm, m=_m_for_noise(inst_noise), noise=inst_noise, seed=inst_seed
            )
        )
    return out
