"""Exact spectral tools for symmetric tridiagonal (Jacobi) matrices.

Everything here is deterministic linear algebra: Sturm-sequence counts,
bisection eigenvalues, inverse-iteration eigenvectors, the spectral
measure at the first coordinate, and the orthogonal-polynomial three-term
recursion attached to a Jacobi matrix.  The batched kernels at the bottom
run the same recurrences across many matrices/shifts at once; the Monte
Carlo pipelines depend on them for throughput.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded


class NumericalFailure(RuntimeError):
    """An iterative routine failed to reach its tolerance."""


class DegenerateSpectrumError(NumericalFailure):
    """Spectral-measure weights are not well conditioned: clustered
    eigenvalues below the resolution threshold."""


@dataclass
class SymTridiagonal:
    """Symmetric tridiagonal matrix stored as its two bands.

    The normalized (Jacobi) form keeps off-diagonal entries nonnegative;
    sampler and Householder outputs obey this, and the spectral-measure
    bijection assumes it.
    """

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        self.diag = np.asarray(self.diag, dtype=float)
        self.offdiag = np.asarray(self.offdiag, dtype=float)
        if self.diag.ndim != 1 or self.offdiag.ndim != 1:
            raise ValueError("bands must be one-dimensional")
        if self.offdiag.size != max(self.diag.size - 1, 0):
            raise ValueError("offdiag must have length n - 1")

    @property
    def n(self) -> int:
        return self.diag.size

    def matrix(self) -> np.ndarray:
        m = np.diag(self.diag)
        if self.offdiag.size:
            m += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return m

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        if self.offdiag.size:
            out[:-1] += self.offdiag * v[1:]
            out[1:] += self.offdiag * v[:-1]
        return out

    def scale(self) -> float:
        """Cheap upper bound for the spectral radius (Gershgorin)."""
        lo, hi = self.gershgorin()
        return max(abs(lo), abs(hi), 1e-300)

    def gershgorin(self) -> tuple[float, float]:
        r = np.zeros(self.n)
        if self.offdiag.size:
            r[:-1] += np.abs(self.offdiag)
            r[1:] += np.abs(self.offdiag)
        return float(np.min(self.diag - r)), float(np.max(self.diag + r))


@dataclass
class DenseSymmetric:
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("need a square matrix")
        if not np.allclose(m, m.T, rtol=0, atol=1e-10 * (1 + np.max(np.abs(m)))):
            raise ValueError("matrix is not symmetric")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float


@dataclass
class WeightedPointMeasure:
    """Finite probability measure sum_i q_i delta_{lambda_i}.

    Locations strictly increasing, weights nonnegative and summing to one
    (within 1e-10).
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.points.shape != self.weights.shape:
            raise ValueError("points and weights must match")
        if self.points.size > 1 and np.any(np.diff(self.points) <= 0):
            raise ValueError("locations must be strictly increasing")
        if np.any(self.weights < -1e-12):
            raise ValueError("weights must be nonnegative")
        s = self.weights.sum()
        if abs(s - 1.0) > 1e-10:
            raise ValueError(f"weights sum to {s}, expected 1")

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.points.tolist(), self.weights.tolist()))

    def moment(self, k: int) -> float:
        return float(np.sum(self.weights * self.points**k))


# ---------------------------------------------------------------------------
# Sturm sequences and bisection


def _pivmin(diag: np.ndarray, offdiag: np.ndarray) -> float:
    scale = float(np.max(np.abs(diag), initial=0.0)
                  + 2.0 * np.max(np.abs(offdiag), initial=0.0))
    return max(scale, 1.0) * 1e-300 / 1e-280  # ~1e-20 * scale


def sturm_count(T: SymTridiagonal, x: float) -> int:
    """Number of eigenvalues of T strictly below x (LDL^T sign count)."""
    return int(sturm_count_many(T, np.array([x]))[0])


def sturm_count_many(T: SymTridiagonal, xs) -> np.ndarray:
    """Sturm counts at many shifts for one matrix."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    diag, off = T.diag, T.offdiag
    piv = _pivmin(diag, off)
    d = diag[0] - xs
    d = np.where(np.abs(d) < piv, -piv, d)
    count = (d < 0).astype(np.int64)
    off2 = off * off
    for i in range(1, diag.size):
        d = (diag[i] - xs) - off2[i - 1] / d
        d = np.where(np.abs(d) < piv, -piv, d)
        count += d < 0
    return count


def eigenvalues(T: SymTridiagonal, tol: float = 1e-12) -> np.ndarray:
    """All eigenvalues, ascending, by bisection on the Sturm count."""
    n = T.n
    lo_g, hi_g = T.gershgorin()
    pad = 1e-6 * (hi_g - lo_g + 1.0)
    lo = np.full(n, lo_g - pad)
    hi = np.full(n, hi_g + pad)
    want = np.arange(1, n + 1)  # lambda_k = inf{x : count(x) >= k+1}
    tol_eff = max(tol, 4e-16 * max(abs(lo_g), abs(hi_g), 1.0))
    for _ in range(120):
        if np.max(hi - lo) <= tol_eff:
            break
        mid = 0.5 * (lo + hi)
        counts = sturm_count_many(T, mid)
        take_hi = counts >= want
        hi = np.where(take_hi, mid, hi)
        lo = np.where(take_hi, lo, mid)
    return 0.5 * (lo + hi)


def eigenvalue_by_index(T: SymTridiagonal, k: int, tol: float = 1e-12) -> float:
    """k-th eigenvalue (0-based, ascending) without computing the rest."""
    if not 0 <= k < T.n:
        raise ValueError("eigenvalue index out of range")
    lo_g, hi_g = T.gershgorin()
    pad = 1e-6 * (hi_g - lo_g + 1.0)
    lo, hi = lo_g - pad, hi_g + pad
    tol_eff = max(tol, 4e-16 * max(abs(lo_g), abs(hi_g), 1.0))
    while hi - lo > tol_eff:
        mid = 0.5 * (lo + hi)
        if sturm_count(T, mid) >= k + 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def eigenvector(T: SymTridiagonal, value: float, tol: float = 1e-10,
                max_iter: int = 50) -> EigenPair:
    """Inverse iteration at a (converged) eigenvalue estimate.

    The shift is perturbed multiplicatively so the solver sees a
    numerically singular but factorable system.  Clustered eigenvalues are
    outside the contract; residuals are checked and reported.
    """
    n = T.n
    scale = T.scale()
    mu = value + abs(value) * 1e-12 + 1e-15 * scale
    ab = np.zeros((3, n))
    ab[0, 1:] = T.offdiag
    ab[1, :] = T.diag - mu
    ab[2, :-1] = T.offdiag
    v = np.ones(n) / math.sqrt(n)
    residual = np.inf
    for it in range(max_iter):
        try:
            w = solve_banded((1, 1), ab, v)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise NumericalFailure("inverse iteration solve failed") from exc
        norm = np.linalg.norm(w)
        if not np.isfinite(norm) or norm == 0:
            # restart from a different direction
            v = np.cos(np.arange(n) * (1.0 + it))
            v /= np.linalg.norm(v)
            continue
        v = w / norm
        residual = float(np.linalg.norm(T.matvec(v) - value * v))
        if residual <= tol * max(1.0, scale):
            break
    else:
        raise NumericalFailure(
            f"inverse iteration: residual {residual:.3e} after {max_iter} steps")
    # deterministic sign: first appreciable component positive
    idx = int(np.argmax(np.abs(v) > 1e-3 * np.max(np.abs(v))))
    if v[idx] < 0:
        v = -v
    return EigenPair(value=float(value), vector=v, residual=residual)


def spectral_measure(T: SymTridiagonal, tol: float = 1e-12) -> WeightedPointMeasure:
    """Spectral measure of T at the first coordinate: weights are squared
    first components of normalized eigenvectors."""
    lam = eigenvalues(T, tol=tol)
    gaps = np.diff(lam)
    thresh = max(10.0 * tol, 1e-10 * max(1.0, T.scale()))
    if lam.size > 1 and np.min(gaps) < thresh:
        raise DegenerateSpectrumError(
            f"minimal eigenvalue gap {np.min(gaps):.3e} below {thresh:.3e}")
    q = np.empty(lam.size)
    for i, lv in enumerate(lam):
        q[i] = eigenvector(T, lv).vector[0] ** 2
    s = q.sum()
    if abs(s - 1.0) > 1e-8:
        raise NumericalFailure(f"weights sum to {s}, expected 1")
    return WeightedPointMeasure(points=lam, weights=q / s)


def dense_representative(measure: WeightedPointMeasure) -> DenseSymmetric:
    """A dense symmetric matrix whose spectral measure at coordinate one
    is the given measure (Householder completion of the sqrt-weight row)."""
    q = np.sqrt(measure.weights)
    n = q.size
    e1 = np.zeros(n)
    e1[0] = 1.0
    w = e1 - q
    nw = np.linalg.norm(w)
    if nw < 1e-14:
        V = np.eye(n)
    else:
        w /= nw
        V = np.eye(n) - 2.0 * np.outer(w, w)  # symmetric, V e1 = q column
    A = (V * measure.points) @ V.T
    A = 0.5 * (A + A.T)
    return DenseSymmetric(matrix=A)


# ---------------------------------------------------------------------------
# Orthogonal polynomials


def orthopoly_eval(T: SymTridiagonal, x) -> np.ndarray:
    """Values p_0(x), ..., p_n(x) of the orthonormal polynomials of the
    spectral measure of T (root at coordinate one).

    Recursion: b_{k-1} p_{k-1} + a_k p_k + b_k p_{k+1} = x p_k with the
    convention b_n = 1 for the last step, so p_n is a constant multiple of
    the characteristic polynomial and vanishes exactly at the eigenvalues.
    """
    a, b = T.diag, T.offdiag
    if np.any(b == 0):
        raise ValueError("orthopoly recursion undefined for zero off-diagonal")
    x = np.asarray(x, dtype=float)
    n = T.n
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    out[1] = (x - a[0]) / b[0] if n > 1 else (x - a[0])
    for k in range(1, n):
        bk = b[k] if k < n - 1 else 1.0
        out[k + 1] = ((x - a[k]) * out[k] - b[k - 1] * out[k - 1]) / bk
    return out


def quadrature_weights_from_polys(T: SymTridiagonal,
                                  nodes: np.ndarray) -> np.ndarray:
    """Gauss weights q_i = 1 / sum_k p_k(lambda_i)^2 (independent route to
    the eigenvector-based weights)."""
    p = orthopoly_eval(T, np.asarray(nodes, dtype=float))
    return 1.0 / np.sum(p[:-1] ** 2, axis=0)


# ---------------------------------------------------------------------------
# Reference laws and diagnostics


def semicircle_cdf(x):
    x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    return 0.5 + x * np.sqrt(4.0 - x * x) / (4.0 * np.pi) + np.arcsin(x / 2.0) / np.pi


def arcsine_cdf(x, half_width: float = 2.0):
    x = np.clip(np.asarray(x, dtype=float) / half_width, -1.0, 1.0)
    return 0.5 + np.arcsin(x) / np.pi


#: semicircle even moments m_2, m_4, m_6, m_8 are the Catalan numbers
CATALAN_MOMENTS = {2: 1.0, 4: 2.0, 6: 5.0, 8: 14.0}


def semicircle_diagnostics(eigs) -> dict:
    """KS distance to the semicircle on [-2, 2] plus the first eight
    empirical moments m_1..m_8 (even entries approach 1, 2, 5, 14)."""
    from .stats import ks_distance

    eigs = np.asarray(eigs, dtype=float)
    if eigs.size == 0:
        raise ValueError("need at least one eigenvalue")
    return {
        "ks_distance": ks_distance(eigs, semicircle_cdf),
        "moments": [float(np.mean(eigs**k)) for k in range(1, 9)],
    }


# ---------------------------------------------------------------------------
# Batched kernels (many matrices at once, vectorized over the batch axis)


def sturm_counts_batch(diags: np.ndarray, offs: np.ndarray,
                       xs: np.ndarray) -> np.ndarray:
    """Sturm counts for a batch: diags (B, n), offs (B, n-1), xs (B,)."""
    diags = np.asarray(diags, dtype=float)
    offs = np.asarray(offs, dtype=float)
    xs = np.asarray(xs, dtype=float)
    scale = np.max(np.abs(diags), axis=1, initial=0.0) \
        + 2.0 * np.max(np.abs(offs), axis=1, initial=0.0)
    piv = np.maximum(scale, 1.0) * 1e-20
    d = diags[:, 0] - xs
    d = np.where(np.abs(d) < piv, -piv, d)
    count = (d < 0).astype(np.int64)
    off2 = offs * offs
    for i in range(1, diags.shape[1]):
        d = (diags[:, i] - xs) - off2[:, i - 1] / d
        d = np.where(np.abs(d) < piv, -piv, d)
        count += d < 0
    return count


def eigenvalues_by_index_batch(diags: np.ndarray, offs: np.ndarray,
                               ks: np.ndarray, tol: float = 1e-11) -> np.ndarray:
    """k-th smallest eigenvalue for each matrix in a batch.

    ``ks`` may be a scalar index or one index per row (0-based ascending).
    """
    diags = np.asarray(diags, dtype=float)
    offs = np.asarray(offs, dtype=float)
    B, n = diags.shape
    ks = np.broadcast_to(np.asarray(ks, dtype=np.int64), (B,))
    if np.any((ks < 0) | (ks >= n)):
        raise ValueError("eigenvalue index out of range")
    r = np.zeros((B, n))
    if n > 1:
        r[:, :-1] += np.abs(offs)
        r[:, 1:] += np.abs(offs)
    lo = np.min(diags - r, axis=1)
    hi = np.max(diags + r, axis=1)
    pad = 1e-6 * (hi - lo + 1.0)
    lo = lo - pad
    hi = hi + pad
    want = ks + 1
    span = float(np.max(hi - lo))
    tol_eff = max(tol, 4e-16 * float(np.max(np.abs(np.stack([lo, hi])))))
    n_iter = max(10, int(math.ceil(math.log2(max(span / tol_eff, 2.0)))) + 1)
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        counts = sturm_counts_batch(diags, offs, mid)
        take_hi = counts >= want
        hi = np.where(take_hi, mid, hi)
        lo = np.where(take_hi, lo, mid)
    return 0.5 * (lo + hi)
