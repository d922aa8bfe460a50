"""Samplers for the finite-n random matrix models.

The central object is the tridiagonal beta-Hermite matrix: Gaussian
diagonal, chi off-diagonals with linearly decreasing degrees of freedom,
scaled so the spectrum fills [-2, 2].  The same chi ladder read in the
other direction, unscaled, is the truncation of a semi-infinite Jacobi
matrix whose order-n minors reproduce every beta-Hermite size at once
from a single draw.  Circular-beta models live on the unit circle through
their Verblunsky coefficients, and the 1-d random Schrodinger matrix has
unit hopping with a small random potential.

All samplers consume an :class:`~betalab.rng.RngStream` and are pure:
same stream, same matrix.  Draw order within a sampler is fixed (diagonal
block first, then off-diagonal block) and documented where bitwise
reproducibility across sizes is part of the contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .rng import RngStream
from .tridiag import DenseSymmetric, SymTridiagonal


class DegenerateInputError(ValueError):
    """Input outside the generic set an algorithm requires (e.g. the first
    coordinate fails to be cyclic during tridiagonalization)."""


def _check_n_beta(n: int, beta: float) -> None:
    if n < 1 or int(n) != n:
        raise ValueError(f"need a positive integer size, got {n}")
    if not (beta > 0):
        raise ValueError(f"need beta > 0, got {beta}")


# ---------------------------------------------------------------------------
# Hermite family


def sample_beta_hermite(n: int, beta: float, stream: RngStream) -> SymTridiagonal:
    """One beta-Hermite tridiagonal draw, edge-scaled to [-2, 2].

    diag[i] ~ N(0, 2/(n beta)); offdiag[i] ~ chi_{(n-i) beta} / sqrt(n beta)
    for i = 1..n-1, all independent.  beta = inf returns the deterministic
    limit (zero diagonal, offdiag sqrt((n-i)/n)).
    """
    _check_n_beta(n, beta)
    if math.isinf(beta):
        return SymTridiagonal(diag=np.zeros(n),
                              offdiag=np.sqrt(np.arange(n - 1, 0, -1) / n))
    gen = stream.generator()
    diag = gen.normal(0.0, math.sqrt(2.0 / (n * beta)), n)
    dof = beta * np.arange(n - 1, 0, -1)
    off = np.sqrt(2.0 * gen.standard_gamma(dof / 2.0)) / math.sqrt(n * beta)
    return SymTridiagonal(diag=diag, offdiag=off)


def sample_beta_hermite_batch(n: int, beta: float, stream: RngStream,
                              draws: int) -> tuple[np.ndarray, np.ndarray]:
    """Batch of beta-Hermite band pairs: (diags (B, n), offs (B, n-1)).

    Same entry laws as :func:`sample_beta_hermite`; the whole batch comes
    from one generator (diagonal block first).
    """
    _check_n_beta(n, beta)
    if math.isinf(beta):
        one = sample_beta_hermite(n, beta, stream)
        return (np.tile(one.diag, (draws, 1)), np.tile(one.offdiag, (draws, 1)))
    gen = stream.generator()
    diags = gen.normal(0.0, math.sqrt(2.0 / (n * beta)), (draws, n))
    dof = beta * np.arange(n - 1, 0, -1)
    offs = np.sqrt(2.0 * gen.standard_gamma(dof / 2.0, (draws, n - 1))) \
        / math.sqrt(n * beta)
    return diags, offs


def sample_spiked_hermite(n: int, beta: float, mu: float,
                          stream: RngStream) -> SymTridiagonal:
    """Beta-Hermite draw plus a rank-one shift mu at the first coordinate.

    In the dense picture the shift is the mean perturbation mu/sqrt(n) on
    every entry; rotating its eigenvector onto e_1 (which preserves the
    Gaussian law) turns it into mu added to the (1, 1) entry of the
    edge-scaled tridiagonal.  mu = 0 is bitwise the unspiked sampler.
    """
    T = sample_beta_hermite(n, beta, stream)
    if mu != 0.0:
        d = T.diag.copy()
        d[0] += mu
        T = SymTridiagonal(diag=d, offdiag=T.offdiag)
    return T


def sample_spiked_hermite_batch(n: int, beta: float, mu: float,
                                stream: RngStream, draws: int):
    diags, offs = sample_beta_hermite_batch(n, beta, stream, draws)
    diags[:, 0] += mu
    return diags, offs


def sample_nested_jacobi(n_max: int, beta: float,
                         stream: RngStream) -> SymTridiagonal:
    """Truncation of the semi-infinite Jacobi operator whose minors nest.

    Rows are ordered with the spectral-measure root at the top-left
    corner: diag entries iid N(0, 2/beta), offdiag[k] ~ chi_{k beta} /
    sqrt(beta) for k = 1..n_max-1.  The order-n minor, index-reversed and
    divided by sqrt(n), is a beta-Hermite draw for every n <= n_max
    (see :func:`minor_as_hermite`).

    Scalars are drawn interleaved (a_1, b_1, a_2, b_2, ...), so on a fixed
    stream the order-n truncation is bitwise the top-left corner of any
    larger one.  beta = inf gives the deterministic free operator: zero
    diagonal, offdiag sqrt(k).
    """
    _check_n_beta(n_max, beta)
    if math.isinf(beta):
        return SymTridiagonal(diag=np.zeros(n_max),
                              offdiag=np.sqrt(np.arange(1, n_max)))
    gen = stream.generator()
    diag = np.empty(n_max)
    off = np.empty(n_max - 1)
    sd = math.sqrt(2.0 / beta)
    for k in range(n_max):
        diag[k] = gen.normal(0.0, sd)
        if k < n_max - 1:
            off[k] = math.sqrt(2.0 * gen.standard_gamma((k + 1) * beta / 2.0))
            off[k] /= math.sqrt(beta)
    return SymTridiagonal(diag=diag, offdiag=off)


def minor_as_hermite(J: SymTridiagonal, n: int) -> SymTridiagonal:
    """Order-n top-left minor of a nested Jacobi draw, index-reversed and
    scaled by 1/sqrt(n) so it carries the beta-Hermite entry laws with the
    conventional (decreasing-dof) numbering."""
    if not 1 <= n <= J.n:
        raise ValueError(f"minor size {n} outside 1..{J.n}")
    diag = J.diag[:n][::-1] / math.sqrt(n)
    off = J.offdiag[: n - 1][::-1] / math.sqrt(n)
    return SymTridiagonal(diag=diag.copy(), offdiag=off.copy())


# ---------------------------------------------------------------------------
# Dense Gaussian orthogonal ensemble


def sample_goe(n: int, spike_mu: float, stream: RngStream) -> DenseSymmetric:
    """GOE draw A = (M + M^t)/sqrt(2), M iid standard normal, optionally
    with the rank-one mean shift mu/sqrt(n) added to every entry.

    spike_mu = 0 is bitwise identical to the unspiked draw on the same
    stream.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    gen = stream.generator()
    m = gen.normal(0.0, 1.0, (n, n))
    a = (m + m.T) / math.sqrt(2.0)
    if spike_mu != 0.0:
        a = a + spike_mu / math.sqrt(n)
    return DenseSymmetric(matrix=a)


def householder_tridiagonalize(A: DenseSymmetric) -> SymTridiagonal:
    """Jacobi matrix orthogonally equivalent to A with the first
    coordinate fixed; off-diagonals sign-normalized to nonnegative.

    The reduction is the standard Householder chain (each reflector fixes
    e_1), delegated to the LAPACK Hessenberg driver; for symmetric input
    the result is tridiagonal.  A numerically zero off-diagonal pivot
    means the first coordinate is not cyclic for A and the Jacobi
    representative is not unique: that raises DegenerateInputError.
    """
    mat = A.matrix
    n = A.n
    if n == 1:
        return SymTridiagonal(diag=mat.diagonal().copy(), offdiag=np.zeros(0))
    h = scipy.linalg.hessenberg(mat)
    diag = h.diagonal().copy()
    off = np.abs(h.diagonal(-1))
    scale = max(1.0, float(np.max(np.abs(mat))))
    if np.any(off <= 1e-13 * scale):
        raise DegenerateInputError(
            "zero off-diagonal pivot: first coordinate not cyclic")
    return SymTridiagonal(diag=diag, offdiag=off)


# ---------------------------------------------------------------------------
# Circular beta (Verblunsky coefficients)


@dataclass
class VerblunskyCoeffs:
    """Coefficients alpha_0..alpha_{n-1} of a measure on the unit circle:
    |alpha_k| <= 1 for k < n-1 and |alpha_{n-1}| = 1 (n-point measure)."""

    alpha: np.ndarray

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=complex)
        if self.alpha.ndim != 1 or self.alpha.size == 0:
            raise ValueError("alpha must be a nonempty vector")
        mods = np.abs(self.alpha)
        if np.any(mods[:-1] > 1 + 1e-12):
            raise ValueError("need |alpha_k| <= 1 for k < n-1")
        if abs(mods[-1] - 1.0) > 1e-12:
            raise ValueError("final coefficient must lie on the unit circle")

    @property
    def n(self) -> int:
        return self.alpha.size


def sample_circular_beta(n: int, beta: float, stream: RngStream) -> VerblunskyCoeffs:
    """Circular-beta Verblunsky draw: independent, rotationally symmetric
    alpha_k with |alpha_k|^2 ~ Beta(1, (n-k-1) beta / 2) for k < n-1 and
    alpha_{n-1} uniform on the circle."""
    _check_n_beta(n, beta)
    if math.isinf(beta):
        raise ValueError("circular sampler needs finite beta")
    gen = stream.generator()
    mods = np.ones(n)
    if n > 1:
        b_par = (n - 1 - np.arange(n - 1)) * beta / 2.0
        mods[:-1] = np.sqrt(gen.beta(1.0, b_par))
    phases = gen.uniform(0.0, 2.0 * math.pi, n)
    return VerblunskyCoeffs(alpha=mods * np.exp(1j * phases))


def sample_circular_beta_batch(n: int, beta: float, stream: RngStream,
                               draws: int) -> np.ndarray:
    """(B, n) complex array of circular-beta coefficient rows (same laws
    as the scalar sampler, one generator for the whole batch)."""
    _check_n_beta(n, beta)
    gen = stream.generator()
    mods = np.ones((draws, n))
    if n > 1:
        b_par = (n - 1 - np.arange(n - 1)) * beta / 2.0
        mods[:, :-1] = np.sqrt(gen.beta(1.0, np.broadcast_to(b_par, (draws, n - 1))))
    phases = gen.uniform(0.0, 2.0 * math.pi, (draws, n))
    return mods * np.exp(1j * phases)


# ---------------------------------------------------------------------------
# 1-d random Schrodinger


@dataclass
class SchrodingerMatrix:
    """n x n discrete Schrodinger matrix: unit off-diagonals plus diagonal
    potential v_k = sigma * omega_k / sqrt(n), omega mean 0 variance 1."""

    tridiagonal: SymTridiagonal
    sigma: float
    n: int
    omega_dist: str

    def __post_init__(self):
        if self.tridiagonal.n != self.n:
            raise ValueError("size mismatch")
        if self.n > 1 and not np.all(self.tridiagonal.offdiag == 1.0):
            raise ValueError("off-diagonals must be exactly 1")


_OMEGA_DISTS = ("gaussian", "rademacher", "uniform")


def _omega_draw(gen: np.random.Generator, dist: str, shape) -> np.ndarray:
    if dist == "gaussian":
        return gen.normal(0.0, 1.0, shape)
    if dist == "rademacher":
        return gen.integers(0, 2, shape) * 2.0 - 1.0
    if dist == "uniform":
        return gen.uniform(-math.sqrt(3.0), math.sqrt(3.0), shape)
    raise ValueError(f"unknown omega distribution {dist!r}; "
                     f"choose from {_OMEGA_DISTS}")


def sample_schrodinger(n: int, sigma: float, omega_dist: str,
                       stream: RngStream) -> SchrodingerMatrix:
    """Random Schrodinger draw with critical-scaling potential sigma/sqrt(n)."""
    if n < 1:
        raise ValueError("need n >= 1")
    if not sigma > 0:
        raise ValueError("need sigma > 0")
    gen = stream.generator()
    omega = _omega_draw(gen, omega_dist, n)
    T = SymTridiagonal(diag=sigma * omega / math.sqrt(n), offdiag=np.ones(n - 1))
    return SchrodingerMatrix(tridiagonal=T, sigma=sigma, n=n, omega_dist=omega_dist)


def sample_schrodinger_batch(n: int, sigma: float, omega_dist: str,
                             stream: RngStream, draws: int) -> np.ndarray:
    """(B, n) array of Schrodinger diagonals (off-diagonals are all ones)."""
    if n < 1:
        raise ValueError("need n >= 1")
    if not sigma > 0:
        raise ValueError("need sigma > 0")
    gen = stream.generator()
    return sigma * _omega_draw(gen, omega_dist, (draws, n)) / math.sqrt(n)
