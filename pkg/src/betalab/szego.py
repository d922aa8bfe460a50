"""Unitary half of the laboratory: polynomials orthogonal on the unit
circle and what they encode.

A vector of Verblunsky coefficients alpha_0..alpha_{n-1} (the last one
unimodular) determines n points on the circle three equivalent ways, and
this module implements all three so they can be played against each other:

* the Szegő recursion Phi_{k+1} = z Phi_k - conj(alpha_k) Phi*_k, whose
  degree-n polynomial vanishes exactly at the spectrum
  (:func:`szego_recursion`, :func:`eigenangles`);
* a hyperbolic random walk ``b_0 = 0, b_1, ...`` in the unit disk obtained
  by pushing the basis vector through the inverse one-step matrices
  (:func:`b_path`), which loses no information
  (:func:`verblunsky_from_path`) and feeds a selfadjoint Dirac-type
  boundary-value problem whose eigenvalues reproduce the spectrum
  (:func:`dirac_spectrum_check`);
* the continuum coupling: for circular-beta radii the walk follows a
  Brownian motion on the Poincaré disk ever more closely, realized here by
  reading the walk off a stored Brownian path at hyperbolic hitting times
  (:func:`kn_coupling`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .carousel import DiskPath, hyperbolic_distance
from .ensembles import VerblunskyCoeffs, sample_circular_beta
from .rng import RngStream

TWO_PI = 2.0 * math.pi

# Root scans start from a uniform circle grid of _GRID_FACTOR points per
# root and double it (per draw, up to _MAX_REFINE times) until the winding
# count comes out right; bisection then runs a fixed _BISECT_ITERS sweeps.
_GRID_FACTOR = 8
_MAX_REFINE = 10
_BISECT_ITERS = 54


class NumericalFailure(RuntimeError):
    """Raised when root finding cannot reconcile its counts with the
    winding number, or located roots fail their defect verification."""


class BoundaryDegeneracy(RuntimeError):
    """Raised when a disk-walk step lands on (or beyond) the unit circle
    and the projective chart breaks down."""


class HorizonError(RuntimeError):
    """Raised when a stored Brownian path ends before the walk coupled to
    it has consumed all its step radii."""


# ---------------------------------------------------------------------------
# Szegő recursion


def _coeff_array(alpha) -> np.ndarray:
    a = alpha.alpha if isinstance(alpha, VerblunskyCoeffs) else np.asarray(alpha)
    a = np.asarray(a, dtype=complex)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("need a nonempty coefficient vector")
    return a


def szego_recursion(alpha, z):
    """All recursion values (Phi_k(z), Phi*_k(z)) for k = 0..n.

    ``z`` may be a scalar or an array; the returned arrays have shape
    ``(n + 1,) + shape(z)``.  The iteration is the monic two-vector
    recursion

        Phi_{k+1} = z Phi_k - conj(alpha_k) Phi*_k,
        Phi*_{k+1} = Phi*_k - alpha_k z Phi_k,

    started from Phi_0 = Phi*_0 = 1 (the one-step matrix acting on
    (z Phi, Phi*), with the row normalization dropped so Phi_k stays
    monic).  Phi*_k is the reversed-conjugated polynomial, so
    |Phi_k| = |Phi*_k| on the unit circle.
    """
    a = _coeff_array(alpha)
    z = np.asarray(z, dtype=complex)
    phi = [np.ones_like(z)]
    star = [np.ones_like(z)]
    for k in range(a.size):
        zphi = z * phi[-1]
        phi.append(zphi - np.conj(a[k]) * star[-1])
        star.append(star[-1] - a[k] * zphi)
    return np.stack(phi), np.stack(star)


@dataclass
class PolyPair:
    """Coefficients (ascending powers) of a monic degree-k polynomial and
    its reversed conjugate.

    ``phi_star[j] = conj(phi[k - j])``, which forces |phi| = |phi_star| on
    the unit circle.
    """

    phi: np.ndarray
    phi_star: np.ndarray

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=complex)
        self.phi_star = np.asarray(self.phi_star, dtype=complex)

    @property
    def degree(self) -> int:
        return self.phi.size - 1

    def check(self, tol: float = 1e-12):
        if self.phi.shape != self.phi_star.shape or self.phi.ndim != 1:
            raise ValueError("coefficient vectors must match in length")
        if abs(self.phi[-1] - 1.0) > tol:
            raise ValueError("phi must be monic")
        if np.max(np.abs(self.phi_star - np.conj(self.phi[::-1]))) > tol:
            raise ValueError("phi_star must be the reversed conjugate of phi")
        z = np.exp(2j * math.pi * (np.arange(8) + 0.35) / 8.0)
        pv = np.polyval(self.phi[::-1], z)
        sv = np.polyval(self.phi_star[::-1], z)
        if np.max(np.abs(np.abs(pv) - np.abs(sv))) > 64 * tol * self.phi.size:
            raise ValueError("|phi| and |phi_star| must agree on the circle")
        return True


def szego_polynomials(alpha) -> PolyPair:
    """Coefficient vectors of the terminal pair (Phi_n, Phi*_n)."""
    a = _coeff_array(alpha)
    phi = np.ones(1, dtype=complex)
    for k in range(a.size):
        zphi = np.concatenate([np.zeros(1, dtype=complex), phi])
        star = np.concatenate([np.conj(phi[::-1]), np.zeros(1, dtype=complex)])
        phi = zphi - np.conj(a[k]) * star
    return PolyPair(phi=phi, phi_star=np.conj(phi[::-1]))


# ---------------------------------------------------------------------------
# eigenangles by winding-guided bisection


def _ratio_rows(alphas, theta):
    """w(e^{i theta}) = z Phi_{n-1} / (conj(alpha_{n-1}) Phi*_{n-1}) row-wise.

    ``alphas`` is (B, n), ``theta`` real of shape (B, G); the ratio is
    unimodular for unimodular final coefficients, and its lifted phase is
    strictly increasing with total winding 2 pi n (a Blaschke product of
    degree n: all zeros of Phi_{n-1} lie inside the disk).
    """
    z = np.exp(1j * theta)
    phi = np.ones_like(z)
    star = np.ones_like(z)
    n = alphas.shape[1]
    for k in range(n - 1):
        a = alphas[:, k][:, None]
        zphi = z * phi
        phi, star = zphi - np.conj(a) * star, star - a * zphi
    return z * phi / (np.conj(alphas[:, -1][:, None]) * star)


def _real_form_rows(alphas, theta):
    """The twisted boundary value g(theta) whose zeros are the eigenangles.

    The terminal polynomial has all n roots on the circle, so it is
    self-inversive (its reversed conjugate is -alpha_{n-1} times itself)
    and e^{-i n theta / 2} Phi_n(e^{i theta}) runs along a fixed line in
    the complex plane; rotating that line onto the reals gives a smooth
    band-limited real function with a simple sign change at every root --
    in contrast to the unimodular ratio w, whose phase rises by 2 pi in
    bursts as narrow as the distances of the Phi_{n-1} zeros to the
    circle.  Note g is 2 pi-antiperiodic when n is odd.
    """
    z = np.exp(1j * theta)
    phi = np.ones_like(z)
    star = np.ones_like(z)
    n = alphas.shape[1]
    for k in range(n - 1):
        a = alphas[:, k][:, None]
        zphi = z * phi
        phi, star = zphi - np.conj(a) * star, star - a * zphi
    last = alphas[:, -1][:, None]
    phin = z * phi - np.conj(last) * star
    twist = np.exp(1j * (0.5 * np.angle(-last) - 0.5 * n * theta))
    return (twist * phin).real


def _bracket_rows(alphas, G):
    """Bracket the n sign changes of g on the offset G-point grid.

    Returns ``(ok, lo, hi)``; a row is ok exactly when the sign-change
    count over one period equals n.  That count is the winding number of
    the terminal polynomial (its lifted argument gains n theta / 2 from
    the twist and pi per sign flip, totalling 2 pi n iff there are n
    flips), so a deficit means two roots share a grid cell and the row
    needs a finer grid.
    """
    B, n = alphas.shape
    step = TWO_PI / G
    theta = (np.arange(G) + 0.5) * step
    g = _real_form_rows(alphas, np.broadcast_to(theta, (B, G)))
    sign = np.where(g >= 0, 1, -1)
    # close the loop: g at theta_0 + 2 pi carries the parity of n
    nxt = np.concatenate([sign[:, 1:], ((-1) ** n) * sign[:, :1]], axis=1)
    flip = sign != nxt
    count = flip.sum(axis=1)
    ok = count == n

    lo = np.zeros((B, n))
    hi = np.zeros((B, n))
    cum = np.cumsum(flip, axis=1)
    pos = cum - 1
    sel = flip & (pos < n)
    rows, cols = np.nonzero(sel)
    slots = pos[rows, cols]
    lo[rows, slots] = theta[cols]
    hi[rows, slots] = theta[cols] + step
    return ok, lo, hi


def eigenangles_batch(alphas, tol: float = 1e-6) -> np.ndarray:
    """Sorted eigenangle rows in [0, 2 pi) for a (B, n) coefficient array."""
    alphas = np.asarray(alphas, dtype=complex)
    if alphas.ndim != 2:
        raise ValueError("need a (draws, n) coefficient array")
    if np.any(np.abs(np.abs(alphas[:, -1]) - 1.0) > 1e-9):
        raise ValueError("final coefficients must be unimodular")
    B, n = alphas.shape

    lo = np.empty((B, n))
    hi = np.empty((B, n))
    done = np.zeros(B, dtype=bool)
    G = _GRID_FACTOR * n
    for _ in range(_MAX_REFINE + 1):
        act = np.nonzero(~done)[0]
        if act.size == 0:
            break
        ok, lo_a, hi_a = _bracket_rows(alphas[act], G)
        hit = act[ok]
        lo[hit] = lo_a[ok]
        hi[hit] = hi_a[ok]
        done[hit] = True
        G *= 2
    if not done.all():
        raise NumericalFailure(
            "root count does not match the winding number after "
            f"{_MAX_REFINE} refinements ({int((~done).sum())} rows left)")

    # bisection on the sign of g within each one-cell bracket
    slo = np.where(_real_form_rows(alphas, lo) >= 0, 1.0, -1.0)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        same = _real_form_rows(alphas, mid) * slo >= 0
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    ang = 0.5 * (lo + hi)

    # verify every root against the original parallelism criterion w = 1
    defect = np.abs(_ratio_rows(alphas, ang) - 1.0)
    if np.max(defect) > tol:
        raise NumericalFailure(
            f"root defect {np.max(defect):.3e} exceeds tol {tol:.3e}")
    return np.sort(np.mod(ang, TWO_PI), axis=1)


def eigenangles(alpha, tol: float = 1e-6) -> np.ndarray:
    """The n spectrum points of a coefficient vector, as sorted angles.

    Roots of the terminal polynomial on the unit circle, located by
    winding-guided bisection: a uniform grid of 8 points per root counts
    the winding through the sign changes of the real form g, doubling
    until the count matches n, and each one-cell bracket is bisected.
    Every root is then verified against the parallelism criterion
    |w - 1| <= tol with w = z Phi_{n-1} / (conj(alpha_{n-1}) Phi*_{n-1});
    a count/winding mismatch raises :class:`NumericalFailure`.  Roots
    carrying extremely small spectral weight are intrinsically
    ill-conditioned for the w-criterion (the parallelism defect grows
    like the reciprocal weight times the angle roundoff), which bounds
    how small ``tol`` can usefully be.
    """
    a = _coeff_array(alpha)
    return eigenangles_batch(a[None, :], tol=tol)[0]


# ---------------------------------------------------------------------------
# b-coordinates


@dataclass
class BPath:
    """The disk walk b_0..b_{n-1} equivalent to a coefficient vector,
    plus the boundary datum b_* carrying the final (unimodular)
    coefficient."""

    b: np.ndarray
    b_star: complex

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=complex)
        self.b_star = complex(self.b_star)

    @property
    def n(self) -> int:
        return self.b.size

    def check(self):
        if self.b.ndim != 1 or self.b.size == 0:
            raise ValueError("need a nonempty walk")
        if abs(self.b[0]) > 1e-12:
            raise ValueError("walks start at the origin")
        if np.any(np.abs(self.b) >= 1.0):
            raise ValueError("walk left the open unit disk")
        if not np.isfinite(self.b_star):
            raise ValueError("boundary datum must be finite")
        return True


def _inv_step(a_k: complex) -> np.ndarray:
    # inverse one-step matrix, up to a positive scalar
    return np.array([[1.0, np.conj(a_k)], [a_k, 1.0]], dtype=complex)


def b_path(alpha) -> BPath:
    """Map coefficients to the equivalent disk walk.

    b_k is the projective image of (0, 1) under the product of the first k
    inverse one-step matrices (so b_0 = 0), and b_* the image of the
    terminal datum (conj(alpha_{n-1}), 1) under the first n - 1 of them.
    Raises :class:`BoundaryDegeneracy` if a coefficient modulus reaches 1
    early or the projective chart degenerates.
    """
    a = _coeff_array(alpha)
    n = a.size
    if np.any(np.abs(a[:-1]) >= 1.0 - 1e-12):
        raise BoundaryDegeneracy("interior coefficient modulus reached 1")
    M = np.eye(2, dtype=complex)
    walk = np.zeros(n, dtype=complex)
    for k in range(n - 1):
        M = M @ _inv_step(a[k])
        M /= np.max(np.abs(M))
        if abs(M[1, 1]) < 1e-300:
            raise BoundaryDegeneracy("projective denominator vanished")
        bk = M[0, 1] / M[1, 1]
        if abs(bk) >= 1.0:
            raise BoundaryDegeneracy("walk point reached the unit circle")
        walk[k + 1] = bk
    datum = np.conj(a[-1])
    den = M[1, 0] * datum + M[1, 1]
    if abs(den) < 1e-300:
        raise BoundaryDegeneracy("boundary datum chart degenerated")
    return BPath(b=walk, b_star=(M[0, 0] * datum + M[0, 1]) / den)


def verblunsky_from_path(path: BPath) -> VerblunskyCoeffs:
    """Invert :func:`b_path`: recover the coefficients from the walk.

    Each conj(alpha_k) is the preimage of the next walk point (of b_* for
    the last index) under the running product, peeled off by the inverse
    Möbius action; the running product is then extended by the recovered
    step and the recursion continues.
    """
    path.check()
    b = path.b
    n = b.size
    M = np.eye(2, dtype=complex)
    alphas = np.empty(n, dtype=complex)
    for k in range(n):
        target = b[k + 1] if k < n - 1 else path.b_star
        den = -M[1, 0] * target + M[0, 0]
        if abs(den) < 1e-300:
            raise BoundaryDegeneracy("inverse chart degenerated")
        w = (M[1, 1] * target - M[0, 1]) / den
        if k == n - 1:
            if abs(abs(w) - 1.0) > 1e-6:
                raise BoundaryDegeneracy(
                    "boundary datum did not return a unimodular coefficient")
            w /= abs(w)
        elif abs(w) >= 1.0:
            raise BoundaryDegeneracy("recovered coefficient left the disk")
        alphas[k] = np.conj(w)
        M = M @ _inv_step(alphas[k])
        M /= np.max(np.abs(M))
    return VerblunskyCoeffs(alpha=alphas)


# ---------------------------------------------------------------------------
# the Dirac boundary-value problem


def interval_propagator(s, b):
    """Closed-form cell propagator of the Dirac evolution.

    On a cell where the walk value is the constant ``b``, the evolution is
    the rotation diag(e^{is}, e^{-is}) conjugated by the boost
    X = (1 - |b|^2)^{-1/2} [[1, b], [conj(b), 1]]:

        P(s, b) = (1/(1-|b|^2)) [[e^{is} - |b|^2 e^{-is}, -2 i b sin s],
                                 [2 i conj(b) sin s, e^{-is} - |b|^2 e^{is}]]

    with det P = 1.  ``s`` may be an array; the result has shape
    ``shape(s) + (2, 2)``.
    """
    s = np.asarray(s, dtype=float)
    b = complex(b)
    r2 = abs(b) ** 2
    if r2 >= 1.0:
        raise BoundaryDegeneracy("propagator needs |b| < 1")
    e = np.exp(1j * s)
    sn = np.sin(s)
    out = np.empty(s.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = e - r2 / e
    out[..., 0, 1] = -2j * b * sn
    out[..., 1, 0] = 2j * np.conj(b) * sn
    out[..., 1, 1] = 1.0 / e - r2 * e
    out /= 1.0 - r2
    return out


def dirac_spectrum_check(path: BPath, n: int, angles, tol: float = 1e-6):
    """Verify candidate angles against the Dirac boundary-value problem.

    The walk defines a piecewise-constant canonical system on [0, 1] with n
    cells; an angle theta is in the spectrum iff the solution started from
    (1, 1) at the left end comes out parallel to the boundary datum
    (b_*, 1)-direction at the right end (the spectral parameter of the
    system is lam = n theta, with eigenvalue group lam/2 + pi n Z, so
    shifting theta by 2 pi changes nothing).

    Two independent routes are integrated side by side: the closed-form
    cell propagators of :func:`interval_propagator`, and the literal
    transfer product X_k diag(e^{i theta}, 1) X_k^{-1} -- related by the
    accumulated scalar phase e^{i k theta / 2}, an agreement that is
    checked to 1e-8 at every cell boundary before any defect is trusted.

    Returns a JSON-ready report dict; ``report["passed"]`` is True when
    every parallelism defect is at most ``tol``.
    """
    path.check()
    if n != path.n:
        raise ValueError("walk length does not match n")
    th = np.atleast_1d(np.asarray(angles, dtype=float))
    m = th.size
    s = 0.5 * th
    z = np.exp(1j * th)

    gam = np.ones((m, 2), dtype=complex)
    gam2 = np.ones((m, 2), dtype=complex)
    agreement = 0.0
    phase = np.ones(m, dtype=complex)
    half = np.exp(-1j * s)
    for k in range(n):
        bk = complex(path.b[k])
        P = interval_propagator(s, bk)
        gam = np.einsum("tij,tj->ti", P, gam)

        c = 1.0 / math.sqrt(1.0 - abs(bk) ** 2)
        X = c * np.array([[1.0, bk], [np.conj(bk), 1.0]], dtype=complex)
        Xi = c * np.array([[1.0, -bk], [-np.conj(bk), 1.0]], dtype=complex)
        v = gam2 @ Xi.T
        v[:, 0] *= z
        gam2 = v @ X.T

        phase = phase * half
        norm = np.linalg.norm(gam, axis=1)
        diff = np.linalg.norm(gam - phase[:, None] * gam2, axis=1)
        agreement = max(agreement, float(np.max(diff / norm)))
        gam /= norm[:, None]
        gam2 /= norm[:, None]

    norm = np.linalg.norm(gam, axis=1)
    defects = np.abs(gam[:, 0] - path.b_star * gam[:, 1]) / norm
    worst = int(np.argmax(defects))
    return {
        "n": n,
        "tol": float(tol),
        "angles": [float(t) for t in th],
        "defects": [float(d) for d in defects],
        "max_defect": float(defects[worst]),
        "worst_index": worst,
        "route_agreement": agreement,
        "passed": bool(defects[worst] <= tol and agreement <= 1e-8),
    }


# ---------------------------------------------------------------------------
# walk-on-Brownian-path coupling


@dataclass
class CoupledWalk:
    """A disk walk read off a Brownian path at hyperbolic hitting times.

    ``b[k]`` is the path position at ``times[k]``; ``excursions[k]`` the
    hyperbolic distance actually reached when the k-th radius was consumed
    (the sup of dist(B(t), b_k) over the excursion, attained at the hit).
    """

    b: np.ndarray
    times: np.ndarray
    excursions: np.ndarray

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=complex)
        self.times = np.asarray(self.times, dtype=float)
        self.excursions = np.asarray(self.excursions, dtype=float)

    @property
    def n(self) -> int:
        return self.b.size


def circular_radii(n: int, beta: float, stream: RngStream) -> np.ndarray:
    """Hyperbolic step radii d_k = 2 artanh |alpha_k| of a circular-beta
    draw, for the n - 1 interior coefficients (the unimodular final one
    has no finite radius)."""
    draw = sample_circular_beta(n, beta, stream)
    return 2.0 * np.arctanh(np.abs(draw.alpha[:-1]))


def kn_coupling(bm: DiskPath, radii, stream: RngStream | None = None) -> CoupledWalk:
    """Couple a disk walk to a stored Brownian path.

    The next vertex is the path position at the first grid time whose
    hyperbolic distance from the current vertex reaches the next radius,
    so walk points lie on the path exactly by construction.  ``stream`` is
    accepted for signature uniformity but unused: the stored path carries
    all the randomness, which is the point of the coupling.  Raises
    :class:`HorizonError` if the path ends first.
    """
    del stream
    bm.check()
    radii = np.asarray(radii, dtype=float)
    if np.any(radii < 0):
        raise ValueError("radii must be nonnegative")
    pts = bm.points
    verts = np.empty(radii.size + 1, dtype=complex)
    times = np.empty(radii.size + 1, dtype=float)
    excur = np.zeros(radii.size, dtype=float)
    verts[0] = pts[0]
    times[0] = bm.times[0]
    j = 0
    for k, d in enumerate(radii):
        cur = verts[k]
        hit = -1
        i = j
        block = 256          # grows while the scan keeps missing
        while i < pts.size:
            stop = min(i + block, pts.size)
            dist = hyperbolic_distance(pts[i:stop], cur)
            reach = np.nonzero(dist >= d)[0]
            if reach.size:
                hit = i + int(reach[0])
                excur[k] = float(dist[reach[0]])
                break
            i = stop
            block = min(2 * block, 1 << 16)
        if hit < 0:
            raise HorizonError(
                f"path exhausted at radius {k} of {radii.size}")
        j = hit
        verts[k + 1] = pts[hit]
        times[k + 1] = bm.times[hit]
    return CoupledWalk(b=verts, times=times, excursions=excur)
