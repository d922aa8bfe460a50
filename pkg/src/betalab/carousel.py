"""Bulk scaling limits via hyperbolic Brownian motion and its phase SDE.

The bulk point process at inverse temperature beta is encoded by a rotating
boundary phase driven by Brownian motion on the Poincare disk.  After
reduction, everything we measure comes from the one-dimensional phase SDE

    d alpha = lambda * f(t) dt + 2 sin(alpha/2) dW,   alpha(0) = 0,

whose terminal winding number alpha(infinity)/(2 pi) counts the points in a
window of size lambda.  Two drift profiles appear:

* ``sine_beta(beta)``: f(t) = (beta/4) exp(-beta t / 4) on [0, infinity).
  The total drift budget is lambda, and as the budget runs out the phase
  locks onto a multiple of 2 pi, which is the count.
* ``homogeneous(tau)``: f = 1/tau on [0, tau], the critical one-dimensional
  Schrodinger bulk.  The phase is read at the endpoint.

On top of the phase engine sit gap probabilities, the count CLT, level
repulsion for the Schrodinger process, and eigenvector shape statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import ensembles, tridiag
from .rng import RngStream
from .stats import linear_fit, wilson_interval

TWO_PI = 2.0 * math.pi

# Step-size cap for the phase integrator.  Gaussian increments are clipped
# to +-8, so each per-step noise factor s = sqrt(h) * xi obeys |s| <= 1
# once h <= 1/64, and the update x -> x + 2 sin(x/2) s is monotone in x
# (derivative 1 + s cos(x/2) >= 0).  Monotonicity is what makes the
# shared-noise coupling in lambda exact, keeps alpha >= 0, and prevents the
# phase from ever crossing back below a passed multiple of 2 pi.
MAX_DT = 1.0 / 64.0
_XI_CLIP = 8.0
_THETA = 0.1  # target drift move per step, radians
_BUDGET_TOL = 0.01 * TWO_PI  # stop chasing drift once less than this remains
_LOCK_TOL = 1e-7  # distance to a 2 pi multiple at which a path retires
_RELAX_BLOCK = 4.0  # time units integrated between retirement sweeps
_MAX_RELAX = 4096.0  # give up (LockingFailure) beyond this much relaxation


class LockingFailure(RuntimeError):
    """Phase failed to settle onto a multiple of 2 pi within the (repeatedly
    doubled) relaxation horizon."""


class FitFailure(RuntimeError):
    """Profile too degenerate for a decay-rate fit."""


# ---------------------------------------------------------------------------
# drivers and domain types


@dataclass(frozen=True)
class Driver:
    """Drift profile lambda * f(t) for the phase SDE.

    ``kind`` is "sine" (f = (beta/4) e^{-beta t/4}, infinite horizon,
    locking read-out) or "homogeneous" (f = 1/tau on [0, tau], endpoint
    read-out).  Construct through :func:`sine_beta` / :func:`homogeneous`.
    """

    kind: str
    beta: float = 0.0
    tau: float = 0.0

    def f(self, t):
        """Drift profile f(t) (vectorized)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "sine":
            return (self.beta / 4.0) * np.exp(-self.beta * t / 4.0)
        return np.where(t <= self.tau, 1.0 / self.tau, 0.0)

    def cumulative(self, t):
        """F(t) = integral of f over [0, t]; total budget F(inf) = 1."""
        t = np.asarray(t, dtype=float)
        if self.kind == "sine":
            return -np.expm1(-self.beta * t / 4.0)
        return np.clip(t, 0.0, self.tau) / self.tau

    def drift_horizon(self, lam: float) -> float:
        """Time after which the remaining drift budget lam*(1 - F) falls
        below the stopping tolerance (tau itself for the finite driver)."""
        if self.kind == "homogeneous":
            return self.tau
        if lam <= _BUDGET_TOL:
            return 0.0
        return (4.0 / self.beta) * math.log(lam / _BUDGET_TOL)

    @property
    def locks(self) -> bool:
        return self.kind == "sine"

    def label(self) -> str:
        if self.kind == "sine":
            return f"sine_beta({self.beta:g})"
        return f"homogeneous({self.tau:g})"


def sine_beta(beta: float) -> Driver:
    """Bulk driver at inverse temperature beta."""
    if not beta > 0:
        raise ValueError("need beta > 0")
    return Driver("sine", beta=float(beta))


def homogeneous(tau: float = 1.0) -> Driver:
    """Time-homogeneous driver on [0, tau] (critical Schrodinger bulk)."""
    if not tau > 0:
        raise ValueError("need tau > 0")
    return Driver("homogeneous", tau=float(tau))


@dataclass
class DiskPath:
    """A sampled trajectory in the open unit disk."""

    times: np.ndarray
    points: np.ndarray
    mode: Driver | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.points = np.asarray(self.points, dtype=complex)

    def check(self):
        """Invariants: strictly increasing times, |z| < 1 throughout."""
        if self.times.shape != self.points.shape:
            raise ValueError("times/points length mismatch")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("disk path times must increase")
        if np.any(np.abs(self.points) >= 1.0):
            raise ValueError("disk path left the open unit disk")
        return True


@dataclass
class PhaseTrajectory:
    """One recorded solution of the phase SDE.

    ``alpha`` is the continuous lifted phase.  Trajectories start at 0, and
    once the phase has passed a multiple of 2 pi it never crosses back
    below it (exactly, in this integrator).
    """

    times: np.ndarray
    alpha: np.ndarray
    lam: float
    driver: Driver

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.alpha = np.asarray(self.alpha, dtype=float)

    def check(self):
        if self.times.shape != self.alpha.shape:
            raise ValueError("times/alpha length mismatch")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("phase times must increase")
        if abs(self.alpha[0]) > 1e-12:
            raise ValueError("phase must start at 0")
        # passed levels: largest multiple of 2 pi below the running maximum
        passed = np.floor(np.maximum.accumulate(self.alpha) / TWO_PI)
        if np.any(self.alpha < TWO_PI * passed - 1e-9):
            raise ValueError("phase crossed back below a passed 2 pi level")
        return True


@dataclass(frozen=True)
class CountSample:
    """One Monte Carlo draw of a window count.

    ``count`` is the nearest integer to alpha/(2 pi) at read-out and
    ``residual`` the distance (radians) from alpha to that multiple.  For
    the locking driver the residual is below 1e-6 by construction; the
    homogeneous driver reads the phase mid-flight at t = tau, where the
    residual is simply whatever the endpoint left.
    """

    lam: float
    count: int
    residual: float

    def check(self):
        if self.count < 0:
            raise ValueError("counts are nonnegative")
        if self.residual < 0:
            raise ValueError("residual is a distance")
        return True


# ---------------------------------------------------------------------------
# Brownian motion on the Poincare disk


def _disk_speed(mode: Driver, t: float) -> float:
    # coefficient c(t) multiplying the hyperbolic Laplacian; the sine mode
    # accelerates like 1/(1-t) so that boundary data at t -> 1 carries the
    # bulk limit, the homogeneous mode runs at constant rate 1/4
    if mode.kind == "sine":
        return 2.0 / (mode.beta * (1.0 - t))
    return 0.25


def _disk_grid(mode: Driver, horizon: float, dt: float) -> np.ndarray:
    if not dt > 0:
        raise ValueError("need dt > 0")
    if mode.kind == "sine":
        if not 0.0 < horizon < 1.0:
            raise ValueError("sine-mode horizon must lie in (0, 1)")
        # geometric refinement: dt_k = dt * (1 - t_k), so each step covers a
        # constant amount of intrinsic time as the speed blows up
        ts = [0.0]
        t = 0.0
        while t < horizon - 1e-15:
            t = min(horizon, t + dt * (1.0 - t))
            ts.append(t)
        return np.asarray(ts)
    if not horizon > 0:
        raise ValueError("need horizon > 0")
    n = int(math.ceil(horizon / dt - 1e-9))
    ts = np.linspace(0.0, n * dt, n + 1)
    ts[-1] = horizon
    return ts


def _disk_march(mode, times, stream, paths, start):
    gen = stream.generator()
    z = np.full(paths, complex(start))
    out = np.empty((times.size, paths), dtype=complex)
    out[0] = z
    for k in range(times.size - 1):
        t = times[k]
        h = times[k + 1] - t
        c = _disk_speed(mode, t)
        sig = (1.0 - np.abs(z) ** 2) * math.sqrt(c / 2.0)
        xi = gen.standard_normal((2, paths))
        z = z + sig * math.sqrt(h) * (xi[0] + 1j * xi[1])
        r = np.abs(z)
        over = r >= 1.0
        if np.any(over):
            # an overshooting Euler step is pulled back by inversion in the
            # unit circle (identity on the boundary, O(eps) correction)
            z[over] = z[over] / r[over] ** 2
            r2 = np.abs(z[over])
            bad = r2 >= 1.0
            if np.any(bad):
                tight = z[over]
                tight[bad] *= (1.0 - 1e-12) / r2[bad]
                z[over] = tight
        out[k + 1] = z
    return out


def hyperbolic_bm(mode: Driver, horizon: float, dt: float,
                  stream: RngStream, start: complex = 0j) -> DiskPath:
    """Euler path of Brownian motion on the Poincare disk.

    ``mode`` fixes the speed profile: ``sine_beta(beta)`` runs the
    time-inhomogeneous motion on [0, 1) whose generator blows up like
    1/(1-t) (the path then converges to a boundary point), ``homogeneous``
    the constant-speed motion with radial part dq = dB/sqrt(2) +
    coth(q)/4 dt.  Steps that overshoot the disk are projected back inside.
    """
    if abs(start) >= 1.0:
        raise ValueError("start must lie inside the open unit disk")
    times = _disk_grid(mode, horizon, dt)
    Z = _disk_march(mode, times, stream, 1, start)
    return DiskPath(times=times, points=Z[:, 0], mode=mode)


def hyperbolic_bm_batch(mode: Driver, horizon: float, dt: float,
                        stream: RngStream, paths: int, start: complex = 0j):
    """Batch of disk Brownian paths on a common grid.

    Returns ``(times, Z)`` with ``Z[i, k]`` the position of path ``i`` at
    ``times[k]``.
    """
    if paths < 1:
        raise ValueError("need paths >= 1")
    if abs(start) >= 1.0:
        raise ValueError("start must lie inside the open unit disk")
    times = _disk_grid(mode, horizon, dt)
    Z = _disk_march(mode, times, stream, paths, start)
    return times, Z.T.copy()


def hyperbolic_distance(u, v=0j):
    """Poincare-disk distance 2 artanh |(u - v) / (1 - conj(v) u)|."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    w = np.abs((u - v) / (1.0 - np.conj(v) * u))
    return 2.0 * np.arctanh(w)


# ---------------------------------------------------------------------------
# the phase SDE engine


def _check_dt(dt: float) -> float:
    if not 0 < dt <= MAX_DT:
        raise ValueError(
            f"phase integrator needs 0 < dt <= 1/64, got {dt}; coarser "
            "steps break the monotone-update guarantee")
    return float(dt)


def _phase_grid(lam: float, driver: Driver, dt: float, t_end: float) -> np.ndarray:
    """Deterministic step schedule on [0, t_end].

    Steps are capped both by ``dt`` and by the drift: h <= theta/(lam f(t)),
    so each step moves the phase by at most ~theta radians of drift.  f is
    non-increasing, so evaluating it at the left endpoint is conservative.
    """
    ts = [0.0]
    t = 0.0
    while t < t_end - 1e-12:
        rate = lam * float(driver.f(t))
        h = dt if rate * dt <= _THETA else _THETA / rate
        t = min(t_end, t + h)
        ts.append(t)
    return np.asarray(ts)


def _march_block(alpha, lam_col, dF, sqh, xi):
    """Advance the (L, A) phase array through len(dF) shared-noise steps."""
    for j in range(dF.size):
        alpha += lam_col * dF[j]
        alpha += (2.0 * sqh[j]) * xi[j] * np.sin(0.5 * alpha)
    return alpha


def _phase_march(lams, driver, times, gen, paths, alpha0=0.0, record=None,
                 alpha=None, block=256):
    """Euler phase update over a fixed grid, shared noise across the
    lambda axis (this is what makes the coupling in lambda exact)."""
    lam_col = np.asarray(lams, dtype=float).reshape(-1, 1)
    if alpha is None:
        alpha = np.full((lam_col.size, paths), float(alpha0))
    F = driver.cumulative(times)
    dF = np.diff(F)
    sqh = np.sqrt(np.diff(times))
    nsteps = dF.size
    for k0 in range(0, nsteps, block):
        k1 = min(k0 + block, nsteps)
        xi = gen.standard_normal((k1 - k0, paths))
        np.clip(xi, -_XI_CLIP, _XI_CLIP, out=xi)
        if record is None:
            _march_block(alpha, lam_col, dF[k0:k1], sqh[k0:k1], xi)
        else:
            for j in range(k0, k1):
                alpha += lam_col * dF[j]
                alpha += (2.0 * sqh[j]) * xi[j - k0] * np.sin(0.5 * alpha)
                record.append(alpha[0, 0])
    return alpha


def _relax_to_lock(lams, driver, dt, gen, alpha, t_start):
    """Drift is spent; integrate noise until every path sits within
    _LOCK_TOL of a 2 pi multiple, retiring paths as they get there.

    Returns (counts, residuals) with shape (L, paths).  The relaxation
    horizon starts at one block and doubles until _MAX_RELAX; paths that
    still have not locked raise LockingFailure.
    """
    L, paths = alpha.shape
    counts = np.empty((L, paths), dtype=np.int64)
    resid = np.empty((L, paths))
    active = np.arange(paths)
    t = t_start
    nb = int(round(_RELAX_BLOCK / dt))
    while active.size:
        if t - t_start > _MAX_RELAX:
            raise LockingFailure(
                f"{active.size} path(s) failed to lock onto a 2 pi multiple "
                f"after {t - t_start:.0f} time units of relaxation")
        times = t + dt * np.arange(nb + 1)
        alpha = _phase_march(lams, driver, times, gen, active.size,
                             alpha=alpha)
        t = times[-1]
        delta = alpha - TWO_PI * np.round(alpha / TWO_PI)
        done = np.all(np.abs(delta) <= _LOCK_TOL, axis=0)
        if np.any(done):
            cols = active[done]
            counts[:, cols] = np.round(alpha[:, done] / TWO_PI).astype(np.int64)
            resid[:, cols] = np.abs(delta[:, done])
            keep = ~done
            alpha = np.ascontiguousarray(alpha[:, keep])
            active = active[keep]
    return counts, resid


def _counts_chunk(lams, driver, dt, stream, paths):
    gen = stream.generator()
    lam_max = float(np.max(lams))
    horizon = driver.drift_horizon(lam_max)
    times = _phase_grid(lam_max, driver, dt, horizon)
    alpha = _phase_march(lams, driver, times, gen, paths)
    if driver.locks:
        return _relax_to_lock(lams, driver, dt, gen, alpha, horizon)
    # endpoint read-out: nearest multiple of 2 pi at t = tau
    counts = np.round(alpha / TWO_PI).astype(np.int64)
    resid = np.abs(alpha - TWO_PI * counts)
    return counts, resid


def _batch_counts(lams, driver, dt, stream, paths, chunk_size=8192):
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    if np.any(lams < 0):
        raise ValueError("window sizes lambda must be nonnegative")
    dt = _check_dt(dt)
    if paths < 1:
        raise ValueError("need paths >= 1")
    counts = np.empty((lams.size, paths), dtype=np.int64)
    resid = np.empty((lams.size, paths))
    for ci, lo in enumerate(range(0, paths, chunk_size)):
        hi = min(lo + chunk_size, paths)
        c, r = _counts_chunk(lams, driver, dt, stream.split(ci), hi - lo)
        counts[:, lo:hi] = c
        resid[:, lo:hi] = r
    return counts, resid


def carousel_count(lam: float, driver: Driver, dt: float,
                   stream: RngStream) -> CountSample:
    """One draw of the window count alpha(infinity)/(2 pi).

    Integrates the phase SDE until the drift budget is spent and (for the
    locking driver) the phase has settled onto a multiple of 2 pi; the
    homogeneous driver is read at its endpoint ``tau``.
    """
    counts, resid = _batch_counts(lam, driver, dt, stream, 1)
    return CountSample(lam=float(lam), count=int(counts[0, 0]),
                       residual=float(resid[0, 0]))


def carousel_count_batch(lam, driver: Driver, dt: float, stream: RngStream,
                         paths: int, chunk_size: int = 8192) -> np.ndarray:
    """Monte Carlo batch of window counts.

    ``lam`` may be a scalar (returns shape ``(paths,)``) or a sequence
    (returns ``(len(lam), paths)``).  A sequence is integrated on one
    shared grid with one shared noise realization per path, so counts are
    exactly non-decreasing along the lambda axis.
    """
    scalar = np.isscalar(lam)
    counts, _ = _batch_counts(lam, driver, dt, stream, paths,
                              chunk_size=chunk_size)
    return counts[0] if scalar else counts


def carousel_phase(lam: float, driver: Driver, dt: float, stream: RngStream,
                   t_end: float | None = None,
                   alpha0: float = 0.0) -> PhaseTrajectory:
    """A single recorded phase trajectory (for diagnostics and invariant
    checks; the Monte Carlo read-outs above do not store paths)."""
    dt = _check_dt(dt)
    if lam < 0:
        raise ValueError("window sizes lambda must be nonnegative")
    if t_end is None:
        t_end = driver.drift_horizon(lam)
        t_end += _RELAX_BLOCK * 8 if driver.locks else 0.0
    times = _phase_grid(lam, driver, dt, t_end)
    record = [float(alpha0)]
    _phase_march([lam], driver, times, stream.generator(), 1, alpha0=alpha0,
                 record=record)
    return PhaseTrajectory(times=times, alpha=np.asarray(record),
                           lam=float(lam), driver=driver)


def phase_sample(lam: float, driver: Driver, t_end: float, paths: int,
                 dt: float, stream: RngStream, alpha0: float = 0.0,
                 chunk_size: int = 8192) -> np.ndarray:
    """Endpoint values alpha(t_end) for a Monte Carlo batch (no locking)."""
    dt = _check_dt(dt)
    if lam < 0:
        raise ValueError("window sizes lambda must be nonnegative")
    if paths < 1:
        raise ValueError("need paths >= 1")
    times = _phase_grid(lam, driver, dt, t_end)
    out = np.empty(paths)
    for ci, lo in enumerate(range(0, paths, chunk_size)):
        hi = min(lo + chunk_size, paths)
        gen = stream.split(ci).generator()
        alpha = _phase_march([lam], driver, times, gen, hi - lo,
                             alpha0=alpha0)
        out[lo:hi] = alpha[0]
    return out


# ---------------------------------------------------------------------------
# derived statistics


def gap_probability(beta: float, lam: float, k: int, paths: int,
                    stream: RngStream, dt: float = MAX_DT) -> dict:
    """Monte Carlo P(at most k points in a window of size lambda), with the
    closed-form asymptotics alongside.

    ``theory_leading`` carries the exponent -beta lambda^2/64 +
    (beta/8 - 1/4) lambda, the polynomial power (1/4)(beta/2 + 2/beta - 3),
    and the general-driver upper bound exp(-lambda^2 beta/64).
    """
    if k < 0:
        raise ValueError("need k >= 0")
    counts = carousel_count_batch(lam, sine_beta(beta), dt, stream, paths)
    hits = int(np.sum(counts <= k))
    ci = wilson_interval(hits, paths)
    gamma = 0.25 * (beta / 2.0 + 2.0 / beta - 3.0)
    exponent = -beta * lam ** 2 / 64.0 + (beta / 8.0 - 0.25) * lam
    return {
        "beta": beta,
        "lam": lam,
        "k": k,
        "paths": paths,
        "mc_estimate": hits / paths,
        "ci": ci,
        "theory_leading": {
            "exponent": exponent,
            "poly_power": gamma,
            "general_driver_bound": math.exp(-lam ** 2 * beta / 64.0),
        },
    }


def clt_statistic(beta: float, lam: float, reps: int, stream: RngStream,
                  dt: float = MAX_DT) -> np.ndarray:
    """Draws of the normalized count (N(lambda) - lambda/2pi)/sqrt(log
    lambda); for large windows these approach N(0, 2/(beta pi^2))."""
    if not lam > 1.0:
        raise ValueError("need lambda > 1 for the log normalization")
    counts = carousel_count_batch(lam, sine_beta(beta), dt, stream, reps)
    return (counts - lam / TWO_PI) / math.sqrt(math.log(lam))


def sch_statistics(tau: float, lam: float, eps: float, paths: int,
                   stream: RngStream, dt: float = MAX_DT) -> dict:
    """Counting and repulsion statistics of the critical Schrodinger bulk.

    Returns window counts on [0, lambda], the Monte Carlo estimate of
    P(at least 2 points in [0, eps]), and the closed-form repulsion bound
    4 exp(-(log(2 pi/eps) - tau - 1)^2 / tau) (reported as the vacuous 1.0
    when the squared expression would be negative).
    """
    if not eps > 0:
        raise ValueError("need eps > 0")
    driver = homogeneous(tau)
    counts = carousel_count_batch(lam, driver, dt, stream.split(0), paths)
    # two points in [0, eps] <=> the eps-window phase reaches 3 pi
    alpha_eps = phase_sample(eps, driver, tau, paths, dt, stream.split(1))
    hits = int(np.sum(alpha_eps >= 3.0 * math.pi))
    s = math.log(TWO_PI / eps) - tau - 1.0
    bound = 4.0 * math.exp(-s * s / tau) if s >= 0 else 1.0
    return {
        "tau": tau,
        "lam": lam,
        "eps": eps,
        "paths": paths,
        "counts": counts,
        "repulsion_mc": hits / paths,
        "repulsion_ci": wilson_interval(hits, paths),
        "repulsion_bound": min(bound, 1.0),
    }


def _profile_decay_rate(grid, profile, block=None, lags=(3, 10)):
    """Decay rate of an exponentially localized profile with Brownian
    log-fluctuations, estimated from the fluctuations themselves.

    The limit shape is exp(B(tau s) - tau |s|/2) around the peak: the log
    profile is a Brownian motion of variance rate tau plus a tent of slope
    -tau/2, so half the variance rate *is* the decay rate.  A least-squares
    slope of the tent alone would be swamped for slowly decaying profiles:
    conditioning on the peak inflates it by O(sqrt(tau/d)) at lag d.  The
    variance rate, in contrast, is estimable per draw: pool the mass into
    ~100 blocks (averaging out the fast sign oscillation), form the
    empirical variogram of the log block masses over a range of lags, and
    read off its slope.  The lag-zero oscillation residue lands in the
    variogram intercept and drops out.
    """
    n = grid.size
    m = block if block is not None else max(8, n // 100)
    nb = n // m
    if nb < 16:
        raise FitFailure("profile too short to pool into blocks")
    y = profile[:nb * m].reshape(nb, m).mean(axis=1)
    tb = grid[:nb * m].reshape(nb, m).mean(axis=1)
    good = y > 0
    t, logy = tb[good], np.log(y[good])
    dt = m / n
    ls, vs = [], []
    for j in range(lags[0], lags[1] + 1):
        if logy.size > j + 4:
            d = logy[j:] - logy[:-j]
            ls.append(j * dt)
            vs.append(float(np.mean(d * d)))
    if len(vs) < 5:
        raise FitFailure("profile too degenerate for a variogram fit")
    slope, _, _ = linear_fit(np.asarray(ls), np.asarray(vs))
    if not slope > 0:
        raise FitFailure("log-profile fluctuations have no positive "
                         "variance slope")
    return 0.5 * float(slope)


def eigenvector_profile(n: int, sigma: float, stream: RngStream,
                        omega_dist: str = "gaussian") -> dict:
    """Shape statistics for one uniformly chosen Schrodinger eigenvector.

    Samples the n x n critical Schrodinger matrix, picks an eigenvalue
    index uniformly, and reports the eigenvalue ``E_sample`` (arcsine
    distributed on [-2, 2] in the limit), the normalized profile
    psi^2(floor(tn)) on the rescaled axis t in [0, 1], the fitted
    exponential decay rate of the profile around its peak, and the
    predicted rate tau_E / 2.

    The shape scale is tau_E = 2 sigma^2 / (4 - E^2): the log profile
    performs a Brownian motion of variance rate tau_E on top of a tent of
    slope -tau_E/2 = -sigma^2/(4 - E^2), which is the weak-disorder
    (Thouless) amplitude Lyapunov exponent doubled, and the variance-to-
    drift ratio 2 of single-parameter scaling.  Both constants were
    verified against direct transfer-matrix simulations.
    """
    H = ensembles.sample_schrodinger(n, sigma, omega_dist, stream.split(0))
    k = int(stream.split(1).generator().integers(0, n))
    value = tridiag.eigenvalue_by_index(H.tridiagonal, k)
    pair = tridiag.eigenvector(H.tridiagonal, value)
    psi2 = pair.vector.astype(float) ** 2
    psi2 /= psi2.sum()
    grid = (np.arange(n) + 0.5) / n
    theory = sigma ** 2 / (4.0 - value ** 2) if value ** 2 < 4.0 \
        else math.nan
    return {
        "E_sample": float(value),
        "index": k,
        "grid": grid,
        "profile": psi2,
        "fitted_decay_rate": _profile_decay_rate(grid, psi2),
        "theory_rate": theory,
    }
