"""Deterministic special-function engine for the soft-edge laws.

Contents: the Airy function Ai and its zeros (own implementation: a
Maclaurin/Taylor march matched to asymptotic expansions), the
Hastings-McLeod solution of Painleve II, the Tracy-Widom beta=2
distribution F(t) built from it, and the rank-one-deformed edge law
F(t, w) obtained by integrating a 2x2 linear system in the boundary
parameter w.

Everything is deterministic; the Painleve solve happens once per
(t_min, t_plus) configuration and is cached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad, solve_ivp


class ShootingFailure(RuntimeError):
    """Backward Painleve II integration left the separatrix tube."""


# ---------------------------------------------------------------------------
# Airy function: Taylor march + asymptotic tails
#
# Strategy: on [T_LEFT, T_RIGHT] the pair (Ai, Ai') is propagated on a
# quarter-spaced grid by high-order local Taylor steps of y'' = t y,
# marching leftward from asymptotic data at T_RIGHT (the stable direction:
# the growing companion solution decays backward).  Point evaluation uses
# a local Taylor expansion from the nearest node.  Outside the table the
# standard asymptotic series take over on the right; the left end is far
# beyond every use here.

T_RIGHT = 12.0
T_LEFT = -100.0
_H = 0.25
_LD = np.longdouble

#: asymptotic coefficients u_k: u_0 = 1, u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / ((2k-1) 216 k)
_U_COEF = [1.0]
for _k in range(1, 42):
    _U_COEF.append(_U_COEF[-1] * (6 * _k - 5) * (6 * _k - 3) * (6 * _k - 1)
                   / ((2 * _k - 1) * 216.0 * _k))
_V_COEF = [1.0] + [-(6 * _k + 1) / (6 * _k - 1) * _U_COEF[_k]
                   for _k in range(1, 42)]


def _asym_pos(t):
    """(Ai, Ai') for t >= ~8 from the exponentially decaying expansions."""
    t = _LD(t)
    zeta = (_LD(2) / 3) * t ** _LD(1.5)
    s_ai = _LD(0)
    s_aip = _LD(0)
    term = _LD(1)
    for k in range(len(_U_COEF)):
        u_term = term * _LD(_U_COEF[k])
        v_term = term * _LD(_V_COEF[k])
        if abs(u_term) < 1e-22 and k > 3:
            break
        s_ai += (-1) ** k * u_term
        s_aip += (-1) ** k * v_term
        term /= zeta
    pref = np.exp(-zeta) / (2 * np.sqrt(_LD(np.pi)))
    ai = pref * t ** _LD(-0.25) * s_ai
    aip = -pref * t ** _LD(0.25) * s_aip
    return ai, aip


def _taylor_coeffs(t0, y, yp, order):
    """Taylor coefficients of the solution of y'' = t y around t0."""
    c = np.empty(order + 1, dtype=_LD)
    c[0] = y
    c[1] = yp
    t0 = _LD(t0)
    for m in range(order - 1):
        prev = c[m - 1] if m >= 1 else _LD(0)
        c[m + 2] = (t0 * c[m] + prev) / ((m + 1) * (m + 2))
    return c


def _taylor_eval(c, h):
    h = _LD(h)
    y = _LD(0)
    yp = _LD(0)
    for m in range(len(c) - 1, 0, -1):
        y = y * h + c[m]
        yp = yp * h + m * c[m]
    y = y * h + c[0]
    return y, yp


@lru_cache(maxsize=1)
def _airy_table():
    n_steps = int(round((T_RIGHT - T_LEFT) / _H))
    ts = T_RIGHT - _H * np.arange(n_steps + 1)
    ys = np.empty(n_steps + 1, dtype=_LD)
    yps = np.empty(n_steps + 1, dtype=_LD)
    ys[0], yps[0] = _asym_pos(T_RIGHT)
    for i in range(n_steps):
        c = _taylor_coeffs(ts[i], ys[i], yps[i], order=30)
        ys[i + 1], yps[i + 1] = _taylor_eval(c, -_H)
    return ts, ys, yps


def _ai_pair(t: float) -> tuple[float, float]:
    if t >= T_RIGHT - 1e-12:
        ai, aip = _asym_pos(t)
        return float(ai), float(aip)
    if t < T_LEFT:
        raise ValueError(f"Airy evaluation below supported range ({T_LEFT})")
    ts, ys, yps = _airy_table()
    idx = int(round((T_RIGHT - t) / _H))
    idx = min(max(idx, 0), ts.size - 1)
    c = _taylor_coeffs(ts[idx], ys[idx], yps[idx], order=20)
    y, yp = _taylor_eval(c, t - ts[idx])
    return float(y), float(yp)


def airy_ai(t):
    """Airy function Ai(t); accepts scalars or arrays."""
    if np.ndim(t) == 0:
        return _ai_pair(float(t))[0]
    t = np.asarray(t, dtype=float)
    return np.array([_ai_pair(v)[0] for v in t.ravel()]).reshape(t.shape)


def airy_ai_prime(t):
    """Derivative Ai'(t); accepts scalars or arrays."""
    if np.ndim(t) == 0:
        return _ai_pair(float(t))[1]
    t = np.asarray(t, dtype=float)
    return np.array([_ai_pair(v)[1] for v in t.ravel()]).reshape(t.shape)


def airy_zero(k: int) -> float:
    """k-th zero of Ai on the negative axis (k >= 1), to ~1e-12.

    Starts from the McMahon expansion and polishes with Newton steps on
    our own Ai."""
    if k < 1 or int(k) != k:
        raise ValueError("zero index must be a positive integer")
    z = 3.0 * math.pi * (4 * k - 1) / 8.0
    zm2 = z ** -2
    t = -z ** (2.0 / 3.0) * (1.0 + zm2 * (5.0 / 48.0
                                          + zm2 * (-5.0 / 36.0
                                                   + zm2 * 77125.0 / 82944.0)))
    if t < T_LEFT + 1.0:
        # beyond the tabulated range the expansion is already far below
        # double rounding (its error falls off like z^-16/3)
        return t
    for _ in range(6):
        ai, aip = _ai_pair(t)
        step = ai / aip
        t -= step
        if abs(step) < 1e-14 * max(1.0, abs(t)):
            break
    return t


def airy_zeros(k_max: int) -> np.ndarray:
    """First k_max zeros of Ai, ascending in magnitude (all negative)."""
    return np.array([airy_zero(k) for k in range(1, k_max + 1)])


def _upper_gamma_half_seq(zeta: float, k_max: int) -> list[float]:
    """Gamma(1/2 - k, zeta) for k = 0..k_max by downward recursion from
    Gamma(1/2, zeta) = sqrt(pi) erfc(sqrt(zeta))."""
    vals = [math.sqrt(math.pi) * math.erfc(math.sqrt(zeta))]
    for k in range(1, k_max + 1):
        a = 0.5 - k  # Gamma(a, z) = (Gamma(a+1, z) - z^a e^{-z}) / a
        vals.append((vals[-1] - zeta ** a * math.exp(-zeta)) / a)
    return vals


def _ai_integral_beyond(x: float, terms: int = 6) -> float:
    """integral of Ai on [x, infinity) for x >= ~5, via the asymptotic
    series integrated termwise into incomplete gamma functions."""
    zeta = (2.0 / 3.0) * x ** 1.5
    gam = _upper_gamma_half_seq(zeta, terms)
    total = sum((-1) ** k * _U_COEF[k] * gam[k] for k in range(terms + 1))
    return math.sqrt(2.0 / 3.0) / (2.0 * math.sqrt(math.pi)) * total


def ai_integral_tail(x: float) -> float:
    """integral of Ai over [x, infinity), accurate enough for building
    exponential factors (absolute error well below 1e-12 for x >= 4)."""
    if x >= 6.0:
        return _ai_integral_beyond(x)
    val, _ = quad(airy_ai, x, 8.0, epsabs=1e-13, epsrel=1e-11)
    return val + _ai_integral_beyond(8.0)


# ---------------------------------------------------------------------------
# Hastings-McLeod solution and the Tracy-Widom beta=2 machinery


@dataclass
class HmSolution:
    """Painleve II solution with Airy decay at +infinity, tabulated on a
    decreasing grid; u stays positive on the computed range."""

    t_grid: np.ndarray
    u: np.ndarray
    u_prime: np.ndarray

    def __post_init__(self):
        self.t_grid = np.asarray(self.t_grid, dtype=float)
        if np.any(np.diff(self.t_grid) >= 0):
            raise ValueError("t_grid must be strictly decreasing")
        if np.any(np.asarray(self.u) <= 0):
            raise ValueError("u must be positive on the computed range")


@dataclass
class TwAuxiliaries:
    """The integrals riding along the Painleve solve: v = int u^2 from t
    to +infinity, and the exponential factors E, F (F is the beta=2
    Tracy-Widom cdf)."""

    t_grid: np.ndarray
    v: np.ndarray
    E: np.ndarray
    F: np.ndarray


def _pii_series(t0, state, order: int):
    """Local Taylor coefficients around t0 of the augmented system

        u'' = 2 u^3 + t u,  v' = -u^2,  I_u' = -u,  I_v' = -v.

    ``state`` = (u, u', v, I_u, I_v) in longdouble.  Returns coefficient
    arrays (a for u, b for u^2, and the three integral series).  The cube
    is built by incremental Cauchy products so coefficient m only touches
    known entries.
    """
    a = np.zeros(order + 1, dtype=_LD)
    b = np.zeros(order + 1, dtype=_LD)  # u^2
    a[0], a[1] = state[0], state[1]
    t0 = _LD(t0)
    for m in range(order - 1):
        b[m] = np.dot(a[: m + 1], a[m::-1])
        c_m = np.dot(b[: m + 1], a[m::-1])  # (u^3)_m
        prev = a[m - 1] if m >= 1 else _LD(0)
        a[m + 2] = (2 * c_m + t0 * a[m] + prev) / ((m + 1) * (m + 2))
    for m in (order - 1, order):
        b[m] = np.dot(a[: m + 1], a[m::-1])
    return a, b


def _pii_eval(t0, state, a, b, h):
    """Advance the augmented state from t0 by h using local series."""
    h = _LD(h)
    order = a.size - 1
    u = _LD(0)
    up = _LD(0)
    for m in range(order, 0, -1):
        u = u * h + a[m]
        up = up * h + m * a[m]
    u = u * h + a[0]
    # integral series: v' = -u^2, I_u' = -u, I_v' = -v
    v = state[2]
    iu = state[3]
    iv = state[4] - state[2] * h
    pw = h  # h^{m+1}
    for m in range(order + 1):
        v = v - b[m] * pw / (m + 1)
        iu = iu - a[m] * pw / (m + 1)
        iv = iv + b[m] * pw * h / ((m + 1) * (m + 2))
        pw = pw * h
    return np.array([u, up, v, iu, iv], dtype=_LD)


class _TwEngine:
    """One backward march of the augmented Painleve II system

        u'' = 2 u^3 + t u,   v' = -u^2,   I_u' = -u,   I_v' = -v,

    from Airy-tail data at t_plus, with E = exp(-I_u), F = exp(-I_v).

    The march uses local Taylor series in extended precision: backward
    errors near the left end are amplified like exp((2 sqrt(2)/3)|t|^{3/2})
    (about 1e13 by t = -10), so the error floor must sit well below double
    epsilon for the solution to track the separatrix there.  The step is a
    dyadic rational and node times are computed as t_plus - i*H, keeping
    the time labels exact — accumulated label rounding would otherwise be
    the dominant (amplified) error source.
    """

    _H = 0.0625
    _ORDER = 26
    _DENSE_PER_STEP = 8

    def __init__(self, t_min: float = -10.0, t_plus: float = 8.0):
        if t_plus < 4.0:
            raise ValueError("t_plus must be >= 4 for tail data to be valid")
        if t_min >= t_plus:
            raise ValueError("need t_min < t_plus")
        self.t_min = float(t_min)
        self.t_plus = float(t_plus)
        ai = airy_ai(t_plus)
        aip = airy_ai_prime(t_plus)
        state = np.array([ai, aip,
                          aip**2 - t_plus * ai**2,   # tail of int u^2
                          ai_integral_tail(t_plus),
                          self._p_tail(t_plus)], dtype=_LD)
        n_steps = int(math.ceil((t_plus - t_min) / self._H - 1e-9))
        nodes_t = np.empty(n_steps + 1)
        nodes_state = np.empty((n_steps + 1, 5), dtype=_LD)
        dense_t = []
        dense_state = []
        nodes_t[0] = t_plus
        nodes_state[0] = state
        t = t_plus
        for i in range(n_steps):
            t_next = max(t_plus - (i + 1) * self._H, t_min)
            h = t_next - t
            a, b = _pii_series(t, state, self._ORDER)
            for j in range(1, self._DENSE_PER_STEP + 1):
                frac = j / self._DENSE_PER_STEP
                y = _pii_eval(t, state, a, b, h * frac)
                dense_t.append(t + h * frac)
                dense_state.append(y.astype(float))
            state = _pii_eval(t, state, a, b, h)
            t = t_next
            u = float(state[0])
            if not math.isfinite(u) or u <= 0.0 or abs(u) > 30.0:
                raise ShootingFailure(
                    f"backward Painleve II march left the separatrix near "
                    f"t = {t:.3f} (t_min = {self.t_min}); extended precision "
                    f"supports roughly t_min >= -11")
            nodes_t[i + 1] = t
            nodes_state[i + 1] = state
        self._nodes_t = nodes_t
        self._nodes_state = nodes_state
        self._dense_t = np.array(dense_t)
        self._dense_state = np.array(dense_state)
        if self.t_min <= -6.0:
            drift = float(state[0]) ** 2 + self.t_min / 2.0
            if abs(drift) > 0.05 * abs(self.t_min / 2.0):
                raise ShootingFailure(
                    f"separatrix drift at t_min: u^2 + t/2 = {drift:.3e}")

    @staticmethod
    def _p_tail(t: float) -> float:
        """Closed-form antiderivative value of -v built from Airy data:
        P'(t) = -(Ai'^2 - t Ai^2) and P -> 0 at +infinity."""
        ai = airy_ai(t)
        aip = airy_ai_prime(t)
        return (2.0 / 3.0) * t * t * ai * ai - (2.0 / 3.0) * t * aip * aip \
            - (1.0 / 3.0) * ai * aip

    def _local_eval(self, t: float) -> np.ndarray:
        """State at one t in [t_min, t_plus] by re-expanding from the
        nearest march node."""
        idx = int(round((self.t_plus - t) / self._H))
        idx = min(max(idx, 0), self._nodes_t.size - 1)
        t0 = self._nodes_t[idx]
        state = self._nodes_state[idx]
        a, b = _pii_series(t0, state, 16)
        return _pii_eval(t0, state, a, b, t - t0).astype(float)

    def _state_any(self, t: np.ndarray) -> np.ndarray:
        """State columns (u, u', v, I_u, I_v) with tail closure above t_plus."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((t.size, 5))
        if np.any(t < self.t_min - 1e-9):
            raise ValueError(
                f"t below the solved range [{self.t_min}, +inf)")
        for i, ti in enumerate(t):
            if ti <= self.t_plus:
                out[i] = self._local_eval(float(ti))
            else:
                ai, aip = _ai_pair(float(ti))
                out[i] = [ai, aip, aip**2 - ti * ai**2,
                          ai_integral_tail(float(ti)), self._p_tail(float(ti))]
        return out

    def grid_solution(self, step: float = 0.0078125) -> tuple[HmSolution, TwAuxiliaries]:
        if abs(step - self._H / self._DENSE_PER_STEP) < 1e-12:
            t = np.concatenate(([self.t_plus], self._dense_t))
            y = np.vstack([self._nodes_state[0].astype(float), self._dense_state])
        else:
            t = np.arange(self.t_plus, self.t_min - 0.5 * step, -step)
            y = self._state_any(t)
        hm = HmSolution(t_grid=t, u=y[:, 0], u_prime=y[:, 1])
        aux = TwAuxiliaries(t_grid=t, v=y[:, 2],
                            E=np.exp(-y[:, 3]), F=np.exp(-y[:, 4]))
        return hm, aux

    def tw2_cdf(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        vals = np.exp(-self._state_any(t_arr)[:, 4])
        vals = np.clip(vals, 0.0, 1.0)
        return float(vals[0]) if np.ndim(t) == 0 else vals.reshape(np.shape(t))

    # -- deformed law -----------------------------------------------------

    def deformed_row(self, t: float, w_values: np.ndarray) -> tuple[np.ndarray, float]:
        """F(t, w) on a vector of w values (one backward sweep in w).

        Returns (values, certificate) where the certificate is |r(0) - 1|
        for the ratio variable r = g/f, which equals 1 at w = 0 for the
        true solution.
        """
        w_values = np.atleast_1d(np.asarray(w_values, dtype=float))
        if np.any(np.abs(w_values) > 50.0):
            raise ValueError(
                "w out of range; the deformed law saturates well before "
                "|w| = 50 — rescale the query window")
        u, up, _, iu, iv = self._state_any(np.array([t]))[0]
        E = math.exp(-iu)
        F = math.exp(-iv)
        w_hi = max(12.0, float(np.max(w_values)) + 4.0)
        w_lo = min(0.0, float(np.min(w_values)))

        def rhs(w, y):
            r = y[0]
            dr = (-w * u + up) + (w * w - t - 2.0 * u * u) * r \
                + (w * u + up) * r * r
            dphi = u * u - (w * u + up) * r
            return [dr, dphi]

        def underflow(w, y):
            # once log f has fallen this far the cdf is 0 in double
            # precision; continuing eventually breaks down because the
            # true f decays like exp(-|w|^3/3) while contamination does not
            return y[1] + 160.0

        underflow.terminal = True
        sol = solve_ivp(rhs, (w_hi, w_lo), [u / w_hi, 0.0], method="DOP853",
                        dense_output=True, rtol=1e-11, atol=1e-13,
                        events=underflow)
        w_stop = sol.t[-1]
        if w_stop > 0.0:  # pragma: no cover
            raise RuntimeError(f"deformed-law sweep failed: {sol.message}")
        r0, phi0 = sol.sol(0.0)
        if not sol.success and sol.status != 1:
            # the solver ground to a halt below w_stop; that is the known
            # contamination breakdown and is safe only if f has already
            # decayed to nothing there
            if sol.sol(w_stop)[1] - phi0 > -25.0:
                raise RuntimeError(f"deformed-law sweep failed: {sol.message}")
        cert = abs(r0 - 1.0)
        vals = np.zeros(w_values.size)
        live = w_values >= w_stop
        if np.any(live):
            phi_w = sol.sol(w_values[live])[1]
            vals[live] = E * np.exp(phi_w - phi0) * F
        return np.clip(vals, 0.0, 1.0), cert


@lru_cache(maxsize=4)
def _engine(t_min: float = -10.0, t_plus: float = 8.0) -> _TwEngine:
    return _TwEngine(t_min=t_min, t_plus=t_plus)


def hastings_mcleod(t_min: float = -10.0, t_plus: float = 8.0,
                    step: float = 0.0078125) -> HmSolution:
    """Painleve II solution u'' = 2u^3 + t u with u ~ Ai at +infinity,
    integrated backward from Airy data at t_plus (the stable direction for
    this separatrix), tabulated on a decreasing grid.

    Raises ShootingFailure if the trajectory leaves the separatrix tube
    before t_min — in double precision that happens somewhere below
    t ~ -12 regardless of solver tolerance.
    """
    return _engine(t_min, t_plus).grid_solution(step)[0]


def tw_auxiliaries(t_min: float = -10.0, t_plus: float = 8.0,
                   step: float = 0.0078125) -> TwAuxiliaries:
    """The integrals v, E, F accompanying the Painleve solve."""
    return _engine(t_min, t_plus).grid_solution(step)[1]


def tw2_cdf(t, t_min: float = -10.0, t_plus: float = 8.0):
    """Tracy-Widom beta=2 cdf F(t) = exp(-int_t^inf v), v = int_t^inf u^2.

    Scalar or array t; values above t_plus use the Airy-tail closure.
    Raises ValueError below the solved range (use a smaller t_min, within
    the double-precision limit noted in hastings_mcleod).
    """
    return _engine(t_min, t_plus).tw2_cdf(t)


def tw_factors(t, t_min: float = -10.0, t_plus: float = 8.0):
    """(E(t), F(t)): the two exponential factors of the edge laws."""
    eng = _engine(t_min, t_plus)
    state = eng._state_any(np.atleast_1d(np.asarray(t, dtype=float)))
    E = np.exp(-state[:, 3])
    F = np.exp(-state[:, 4])
    if np.ndim(t) == 0:
        return float(E[0]), float(F[0])
    return E.reshape(np.shape(t)), F.reshape(np.shape(t))


def deformed_tw(t: float, w: float, t_min: float = -10.0,
                t_plus: float = 8.0) -> float:
    """Rank-one-deformed soft-edge law F(t, w) = f(t, w) F(t).

    f solves the 2x2 linear system in w attached to the Painleve solution
    with f(t, 0) = g(t, 0) = E(t); large w recovers the undeformed
    Tracy-Widom beta=2 law, w -> -infinity drives the value to 0.  At
    w = 0 the product E(t) F(t) is returned exactly.

    Implementation integrates the ratio g/f backward from large w (the
    stable direction; forward integration is swamped by the exp(w^3/3)
    companion mode) together with the cumulative log of f.
    """
    vals, _ = _engine(t_min, t_plus).deformed_row(float(t), np.array([float(w)]))
    return float(vals[0])


def deformed_tw_table(t_values, w_values, t_min: float = -10.0,
                      t_plus: float = 8.0) -> np.ndarray:
    """Table F(t, w) over a t-grid and w-grid, one w-sweep per t value.

    Also certifies each sweep: the ratio variable must return to 1 at
    w = 0 to within 1e-5.
    """
    t_values = np.atleast_1d(np.asarray(t_values, dtype=float))
    w_values = np.atleast_1d(np.asarray(w_values, dtype=float))
    eng = _engine(t_min, t_plus)
    out = np.empty((t_values.size, w_values.size))
    for i, t in enumerate(t_values):
        row, cert = eng.deformed_row(float(t), w_values)
        if cert > 1e-5:
            raise RuntimeError(
                f"deformed-law certification failed at t={t:.3f}: "
                f"|r(0)-1| = {cert:.2e}")
        out[i] = row
    return out
