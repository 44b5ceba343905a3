"""Scalar transverse Jacobi machinery.

Everything here concerns the second-order equation

    J''(t) + kappa(t) * J(t) = 0

for a curvature profile kappa along an orbit, together with the two
distinguished solutions used throughout:

* the unit-slope solution, vanishing at time zero with derivative one;
* the boundary solution for a target time r, with value one at zero and
  value zero at r.

The boundary solution is computed two independent ways (a shooting
combination of fundamental solutions, and the reduction-of-order integral
against the unit-slope solution) and the disagreement is reported as a
first-class cross-check residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from .errors import (
    ConjugatePointError,
    IntegrationFailure,
    NumericalInconsistencyError,
)
from .flow import CurvatureProfile

DEFAULT_TOL = 1e-12
CROSS_CHECK_TOL = 1e-7


@dataclass(frozen=True)
class JacobiState:
    """Value and derivative of a transverse Jacobi field at one time."""

    value: float
    deriv: float

    def scaled(self, c: float) -> "JacobiState":
        return JacobiState(c * self.value, c * self.deriv)


@dataclass(frozen=True)
class QuotientVector:
    """A transverse variation encoded by its Jacobi data at time zero."""

    jperp0: float
    djperp0: float


def sasaki_norm(xi: QuotientVector) -> float:
    """Norm induced by the Sasaki metric: the Euclidean length of the
    (value, derivative) pair."""
    return math.hypot(xi.jperp0, xi.djperp0)


def wronskian(a: JacobiState, b: JacobiState) -> float:
    """a'b - b'a; constant in time for solutions of the same profile."""
    return a.deriv * b.value - b.deriv * a.value


class JacobiTrace:
    """Dense solution of the Jacobi equation on one time span.

    Initial data is normalized before integrating and the scale is
    reapplied at readout, so rescaling the input rescales the output
    exactly up to roundoff.
    """

    def __init__(self, sol, scale: float, t0: float, t1: float):
        self._sol = sol
        self._scale = scale
        self.t0 = t0
        self.t1 = t1

    def _check(self, t):
        lo, hi = min(self.t0, self.t1), max(self.t0, self.t1)
        if np.any(np.asarray(t) < lo - 1e-12) or np.any(np.asarray(t) > hi + 1e-12):
            raise ValueError("query time outside the integrated span")

    def at(self, t: float) -> JacobiState:
        self._check(t)
        if self._sol is None:
            return JacobiState(0.0, 0.0)
        v, d = self._sol(t)
        return JacobiState(self._scale * float(v), self._scale * float(d))

    def values(self, ts) -> np.ndarray:
        self._check(ts)
        if self._sol is None:
            return np.zeros_like(np.asarray(ts, dtype=float))
        return self._scale * self._sol(ts)[0]

    def derivs(self, ts) -> np.ndarray:
        self._check(ts)
        if self._sol is None:
            return np.zeros_like(np.asarray(ts, dtype=float))
        return self._scale * self._sol(ts)[1]

    def to_csv(self, path, n: int = 1001):
        import csv

        ts = np.linspace(self.t0, self.t1, n)
        vals, ders = self.values(ts), self.derivs(ts)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "J", "dJ"])
            for t, v, d in zip(ts, vals, ders):
                writer.writerow([repr(float(t)), repr(float(v)), repr(float(d))])


def integrate_jacobi(
    profile: CurvatureProfile,
    state0: JacobiState,
    t_span: tuple,
    tol: float = DEFAULT_TOL,
) -> JacobiTrace:
    """Integrate J'' + kappa(t) J = 0 with dense output over t_span.

    The span may run forward or backward in time.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    scale = math.hypot(state0.value, state0.deriv)
    if scale == 0.0:
        return JacobiTrace(None, 0.0, t0, t1)
    y0 = [state0.value / scale, state0.deriv / scale]

    ev = profile.evaluator

    def rhs(t, y):
        return [y[1], -float(ev(t)) * y[0]]

    sol = solve_ivp(
        rhs, (t0, t1), y0, method="DOP853", rtol=tol, atol=tol, dense_output=True
    )
    if not sol.success:
        raise IntegrationFailure(
            "jacobi integration failed: %s" % sol.message,
            last_time=float(sol.t[-1]),
        )
    return JacobiTrace(sol.sol, scale, t0, t1)


def solve_unit_slope(
    profile: CurvatureProfile, t: float, tol: float = DEFAULT_TOL
) -> JacobiState:
    """The solution with value zero and slope one at time zero, read at t."""
    if t == 0.0:
        return JacobiState(0.0, 1.0)
    trace = integrate_jacobi(profile, JacobiState(0.0, 1.0), (0.0, t), tol)
    return trace.at(t)


def unit_slope_trace(
    profile: CurvatureProfile, horizon: float, tol: float = DEFAULT_TOL
) -> JacobiTrace:
    return integrate_jacobi(profile, JacobiState(0.0, 1.0), (0.0, horizon), tol)


def first_zero(
    profile: CurvatureProfile,
    horizon: float,
    step: float = 0.01,
    refine_tol: float = 1e-9,
    tol: float = DEFAULT_TOL,
) -> Optional[float]:
    """First positive zero of the unit-slope solution on (0, horizon].

    Scans a uniform grid for sign changes, then refines the bracket by
    bisection. Returns None when the solution keeps its sign.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    trace = unit_slope_trace(profile, horizon, tol)
    ts = np.arange(step, horizon + 0.5 * step, step)
    ts[-1] = min(ts[-1], horizon)
    vals = trace.values(ts)
    sign_change = np.nonzero(vals <= 0.0)[0]
    if len(sign_change) == 0:
        return None
    i = int(sign_change[0])
    if vals[i] == 0.0:
        return float(ts[i])
    lo = ts[i - 1] if i > 0 else 0.5 * step
    hi = ts[i]
    f = lambda t: float(trace.values(np.array([t]))[0])
    if f(lo) <= 0.0:
        # zero sits inside the first scan cell
        lo = 1e-8
    return float(brentq(f, lo, hi, xtol=refine_tol))


@dataclass
class BoundarySolution:
    """Solution with value one at time zero and value zero at time r.

    ``slope0`` is its derivative at zero. ``cross_residual`` is the largest
    disagreement between the shooting construction and the
    reduction-of-order integral over the probe set.
    """

    r: float
    slope0: float
    cross_residual: float
    _eval: Callable

    def at(self, t: float) -> JacobiState:
        v, d = self._eval(t)
        return JacobiState(float(v), float(d))


def _fundamental_pair(profile, r, tol):
    """Dense solutions with data (1, 0) and (0, 1) at time zero, on [0, r]."""

    ev = profile.evaluator

    def rhs(t, y):
        k = -float(ev(t))
        return [y[1], k * y[0], y[3], k * y[2]]

    sol = solve_ivp(
        rhs, (0.0, r), [1.0, 0.0, 0.0, 1.0],
        method="DOP853", rtol=tol, atol=tol, dense_output=True,
    )
    if not sol.success:
        raise IntegrationFailure(
            "fundamental-pair integration failed: %s" % sol.message,
            last_time=float(sol.t[-1]),
        )
    return sol


def solve_boundary(
    profile: CurvatureProfile,
    r: float,
    tol: float = DEFAULT_TOL,
    cross_check: bool = True,
    scan_step: float = 0.01,
) -> BoundarySolution:
    """Solve the two-point problem J(0) = 1, J(r) = 0.

    Requires the unit-slope solution to have no zero strictly between 0
    and r; otherwise the problem is singular and a conjugate-point error
    is raised. Negative r is handled through the time-reflected profile.

    The primary construction is the shooting combination
    A(t) + s * Z(t) of the fundamental solutions with s = -A(r)/Z(r).
    When ``cross_check`` is on, the reduction-of-order integral
    Z(t) * integral_t^r du / Z(u)^2 is evaluated at probe times bounded
    away from zero and compared against the shooting values; disagreement
    beyond the tolerance raises a numerical-inconsistency error.
    """
    if r == 0.0:
        raise ValueError("the boundary time r must be nonzero")
    if r < 0.0:
        flipped = solve_boundary(profile.flipped(), -r, tol, cross_check, scan_step)

        def ev_neg(t):
            st = flipped.at(-t)
            return st.value, -st.deriv

        return BoundarySolution(
            r=r,
            slope0=-flipped.slope0,
            cross_residual=flipped.cross_residual,
            _eval=ev_neg,
        )

    z = first_zero(profile, r * (1.0 + 1e-9) + 1e-12, step=min(scan_step, r / 8),
                   tol=tol)
    if z is not None and z < r * (1.0 - 1e-12):
        raise ConjugatePointError(
            "conjugate point at t = %.12g inside (0, %g)" % (z, r),
            conjugate_time=z,
        )

    sol = _fundamental_pair(profile, r, tol)
    Ar, _, Zr, _ = sol.sol(r)
    if Zr == 0.0:
        raise ConjugatePointError("unit-slope solution vanishes at r", conjugate_time=r)
    s = -float(Ar) / float(Zr)

    def ev(t):
        a, da, zz, dz = sol.sol(t)
        return a + s * zz, da + s * dz

    residual = 0.0
    if cross_check:
        t_lo = min(0.1, r / 10.0)
        candidates = np.linspace(max(t_lo, 0.05 * r), 0.9 * r, 9)
        # skip probes where the unit-slope solution is huge: multiplying
        # the tiny reduction-of-order integral by it amplifies the
        # double-precision floor past the agreement bound
        probes = [tp for tp in candidates if abs(float(sol.sol(tp)[2])) <= 1e5]
        if not probes:
            probes = [candidates[0]]

        def inv_z_sq(u):
            zu = float(sol.sol(u)[2])
            return 1.0 / (zu * zu)

        for tp in probes:
            integral, _err = quad(
                inv_z_sq, tp, r, epsabs=1e-14, epsrel=1e-11, limit=200
            )
            v_quad = float(sol.sol(tp)[2]) * integral
            v_shoot = float(ev(tp)[0])
            residual = max(residual, abs(v_quad - v_shoot))
        if residual > CROSS_CHECK_TOL:
            raise NumericalInconsistencyError(
                "boundary solve routes disagree by %g at r = %g" % (residual, r)
            )

    return BoundarySolution(r=r, slope0=s, cross_residual=residual, _eval=ev)


def tangential_component(
    b_along_orbit: Callable[[float], float],
    perp: JacobiTrace,
    JT0: float = 0.0,
) -> Callable[[float], float]:
    """The along-flow component slaved to the transverse one.

    Returns t -> JT0 + integral_0^t b(s) * J(s) ds, evaluated by adaptive
    quadrature over the dense transverse trace. Queries must stay inside
    the trace span.
    """

    def jt(t: float) -> float:
        perp._check(t)

        def integrand(s):
            return float(b_along_orbit(s)) * float(perp.values(np.array([s]))[0])

        val, _err = quad(integrand, 0.0, t, epsabs=1e-12, epsrel=1e-10, limit=200)
        return JT0 + val

    return jt


def flip_profile(profile: CurvatureProfile) -> CurvatureProfile:
    """Curvature seen by the time-reversed field: t -> kappa(-t)."""
    return profile.flipped()
