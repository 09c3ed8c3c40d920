"""Special functions and quadrature engines.

Provides numerically stable harmonic-oscillator eigenfunctions (normalized
Hermite functions evaluated by three-term recurrence, never via raw
Hermite polynomials times factorials), the scaled modified Bessel function
e^x K0(x), and two integration backends:

* ``gauss_hermite`` -- fixed-node Gauss-Hermite rules for integrands that
  decay like exp(-x^2) times something smooth.  Total weights
  w_i * exp(x_i^2) are computed from the normalized-function identity
  1/(n h_{n-1}(x_i)^2), which stays finite for any node count (the raw
  weights underflow past n ~ 350).
* ``tanh_sinh`` -- adaptive double-exponential rules on finite,
  semi-infinite and infinite intervals.  Used as the validation path and
  for integrands with sharp near-singular structure at an endpoint.

Both integrators return (value, error_indicator) where the indicator is
the change under node doubling / level refinement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import k0e, roots_hermite, roots_legendre

__all__ = [
    "QuadratureSpec",
    "QuadratureError",
    "hermite_function",
    "hermite_function_values",
    "phi_n",
    "bessel_k0_scaled",
    "gauss_hermite_rule",
    "integrate_1d",
    "integrate_2d",
    "tanh_sinh_finite",
]

EULER_GAMMA = 0.5772156649015328606

_SCHEMES = ("gauss_hermite", "tanh_sinh")


class QuadratureError(RuntimeError):
    """Raised when an integration result fails its convergence check."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration backend selector.

    scheme : "gauss_hermite" (fixed-node fast path) or "tanh_sinh"
             (adaptive double-exponential validation path)
    nodes  : node count for fixed rules / initial density for adaptive ones
    tol    : target relative tolerance for convergence checks
    """

    scheme: str = "gauss_hermite"
    nodes: int = 200
    tol: float = 1e-10

    def __post_init__(self):
        if self.scheme not in _SCHEMES:
            raise ValueError(f"scheme must be one of {_SCHEMES}, got {self.scheme!r}")
        if int(self.nodes) != self.nodes or self.nodes < 8:
            raise ValueError(f"nodes must be an integer >= 8, got {self.nodes!r}")
        if not (self.tol > 0.0 and math.isfinite(self.tol)):
            raise ValueError(f"tol must be positive and finite, got {self.tol!r}")


# ---------------------------------------------------------------------------
# normalized harmonic-oscillator eigenfunctions
# ---------------------------------------------------------------------------

def hermite_function_values(n_max: int, w) -> np.ndarray:
    """h_n(w) for n = 0..n_max, shape (n_max+1,) + shape(w).

    h_n are the unit-norm oscillator eigenfunctions of a dimensionless
    coordinate w (so that integral of h_n^2 dw = 1), generated by the
    stable recurrence

        h_{n+1} = sqrt(2/(n+1)) w h_n - sqrt(n/(n+1)) h_{n-1}.

    Underflow of the Gaussian seed at large |w| is benign (values are
    exactly 0 there); nothing overflows for n <= 512 and |w| <= 40.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    w = np.atleast_1d(np.asarray(w, dtype=float))
    out = np.empty((n_max + 1,) + w.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * w * w)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * w * out[0]
    for n in range(1, n_max):
        out[n + 1] = (
            math.sqrt(2.0 / (n + 1)) * w * out[n]
            - math.sqrt(n / (n + 1.0)) * out[n - 1]
        )
    return out


def hermite_function(n: int, w):
    """h_n(w) for a single order n (scalar or array w)."""
    if n < 0 or int(n) != n:
        raise ValueError(f"n must be a non-negative integer, got {n!r}")
    vals = hermite_function_values(n, w)[n]
    return float(vals[0]) if np.isscalar(w) or np.ndim(w) == 0 else vals


def phi_n(n: int, q, beta: float):
    """Normalized oscillator eigenfunction of the physical coordinate q.

    phi_n(q) = h_n(q/(beta*sqrt2)) / sqrt(beta*sqrt2); the width beta is
    the rms ground-state spread, so integral of phi_n^2 dq = 1.
    """
    if not (beta > 0.0 and math.isfinite(beta)):
        raise ValueError(f"beta must be positive and finite, got {beta!r}")
    s = beta * math.sqrt(2.0)
    return hermite_function(n, np.asarray(q, dtype=float) / s) / math.sqrt(s)


# ---------------------------------------------------------------------------
# scaled modified Bessel function of the second kind, order zero
# ---------------------------------------------------------------------------

def bessel_k0_scaled(x):
    """e^x K0(x) for x > 0, accurate over x in [1e-70, 1e3] and beyond.

    Below x = 1e-16 the small-argument form -ln(x/2) - euler_gamma is
    exact to double precision (the e^x factor is 1 there); elsewhere the
    library routine is used.  Vectorized; raises for x <= 0.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError("bessel_k0_scaled requires finite x > 0")
    small = arr < 1e-16
    if np.any(small):
        out = np.where(small, -np.log(0.5 * arr) - EULER_GAMMA, k0e(np.where(small, 1.0, arr)))
    else:
        out = k0e(arr)
    return float(out) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# Gauss-Hermite machinery
# ---------------------------------------------------------------------------

def _hermite_mantissa_log(n: int, x: np.ndarray):
    """h_n(x) as mantissa * exp(log_scale), exponent-carried so the value
    is usable even where the plain function under/overflows a double."""
    ln2 = math.log(2.0)
    mp_ = np.full(x.shape, math.pi**-0.25)
    scale = -0.5 * x * x
    if n == 0:
        return mp_, scale
    m = math.sqrt(2.0) * x * mp_
    for k in range(1, n):
        mp_, m = m, math.sqrt(2.0 / (k + 1)) * x * m - math.sqrt(k / (k + 1.0)) * mp_
        if k % 32 == 0:
            _, ex = np.frexp(np.abs(m) + 1e-300)
            adj = np.ldexp(1.0, -ex)
            m = m * adj
            mp_ = mp_ * adj
            scale = scale + ex * ln2
    return m, scale


@lru_cache(maxsize=64)
def gauss_hermite_rule(n: int):
    """Nodes x_i and total weights W_i with sum_i W_i f(x_i) ~ int f dx.

    W_i = w_i e^{x_i^2} = 1/(n h_{n-1}(x_i)^2), evaluated through an
    exponent-carried recurrence (the bare weights underflow past
    n ~ 350).  Nodes whose total weight would overflow a double are
    dropped: any integrand for which Gauss-Hermite is valid (decay like
    exp(-x^2) times something smooth) contributes below 1e-300 there.
    """
    x, _ = roots_hermite(n)
    m, scale = _hermite_mantissa_log(n - 1, x)
    log_w = -(math.log(n) + 2.0 * np.log(np.abs(m))) - 2.0 * scale
    keep = log_w < 700.0
    return x[keep], np.exp(log_w[keep])


@lru_cache(maxsize=64)
def legendre_rule(n: int):
    x, w = roots_legendre(n)
    return x, w


def _gh_integral_1d(f, n):
    x, W = gauss_hermite_rule(n)
    return float(np.sum(W * np.asarray(f(x), dtype=float)))


def _gh_integral_2d(f, n):
    x, W = gauss_hermite_rule(n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    vals = np.asarray(f(X, Y), dtype=float)
    return float(W @ vals @ W)


# ---------------------------------------------------------------------------
# tanh-sinh (double-exponential) machinery
# ---------------------------------------------------------------------------

_TS_TMAX = 5.0


@lru_cache(maxsize=32)
def _ts_grid(level: int):
    """Positive abscissas t for refinement `level` plus the step h.

    Level 0 is the coarse trapezoid with h = 0.5; level k adds the odd
    multiples of h = 0.5/2^k.  Returns (t_array, h).
    """
    h = 0.5 / 2**level
    if level == 0:
        k = np.arange(1, int(_TS_TMAX / h) + 1)
    else:
        k = np.arange(1, int(_TS_TMAX / h) + 1, 2)
    return k * h, h


def _ts_eta_weight(t):
    """(eta, dweight) of the map x = tanh((pi/2) sinh t).

    eta = 1 - tanh(u) = 2/(1+e^{2u}) is the exact distance to the upper
    endpoint (stays accurate down to ~1e-300); dweight = (pi/2) cosh(t)
    * sech^2(u) without cancellation.
    """
    u = 0.5 * math.pi * np.sinh(t)
    eta = 2.0 / (1.0 + np.exp(2.0 * u))
    dw = 0.5 * math.pi * np.cosh(t) * eta * (2.0 - eta)
    return eta, dw


def tanh_sinh_finite(f, a: float, b: float, tol: float = 1e-12, max_level: int = 10):
    """Adaptive tanh-sinh integral of f over the finite interval [a, b].

    f must accept numpy arrays.  Points are generated as exact offsets
    from the endpoints, so integrable endpoint singularities and sharp
    features hugging a or b are resolved.  Returns (value, err) with err
    the last level-doubling change.
    """
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    total = float(np.asarray(f(np.array([mid])), dtype=float)[0]) * 0.5 * math.pi
    value = prev = total * 0.5  # h = 0.5 at level 0 applied below
    err = math.inf
    for level in range(0, max_level + 1):
        t, h = _ts_grid(level)
        eta, dw = _ts_eta_weight(t)
        xu = b - half * eta
        xl = a + half * eta
        fu = np.asarray(f(xu), dtype=float)
        fl = np.asarray(f(xl), dtype=float)
        total += float(np.sum(dw * (fu + fl)))
        value = total * h * half
        if level > 0:
            err = abs(value - prev)
            if err <= tol * (abs(value) + 1e-300):
                break
        prev = value
    return value, err


def _ts_infinite_points(t, kind, origin=0.0):
    """Map DE abscissas t>0 to points/weights for unbounded intervals."""
    u = 0.5 * math.pi * np.sinh(t)
    cosh_t = np.cosh(t)
    if kind == "full":  # (-inf, inf), x = sinh(u)
        x = np.sinh(u)
        dw = 0.5 * math.pi * cosh_t * np.cosh(u)
        return np.concatenate([origin + x, origin - x]), np.concatenate([dw, dw])
    if kind == "upper":  # (a, inf), x = a + exp(u)
        e = np.exp(u)
        dw = 0.5 * math.pi * cosh_t * e
        return np.concatenate([origin + e, origin + 1.0 / e]), np.concatenate([dw, 0.5 * math.pi * cosh_t / e])
    raise ValueError(kind)


def _ts_integral_unbounded(f, kind, origin, tol, max_level=10):
    if kind == "full":
        t0val = float(np.asarray(f(np.array([origin])), dtype=float)[0])
    else:
        t0val = float(np.asarray(f(np.array([origin + 1.0])), dtype=float)[0])
    total = t0val * 0.5 * math.pi
    value = prev = total * 0.5
    err = math.inf
    for level in range(0, max_level + 1):
        t, h = _ts_grid(level)
        x, dw = _ts_infinite_points(t, kind, origin)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            fv = np.asarray(f(x), dtype=float)
        fv = np.where(np.isfinite(fv), fv, 0.0)
        total += float(np.sum(dw * fv))
        value = total * h
        if level > 0:
            err = abs(value - prev)
            if err <= tol * (abs(value) + 1e-300):
                break
        prev = value
    return value, err


# ---------------------------------------------------------------------------
# public integration fronts
# ---------------------------------------------------------------------------

def integrate_1d(f, spec: QuadratureSpec, interval=(-math.inf, math.inf)):
    """Integrate f over `interval`; returns (value, error_indicator).

    gauss_hermite: interval must be the whole real line and f must decay
    like exp(-x^2) times something smooth; the indicator is the change
    from `spec.nodes` to 2*spec.nodes.  tanh_sinh: any interval with
    finite, one-sided infinite or doubly infinite endpoints; the
    indicator is the last refinement change.
    """
    a, b = interval
    if spec.scheme == "gauss_hermite":
        if not (math.isinf(a) and a < 0 and math.isinf(b) and b > 0):
            raise ValueError("gauss_hermite scheme integrates over (-inf, inf) only")
        v1 = _gh_integral_1d(f, spec.nodes)
        v2 = _gh_integral_1d(f, 2 * spec.nodes)
        return v2, abs(v2 - v1)
    if math.isinf(a) and math.isinf(b):
        return _ts_integral_unbounded(f, "full", 0.0, spec.tol)
    if math.isinf(b):
        return _ts_integral_unbounded(f, "upper", a, spec.tol)
    if math.isinf(a):
        g = lambda x: np.asarray(f(-x), dtype=float)
        return _ts_integral_unbounded(g, "upper", -b, spec.tol)
    return tanh_sinh_finite(f, a, b, spec.tol)


def integrate_2d(f, spec: QuadratureSpec, window=None, inner_split=None):
    """Integrate f(x, y) over the plane (or `window`); returns (value, err).

    gauss_hermite: tensor rule over the full plane, doubling check.
    tanh_sinh: iterated adaptive rule over the finite `window`
    ((ax, bx), (ay, by)); when `inner_split(x)` is given, the inner
    integral over y is split there so a ridge along y = split(x) is
    resolved by the endpoint-clustered nodes.  f must be vectorized.
    """
    if spec.scheme == "gauss_hermite":
        v1 = _gh_integral_2d(f, spec.nodes)
        v2 = _gh_integral_2d(f, 2 * spec.nodes)
        return v2, abs(v2 - v1)
    if window is None:
        raise ValueError("tanh_sinh 2-D integration needs an explicit finite window")
    (ax, bx), (ay, by) = window
    inner_err = 0.0

    def outer(xs):
        xs = np.atleast_1d(xs)
        nonlocal inner_err
        out = np.empty(xs.shape)
        for i, xv in enumerate(xs):
            g = lambda ys: np.asarray(f(np.full_like(ys, xv), ys), dtype=float)
            if inner_split is not None:
                s = float(inner_split(xv))
                s = min(max(s, ay), by)
                v1, e1 = tanh_sinh_finite(g, ay, s, spec.tol)
                v2, e2 = tanh_sinh_finite(g, s, by, spec.tol)
                out[i] = v1 + v2
                inner_err = max(inner_err, e1 + e2)
            else:
                out[i], e = tanh_sinh_finite(g, ay, by, spec.tol)
                inner_err = max(inner_err, e)
        return out

    value, outer_err = tanh_sinh_finite(outer, ax, bx, spec.tol)
    return value, outer_err + inner_err
