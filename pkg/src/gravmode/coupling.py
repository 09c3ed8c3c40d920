"""Regularized clone-interaction potential and its two-mode matrix elements.

The mode and its clone interact through U(s) = -mu^2/sqrt(s^2 + lc^2),
s = q - qbar.  Because U depends only on the relative coordinate and the
two oscillators share one frequency, every matrix element in the product
Fock basis reduces to a one-dimensional radial kernel

    T[a, a'](chi) = int h_a(w) h_a'(w) / sqrt(w^2 + 2 chi) dw

in the 45-degree rotated (relative/center) basis, with chi = (lc*omega)^2/4.
The kernel is integrated on geometrically graded Gauss-Legendre panels:
panel widths shrink like the kernel transition scale sqrt(2 chi) near
w = 0 and are capped by the oscillation wavelength of h_a elsewhere, so
one deterministic rule covers chi from ~1e-70 up to ~1e3 at close to
machine precision.  An adaptive tanh-sinh path provides the independent
cross-check, and a direct two-dimensional integrator (no rotation) backs
the gamma coefficients.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .core import ModeParams, TruncationSpec
from .specfun import (
    QuadratureError,
    QuadratureSpec,
    gauss_hermite_rule,
    hermite_function_values,
    bessel_k0_scaled,
    legendre_rule,
    tanh_sinh_finite,
)

__all__ = [
    "potential",
    "mean_potential_closed_form",
    "potential_kernel_matrix",
    "potential_kernel_column",
    "kernel_element_tanh_sinh",
    "RotatedBasisMap",
    "rotation_column_coefficient",
    "gamma_element",
    "gamma_element_reduced",
    "potential_matrix",
]

_SQRT2 = math.sqrt(2.0)


def potential(s, params: ModeParams):
    """Interaction energy -mu^2/sqrt(s^2 + lc^2) at separation s (Planck units).

    Even in s, negative everywhere, bounded below by -mu^2/lc.
    """
    s = np.asarray(s, dtype=float)
    out = -params.mu**2 / np.sqrt(s * s + params.lc**2)
    return float(out) if out.ndim == 0 else out


def mean_potential_closed_form(params: ModeParams) -> float:
    """Ground-state expectation of the interaction, in units of hbar*omega.

    <U>/(hbar omega) = -(omega^2/sqrt(2 pi)) e^chi K0(chi); the scaled
    Bessel form keeps the product finite for chi anywhere from ~1e-70
    (where K0 alone is a large log) to huge chi (where e^chi overflows).
    """
    x = params.omega
    return -(x * x / math.sqrt(2.0 * math.pi)) * bessel_k0_scaled(params.chi)


# ---------------------------------------------------------------------------
# radial kernel on graded panels
# ---------------------------------------------------------------------------

def _panel_rule(chi: float, a_max: int, per_panel: int):
    """Composite Gauss-Legendre nodes w_j > 0 and kernel weights K_j with

        int_0^inf f(w)/sqrt(w^2 + 2 chi) dw  ~  sum_j K_j f(w_j)

    for f built from oscillator functions of order <= a_max.  Panels are
    geometric (ratio 4) through the kernel transition at w ~ sqrt(2 chi)
    and are never wider than ~per_panel/5 oscillation wavelengths of
    h_{a_max}; the grid stops where h_0 h_{a_max} has decayed to ~1e-16.
    """
    L = math.sqrt(2.0 * chi)
    wmax = math.sqrt(2.0 * a_max + 1.0) + 8.0
    cap = min(2.0, per_panel * math.pi / (5.0 * math.sqrt(2.0 * a_max + 1.0)))
    breaks = [0.0]
    b = 2.0 * L
    while 0.0 < b < 1.0 and b < wmax:
        breaks.append(b)
        b *= 4.0
    lo = breaks[-1]
    n_lin = max(1, int(math.ceil((wmax - lo) / cap)))
    breaks.extend(np.linspace(lo, wmax, n_lin + 1)[1:].tolist())
    # cap any remaining wide panel (the last geometric ones can exceed cap)
    refined = [breaks[0]]
    for hi in breaks[1:]:
        lo = refined[-1]
        pieces = max(1, int(math.ceil((hi - lo) / cap)))
        refined.extend(np.linspace(lo, hi, pieces + 1)[1:].tolist())
    edges = np.asarray(refined)
    xg, wg = legendre_rule(per_panel)
    a0 = edges[:-1][:, None]
    b0 = edges[1:][:, None]
    nodes = (0.5 * (b0 - a0) * xg[None, :] + 0.5 * (a0 + b0)).ravel()
    wts = (0.5 * (b0 - a0) * wg[None, :]).ravel()
    return nodes, wts / np.sqrt(nodes * nodes + 2.0 * chi)


def _kernel_matrix_raw(chi: float, a_max: int, per_panel: int) -> np.ndarray:
    nodes, kern = _panel_rule(chi, a_max, per_panel)
    H = hermite_function_values(a_max, nodes)
    T = 2.0 * ((H * kern) @ H.T)
    # parity: elements with a + a' odd vanish identically
    a = np.arange(a_max + 1)
    T[(a[:, None] + a[None, :]) % 2 == 1] = 0.0
    return np.triu(T) + np.triu(T, 1).T


@lru_cache(maxsize=256)
def _kernel_matrix_checked(chi: float, a_max: int, per_panel: int, tol: float):
    T = _kernel_matrix_raw(chi, a_max, per_panel)
    T2 = _kernel_matrix_raw(chi, a_max, 2 * per_panel)
    err = float(np.max(np.abs(T - T2) / (np.abs(T2) + 1e-300)))
    scale = float(np.max(np.abs(T2)))
    if np.max(np.abs(T - T2)) > tol * scale:
        raise QuadratureError(
            f"radial kernel failed its doubling check at chi={chi!r} "
            f"(max change {np.max(np.abs(T - T2)):.3e}, scale {scale:.3e})"
        )
    T2.setflags(write=False)
    return T2, err


def potential_kernel_matrix(chi: float, a_max: int, per_panel: int = 24,
                            tol: float = 1e-10) -> np.ndarray:
    """Full kernel matrix T[a, a'] for a, a' = 0..a_max (validated, cached)."""
    return _kernel_matrix_checked(float(chi), int(a_max), per_panel, tol)[0]


@lru_cache(maxsize=512)
def potential_kernel_column(chi: float, a_max: int, per_panel: int = 24,
                            tol: float = 1e-10) -> np.ndarray:
    """Kernel column T[a, 0] for a = 0..a_max (validated, cached)."""
    def col(pp):
        nodes, kern = _panel_rule(chi, a_max, pp)
        H = hermite_function_values(a_max, nodes)
        c = 2.0 * (H @ (kern * H[0]))
        c[1::2] = 0.0
        return c

    c1, c2 = col(per_panel), col(2 * per_panel)
    if np.max(np.abs(c1 - c2)) > tol * np.max(np.abs(c2)):
        raise QuadratureError(f"radial kernel column failed its doubling check at chi={chi!r}")
    c2.setflags(write=False)
    return c2


def kernel_element_tanh_sinh(a: int, ap: int, chi: float, tol: float = 1e-12) -> float:
    """Independent kernel element via adaptive tanh-sinh (validation path)."""
    if (a + ap) % 2 == 1:
        return 0.0
    wmax = math.sqrt(2.0 * max(a, ap) + 1.0) * 0.5 + 8.5
    order = max(a, ap)

    def f(w):
        H = hermite_function_values(order, w)
        return H[a] * H[ap] / np.sqrt(w * w + 2.0 * chi)

    val, err = tanh_sinh_finite(f, 0.0, wmax, tol, max_level=12)
    if err > 100.0 * tol * (abs(val) + 1e-300):
        raise QuadratureError(f"tanh-sinh kernel element ({a},{ap}) did not converge")
    return 2.0 * val


# ---------------------------------------------------------------------------
# 45-degree rotation between product and relative/center Fock bases
# ---------------------------------------------------------------------------

def rotation_column_coefficient(n: int, nbar: int) -> float:
    """Coefficient of the (a, b) = (n+nbar, 0) relative/center basis state
    in the rotated expansion of the product state (n, nbar):

        (-1)^nbar 2^{-N/2} sqrt(binomial(N, n)),  N = n + nbar.

    Evaluated through log-gamma so large shells neither overflow nor lose
    accuracy.
    """
    N = n + nbar
    logc = gammaln(N + 1) - gammaln(n + 1) - gammaln(nbar + 1)
    return (-1.0) ** (nbar % 2) * math.exp(0.5 * logc - 0.5 * N * math.log(2.0))


class RotatedBasisMap:
    """Expansion of product states phi_n(q) phi_nbar(qbar) over the
    relative/center states psi_a(u) psi_b(v), u = (q-qbar)/sqrt2,
    v = (q+qbar)/sqrt2.

    Coefficients live on a + b = n + nbar only (equal frequencies) and are
    built by the ladder recurrence obtained from a_q = (a_u + a_v)/sqrt2,
    a_qbar = (a_v - a_u)/sqrt2; each vector is indexed by a with
    b = n + nbar - a implied.
    """

    def __init__(self, n_max: int):
        if n_max < 0:
            raise ValueError("n_max must be >= 0")
        self.n_max = n_max
        self._coeff = {}
        self._build()

    def _build(self):
        nm = self.n_max
        self._coeff[(0, 0)] = np.array([1.0])
        for n in range(nm):  # raise the mode index along nbar = 0
            self._coeff[(n + 1, 0)] = self._raise(self._coeff[(n, 0)], n + 1, +1.0, n + 1)
        for n in range(nm + 1):
            for nbar in range(nm):
                self._coeff[(n, nbar + 1)] = self._raise(
                    self._coeff[(n, nbar)], n + nbar + 1, -1.0, nbar + 1
                )

    @staticmethod
    def _raise(old: np.ndarray, new_shell: int, sign: float, k: int) -> np.ndarray:
        # new[a] = (sign*sqrt(a)*old[a-1] + sqrt(new_shell-a)*old[a]) / sqrt(2k)
        a = np.arange(new_shell + 1)
        new = np.zeros(new_shell + 1)
        new[1:] += sign * np.sqrt(a[1:]) * old
        new[:-1] += np.sqrt(new_shell - a[:-1]) * old
        return new / math.sqrt(2.0 * k)

    def coefficients(self, n: int, nbar: int) -> np.ndarray:
        """Vector over a = 0..n+nbar (read-only view; b = n+nbar-a)."""
        return self._coeff[(n, nbar)]


# ---------------------------------------------------------------------------
# first-order coefficients
# ---------------------------------------------------------------------------

def _check_pair(n: int, nbar: int):
    if n < 0 or nbar < 0:
        raise ValueError("Fock indices must be non-negative")
    if n == 0 and nbar == 0:
        raise ValueError("coefficient (0, 0) is fixed to 1 and not an integral")


def gamma_element_reduced(n: int, nbar: int, params: ModeParams,
                          spec: QuadratureSpec | None = None) -> float:
    """First-order coefficient via the rotated one-dimensional path:

        gamma = omega^2 * R(n, nbar) * T[n+nbar, 0] / (sqrt2 * (n+nbar))

    The omega^2 prefactor (mu^2 combined with the 1/(hbar omega (n+nbar))
    denominator) is applied once, outside the quadrature, so the integral
    part stays O(1) even at omega ~ 1e-33.
    """
    _check_pair(n, nbar)
    spec = spec or QuadratureSpec()
    N = n + nbar
    if N % 2 == 1:
        return 0.0
    if spec.scheme == "tanh_sinh":
        t_n = kernel_element_tanh_sinh(N, 0, params.chi, min(spec.tol, 1e-12))
    else:
        a_max = 16 * ((N + 16) // 16)  # round up for cache reuse
        t_n = float(potential_kernel_column(params.chi, a_max, tol=spec.tol)[N])
    g = rotation_column_coefficient(n, nbar) * t_n / (_SQRT2 * N)
    return params.omega**2 * g


def _h_pair0(k: int, w: np.ndarray) -> np.ndarray:
    """h_k(w) * h_0(w) without storing the whole recurrence stack."""
    h0 = math.pi ** -0.25 * np.exp(-0.5 * w * w)
    if k == 0:
        return h0 * h0
    hm, h = h0, math.sqrt(2.0) * w * h0
    for m in range(1, k):
        hm, h = h, math.sqrt(2.0 / (m + 1)) * w * h - math.sqrt(m / (m + 1.0)) * hm
    return h * h0


def _gamma_2d_gh(n: int, nbar: int, chi: float, nodes: int):
    """Scaled 2-D integral G2 = intint h_n h_0(y) h_nbar h_0(ybar)
    / sqrt((y-ybar)^2 + 4 chi) dy dybar with an outer Gauss-Hermite rule
    and an inner folded panel rule centered on the ridge."""
    y, W = gauss_hermite_rule(nodes)
    order = max(n, nbar)
    s, kern = _panel_rule(2.0 * chi, order, 24)  # s^2 + 4 chi = s^2 + 2*(2 chi)
    # extend the fold cutoff: g(y +- s) support needs s up to |y|max + 9;
    # the far tail is Gaussian-small, coarse 4-wide panels suffice there
    smax_extra = float(np.max(np.abs(y))) + 9.0
    if s[-1] < smax_extra:
        xg, wg = legendre_rule(24)
        edges = np.append(np.arange(s[-1], smax_extra, 4.0), smax_extra)
        lo, hi = edges[:-1][:, None], edges[1:][:, None]
        nodes2 = (0.5 * (hi - lo) * xg + 0.5 * (hi + lo)).ravel()
        wts2 = (0.5 * (hi - lo) * wg).ravel()
        s = np.concatenate([s, nodes2])
        kern = np.concatenate([kern, wts2 / np.sqrt(nodes2**2 + 4.0 * chi)])
    Hy = hermite_function_values(order, y)
    inner = (_h_pair0(nbar, y[:, None] + s[None, :])
             + _h_pair0(nbar, y[:, None] - s[None, :])) @ kern
    return float(np.sum(W * Hy[n] * Hy[0] * inner))


def _gamma_2d_ts(n: int, nbar: int, chi: float, tol: float):
    order = max(n, nbar)
    wmax = math.sqrt(2.0 * order + 1.0) * 0.5 + 9.0

    def inner(yv):
        def g(yb):
            H = hermite_function_values(order, yb)
            return H[nbar] * H[0] / np.sqrt((yv - yb) ** 2 + 4.0 * chi)

        v1, e1 = tanh_sinh_finite(g, -wmax, yv, tol)
        v2, e2 = tanh_sinh_finite(g, yv, wmax, tol)
        return v1 + v2, e1 + e2

    def outer(ys):
        ys = np.atleast_1d(ys)
        out = np.empty(ys.shape)
        for i, yv in enumerate(ys):
            iv, _ = inner(float(yv))
            H = hermite_function_values(order, np.array([yv]))
            out[i] = H[n, 0] * H[0, 0] * iv
        return out

    return tanh_sinh_finite(outer, -wmax, wmax, tol)


def gamma_element(n: int, nbar: int, params: ModeParams,
                  spec: QuadratureSpec | None = None) -> float:
    """First-order coefficient from the raw two-dimensional integral
    (reference path; no basis rotation):

        gamma = omega^2 * G2 / (n + nbar)

    Odd n+nbar is an exact parity zero and is short-circuited.  Raises
    QuadratureError when the doubling indicator exceeds spec.tol.
    """
    _check_pair(n, nbar)
    spec = spec or QuadratureSpec()
    N = n + nbar
    if N % 2 == 1:
        return 0.0
    if spec.scheme == "gauss_hermite":
        v1 = _gamma_2d_gh(n, nbar, params.chi, spec.nodes)
        v2 = _gamma_2d_gh(n, nbar, params.chi, 2 * spec.nodes)
        err, val = abs(v2 - v1), v2
    else:
        val, err = _gamma_2d_ts(n, nbar, params.chi, min(spec.tol, 1e-12))
    # every coefficient is bounded by omega/(lc N); judge convergence against
    # that natural scale so near-zero elements do not raise false alarms
    gamma = params.omega**2 * val / N
    bound = params.omega / (params.lc * N)
    if params.omega**2 * err / N > spec.tol * max(abs(gamma), bound):
        raise QuadratureError(
            f"2-D gamma element ({n},{nbar}) did not converge (change {err:.3e})"
        )
    return gamma


# ---------------------------------------------------------------------------
# interaction matrix over the truncated product basis
# ---------------------------------------------------------------------------

def potential_matrix(params: ModeParams, trunc: TruncationSpec,
                     spec: QuadratureSpec | None = None) -> np.ndarray:
    """Matrix of the interaction between all product states (n, nbar) and
    (m, mbar) with indices 0..n_max, flattened row-major as
    t = n*(n_max+1) + nbar.  In Planck energy units.

    Elements connecting states whose shells n+nbar differ by an odd
    number vanish identically (relative-coordinate parity) and are left
    as exact zeros; the returned matrix is bit-exact symmetric.
    """
    spec = spec or QuadratureSpec()
    nm = trunc.n_max
    dim = (nm + 1) ** 2
    a_max = 2 * nm
    if spec.scheme == "tanh_sinh":
        T = np.zeros((a_max + 1, a_max + 1))
        for a in range(a_max + 1):
            for ap in range(a % 2, a + 1, 2):
                T[a, ap] = T[ap, a] = kernel_element_tanh_sinh(a, ap, params.chi, min(spec.tol, 1e-12))
    else:
        T = potential_kernel_matrix(params.chi, a_max, tol=spec.tol)
    rot = RotatedBasisMap(nm)

    # group flattened indices and rotation rows by shell
    shells = []
    for N in range(0, 2 * nm + 1):
        idx = []
        rows = []
        for n_ in range(max(0, N - nm), min(N, nm) + 1):
            nbar = N - n_
            idx.append(n_ * (nm + 1) + nbar)
            rows.append(rot.coefficients(n_, nbar))
        shells.append((np.asarray(idx), np.vstack(rows)))

    pref = -params.omega**3 / _SQRT2
    M = np.zeros((dim, dim))
    for N in range(0, 2 * nm + 1):
        idxN, RN = shells[N]
        for Np in range(N % 2, N + 1, 2):  # same parity, Np <= N
            idxP, RP = shells[Np]
            dN = N - Np
            a = np.arange(dN, N + 1)
            vd = T[a, a - dN]
            block = pref * ((RN[:, dN:] * vd) @ RP.T)
            if Np == N:
                block = np.triu(block) + np.triu(block, 1).T
                M[np.ix_(idxN, idxP)] = block
            else:
                M[np.ix_(idxN, idxP)] = block
                M[np.ix_(idxP, idxN)] = block.T
    return M
