"""First-order ground state of the coupled mode/clone pair and the
reduced state of the mode after the clone is traced out.

The unnormalized expansion coefficients gamma[n, nbar] (gamma[0, 0] = 1)
are kept alongside their factored form gamma = omega^2 * resid, where the
residual matrix is O(log) for any omega.  Purity and fidelity deficits
are assembled from the residuals with compensated summation, never as
1 minus a double near 1, so they remain meaningful far below machine
epsilon (log10 values are carried alongside and stay finite even when
the deficit itself underflows a double).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from .core import ModeParams, TruncationSpec
from .coupling import (
    kernel_element_tanh_sinh,
    mean_potential_closed_form,
    potential_kernel_column,
)
from .specfun import QuadratureSpec

__all__ = [
    "GammaMatrix",
    "DensityMatrix",
    "Deficits",
    "ModeReport",
    "build_gamma",
    "reduce_density",
    "purity",
    "purity_from_gamma",
    "fidelity",
    "deficits",
    "ground_state_energy",
    "mode_report",
    "report_from_gamma",
]

_LN10 = math.log(10.0)


@dataclass(frozen=True)
class GammaMatrix:
    """Unnormalized first-order coefficients on the truncated grid.

    gamma : (n_max+1)^2 matrix, gamma[0, 0] = 1, zero on odd n+nbar
    resid : gamma / omega^2 off (0, 0) (resid[0, 0] = 0); the factored
            form used for deficit assembly at small omega
    scale : omega^2
    z     : normalization Z = sqrt(sum gamma^2) >= 1
    converged : half-versus-full truncation check passed
    """

    gamma: np.ndarray
    resid: np.ndarray
    scale: float
    z: float
    n_max: int
    converged: bool
    params: ModeParams


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced state of the mode in its own Fock basis (real symmetric,
    unit trace, zero on odd n+n')."""

    rho: np.ndarray


class Deficits(NamedTuple):
    one_minus_eta: float
    one_minus_fidelity: float
    log10_one_minus_eta: float
    log10_one_minus_fidelity: float


def _fsum(arr) -> float:
    return math.fsum(np.asarray(arr, dtype=float).ravel().tolist())


def build_gamma(params: ModeParams, trunc: TruncationSpec | None = None,
                spec: QuadratureSpec | None = None) -> GammaMatrix:
    """Fill the first-order coefficient matrix over {0..n_max}^2.

    Every even-shell entry is the rotated one-dimensional reduction
    gamma = omega^2 * R(n,nbar) * T[n+nbar,0] / (sqrt2 (n+nbar)); odd
    shells are exact parity zeros.  Convergence is assessed by comparing
    the coefficient sums (total, off-row-0, interior) on the n_max//2
    submatrix against the full matrix; failure is flagged in the result,
    never silently dropped.
    """
    trunc = trunc or TruncationSpec()
    spec = spec or QuadratureSpec()
    nm = trunc.n_max
    if spec.scheme == "tanh_sinh":
        tcol = np.zeros(2 * nm + 1)
        for N in range(2, 2 * nm + 1, 2):
            tcol[N] = kernel_element_tanh_sinh(N, 0, params.chi, min(spec.tol, 1e-12))
    else:
        tcol = potential_kernel_column(params.chi, 2 * nm, tol=spec.tol)

    n = np.arange(nm + 1)
    N = n[:, None] + n[None, :]
    logc = gammaln(N + 1) - gammaln(n + 1)[:, None] - gammaln(n + 1)[None, :]
    sign = np.where(n[None, :] % 2 == 0, 1.0, -1.0)
    rot = sign * np.exp(0.5 * logc - 0.5 * N * math.log(2.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        resid = rot * tcol[N] / (math.sqrt(2.0) * N)
    resid[0, 0] = 0.0
    resid[N % 2 == 1] = 0.0

    scale = params.omega**2
    gamma = scale * resid
    gamma[0, 0] = 1.0

    converged = True
    h = nm // 2
    for lo_r, lo_c in ((0, 0), (1, 0), (1, 1)):  # total, off-row-0, interior
        full = _fsum(resid[lo_r:, lo_c:] ** 2)
        half = _fsum(resid[lo_r:h + 1, lo_c:h + 1] ** 2)
        if full > 0.0 and abs(full - half) > trunc.tol * full:
            converged = False
    s = scale * scale * _fsum(resid * resid)
    z = math.sqrt(1.0 + s)
    gamma.setflags(write=False)
    resid.setflags(write=False)
    return GammaMatrix(gamma=gamma, resid=resid, scale=scale, z=z,
                       n_max=nm, converged=converged, params=params)


def reduce_density(g: GammaMatrix) -> DensityMatrix:
    """Trace out the clone: rho = (gamma gamma^T) / Z^2 (unit trace)."""
    rho = (g.gamma @ g.gamma.T) / (g.z * g.z)
    rho = np.triu(rho) + np.triu(rho, 1).T
    rho.setflags(write=False)
    return DensityMatrix(rho=rho)


def purity(dm: DensityMatrix) -> float:
    """eta = sum of squared density-matrix elements = Tr(rho^2)."""
    rho = dm.rho if isinstance(dm, DensityMatrix) else np.asarray(dm)
    return _fsum(rho * rho)


def purity_from_gamma(g: GammaMatrix) -> float:
    """Same purity through the unnormalized route
    Tr[(gamma gamma^T)^2] / [Tr(gamma gamma^T)]^2 (dual-path check)."""
    A = g.gamma @ g.gamma.T
    return _fsum(A * A) / _fsum(g.gamma * g.gamma) ** 2


def fidelity(dm: DensityMatrix) -> float:
    """Overlap of the reduced state with the uncoupled ground state: rho[0, 0]."""
    return float(dm.rho[0, 0])


def deficit_core(alpha: float, resid: np.ndarray, scale: float) -> Deficits:
    """Deficits of the reduced state of the coefficient matrix
    alpha*E00 + scale*resid (resid[0, 0] must be 0).

    Uses the exact expansions

        1-F   = scale^2 D_F / (alpha^2 + s),         D_F = sum_{n>=1} resid^2
        1-eta = scale^2 D_eta / (alpha^2 + s)^2,
        D_eta = 2 alpha^2 D_int + scale^2 (sigma^2 - |R R^T|_F^2)
                - 4 alpha scale (c0^T R r0)

    with s = scale^2 sigma, D_int the interior (n, nbar >= 1) sum, c0 the
    first column and r0 the first row of resid (equal for the symmetric
    matrices produced here).  Every term is a small quantity; nothing is
    ever subtracted from 1, and the log10 values are computed from the
    factored pieces so they stay finite when the deficit underflows.
    """
    R = np.asarray(resid, dtype=float)
    if R[0, 0] != 0.0:
        raise ValueError("resid[0, 0] must be zero")
    sigma = _fsum(R * R)
    d_f = _fsum(R[1:, :] ** 2)
    d_int = _fsum(R[1:, 1:] ** 2)
    B = R @ R.T
    trB2 = _fsum(B * B)
    cross = float(R[:, 0] @ R @ R[0, :])
    a2 = alpha * alpha
    s = scale * scale * sigma
    tr = a2 + s

    d_eta = 2.0 * a2 * d_int + scale * scale * (sigma * sigma - trB2) \
        - 4.0 * alpha * scale * cross
    d_eta = max(d_eta, 0.0)

    one_minus_f = scale * scale * d_f / tr
    one_minus_eta = scale * scale * d_eta / (tr * tr)
    log_tr = 2.0 * math.log(abs(alpha)) + math.log1p(s / a2)
    if d_f > 0.0:
        l10_f = (2.0 * math.log(scale) + math.log(d_f) - log_tr) / _LN10
    else:
        l10_f = -math.inf
    if d_eta > 0.0:
        l10_eta = (2.0 * math.log(scale) + math.log(d_eta) - 2.0 * log_tr) / _LN10
    else:
        l10_eta = -math.inf
    return Deficits(one_minus_eta, one_minus_f, l10_eta, l10_f)


def deficits(g: GammaMatrix) -> Deficits:
    """Purity and fidelity deficits (1-eta, 1-F) of the mode, factored
    and compensated so they are meaningful down to ~1e-300 directly and
    to arbitrarily small values through the log10 fields."""
    return deficit_core(1.0, g.resid, g.scale)


def ground_state_energy(params: ModeParams) -> float:
    """Perturbed ground-state energy in units of hbar*omega:
    1 - (omega^2/sqrt(2 pi)) e^chi K0(chi)."""
    return 1.0 + mean_potential_closed_form(params)


@dataclass(frozen=True)
class ModeReport:
    """Single-point result bundle (all energies in units of hbar*omega)."""

    params: ModeParams
    eta: float
    fidelity: float
    one_minus_eta: float
    one_minus_fidelity: float
    log10_one_minus_eta: float
    log10_one_minus_fidelity: float
    z_squared: float
    e00_over_hbar_omega: float
    n_max: int
    converged: bool

    def row_dict(self) -> dict:
        """Flat mapping with the sweep-output field names."""
        return {
            "omega_over_planck": self.params.omega,
            "lc_over_planck": self.params.lc,
            "one_minus_eta": self.one_minus_eta,
            "log10_one_minus_eta": self.log10_one_minus_eta,
            "one_minus_fidelity": self.one_minus_fidelity,
            "log10_one_minus_fidelity": self.log10_one_minus_fidelity,
            "z_squared": self.z_squared,
            "e00_over_hbar_omega": self.e00_over_hbar_omega,
            "n_max": self.n_max,
            "converged": self.converged,
        }


def report_from_gamma(g: GammaMatrix) -> ModeReport:
    d = deficits(g)
    return ModeReport(
        params=g.params,
        eta=1.0 - d.one_minus_eta,
        fidelity=1.0 - d.one_minus_fidelity,
        one_minus_eta=d.one_minus_eta,
        one_minus_fidelity=d.one_minus_fidelity,
        log10_one_minus_eta=d.log10_one_minus_eta,
        log10_one_minus_fidelity=d.log10_one_minus_fidelity,
        z_squared=g.z * g.z,
        e00_over_hbar_omega=ground_state_energy(g.params),
        n_max=g.n_max,
        converged=g.converged,
    )


def mode_report(params: ModeParams, trunc: TruncationSpec | None = None,
                spec: QuadratureSpec | None = None) -> ModeReport:
    """Full single-point evaluation: coefficients, deficits, energy."""
    return report_from_gamma(build_gamma(params, trunc, spec))
