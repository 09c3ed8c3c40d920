"""Dimensionless problem definition in Planck units.

Everything runs in geometric units with G = c = 1 and hbar = 1, so the
Planck mass, length and time are all unity and a mode is fully specified
by two ratios: its frequency omega (in units of the Planck frequency)
and the regularization length lc (in units of the Planck length).
Energies reported downstream are in units of the mode quantum hbar*omega.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["ModeParams", "TruncationSpec", "make_params"]


@dataclass(frozen=True)
class ModeParams:
    """Immutable dimensionless parameter set for one mode/clone pair.

    omega : mode frequency over the Planck frequency
    lc    : regularization length over the Planck length
    beta  : ground-state width, 1/(omega*sqrt(2))
    mu    : energy scale of the mode (= omega, since hbar = 1)
    chi   : kernel argument lc^2/(8 beta^2) = (lc*omega)^2/4
    """

    omega: float
    lc: float
    beta: float
    mu: float
    chi: float


def make_params(omega: float, lc: float) -> ModeParams:
    """Build a ModeParams with derived fields from (omega, lc).

    Raises ValueError for non-positive or non-finite inputs, or when a
    derived field would leave the representable range (e.g. chi
    underflowing to zero for absurdly small omega*lc).
    """
    omega = float(omega)
    lc = float(lc)
    if not (math.isfinite(omega) and omega > 0.0):
        raise ValueError(f"omega must be a positive finite number, got {omega!r}")
    if not (math.isfinite(lc) and lc > 0.0):
        raise ValueError(f"lc must be a positive finite number, got {lc!r}")
    beta = 1.0 / (omega * math.sqrt(2.0))
    mu = omega
    chi = (lc * omega) ** 2 / 4.0
    if not (math.isfinite(beta) and chi > 0.0 and math.isfinite(chi)):
        raise ValueError(
            f"derived parameters out of range for omega={omega!r}, lc={lc!r}"
        )
    return ModeParams(omega=omega, lc=lc, beta=beta, mu=mu, chi=chi)


@dataclass(frozen=True)
class TruncationSpec:
    """Fock-basis cutoff (states 0..n_max per mode) and the relative
    tolerance used by half-versus-full truncation convergence checks.

    The truncation tail of the coefficient sums decays only polynomially
    when lc*omega << 1, so the default tolerance reflects the actual
    truncation error at n_max = 64 (a few 1e-4 relative) with margin.
    """

    n_max: int = 64
    tol: float = 5e-3

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 2:
            raise ValueError(f"n_max must be an integer >= 2, got {self.n_max!r}")
        if not (self.tol > 0.0 and math.isfinite(self.tol)):
            raise ValueError(f"tol must be positive and finite, got {self.tol!r}")
