#!/usr/bin/env python3
"""Tour of the basic ingredients: dimensionless parameters, the softened
clone-interaction potential, and the closed-form ground-state expectation.

Everything is in Planck units (hbar = 1); energies print in units of the
mode quantum hbar*omega.
"""
import numpy as np

from gravmode import (
    QuadratureSpec,
    integrate_2d,
    make_params,
    mean_potential_closed_form,
    potential,
)

# A mode at a tenth of the Planck frequency, regularized at one Planck length.
p = make_params(0.1, 1.0)
print("parameters:", p)

# The interaction is bounded at contact by -mu^2/lc and decays like 1/s.
s = np.array([0.0, 0.5, 1.0, 2.0, 5.0, 20.0])
print("\nseparation   potential")
for si, ui in zip(s, potential(s, p)):
    print(f"{si:10.2f}   {ui:+.6e}")

# Closed-form mean interaction in the uncoupled ground state, swept in omega.
# The omega^2 log(1/omega) suppression is why laboratory-frequency modes
# keep their coherence: the numbers are astronomically small long before
# omega ~ 1e-33 (a GHz-scale mode).
print("\nomega        <U>/(hbar omega)")
for omega in (1e-33, 1e-6, 1e-3, 0.1, 0.5, 1.0):
    val = mean_potential_closed_form(make_params(omega, 1.0))
    print(f"{omega:9.0e}   {val:+.6e}")

# The closed form agrees with brute-force integration of the defining
# double integral (here in coordinates scaled by the ground-state width).
scale = p.beta * np.sqrt(2.0)


def integrand(y, yb):
    weight = np.exp(-y * y - yb * yb) / np.pi
    return weight * potential(scale * (y - yb), p)


spec = QuadratureSpec(scheme="tanh_sinh", tol=1e-11)
val, err = integrate_2d(integrand, spec, window=((-9, 9), (-9, 9)),
                        inner_split=lambda y: y)
print(f"\nquadrature check: {val / p.omega:+.12e}  (indicator {err:.1e})")
print(f"closed form     : {mean_potential_closed_form(p):+.12e}")
