"""How well a weakly transmitting beamsplitter displaces a single photon.

A photon reflected off a mirror of transmission T, while a coherent beam
alpha_in leaks through it, leaves close to D(sqrt(T) alpha_in)|1>.  The exact
output is computed in a two-mode Fock basis and compared with that ideal.

    python demos/beamsplitter_displacement.py
"""

import math

from dfstomo.states import beamsplitter_reduced_state, displacement_matrix, fidelity

target = 0.60
print("    T        alpha_in   fidelity   1 - T")
for T in (1e-1, 1e-2, 1e-3, 1e-4):
    alpha_in = target / math.sqrt(T)
    rho = beamsplitter_reduced_state(T, alpha_in, 1, 40)
    f = fidelity(rho, displacement_matrix(target, 64)[:40, 1])
    print(f"{T:8.0e}  {alpha_in:9.2f}   {f:.6f}   {1 - T:.6f}")
