"""Radial Wigner functions of states without a phase reference.

Vacuum and the undisplaced single-photon mixture carry no information about
the local-oscillator phase, so their records are treated as phase-averaged and
the Wigner function is recovered by inverse Abel transformation of the
quadrature density.

    python demos/phase_averaged_states.py
"""

import math

from dfstomo.errors import PhaseIndeterminateError
from dfstomo.homodyne_sim import AcquisitionConfig, run_acquisition, vacuum_calibration_run
from dfstomo.states import StateModel, wigner_analytic
from dfstomo.tomography import assign_phases, reconstruct_wigner_abel, scale_to_vacuum

for state in (StateModel.vacuum(), StateModel.displaced_mix(0.0, 0.62)):
    config = AcquisitionConfig(state, 1_000_000, theta_step=0.0, seed=3)
    run, _ = run_acquisition(config)
    x = scale_to_vacuum(run, vacuum_calibration_run(config))
    try:
        assign_phases(x)
    except PhaseIndeterminateError as exc:
        print(f"\n{state.to_text()}: {exc}")

    prof = reconstruct_wigner_abel(x)
    print(f"bandwidth {prof.bandwidth:.3f}, normalization {prof.normalization():.4f}")
    print("   r      W_rec    W_model")
    for r, w in list(zip(prof.r, prof.w))[::8]:
        print(f"{r:5.2f}  {w:8.4f}  {wigner_analytic(state, r, 0.0):8.4f}")
    print(f"W(0) = {prof.w[0]:.4f}; model {wigner_analytic(state, 0.0, 0.0):.4f}; 1/pi = {1 / math.pi:.4f}")
